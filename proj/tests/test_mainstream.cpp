// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "csrec/mainstream.hpp"
#include "csrec/metrics.hpp"

using namespace csrec;
using corpus::ItemId;
using fm::FmModel;

namespace {

using Sets = std::vector<std::vector<ItemId>>;

double brute_jaccard(const std::vector<ItemId>& a, const std::vector<ItemId>& b) {
    std::set<ItemId> sa(a.begin(), a.end()), sb(b.begin(), b.end()), un = sa;
    un.insert(sb.begin(), sb.end());
    std::size_t inter = 0;
    for (auto i : sa) inter += sb.count(i);
    return un.empty() ? 0.0 : double(inter) / double(un.size());
}

Sets random_sets(std::size_t n_users, std::uint32_t n_items, std::mt19937_64& gen) {
    Sets sets(n_users);
    for (auto& s : sets) {
        std::set<ItemId> chosen;
        const std::size_t sz = 1 + gen() % (n_items / 2);
        while (chosen.size() < sz) chosen.insert(ItemId(gen() % n_items));
        s.assign(chosen.begin(), chosen.end());
    }
    return sets;
}

}  // namespace

TEST_CASE("sim_scores") {
    SUBCASE("two identical users score 1") {
        auto scores = mainstream::sim_scores({{1, 2, 3}, {1, 2, 3}});
        CHECK(scores.score[0] == doctest::Approx(1.0));
        CHECK(scores.score[1] == doctest::Approx(1.0));
    }
    SUBCASE("overlap 2 of union 4 scores 0.5 each") {
        auto scores = mainstream::sim_scores({{1, 2, 3}, {2, 3, 4}});
        CHECK(scores.score[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(scores.score[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("single user rejected") {
        CHECK_THROWS_AS(mainstream::sim_scores({{1, 2}}), DataError);
    }
    SUBCASE("matches the pairwise brute-force oracle exactly") {
        std::mt19937_64 gen(13);
        auto sets = random_sets(5, 20, gen);
        auto scores = mainstream::sim_scores(sets);
        for (std::size_t u = 0; u < sets.size(); ++u) {
            double sum = 0.0;
            for (std::size_t v = 0; v < sets.size(); ++v)
                if (v != u) sum += brute_jaccard(sets[u], sets[v]);
            CHECK(scores.score[u] == doctest::Approx(sum / 4.0).epsilon(1e-15));
        }
    }
    SUBCASE("permutation equivariance") {
        std::mt19937_64 gen(14);
        auto sets = random_sets(8, 25, gen);
        auto base = mainstream::sim_scores(sets);
        std::vector<std::size_t> perm(sets.size());
        std::iota(perm.begin(), perm.end(), std::size_t(0));
        std::shuffle(perm.begin(), perm.end(), gen);
        Sets shuffled(sets.size());
        for (std::size_t u = 0; u < sets.size(); ++u) shuffled[u] = sets[perm[u]];
        auto moved = mainstream::sim_scores(shuffled);
        // summation order over comparison users changes under the relabeling
        for (std::size_t u = 0; u < sets.size(); ++u)
            CHECK(moved.score[u] == doctest::Approx(base.score[perm[u]]).epsilon(1e-13));
    }
    SUBCASE("subsample mode is deterministic and in range") {
        std::mt19937_64 gen(15);
        auto sets = random_sets(30, 40, gen);
        mainstream::SimOptions opts;
        opts.exact_threshold = 10;  // force subsampling
        opts.sample_size = 8;
        opts.seed = 5;
        auto a = mainstream::sim_scores(sets, opts);
        auto b = mainstream::sim_scores(sets, opts);
        CHECK(a.score == b.score);
        for (double s : a.score) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("dis_scores") {
    SUBCASE("identical users are parallel to the mean: score 1") {
        auto scores = mainstream::dis_scores({{0, 3, 5}, {0, 3, 5}, {0, 3, 5}}, 8);
        for (double s : scores.score) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("disjoint singletons score 1/sqrt(2)") {
        auto scores = mainstream::dis_scores({{0}, {1}}, 2);
        CHECK(scores.score[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(scores.score[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("matches the dense-vector cosine oracle") {
        std::mt19937_64 gen(16);
        const std::uint32_t n_items = 15;
        auto sets = random_sets(6, n_items, gen);
        auto scores = mainstream::dis_scores(sets, n_items);
        std::vector<double> mean(n_items, 0.0);
        for (const auto& s : sets)
            for (auto i : s) mean[i] += 1.0 / double(sets.size());
        for (std::size_t u = 0; u < sets.size(); ++u) {
            std::vector<double> b(n_items, 0.0);
            for (auto i : sets[u]) b[i] = 1.0;
            double dot = 0, nb = 0, nm = 0;
            for (std::uint32_t i = 0; i < n_items; ++i) {
                dot += b[i] * mean[i];
                nb += b[i] * b[i];
                nm += mean[i] * mean[i];
            }
            CHECK(scores.score[u] ==
                  doctest::Approx(dot / std::sqrt(nb * nm)).epsilon(1e-12));
            CHECK(scores.score[u] >= 0.0);
            CHECK(scores.score[u] <= 1.0 + 1e-12);
        }
    }
    SUBCASE("empty user rejected") {
        CHECK_THROWS_AS(mainstream::dis_scores({{0}, {}}, 2), DataError);
    }
}

TEST_CASE("util_scores") {
    SUBCASE("perfect ranking scores 1") {
        FmModel m(1, 10, 1);
        std::vector<std::vector<ItemId>> relevant = {{2, 4}};
        std::vector<std::vector<ItemId>> candidates = {{0, 1, 2, 3, 4, 5, 6}};
        m.vrow(m.user_feature(0))[0] = 1.0;
        for (ItemId i : relevant[0]) m.vrow(m.item_feature(i))[0] = 5.0;
        auto scores = mainstream::util_scores(m, candidates, relevant);
        CHECK(scores.score[0] == doctest::Approx(1.0));
        CHECK(scores.excluded == 0);
    }
    SUBCASE("one relevant item ranked 2nd of 500") {
        FmModel m(1, 500, 1);
        std::vector<std::vector<ItemId>> candidates(1);
        for (ItemId i = 0; i < 500; ++i) candidates[0].push_back(i);
        std::vector<std::vector<ItemId>> relevant = {{10}};
        m.vrow(m.user_feature(0))[0] = 1.0;
        m.vrow(m.item_feature(7))[0] = 9.0;   // rank 1
        m.vrow(m.item_feature(10))[0] = 8.0;  // rank 2
        auto scores = mainstream::util_scores(m, candidates, relevant);
        CHECK(scores.score[0] == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
    }
    SUBCASE("zero model matches the brute-force tie-broken order, recomputation bit-identical") {
        FmModel m(2, 9, 2);
        std::vector<std::vector<ItemId>> candidates = {{8, 2, 6, 0}, {1, 3, 5, 7}};
        std::vector<std::vector<ItemId>> relevant = {{6}, {3, 7}};
        auto a = mainstream::util_scores(m, candidates, relevant);
        auto b = mainstream::util_scores(m, candidates, relevant);
        CHECK(a.score == b.score);
        std::vector<ItemId> order0 = {0, 2, 6, 8};  // ascending ids under ties
        CHECK(a.score[0] == metrics::ndcg(order0, relevant[0]));
    }
    SUBCASE("users with no validation items are excluded with a count") {
        FmModel m(2, 4, 1);
        std::vector<std::vector<ItemId>> candidates = {{0, 1}, {2, 3}};
        std::vector<std::vector<ItemId>> relevant = {{}, {2}};
        auto scores = mainstream::util_scores(m, candidates, relevant);
        CHECK(scores.excluded == 1);
        CHECK(std::isnan(scores.score[0]));
    }
}

TEST_CASE("standardize") {
    SUBCASE("symmetric triple") {
        auto out = mainstream::standardize({1.0, 2.0, 3.0});
        CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(out[1] == doctest::Approx(0.0));
        CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("constant scores rejected") {
        CHECK_THROWS_WITH_AS(mainstream::standardize({2.0, 2.0, 2.0}),
                             doctest::Contains("degenerate"), DataError);
    }
    SUBCASE("moments verified post-hoc") {
        std::mt19937_64 gen(18);
        std::normal_distribution<double> dist(3.0, 7.0);
        std::vector<double> scores(200);
        for (auto& s : scores) s = dist(gen);
        auto out = mainstream::standardize(scores);
        double mean = 0;
        for (double v : out) mean += v;
        mean /= double(out.size());
        double ss = 0;
        for (double v : out) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / double(out.size() - 1));
        CHECK(std::abs(mean) < 1e-12);
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    }
}
