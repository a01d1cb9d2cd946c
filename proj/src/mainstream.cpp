// SPDX-License-Identifier: Apache-2.0
#include "csrec/mainstream.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "csrec/metrics.hpp"

namespace csrec::mainstream {

std::string method_name(Method m) {
    switch (m) {
        case Method::Sim: return "Sim";
        case Method::Dis: return "Dis";
        case Method::Util: return "Util";
    }
    throw ConfigError("unknown mainstreamness method");
}

Method method_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s += char(std::tolower(static_cast<unsigned char>(c)));
    if (s == "sim") return Method::Sim;
    if (s == "dis") return Method::Dis;
    if (s == "util") return Method::Util;
    throw ConfigError("unknown mainstreamness method: " + name + " (expected Sim, Dis or Util)");
}

namespace {

double jaccard(const std::vector<ItemId>& a, const std::vector<ItemId>& b) {
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

std::vector<std::vector<ItemId>> sorted_copy(const std::vector<std::vector<ItemId>>& sets) {
    auto out = sets;
    for (auto& s : out) std::sort(s.begin(), s.end());
    return out;
}

}  // namespace

Scores sim_scores(const std::vector<std::vector<ItemId>>& train_sets, const SimOptions& opts) {
    const std::size_t n = train_sets.size();
    if (n < 2) throw DataError("sim_scores: need at least two users");
    const auto sets = sorted_copy(train_sets);

    Scores out;
    out.method = Method::Sim;
    out.score.assign(n, 0.0);
    if (n <= opts.exact_threshold) {
        for (std::size_t u = 0; u < n; ++u) {
            double sum = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u) continue;
                sum += jaccard(sets[u], sets[v]);
            }
            out.score[u] = sum / double(n - 1);
        }
        out.metadata = "mode=exact";
        return out;
    }

    const std::size_t sample = std::min(opts.sample_size, n - 1);
    for (std::size_t u = 0; u < n; ++u) {
        auto gen = rng::engine(opts.seed, {rng::kSimSubsample, std::uint64_t(u)});
        double sum = 0.0;
        if (sample == n - 1) {
            for (std::size_t v = 0; v < n; ++v)
                if (v != u) sum += jaccard(sets[u], sets[v]);
        } else {
            // sample comparison users from {0..n-1} \ {u} without replacement
            std::vector<std::size_t> pool;  // partial Fisher-Yates over implicit range
            pool.resize(n - 1);
            std::iota(pool.begin(), pool.end(), std::size_t(0));
            for (auto& p : pool)
                if (p >= u) ++p;
            for (std::size_t j = 0; j < sample; ++j) {
                std::uniform_int_distribution<std::size_t> d(j, pool.size() - 1);
                std::swap(pool[j], pool[d(gen)]);
                sum += jaccard(sets[u], sets[pool[j]]);
            }
        }
        out.score[u] = sum / double(sample);
    }
    out.metadata = "mode=subsample;size=" + std::to_string(sample);
    return out;
}

Scores dis_scores(const std::vector<std::vector<ItemId>>& train_sets, std::uint32_t n_items) {
    if (train_sets.empty()) throw DataError("dis_scores: no users");
    std::vector<double> count(n_items, 0.0);
    for (const auto& set : train_sets) {
        if (set.empty()) throw DataError("dis_scores: user with no items");
        for (ItemId i : set) {
            if (i >= n_items) throw DataError("dis_scores: item id out of range");
            count[i] += 1.0;
        }
    }
    double norm_sq = 0.0;
    for (double c : count) norm_sq += c * c;
    if (norm_sq == 0.0) throw DataError("dis_scores: zero-norm mean vector");
    const double norm = std::sqrt(norm_sq);

    // cosine(b_u, mean) = sum_{i in I_u} count_i / (sqrt(|I_u|) * |count|);
    // the 1/|U| scaling of the mean vector cancels.
    Scores out;
    out.method = Method::Dis;
    out.score.reserve(train_sets.size());
    for (const auto& set : train_sets) {
        double s = 0.0;
        for (ItemId i : set) s += count[i];
        out.score.push_back(s / (std::sqrt(double(set.size())) * norm));
    }
    return out;
}

Scores util_scores(const fm::FmModel& model,
                   const std::vector<std::vector<ItemId>>& val_candidates,
                   const std::vector<std::vector<ItemId>>& val_relevant) {
    Scores out;
    out.method = Method::Util;
    out.score = metrics::evaluate_model(model, val_candidates, val_relevant,
                                        metrics::RankMetric::ndcg, &out.excluded);
    return out;
}

std::vector<double> standardize(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    if (n < 2) throw DataError("standardize: need at least two scores");
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= double(n);
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / double(n - 1));
    if (sd == 0.0) throw DataError("standardize: degenerate scores (zero variance)");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (scores[i] - mean) / sd;
    return out;
}

}  // namespace csrec::mainstream
