// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "csrec/io.hpp"
#include "csrec/synthetic.hpp"

using namespace csrec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("csrec_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

io::Header test_header() { return {{"tool", "csrec"}, {"command", "test"}}; }

}  // namespace

TEST_CASE("fmt_double round-trips doubles losslessly") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> dist(0.0, 1e3);
    for (int t = 0; t < 1000; ++t) {
        const double v = dist(gen) * std::pow(10.0, int(gen() % 30) - 15);
        CHECK(std::stod(io::fmt_double(v)) == v);
    }
    CHECK(io::fmt_double(std::nan("")) == "nan");
}

TEST_CASE("atomic_write + header parsing") {
    TempDir tmp;
    const auto path = tmp.path / "sub" / "file.tsv";
    io::atomic_write(path, io::render_header(test_header()) + "a\t1\n");
    CHECK(fs::exists(path));
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    auto header = io::read_header(path);
    CHECK(header.at("tool") == "csrec");
    CHECK(header.at("command") == "test");
    CHECK(io::file_hash(path) == io::file_hash(path));
}

TEST_CASE("manifest and candidates round-trip") {
    synthetic::SyntheticConfig sc;
    sc.n_users = 40;
    sc.popular_pool = 60;
    sc.niche_item_space = 120;
    sc.niche_pool = 30;
    sc.mainstream_min_activity = 16;
    sc.mainstream_max_activity = 24;
    sc.niche_max_activity = 24;
    auto log = synthetic::generate(sc);

    corpus::SplitConfig cfg;
    cfg.neg_ratio = 3;
    cfg.candidate_total = 40;
    auto filtered = corpus::filter_and_truncate(log, cfg);
    auto ds = corpus::split(filtered, cfg);
    ds.neg_ratio = cfg.neg_ratio;
    ds.val_candidates = corpus::build_candidates(ds, corpus::EvalSide::val, cfg);
    ds.test_candidates = corpus::build_candidates(ds, corpus::EvalSide::test, cfg);

    TempDir tmp;
    const auto manifest = tmp.path / "manifest.tsv";
    const auto cand_val = tmp.path / "cand_val.tsv";
    const auto cand_test = tmp.path / "cand_test.tsv";
    io::write_manifest(manifest, filtered, ds, test_header());
    io::write_candidates(cand_val, filtered, ds.val_candidates, corpus::EvalSide::val,
                         test_header());
    io::write_candidates(cand_test, filtered, ds.test_candidates, corpus::EvalSide::test,
                         test_header());

    auto loaded = io::load_prepared(manifest, cand_val, cand_test);
    REQUIRE(loaded.split.n_users == ds.n_users);
    CHECK(loaded.split.n_items == ds.n_items);
    CHECK(loaded.split.neg_ratio == 3);

    // compare by external ids: dense item ids may legitimately differ
    auto names = [](const corpus::IdMap& items, const std::vector<corpus::ItemId>& v) {
        std::vector<std::string> out;
        for (auto i : v) out.push_back(items.name(i));
        return out;
    };
    for (corpus::UserId u = 0; u < ds.n_users; ++u) {
        CHECK(loaded.users.name(u) == filtered.users.name(u));
        auto sorted_names = [&](const corpus::IdMap& m, std::vector<corpus::ItemId> v) {
            auto n = names(m, v);
            std::sort(n.begin(), n.end());
            return n;
        };
        CHECK(sorted_names(loaded.items, loaded.split.train[u]) ==
              sorted_names(filtered.items, ds.train[u]));
        CHECK(sorted_names(loaded.items, loaded.split.val[u]) ==
              sorted_names(filtered.items, ds.val[u]));
        CHECK(sorted_names(loaded.items, loaded.split.test[u]) ==
              sorted_names(filtered.items, ds.test[u]));
        // candidate lists preserve their order exactly
        CHECK(names(loaded.items, loaded.split.val_candidates[u]) ==
              names(filtered.items, ds.val_candidates[u]));
        CHECK(names(loaded.items, loaded.split.test_candidates[u]) ==
              names(filtered.items, ds.test_candidates[u]));
    }
}

TEST_CASE("model checkpoint round-trip is lossless") {
    fm::TrainConfig cfg;
    cfg.k = 8;
    cfg.seed = 42;
    cfg.init_scale = 0.37;
    auto model = fm::FmModel::init(7, 11, cfg);

    TempDir tmp;
    const auto path = tmp.path / "model.txt";
    io::save_model(path, model, cfg, test_header());
    auto loaded = io::load_model(path);
    CHECK(loaded.model.n_users() == 7);
    CHECK(loaded.model.n_items() == 11);
    CHECK(loaded.model.k() == 8);
    CHECK(loaded.cfg.seed == 42);
    CHECK(loaded.cfg.init_scale == 0.37);
    REQUIRE(loaded.model.n_params() == model.n_params());
    for (std::size_t i = 0; i < model.n_params(); ++i)
        CHECK(loaded.model.params()[i] == model.params()[i]);  // bit-exact
}

TEST_CASE("score, weight and eval files") {
    corpus::IdMap users;
    users.intern("alice");
    users.intern("bob");
    users.intern("carol");
    TempDir tmp;

    SUBCASE("scores round-trip with metadata") {
        mainstream::Scores scores;
        scores.method = mainstream::Method::Util;
        scores.score = {0.25, 1.0 / 3.0, 0.875};
        scores.metadata = "source_model=x;model_hash=abc";
        const auto path = tmp.path / "scores.tsv";
        io::write_scores(path, users, scores, test_header());
        auto loaded = io::load_scores(path, users);
        CHECK(loaded.method == "Util");
        CHECK(loaded.score == scores.score);
        CHECK(loaded.header.at("metadata") == scores.metadata);
    }
    SUBCASE("score file with a missing user is rejected") {
        const auto path = tmp.path / "partial.tsv";
        io::atomic_write(path, "alice\tSim\t0.5\nbob\tSim\t0.25\n");
        CHECK_THROWS_WITH_AS(io::load_scores(path, users), doctest::Contains("carol"), DataError);
    }
    SUBCASE("external method tags (Den, Deep) are importable") {
        const auto path = tmp.path / "den.tsv";
        io::atomic_write(path, "alice\tDen\t0.5\nbob\tDen\t0.25\ncarol\tDen\t0.125\n");
        auto loaded = io::load_scores(path, users);
        CHECK(loaded.method == "Den");
    }
    SUBCASE("weights round-trip") {
        const std::vector<double> w = {1.5, 0.25, 3.75};
        const auto path = tmp.path / "weights.tsv";
        io::write_weights(path, users, w, test_header());
        CHECK(io::load_weights(path, users) == w);
    }
    SUBCASE("eval files preserve NaN waiver entries") {
        const std::vector<double> v = {0.5, std::nan(""), 0.75};
        const auto path = tmp.path / "eval.tsv";
        io::write_eval(path, users, v, test_header());
        auto loaded = io::load_eval(path);
        REQUIRE(loaded.value.size() == 3);
        CHECK(loaded.user[1] == "bob");
        CHECK(std::isnan(loaded.value[1]));
        CHECK(loaded.value[2] == 0.75);
    }
}
