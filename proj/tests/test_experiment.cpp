// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "csrec/experiment.hpp"
#include "csrec/metrics.hpp"

using namespace csrec;
namespace fs = std::filesystem;
using exp::ExperimentConfig;
using exp::Paths;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("csrec_exp_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// desk-scale config: tiny model, few epochs, 60 synthetic users
ExperimentConfig tiny_config(const fs::path& outdir) {
    ExperimentConfig cfg;
    cfg.use_synthetic = true;
    cfg.synth.n_users = 60;
    cfg.synth.popular_pool = 60;
    cfg.synth.niche_item_space = 150;
    cfg.synth.niche_pool = 30;
    cfg.synth.mainstream_min_activity = 16;
    cfg.synth.mainstream_max_activity = 26;
    cfg.synth.niche_min_activity = 16;
    cfg.synth.niche_max_activity = 22;
    cfg.split.candidate_total = 60;
    cfg.train.epochs = 2;
    cfg.train.k = 4;
    cfg.train.batch_size = 64;
    cfg.train.lr = 0.01;
    cfg.methods = {"Util"};
    cfg.contrasts = {10};
    cfg.seeds = {1};
    cfg.outdir = outdir;
    return cfg;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("prepare is deterministic: identical manifest hashes across reruns") {
    TempDir a, b;
    auto cfg_a = tiny_config(a.path);
    auto cfg_b = tiny_config(b.path);
    exp::cmd_prepare(cfg_a);
    exp::cmd_prepare(cfg_b);
    const Paths pa(a.path), pb(b.path);
    CHECK(io::file_hash(pa.manifest()) == io::file_hash(pb.manifest()));
    CHECK(io::file_hash(pa.candidates(corpus::EvalSide::val)) ==
          io::file_hash(pb.candidates(corpus::EvalSide::val)));
    CHECK(io::file_hash(pa.candidates(corpus::EvalSide::test)) ==
          io::file_hash(pb.candidates(corpus::EvalSide::test)));
    CHECK(fs::exists(pa.stats()));
}

TEST_CASE("prepare errors on a missing dataset file") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    cfg.use_synthetic = false;
    cfg.dataset = (tmp.path / "missing.tsv").string();
    CHECK_THROWS_WITH_AS(exp::cmd_prepare(cfg), doctest::Contains("missing.tsv"), DataError);
}

TEST_CASE("scoring Util before the baseline exists names the missing checkpoint") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    exp::cmd_prepare(cfg);
    CHECK_THROWS_WITH_AS(exp::cmd_score(cfg, "Util"), doctest::Contains("train-baseline"),
                         DataError);
}

TEST_CASE("train-weighted without a score file names the artifact") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    exp::cmd_prepare(cfg);
    CHECK_THROWS_WITH_AS(exp::cmd_train_weighted(cfg, "Sim", 10),
                         doctest::Contains("score"), DataError);
}

TEST_CASE("end-to-end mini pipeline") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    const Paths paths(tmp.path);

    exp::cmd_prepare(cfg);
    exp::cmd_train_baseline(cfg);
    exp::cmd_score(cfg, "Util");
    exp::cmd_score(cfg, "Sim");
    exp::cmd_score(cfg, "Dis");
    exp::cmd_train_weighted(cfg, "Util", 10);
    exp::cmd_compare(cfg);

    SUBCASE("expected artifacts exist") {
        CHECK(fs::exists(paths.model(paths.baseline_dir(1))));
        CHECK(fs::exists(paths.eval(paths.baseline_dir(1), corpus::EvalSide::test)));
        CHECK(fs::exists(paths.score_file("Util", 1)));
        CHECK(fs::exists(paths.score_file("Sim", 0)));
        CHECK(fs::exists(paths.score_file("Dis", 0)));
        CHECK(fs::exists(paths.weight_file("Util", 10, 1)));
        CHECK(fs::exists(paths.model(paths.weighted_dir("Util", 10, 1))));
        CHECK(fs::exists(paths.report_dir() / "table1.csv"));
        CHECK(fs::exists(paths.report_dir() / "table2.csv"));
        CHECK(fs::exists(paths.report_dir() / "improvement_vs_ndcg.csv"));
        CHECK(fs::exists(paths.report_dir() / "improvement_vs_ndcg_bins.csv"));
    }

    SUBCASE("Util score file row count equals the retained user count") {
        auto prepared = io::load_prepared(paths.manifest(), paths.candidates(corpus::EvalSide::val),
                                          paths.candidates(corpus::EvalSide::test));
        auto scores = io::load_scores(paths.score_file("Util", 1), prepared.users);
        CHECK(scores.score.size() == prepared.users.size());
        CHECK(scores.method == "Util");
    }

    SUBCASE("weight file endpoint ratio audit is recorded") {
        auto header = io::read_header(paths.weight_file("Util", 10, 1));
        const double ratio = std::stod(header.at("endpoint_ratio"));
        CHECK(ratio == doctest::Approx(10.0).epsilon(1e-6));
    }

    SUBCASE("re-running training yields byte-identical eval files") {
        const auto eval_path = paths.eval(paths.baseline_dir(1), corpus::EvalSide::test);
        const auto before = io::file_hash(eval_path);
        exp::cmd_train_baseline(cfg);
        CHECK(io::file_hash(eval_path) == before);
    }

    SUBCASE("compare with treatment == baseline reports all-zero improvements") {
        // forge a weighted run whose evals are the baseline's own
        auto forged = cfg;
        forged.contrasts = {99};
        const auto dir = paths.weighted_dir("Util", 99, 1);
        fs::create_directories(dir);
        fs::copy_file(paths.eval(paths.baseline_dir(1), corpus::EvalSide::test),
                      paths.eval(dir, corpus::EvalSide::test));
        fs::copy_file(paths.eval(paths.baseline_dir(1), corpus::EvalSide::val),
                      paths.eval(dir, corpus::EvalSide::val));
        exp::cmd_compare(forged);
        std::istringstream table(slurp(paths.report_dir() / "table1.csv"));
        std::string line;
        bool saw_weighted_row = false;
        while (std::getline(table, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (line.find("_weighted") == std::string::npos) continue;
            saw_weighted_row = true;
            CHECK(line.substr(line.rfind(',') + 1) == "0");
        }
        CHECK(saw_weighted_row);
    }

    SUBCASE("compare rejects mismatched user sets, listing the difference") {
        const auto eval_path = paths.eval(paths.weighted_dir("Util", 10, 1), corpus::EvalSide::test);
        auto content = slurp(eval_path);
        const auto pos = content.rfind("\nm0\t");
        REQUIRE(pos != std::string::npos);
        content.replace(pos, 4, "\nzz\t");  // rename one user
        io::atomic_write(eval_path, content);
        CHECK_THROWS_WITH_AS(exp::cmd_compare(cfg), doctest::Contains("zz"), DataError);
    }
}

TEST_CASE("corr-study emits one row per cell and is reproducible") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    cfg.study_train = {3};
    cfg.study_valtest = {1, 2};
    exp::cmd_corr_study(cfg);
    const auto path = Paths(tmp.path).report_dir() / "corr_study.csv";
    REQUIRE(fs::exists(path));
    const auto first = slurp(path);
    std::size_t rows = 0;
    std::istringstream ss(first);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#' && line.rfind("seed,", 0) != 0) ++rows;
    CHECK(rows == 4);  // 1 train x 2 val x 2 test, one seed
    exp::cmd_corr_study(cfg);
    CHECK(slurp(path) == first);
}

TEST_CASE("binned improvement means re-aggregate from the scatter export") {
    TempDir tmp;
    auto cfg = tiny_config(tmp.path);
    const Paths paths(tmp.path);
    exp::cmd_prepare(cfg);
    exp::cmd_train_baseline(cfg);
    exp::cmd_score(cfg, "Util");
    exp::cmd_train_weighted(cfg, "Util", 10);
    exp::cmd_compare(cfg);

    struct Point {
        double x, base, treat;
        bool has_rel;
        double rel;
    };
    std::vector<Point> points;
    std::istringstream scatter(slurp(paths.report_dir() / "improvement_vs_ndcg.csv"));
    std::string line;
    while (std::getline(scatter, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("method,", 0) == 0) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        REQUIRE(f.size() == 8);
        Point p{std::stod(f[4]), std::stod(f[5]), std::stod(f[6]), f[7] != "na",
                f[7] != "na" ? std::stod(f[7]) : 0.0};
        points.push_back(p);
    }
    REQUIRE_FALSE(points.empty());

    std::istringstream bins(slurp(paths.report_dir() / "improvement_vs_ndcg_bins.csv"));
    std::size_t checked = 0;
    while (std::getline(bins, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("method,", 0) == 0) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        REQUIRE(f.size() == 10);
        const double lo = std::stod(f[3]), hi = std::stod(f[4]);
        double base = 0, treat = 0, rel = 0;
        std::size_t n = 0, n_rel = 0;
        for (const auto& p : points) {
            const bool in_bin = p.x >= lo && (p.x < hi || (hi == 1.0 && p.x == 1.0));
            if (!in_bin) continue;
            ++n;
            base += p.base;
            treat += p.treat;
            if (p.has_rel) {
                rel += p.rel;
                ++n_rel;
            }
        }
        REQUIRE(n == std::stoul(f[5]));
        CHECK(std::stod(f[6]) == doctest::Approx(base / double(n)).epsilon(1e-9));
        CHECK(std::stod(f[7]) == doctest::Approx(treat / double(n)).epsilon(1e-9));
        if (n_rel > 0 && f[9] != "na")
            CHECK(std::stod(f[9]) == doctest::Approx(rel / double(n_rel)).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked > 0);
}
