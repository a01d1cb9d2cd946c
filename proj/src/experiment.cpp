// SPDX-License-Identifier: Apache-2.0
#include "csrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "csrec/mainstream.hpp"
#include "csrec/metrics.hpp"
#include "csrec/weighting.hpp"

namespace csrec::exp {

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
}

metrics::RankMetric metric_of(const ExperimentConfig& cfg) {
    if (cfg.metric == "ndcg") return metrics::RankMetric::ndcg;
    if (cfg.metric == "ap") return metrics::RankMetric::ap;
    throw ConfigError("metric must be 'ndcg' or 'ap', got '" + cfg.metric + "'");
}

corpus::InteractionLog load_raw(const ExperimentConfig& cfg) {
    if (cfg.use_synthetic) return synthetic::generate(cfg.synth);
    if (cfg.dataset.empty()) throw ConfigError("no dataset given (use --data or --synthetic)");
    corpus::InputFormat fmt;
    fmt.delimiter = cfg.delimiter == "tab" ? "\t" : cfg.delimiter;
    return corpus::load_interactions(cfg.dataset, fmt);
}

io::PreparedData load_prepared_or_fail(const ExperimentConfig& cfg) {
    const Paths paths(cfg.outdir);
    if (!fs::exists(paths.manifest()))
        throw DataError("missing split manifest " + paths.manifest().string() +
                        "; run 'prepare' first");
    return io::load_prepared(paths.manifest(), paths.candidates(corpus::EvalSide::val),
                             paths.candidates(corpus::EvalSide::test));
}

// Per-user eval values aligned to the prepared user table. Errors out with
// the symmetric difference when the user sets disagree.
std::vector<double> load_eval_aligned(const fs::path& path, const corpus::IdMap& users) {
    const auto eval = io::load_eval(path);
    std::vector<double> out(users.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> filled(users.size(), false);
    std::vector<std::string> unknown;
    for (std::size_t r = 0; r < eval.user.size(); ++r) {
        auto u = users.find(eval.user[r]);
        if (!u) {
            unknown.push_back(eval.user[r]);
            continue;
        }
        out[*u] = eval.value[r];
        filled[*u] = true;
    }
    std::vector<std::string> missing;
    for (std::uint32_t u = 0; u < users.size(); ++u)
        if (!filled[u]) missing.push_back(users.name(u));
    if (!unknown.empty() || !missing.empty()) {
        auto preview = [](const std::vector<std::string>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size() && i < 10; ++i) s += (i ? ", " : "") + v[i];
            if (v.size() > 10) s += ", ...";
            return s;
        };
        throw DataError("user sets differ for " + path.string() + ": " +
                        std::to_string(unknown.size()) + " unexpected [" + preview(unknown) +
                        "], " + std::to_string(missing.size()) + " missing [" + preview(missing) +
                        "]");
    }
    return out;
}

void save_run(const ExperimentConfig& cfg, const std::string& command, const fs::path& run_dir,
              const fm::TrainResult& result, const fm::TrainConfig& tc,
              const io::PreparedData& prepared) {
    const Paths paths(cfg.outdir);
    auto header = cfg.file_header(command, tc.seed);
    io::save_model(paths.model(run_dir), result.model, tc, header);

    std::string hist = io::render_header(header);
    hist += "# columns=epoch\tdata_loss\tl2_penalty\n";
    for (std::size_t e = 0; e < result.history.size(); ++e)
        hist += std::to_string(e) + "\t" + io::fmt_double(result.history[e].data_loss) + "\t" +
                io::fmt_double(result.history[e].l2_penalty) + "\n";
    io::atomic_write(paths.history(run_dir), hist);

    const auto& split = prepared.split;
    for (auto side : {corpus::EvalSide::val, corpus::EvalSide::test}) {
        const auto& cand = side == corpus::EvalSide::val ? split.val_candidates : split.test_candidates;
        const auto& rel = side == corpus::EvalSide::val ? split.val : split.test;
        auto h = header;
        h.emplace_back("metric", cfg.metric);
        io::write_eval(paths.eval(run_dir, side), prepared.users,
                       metrics::evaluate_model(result.model, cand, rel, metric_of(cfg)), h);
    }
}

struct CsvReport {
    std::string body;
    void row(const std::string& experiment, const std::string& seed, const std::string& method,
             const std::string& contrast, const std::string& group, const std::string& metric,
             double value, const std::optional<double>& rel) {
        body += experiment + "," + seed + "," + method + "," + contrast + "," + group + "," +
                metric + "," + io::fmt_double(value) + "," +
                (rel ? io::fmt_double(*rel) : std::string("na")) + "\n";
    }
};

mainstream::SimOptions sim_options(const ExperimentConfig& cfg) {
    mainstream::SimOptions opts;
    opts.exact_threshold = cfg.sim_exact_threshold;
    opts.sample_size = cfg.sim_sample_size;
    opts.seed = cfg.split.seed;
    return opts;
}

// Sim scores for grouping: loaded from the score file when present,
// recomputed in memory otherwise (same deterministic function).
std::vector<double> sim_for_grouping(const ExperimentConfig& cfg,
                                     const io::PreparedData& prepared) {
    const Paths paths(cfg.outdir);
    const auto path = paths.score_file("Sim", 0);
    if (fs::exists(path)) return io::load_scores(path, prepared.users).score;
    return mainstream::sim_scores(prepared.split.train, sim_options(cfg)).score;
}

}  // namespace

std::string contrast_tag(double contrast) { return "x" + fmt_g(contrast); }

void ExperimentConfig::validate() const {
    split.validate();
    train.validate();
    if (!use_synthetic && dataset.empty())
        throw ConfigError("no dataset given (use --data or --synthetic)");
    if (use_synthetic) synth.validate();
    if (seeds.empty()) throw ConfigError("seed list must be non-empty");
    if (methods.empty()) throw ConfigError("at least one mainstreamness method required");
    for (const auto& m : methods) mainstream::method_from_name(m);
    for (double c : contrasts)
        if (!(c > 1)) throw ConfigError("contrast values must be > 1");
    metric_of(*this);
    if (scatter_bins < 1) throw ConfigError("scatter_bins must be >= 1");
}

std::string ExperimentConfig::config_hash() const {
    std::ostringstream ss;
    ss << dataset << '|' << delimiter << '|' << use_synthetic << '|' << synth.n_users << '|'
       << synth.niche_fraction << '|' << synth.popular_pool << '|' << synth.niche_item_space << '|'
       << synth.niche_pool << '|' << synth.mainstream_min_activity << '|'
       << synth.mainstream_max_activity << '|' << synth.niche_min_activity << '|'
       << synth.niche_max_activity << '|' << synth.popular_mix << '|' << synth.seed << '|'
       << split.min_train << '|' << split.min_val << '|' << split.min_test << '|'
       << split.max_relevant << '|' << split.neg_ratio << '|' << split.candidate_total << '|'
       << split.seed << '|' << train.lr << '|' << train.l2 << '|' << train.batch_size << '|'
       << train.epochs << '|' << train.k << '|' << train.init_scale << '|' << mean_one_weights
       << '|' << metric;
    for (const auto& m : methods) ss << '|' << m;
    for (double c : contrasts) ss << '|' << c;
    for (auto s : seeds) ss << '|' << s;
    return hex64(fnv1a(ss.str()));
}

io::Header ExperimentConfig::file_header(const std::string& command, std::uint64_t seed) const {
    auto h = file_header(command);
    h.emplace_back("seed", std::to_string(seed));
    return h;
}

io::Header ExperimentConfig::file_header(const std::string& command) const {
    io::Header h;
    h.emplace_back("tool", "csrec");
    h.emplace_back("command", command);
    h.emplace_back("config_hash", config_hash());
    return h;
}

fs::path Paths::candidates(corpus::EvalSide side) const {
    return root / "prepared" /
           (side == corpus::EvalSide::val ? "candidates_val.tsv" : "candidates_test.tsv");
}

fs::path Paths::baseline_dir(std::uint64_t seed) const {
    return root / "baseline" / ("seed" + std::to_string(seed));
}

fs::path Paths::eval(const fs::path& run_dir, corpus::EvalSide side) const {
    return run_dir / (side == corpus::EvalSide::val ? "eval_val.tsv" : "eval_test.tsv");
}

fs::path Paths::score_file(const std::string& method, std::uint64_t seed) const {
    const auto m = mainstream::method_from_name(method);
    if (m == mainstream::Method::Util)
        return root / "scores" / ("util_seed" + std::to_string(seed) + ".tsv");
    return root / "scores" / (lower(method_name(m)) + ".tsv");
}

fs::path Paths::weight_file(const std::string& method, double contrast, std::uint64_t seed) const {
    const auto m = mainstream::method_from_name(method);
    std::string name = lower(method_name(m)) + "_" + contrast_tag(contrast);
    if (m == mainstream::Method::Util) name += "_seed" + std::to_string(seed);
    return root / "weights" / (name + ".tsv");
}

fs::path Paths::weighted_dir(const std::string& method, double contrast,
                             std::uint64_t seed) const {
    const auto m = mainstream::method_from_name(method);
    return root / "weighted" / (lower(method_name(m)) + "_" + contrast_tag(contrast)) /
           ("seed" + std::to_string(seed));
}

void cmd_prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    const Paths paths(cfg.outdir);

    auto raw = load_raw(cfg);
    std::cout << "loaded " << raw.n_users() << " users, " << raw.n_items() << " items, "
              << raw.n_interactions() << " interactions\n";

    auto log = corpus::filter_and_truncate(raw, cfg.split);
    auto ds = corpus::split(log, cfg.split);
    ds.val_candidates = corpus::build_candidates(ds, corpus::EvalSide::val, cfg.split);
    ds.test_candidates = corpus::build_candidates(ds, corpus::EvalSide::test, cfg.split);

    const auto header = cfg.file_header("prepare", cfg.split.seed);
    io::write_manifest(paths.manifest(), log, ds, header);
    io::write_candidates(paths.candidates(corpus::EvalSide::val), log, ds.val_candidates,
                         corpus::EvalSide::val, header);
    io::write_candidates(paths.candidates(corpus::EvalSide::test), log, ds.test_candidates,
                         corpus::EvalSide::test, header);

    std::size_t n_train = 0, n_val = 0, n_test = 0;
    for (corpus::UserId u = 0; u < ds.n_users; ++u) {
        n_train += ds.train[u].size();
        n_val += ds.val[u].size();
        n_test += ds.test[u].size();
    }
    std::string stats = io::render_header(header);
    stats += "users\t" + std::to_string(log.n_users()) + "\n";
    stats += "items\t" + std::to_string(log.n_items()) + "\n";
    stats += "interactions\t" + std::to_string(log.n_interactions()) + "\n";
    stats += "density_pct\t" + io::fmt_double(100.0 * log.density()) + "\n";
    stats += "train_interactions\t" + std::to_string(n_train) + "\n";
    stats += "val_interactions\t" + std::to_string(n_val) + "\n";
    stats += "test_interactions\t" + std::to_string(n_test) + "\n";
    io::atomic_write(paths.stats(), stats);

    char dens[32];
    std::snprintf(dens, sizeof(dens), "%.3f", 100.0 * log.density());
    std::cout << "prepared " << log.n_users() << " users, " << log.n_items() << " items, "
              << log.n_interactions() << " interactions (density " << dens << "%)\n"
              << "split " << n_train << "/" << n_val << "/" << n_test
              << " train/val/test interactions -> " << paths.manifest().string() << "\n";
}

void cmd_train_baseline(const ExperimentConfig& cfg) {
    cfg.validate();
    const Paths paths(cfg.outdir);
    const auto prepared = load_prepared_or_fail(cfg);
    const std::vector<double> unit(prepared.split.n_users, 1.0);

    for (auto seed : cfg.seeds) {
        fm::TrainConfig tc = cfg.train;
        tc.seed = seed;
        auto result = fm::train(prepared.split, unit, tc);
        if (result.negatives_with_replacement)
            std::cerr << "warning: some users required negative sampling with replacement\n";
        save_run(cfg, "train-baseline", paths.baseline_dir(seed), result, tc, prepared);
        std::cout << "baseline seed " << seed << ": final loss "
                  << io::fmt_double(result.history.back().data_loss) << " -> "
                  << paths.baseline_dir(seed).string() << "\n";
    }
}

void cmd_score(const ExperimentConfig& cfg, const std::string& method) {
    cfg.validate();
    const Paths paths(cfg.outdir);
    const auto prepared = load_prepared_or_fail(cfg);
    const auto m = mainstream::method_from_name(method);

    if (m == mainstream::Method::Util) {
        for (auto seed : cfg.seeds) {
            const auto model_path = paths.model(paths.baseline_dir(seed));
            if (!fs::exists(model_path))
                throw DataError("Util scores require the baseline checkpoint " +
                                model_path.string() + "; run 'train-baseline' first");
            auto loaded = io::load_model(model_path);
            auto scores = mainstream::util_scores(loaded.model, prepared.split.val_candidates,
                                                  prepared.split.val);
            if (scores.excluded > 0)
                std::cerr << "warning: " << scores.excluded
                          << " users had no validation items and were excluded\n";
            scores.metadata = "source_model=" + model_path.string() +
                              ";model_hash=" + hex64(io::file_hash(model_path));
            io::write_scores(paths.score_file(method, seed), prepared.users, scores,
                             cfg.file_header("score", seed));
            std::cout << "Util scores seed " << seed << " -> "
                      << paths.score_file(method, seed).string() << "\n";
        }
        return;
    }

    mainstream::Scores scores = m == mainstream::Method::Sim
                                    ? mainstream::sim_scores(prepared.split.train, sim_options(cfg))
                                    : mainstream::dis_scores(prepared.split.train,
                                                             prepared.split.n_items);
    io::write_scores(paths.score_file(method, 0), prepared.users, scores,
                     cfg.file_header("score", cfg.split.seed));
    std::cout << mainstream::method_name(m) << " scores -> "
              << paths.score_file(method, 0).string() << "\n";
}

void cmd_train_weighted(const ExperimentConfig& cfg, const std::string& method, double contrast) {
    cfg.validate();
    if (!(contrast > 1)) throw ConfigError("contrast must be > 1");
    const Paths paths(cfg.outdir);
    const auto prepared = load_prepared_or_fail(cfg);
    const auto m = mainstream::method_from_name(method);

    for (auto seed : cfg.seeds) {
        const auto score_path = paths.score_file(method, seed);
        if (!fs::exists(score_path))
            throw DataError("missing score file " + score_path.string() + "; run 'score " +
                            mainstream::method_name(m) + "' first");
        auto scores = io::load_scores(score_path, prepared.users);

        if (m == mainstream::Method::Util) {
            // refuse to train against a checkpoint other than the one the
            // score file cites
            const auto meta = scores.header.find("metadata");
            const auto model_path = paths.model(paths.baseline_dir(seed));
            if (!fs::exists(model_path))
                throw DataError("baseline checkpoint " + model_path.string() +
                                " cited by " + score_path.string() + " is missing");
            const std::string current = "model_hash=" + hex64(io::file_hash(model_path));
            if (meta == scores.header.end() || meta->second.find(current) == std::string::npos)
                throw DataError("score file " + score_path.string() +
                                " does not cite the current baseline checkpoint; re-run 'score Util'");
        }

        weighting::WeightOptions wopts;
        wopts.mean_one = cfg.mean_one_weights;
        const auto weights = weighting::user_weights(scores.score, contrast, wopts);
        const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
        std::cout << mainstream::method_name(m) << " " << contrast_tag(contrast) << " seed " << seed
                  << ": weight endpoint ratio " << io::fmt_double(*hi / *lo) << " (target "
                  << fmt_g(contrast) << ")\n";

        auto wheader = cfg.file_header("train-weighted", seed);
        wheader.emplace_back("method", mainstream::method_name(m));
        wheader.emplace_back("contrast", fmt_g(contrast));
        wheader.emplace_back("endpoint_ratio", io::fmt_double(*hi / *lo));
        io::write_weights(paths.weight_file(method, contrast, seed), prepared.users, weights,
                          wheader);

        fm::TrainConfig tc = cfg.train;
        tc.seed = seed;
        auto result = fm::train(prepared.split, weights, tc);
        save_run(cfg, "train-weighted", paths.weighted_dir(method, contrast, seed), result, tc,
                 prepared);
        std::cout << mainstream::method_name(m) << " " << contrast_tag(contrast) << " seed " << seed
                  << ": final loss " << io::fmt_double(result.history.back().data_loss) << "\n";
    }
}

void cmd_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    const Paths paths(cfg.outdir);
    const auto prepared = load_prepared_or_fail(cfg);
    const auto& users = prepared.users;

    std::map<std::uint64_t, std::vector<double>> baseline;  // seed -> per-user test metric
    for (auto seed : cfg.seeds) {
        const auto path = paths.eval(paths.baseline_dir(seed), corpus::EvalSide::test);
        if (!fs::exists(path))
            throw DataError("missing baseline eval " + path.string() + "; run 'train-baseline'");
        baseline[seed] = load_eval_aligned(path, users);
    }
    const auto sim = sim_for_grouping(cfg, prepared);

    CsvReport table1, table2;
    std::string scatter_ndcg =
        "method,contrast,seed,user,x_ecdf_baseline,baseline,weighted,rel_improvement_pct\n";
    std::string scatter_sim =
        "method,contrast,seed,user,x_ecdf_sim,baseline,weighted,rel_improvement_pct\n";
    std::string bins_ndcg =
        "method,contrast,seed,bin_lo,bin_hi,n,baseline_mean,weighted_mean,rel_improvement_of_means_"
        "pct,mean_rel_improvement_pct\n";
    std::string bins_sim = bins_ndcg;

    auto emit_group_rows = [&](CsvReport& report, const std::string& experiment,
                               const std::string& method, double contrast,
                               const std::map<std::uint64_t, std::vector<double>>& treatment,
                               const std::vector<double>& fixed_key, bool key_is_baseline) {
        // per-seed rows plus a cross-seed "all" aggregate
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> agg;
        for (auto seed : cfg.seeds) {
            const auto& base = baseline.at(seed);
            const auto& treat = treatment.at(seed);
            const auto& key = key_is_baseline ? base : fixed_key;
            for (const auto& row : metrics::group_report(base, treat, key)) {
                report.row(experiment, std::to_string(seed), method, contrast_tag(contrast),
                           row.group, cfg.metric + "_baseline", row.baseline_mean, std::nullopt);
                report.row(experiment, std::to_string(seed), method, contrast_tag(contrast),
                           row.group, cfg.metric + "_weighted", row.treatment_mean,
                           row.rel_improvement_pct);
                agg[row.group].first.push_back(row.baseline_mean);
                agg[row.group].second.push_back(row.treatment_mean);
            }
        }
        for (int g = 0; g <= 5; ++g) {
            const std::string label = g == 5 ? "overall" : metrics::group_label(g);
            const auto& [bases, treats] = agg.at(label);
            double mb = 0, mt = 0;
            for (double b : bases) mb += b;
            for (double t : treats) mt += t;
            mb /= double(bases.size());
            mt /= double(treats.size());
            std::optional<double> rel;
            if (mb != 0.0) rel = 100.0 * (mt - mb) / mb;
            report.row(experiment, "all", method, contrast_tag(contrast), label,
                       cfg.metric + "_baseline", mb, std::nullopt);
            report.row(experiment, "all", method, contrast_tag(contrast), label,
                       cfg.metric + "_weighted", mt, rel);
        }
    };

    auto emit_scatter = [&](std::string& scatter, std::string& bins, const std::string& method,
                            double contrast, std::uint64_t seed, const std::vector<double>& key,
                            const std::vector<double>& base, const std::vector<double>& treat) {
        const auto x = weighting::ecdf_normalize(key);
        const std::uint32_t nb = cfg.scatter_bins;
        std::vector<std::size_t> bin_n(nb, 0), bin_rel_n(nb, 0);
        std::vector<double> bin_base(nb, 0), bin_treat(nb, 0), bin_rel(nb, 0);
        for (std::size_t u = 0; u < base.size(); ++u) {
            std::optional<double> rel;
            if (base[u] != 0.0) rel = 100.0 * (treat[u] - base[u]) / base[u];
            scatter += method + "," + contrast_tag(contrast) + "," + std::to_string(seed) + "," +
                       users.name(std::uint32_t(u)) + "," + io::fmt_double(x[u]) + "," +
                       io::fmt_double(base[u]) + "," + io::fmt_double(treat[u]) + "," +
                       (rel ? io::fmt_double(*rel) : std::string("na")) + "\n";
            auto b = std::min<std::size_t>(std::size_t(x[u] * nb), nb - 1);
            bin_n[b] += 1;
            bin_base[b] += base[u];
            bin_treat[b] += treat[u];
            if (rel) {
                bin_rel[b] += *rel;
                bin_rel_n[b] += 1;
            }
        }
        for (std::uint32_t b = 0; b < nb; ++b) {
            if (bin_n[b] == 0) continue;
            const double mb = bin_base[b] / double(bin_n[b]);
            const double mt = bin_treat[b] / double(bin_n[b]);
            bins += method + "," + contrast_tag(contrast) + "," + std::to_string(seed) + "," +
                    io::fmt_double(double(b) / nb) + "," + io::fmt_double(double(b + 1) / nb) +
                    "," + std::to_string(bin_n[b]) + "," + io::fmt_double(mb) + "," +
                    io::fmt_double(mt) + "," +
                    (mb != 0.0 ? io::fmt_double(100.0 * (mt - mb) / mb) : std::string("na")) + "," +
                    (bin_rel_n[b] ? io::fmt_double(bin_rel[b] / double(bin_rel_n[b]))
                                  : std::string("na")) +
                    "\n";
        }
    };

    for (const auto& method : cfg.methods) {
        for (double contrast : cfg.contrasts) {
            std::map<std::uint64_t, std::vector<double>> treatment;
            for (auto seed : cfg.seeds) {
                const auto path =
                    paths.eval(paths.weighted_dir(method, contrast, seed), corpus::EvalSide::test);
                if (!fs::exists(path))
                    throw DataError("missing weighted eval " + path.string() +
                                    "; run 'train-weighted'");
                treatment[seed] = load_eval_aligned(path, users);
            }
            emit_group_rows(table1, "by_baseline_" + cfg.metric, method, contrast, treatment, {},
                            true);
            emit_group_rows(table2, "by_sim", method, contrast, treatment, sim, false);
            for (auto seed : cfg.seeds) {
                emit_scatter(scatter_ndcg, bins_ndcg, method, contrast, seed, baseline.at(seed),
                             baseline.at(seed), treatment.at(seed));
                emit_scatter(scatter_sim, bins_sim, method, contrast, seed, sim, baseline.at(seed),
                             treatment.at(seed));
            }
        }
    }

    const auto header = cfg.file_header("compare");
    const std::string columns =
        "experiment,seed,method,contrast,group,metric,value,relative_improvement\n";
    io::atomic_write(paths.report_dir() / "table1.csv",
                     io::render_header(header) + columns + table1.body);
    io::atomic_write(paths.report_dir() / "table2.csv",
                     io::render_header(header) + columns + table2.body);
    io::atomic_write(paths.report_dir() / ("improvement_vs_" + cfg.metric + ".csv"),
                     io::render_header(header) + scatter_ndcg);
    io::atomic_write(paths.report_dir() / ("improvement_vs_" + cfg.metric + "_bins.csv"),
                     io::render_header(header) + bins_ndcg);
    io::atomic_write(paths.report_dir() / "improvement_vs_sim.csv",
                     io::render_header(header) + scatter_sim);
    io::atomic_write(paths.report_dir() / "improvement_vs_sim_bins.csv",
                     io::render_header(header) + bins_sim);
    std::cout << "reports -> " << paths.report_dir().string() << "\n";
}

void cmd_corr_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const Paths paths(cfg.outdir);
    auto raw = load_raw(cfg);

    std::vector<std::array<std::uint32_t, 3>> grid;
    for (auto t : cfg.study_train)
        for (auto v : cfg.study_valtest)
            for (auto w : cfg.study_valtest) grid.push_back({t, v, w});

    std::string body = "seed,min_train,min_val,min_test,n_users,rmse,spearman,status\n";
    for (auto seed : cfg.seeds) {
        auto cells = metrics::val_test_study(raw, grid, cfg.split, cfg.train, seed);
        for (const auto& c : cells) {
            body += std::to_string(seed) + "," + std::to_string(c.min_train) + "," +
                    std::to_string(c.min_val) + "," + std::to_string(c.min_test) + "," +
                    std::to_string(c.n_users) + "," +
                    (c.rmse ? io::fmt_double(*c.rmse) : std::string("na")) + "," +
                    (c.spearman ? io::fmt_double(*c.spearman) : std::string("na")) + "," +
                    (c.failure.empty() ? std::string("ok") : c.failure) + "\n";
        }
        std::cout << "corr-study seed " << seed << ": " << cells.size() << " cells\n";
    }
    io::atomic_write(paths.report_dir() / "corr_study.csv",
                     io::render_header(cfg.file_header("corr-study")) + body);
    std::cout << "study -> " << (paths.report_dir() / "corr_study.csv").string() << "\n";
}

void cmd_pipeline(const ExperimentConfig& cfg) {
    cfg.validate();
    cmd_prepare(cfg);
    cmd_train_baseline(cfg);
    for (const auto& method : cfg.methods) cmd_score(cfg, method);
    for (const auto& method : cfg.methods)
        for (double contrast : cfg.contrasts) cmd_train_weighted(cfg, method, contrast);
    cmd_compare(cfg);
    cmd_corr_study(cfg);
}

}  // namespace csrec::exp
