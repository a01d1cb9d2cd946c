// SPDX-License-Identifier: Apache-2.0
//
// csrec — cost-sensitive factorization-machine recommender pipeline.
// Subcommands: prepare, train-baseline, score, train-weighted, compare,
// corr-study, pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "csrec/experiment.hpp"

using csrec::exp::ExperimentConfig;

int main(int argc, char** argv) {
    CLI::App app{"Cost-sensitive FM recommender: mainstream-bias mitigation pipeline"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string outdir = cfg.outdir.string();

    // Shared experiment options (also valid keys in the config file).
    app.add_option("--data", cfg.dataset, "Interaction file: user_id, item_id[, rating, timestamp]");
    app.add_option("--delimiter", cfg.delimiter,
                   "Field delimiter ('tab', ',', '::', ...); default auto-detect");
    app.add_flag("--synthetic", cfg.use_synthetic, "Use the built-in planted-bias generator");
    app.add_option("--outdir", outdir, "Output directory")->envname("CSREC_OUTDIR");
    app.add_option("--seeds", cfg.seeds, "Training seeds (one run per seed)");
    app.add_option("--methods", cfg.methods, "Mainstreamness methods: Sim Dis Util");
    app.add_option("--contrasts", cfg.contrasts, "Cost-function contrasts");
    app.add_option("--metric", cfg.metric, "Ranking metric: ndcg | ap");
    app.add_flag("--mean-one-weights", cfg.mean_one_weights,
                 "Rescale user weights to mean 1 (default: raw truncated density)");

    app.add_option("--min-train", cfg.split.min_train, "Minimum train items per user");
    app.add_option("--min-val", cfg.split.min_val, "Minimum validation items per user");
    app.add_option("--min-test", cfg.split.min_test, "Minimum test items per user");
    app.add_option("--max-relevant", cfg.split.max_relevant, "Per-user relevant-item cap");
    app.add_option("--neg-ratio", cfg.split.neg_ratio, "Training negatives per positive");
    app.add_option("--candidate-total", cfg.split.candidate_total, "Evaluation list size");
    app.add_option("--split-seed", cfg.split.seed, "Seed for splitting and sampling");

    app.add_option("--lr", cfg.train.lr, "Learning rate");
    app.add_option("--l2", cfg.train.l2, "L2 regularization coefficient");
    app.add_option("--batch-size", cfg.train.batch_size, "Mini-batch size");
    app.add_option("--epochs", cfg.train.epochs, "Training epochs");
    app.add_option("--dim", cfg.train.k, "Embedding dimension");
    app.add_option("--init-scale", cfg.train.init_scale, "Embedding init stddev");

    app.add_option("--synth-users", cfg.synth.n_users, "Synthetic: number of users");
    app.add_option("--synth-niche-fraction", cfg.synth.niche_fraction, "Synthetic: niche share");
    app.add_option("--synth-popular-pool", cfg.synth.popular_pool, "Synthetic: popular pool size");
    app.add_option("--synth-niche-space", cfg.synth.niche_item_space,
                   "Synthetic: niche item space size");
    app.add_option("--synth-niche-pool", cfg.synth.niche_pool, "Synthetic: per-user niche pool");
    app.add_option("--synth-popular-mix", cfg.synth.popular_mix,
                   "Synthetic: niche users' share of popular-pool draws");
    app.add_option("--synth-main-activity", cfg.synth.mainstream_min_activity,
                   "Synthetic: mainstream minimum interactions");
    app.add_option("--synth-main-activity-max", cfg.synth.mainstream_max_activity,
                   "Synthetic: mainstream maximum interactions");
    app.add_option("--synth-niche-activity", cfg.synth.niche_min_activity,
                   "Synthetic: niche minimum interactions");
    app.add_option("--synth-niche-activity-max", cfg.synth.niche_max_activity,
                   "Synthetic: niche maximum interactions");
    app.add_option("--synth-seed", cfg.synth.seed, "Synthetic: generator seed");

    app.add_option("--study-train", cfg.study_train, "Correlation study: min_train grid");
    app.add_option("--study-valtest", cfg.study_valtest, "Correlation study: min_val/min_test grid");
    app.add_option("--scatter-bins", cfg.scatter_bins, "Bins for improvement-curve exports");
    app.add_option("--sim-exact-threshold", cfg.sim_exact_threshold,
                   "Max users for exact pairwise Sim");
    app.add_option("--sim-sample-size", cfg.sim_sample_size,
                   "Comparison users per user in subsampled Sim");

    auto* prepare = app.add_subcommand("prepare", "Filter, split and sample candidate lists");
    auto* train_baseline =
        app.add_subcommand("train-baseline", "Train the unweighted model per seed");
    auto* score = app.add_subcommand("score", "Compute mainstreamness scores");
    std::string score_method = "Util";
    score->add_option("method", score_method, "Sim | Dis | Util")->required();
    auto* train_weighted =
        app.add_subcommand("train-weighted", "Train cost-sensitively for one method and contrast");
    std::string tw_method = "Util";
    double tw_contrast = 50.0;
    train_weighted->add_option("method", tw_method, "Sim | Dis | Util")->required();
    train_weighted->add_option("contrast", tw_contrast, "Cost contrast (> 1)")->required();
    auto* compare = app.add_subcommand("compare", "Group reports and improvement-curve exports");
    auto* corr_study =
        app.add_subcommand("corr-study", "Validation-test correlation over the split-size grid");
    auto* pipeline = app.add_subcommand("pipeline", "Run the whole experiment end to end");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;  // usage/config errors exit 1
    }

    cfg.outdir = outdir;
    try {
        if (prepare->parsed()) csrec::exp::cmd_prepare(cfg);
        else if (train_baseline->parsed()) csrec::exp::cmd_train_baseline(cfg);
        else if (score->parsed()) csrec::exp::cmd_score(cfg, score_method);
        else if (train_weighted->parsed()) csrec::exp::cmd_train_weighted(cfg, tw_method, tw_contrast);
        else if (compare->parsed()) csrec::exp::cmd_compare(cfg);
        else if (corr_study->parsed()) csrec::exp::cmd_corr_study(cfg);
        else if (pipeline->parsed()) csrec::exp::cmd_pipeline(cfg);
    } catch (const csrec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const csrec::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const csrec::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
