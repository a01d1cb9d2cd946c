// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csrec/corpus.hpp"
#include "csrec/fm.hpp"
#include "csrec/io.hpp"
#include "csrec/synthetic.hpp"

namespace csrec::exp {

namespace fs = std::filesystem;

struct ExperimentConfig {
    std::string dataset;        // input file; ignored when synthetic
    std::string delimiter;      // "" = auto
    bool use_synthetic = false;
    synthetic::SyntheticConfig synth;

    corpus::SplitConfig split;
    fm::TrainConfig train;

    std::vector<std::string> methods = {"Sim", "Dis", "Util"};
    std::vector<double> contrasts = {5, 10, 20, 50, 80};
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    fs::path outdir = "out";
    bool mean_one_weights = false;
    std::string metric = "ndcg";  // ndcg | ap

    std::vector<std::uint32_t> study_train = {3, 4, 5, 10};
    std::vector<std::uint32_t> study_valtest = {1, 2, 3, 4, 5};
    std::uint32_t scatter_bins = 20;
    std::size_t sim_exact_threshold = 20000;
    std::size_t sim_sample_size = 2000;

    void validate() const;
    // Hash of the effective configuration, echoed into every output header.
    std::string config_hash() const;
    io::Header file_header(const std::string& command, std::uint64_t seed) const;
    io::Header file_header(const std::string& command) const;
};

// Output layout under cfg.outdir.
struct Paths {
    fs::path root;
    explicit Paths(const fs::path& outdir) : root(outdir) {}

    fs::path manifest() const { return root / "prepared" / "manifest.tsv"; }
    fs::path candidates(corpus::EvalSide side) const;
    fs::path stats() const { return root / "prepared" / "stats.tsv"; }
    fs::path baseline_dir(std::uint64_t seed) const;
    fs::path model(const fs::path& run_dir) const { return run_dir / "model.txt"; }
    fs::path eval(const fs::path& run_dir, corpus::EvalSide side) const;
    fs::path history(const fs::path& run_dir) const { return run_dir / "history.tsv"; }
    fs::path score_file(const std::string& method, std::uint64_t seed) const;
    fs::path weight_file(const std::string& method, double contrast, std::uint64_t seed) const;
    fs::path weighted_dir(const std::string& method, double contrast, std::uint64_t seed) const;
    fs::path report_dir() const { return root / "reports"; }
};

void cmd_prepare(const ExperimentConfig& cfg);
void cmd_train_baseline(const ExperimentConfig& cfg);
void cmd_score(const ExperimentConfig& cfg, const std::string& method);
void cmd_train_weighted(const ExperimentConfig& cfg, const std::string& method, double contrast);
void cmd_compare(const ExperimentConfig& cfg);
void cmd_corr_study(const ExperimentConfig& cfg);
void cmd_pipeline(const ExperimentConfig& cfg);

std::string contrast_tag(double contrast);  // 50 -> "x50", 7.5 -> "x7.5"

}  // namespace csrec::exp
