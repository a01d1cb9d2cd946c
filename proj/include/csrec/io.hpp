// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "csrec/corpus.hpp"
#include "csrec/fm.hpp"
#include "csrec/mainstream.hpp"

namespace csrec::io {

namespace fs = std::filesystem;

// Every emitted file starts with '# key=value' provenance lines (no
// timestamps: identical inputs must produce byte-identical files).
using Header = std::vector<std::pair<std::string, std::string>>;
using HeaderMap = std::map<std::string, std::string>;

std::string render_header(const Header& header);
HeaderMap read_header(const fs::path& path);

// Write-to-temp-then-rename, one atomic publish per file.
void atomic_write(const fs::path& path, const std::string& content);

std::uint64_t file_hash(const fs::path& path);

// Doubles are serialized with %.17g and round-trip losslessly.
std::string fmt_double(double v);

// -------- split manifest + candidates (external ids) --------

struct PreparedData {
    corpus::IdMap users;
    corpus::IdMap items;
    corpus::SplitDataset split;
};

// Line format: user <TAB> train|val|test <TAB> item.
void write_manifest(const fs::path& path, const corpus::InteractionLog& log,
                    const corpus::SplitDataset& split, const Header& header);

// Line format: user <TAB> val|test <TAB> item, in candidate-list order.
void write_candidates(const fs::path& path, const corpus::InteractionLog& log,
                      const std::vector<std::vector<corpus::ItemId>>& candidates,
                      corpus::EvalSide side, const Header& header);

// Rebuilds the dense id maps (first-seen order over the manifest) and the
// split; candidate files are remapped onto those ids.
PreparedData load_prepared(const fs::path& manifest, const fs::path& val_candidates,
                           const fs::path& test_candidates);

// -------- model checkpoint --------

void save_model(const fs::path& path, const fm::FmModel& model, const fm::TrainConfig& cfg,
                const Header& header);

struct LoadedModel {
    fm::FmModel model;
    fm::TrainConfig cfg;
    HeaderMap header;
};

LoadedModel load_model(const fs::path& path);

// -------- per-user score-like files --------

// Line format: user <TAB> method <TAB> score.
void write_scores(const fs::path& path, const corpus::IdMap& users,
                  const mainstream::Scores& scores, const Header& header);

struct LoadedScores {
    std::string method;
    std::vector<double> score;  // aligned to the given IdMap
    HeaderMap header;
};

// Import path for externally computed scores with the same schema; method
// tags beyond Sim/Dis/Util (e.g. Den, Deep) are accepted as-is.
LoadedScores load_scores(const fs::path& path, const corpus::IdMap& users);

// Line format: user <TAB> weight.
void write_weights(const fs::path& path, const corpus::IdMap& users,
                   const std::vector<double>& weights, const Header& header);
std::vector<double> load_weights(const fs::path& path, const corpus::IdMap& users);

// Line format: user <TAB> value. NaN entries are written as "nan".
void write_eval(const fs::path& path, const corpus::IdMap& users,
                const std::vector<double>& values, const Header& header);

struct LoadedEval {
    std::vector<std::string> user;  // external ids, file order
    std::vector<double> value;
    HeaderMap header;
};

LoadedEval load_eval(const fs::path& path);

}  // namespace csrec::io
