// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csrec/corpus.hpp"
#include "csrec/fm.hpp"

namespace csrec::metrics {

using corpus::ItemId;
using corpus::UserId;

// Full-list nDCG with binary relevance: DCG = sum 1/log2(rank+1) over hits,
// IDCG = all relevant items first.
double ndcg(std::span<const ItemId> ranked, std::span<const ItemId> relevant_sorted);

// Mean of precision@rank over the relevant items' ranks.
double average_precision(std::span<const ItemId> ranked, std::span<const ItemId> relevant_sorted);

enum class RankMetric { ndcg, ap };

// Ranks each user's candidate list by descending logit (ties broken by
// ascending item id) and scores it. Users with an empty candidate or
// relevant list get NaN and are counted in skipped.
std::vector<double> evaluate_model(const fm::FmModel& model,
                                   const std::vector<std::vector<ItemId>>& candidates,
                                   const std::vector<std::vector<ItemId>>& relevant,
                                   RankMetric metric, std::size_t* skipped = nullptr);

// Contiguous blocks of users sorted ascending by score (ties by user id);
// sizes differ by at most one, larger blocks at the low end. Returns the
// group index (0 = low) per user.
std::vector<int> group_users(const std::vector<double>& scores, int n_groups = 5);

const std::array<std::string, 5>& quintile_labels();
std::string group_label(int group, int n_groups = 5);

struct GroupRow {
    std::string group;  // "low" ... "high", or "overall"
    std::size_t n = 0;
    double baseline_mean = 0.0;
    double treatment_mean = 0.0;
    std::optional<double> rel_improvement_pct;  // empty when baseline mean is 0
};

// Per-group baseline/treatment means and relative improvement, grouped by
// quintiles of grouping_key; last row is the overall mean across users.
std::vector<GroupRow> group_report(const std::vector<double>& baseline,
                                   const std::vector<double>& treatment,
                                   const std::vector<double>& grouping_key, int n_groups = 5);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
double rmse(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based, ties averaged), the rank statistic behind
// spearman() and the ecdf normalization.
std::vector<double> average_ranks(std::span<const double> values);

struct StudyCell {
    std::uint32_t min_train = 0, min_val = 0, min_test = 0;
    std::optional<double> rmse;
    std::optional<double> spearman;
    std::size_t n_users = 0;
    std::string failure;  // non-empty when the cell could not be evaluated
};

// For each (min_train, min_val, min_test) grid cell: re-filter and re-split
// the raw log, train the unweighted baseline, and record RMSE and Spearman
// rho between per-user val and test nDCG.
std::vector<StudyCell> val_test_study(const corpus::InteractionLog& raw_log,
                                      const std::vector<std::array<std::uint32_t, 3>>& grid,
                                      const corpus::SplitConfig& split_cfg,
                                      const fm::TrainConfig& train_cfg, std::uint64_t seed);

std::vector<std::array<std::uint32_t, 3>> default_study_grid();

}  // namespace csrec::metrics
