// SPDX-License-Identifier: Apache-2.0
#include "csrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace csrec::metrics {

double ndcg(std::span<const ItemId> ranked, std::span<const ItemId> relevant_sorted) {
    if (ranked.empty()) throw DataError("ndcg: empty ranking");
    if (relevant_sorted.empty()) throw DataError("ndcg: empty relevant set");
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (std::binary_search(relevant_sorted.begin(), relevant_sorted.end(), ranked[i]))
            dcg += 1.0 / std::log2(double(i) + 2.0);
    }
    const std::size_t ideal = std::min(relevant_sorted.size(), ranked.size());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(double(i) + 2.0);
    return dcg / idcg;
}

double average_precision(std::span<const ItemId> ranked, std::span<const ItemId> relevant_sorted) {
    if (ranked.empty()) throw DataError("average_precision: empty ranking");
    if (relevant_sorted.empty()) throw DataError("average_precision: empty relevant set");
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (std::binary_search(relevant_sorted.begin(), relevant_sorted.end(), ranked[i])) {
            ++hits;
            sum += double(hits) / double(i + 1);
        }
    }
    return sum / double(std::min(relevant_sorted.size(), ranked.size()));
}

std::vector<double> evaluate_model(const fm::FmModel& model,
                                   const std::vector<std::vector<ItemId>>& candidates,
                                   const std::vector<std::vector<ItemId>>& relevant,
                                   RankMetric metric, std::size_t* skipped) {
    if (candidates.size() != relevant.size())
        throw DataError("evaluate_model: candidate/relevant user counts differ");
    std::vector<double> scores(candidates.size(), std::numeric_limits<double>::quiet_NaN());
    std::size_t n_skipped = 0;
    std::vector<std::pair<double, ItemId>> order;
    std::vector<ItemId> ranked;
    for (UserId u = 0; u < candidates.size(); ++u) {
        if (candidates[u].empty() || relevant[u].empty()) {
            ++n_skipped;
            continue;
        }
        order.clear();
        for (ItemId i : candidates[u]) order.emplace_back(model.predict(u, i), i);
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;  // tie-break: ascending item id
        });
        ranked.clear();
        for (const auto& [logit, item] : order) ranked.push_back(item);
        scores[u] = metric == RankMetric::ndcg ? ndcg(ranked, relevant[u])
                                               : average_precision(ranked, relevant[u]);
    }
    if (skipped) *skipped = n_skipped;
    return scores;
}

std::vector<int> group_users(const std::vector<double>& scores, int n_groups) {
    if (n_groups < 1) throw ConfigError("group_users: n_groups must be >= 1");
    const std::size_t n = scores.size();
    if (n < std::size_t(n_groups)) throw DataError("group_users: fewer users than groups");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });
    const std::size_t base = n / n_groups, rem = n % n_groups;
    std::vector<int> group(n, 0);
    std::size_t pos = 0;
    for (int g = 0; g < n_groups; ++g) {
        const std::size_t len = base + (std::size_t(g) < rem ? 1 : 0);  // larger blocks first
        for (std::size_t j = 0; j < len; ++j) group[order[pos++]] = g;
    }
    return group;
}

const std::array<std::string, 5>& quintile_labels() {
    static const std::array<std::string, 5> labels = {"low", "med-low", "med", "med-high", "high"};
    return labels;
}

std::string group_label(int group, int n_groups) {
    if (n_groups == 5) return quintile_labels()[std::size_t(group)];
    return "g" + std::to_string(group);
}

std::vector<GroupRow> group_report(const std::vector<double>& baseline,
                                   const std::vector<double>& treatment,
                                   const std::vector<double>& grouping_key, int n_groups) {
    if (baseline.size() != treatment.size() || baseline.size() != grouping_key.size())
        throw DataError("group_report: per-user vectors must align");
    const auto groups = group_users(grouping_key, n_groups);
    std::vector<GroupRow> rows(std::size_t(n_groups) + 1);
    for (int g = 0; g < n_groups; ++g) rows[std::size_t(g)].group = group_label(g, n_groups);
    rows.back().group = "overall";
    for (std::size_t u = 0; u < baseline.size(); ++u) {
        for (std::size_t r : {std::size_t(groups[u]), rows.size() - 1}) {
            rows[r].n += 1;
            rows[r].baseline_mean += baseline[u];
            rows[r].treatment_mean += treatment[u];
        }
    }
    for (auto& row : rows) {
        if (row.n == 0) continue;
        row.baseline_mean /= double(row.n);
        row.treatment_mean /= double(row.n);
        if (row.baseline_mean != 0.0)
            row.rel_improvement_pct =
                100.0 * (row.treatment_mean - row.baseline_mean) / row.baseline_mean;
    }
    return rows;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw DataError("pearson: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) throw DataError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (double(i + 1) + double(j + 1)) / 2.0;  // 1-based
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("spearman: length mismatch");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double rmse(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("rmse: length mismatch");
    if (x.empty()) throw DataError("rmse: empty input");
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s / double(x.size()));
}

std::vector<std::array<std::uint32_t, 3>> default_study_grid() {
    std::vector<std::array<std::uint32_t, 3>> grid;
    for (std::uint32_t t : {3u, 4u, 5u, 10u})
        for (std::uint32_t v = 1; v <= 5; ++v)
            for (std::uint32_t w = 1; w <= 5; ++w) grid.push_back({t, v, w});
    return grid;
}

std::vector<StudyCell> val_test_study(const corpus::InteractionLog& raw_log,
                                      const std::vector<std::array<std::uint32_t, 3>>& grid,
                                      const corpus::SplitConfig& split_cfg,
                                      const fm::TrainConfig& train_cfg, std::uint64_t seed) {
    std::vector<StudyCell> cells;
    cells.reserve(grid.size());
    for (const auto& [min_train, min_val, min_test] : grid) {
        StudyCell cell;
        cell.min_train = min_train;
        cell.min_val = min_val;
        cell.min_test = min_test;
        try {
            corpus::SplitConfig cfg = split_cfg;
            cfg.min_train = min_train;
            cfg.min_val = min_val;
            cfg.min_test = min_test;
            auto filtered = corpus::filter_and_truncate(raw_log, cfg);
            cell.n_users = filtered.n_users();
            if (filtered.n_users() < 2) throw DataError("fewer than 2 eligible users");
            auto ds = corpus::split(filtered, cfg);
            ds.val_candidates = corpus::build_candidates(ds, corpus::EvalSide::val, cfg);
            ds.test_candidates = corpus::build_candidates(ds, corpus::EvalSide::test, cfg);

            fm::TrainConfig tc = train_cfg;
            tc.seed = seed;
            const std::vector<double> unit(ds.n_users, 1.0);
            auto trained = fm::train(ds, unit, tc);

            const auto val_scores =
                evaluate_model(trained.model, ds.val_candidates, ds.val, RankMetric::ndcg);
            const auto test_scores =
                evaluate_model(trained.model, ds.test_candidates, ds.test, RankMetric::ndcg);
            cell.rmse = rmse(val_scores, test_scores);
            cell.spearman = spearman(val_scores, test_scores);
        } catch (const std::exception& e) {
            cell.failure = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace csrec::metrics
