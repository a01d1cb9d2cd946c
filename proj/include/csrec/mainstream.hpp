// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csrec/corpus.hpp"
#include "csrec/fm.hpp"

namespace csrec::mainstream {

using corpus::ItemId;

enum class Method { Sim, Dis, Util };

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // accepts Sim|Dis|Util (case-insensitive)

struct Scores {
    Method method = Method::Sim;
    std::vector<double> score;  // one per dense user id
    std::string metadata;       // e.g. source checkpoint for Util
    std::size_t excluded = 0;   // users scored NaN (empty validation set)
};

struct SimOptions {
    std::size_t exact_threshold = 20000;  // exact pairwise below this many users
    std::size_t sample_size = 2000;       // comparison users per user in subsample mode
    std::uint64_t seed = 1;
};

// Mean Jaccard similarity between a user's train items and every other
// user's. Exact O(|U|^2) when |U| <= exact_threshold, else a seeded
// subsample of comparison users.
Scores sim_scores(const std::vector<std::vector<ItemId>>& train_sets, const SimOptions& opts = {});

// Cosine similarity between the user's binary item vector and the mean user
// vector, computed from per-user sparse sets and one item-count table.
Scores dis_scores(const std::vector<std::vector<ItemId>>& train_sets, std::uint32_t n_items);

// Validation nDCG of the (vanilla, unweighted) model per user.
Scores util_scores(const fm::FmModel& model,
                   const std::vector<std::vector<ItemId>>& val_candidates,
                   const std::vector<std::vector<ItemId>>& val_relevant);

// Zero mean, unit sample standard deviation. Throws DataError on fewer than
// two users or zero variance.
std::vector<double> standardize(const std::vector<double>& scores);

}  // namespace csrec::mainstream
