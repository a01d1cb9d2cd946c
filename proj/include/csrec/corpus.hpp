// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "csrec/common.hpp"

namespace csrec::corpus {

using UserId = std::uint32_t;  // dense, [0, n_users)
using ItemId = std::uint32_t;  // dense, [0, n_items)

// External-id <-> dense-id table, first-seen order.
class IdMap {
  public:
    std::uint32_t intern(const std::string& name);
    std::optional<std::uint32_t> find(const std::string& name) const;
    const std::string& name(std::uint32_t id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Deduplicated implicit user-item interactions. Rating values and
// timestamps in the input are discarded: presence of a row means relevance.
struct InteractionLog {
    IdMap users;
    IdMap items;
    std::vector<std::vector<ItemId>> by_user;  // per-user items, first-seen order

    std::size_t n_users() const { return users.size(); }
    std::size_t n_items() const { return items.size(); }
    std::size_t n_interactions() const;
    double density() const;
};

struct InputFormat {
    std::string delimiter;  // "" = auto-detect ("::", tab, comma, whitespace)
};

struct SplitConfig {
    std::uint32_t min_train = 5;
    std::uint32_t min_val = 5;
    std::uint32_t min_test = 5;
    std::uint32_t max_relevant = 200;
    std::uint32_t neg_ratio = 4;
    std::uint32_t candidate_total = 500;
    std::uint64_t seed = 1;

    std::uint32_t min_total() const { return min_train + min_val + min_test; }
    void validate() const;  // throws ConfigError
};

// Per-user disjoint train/val/test item sets plus evaluation candidates.
// Item vectors are sorted ascending; candidate lists keep their sampled
// order (relevant items first). Immutable once built.
struct SplitDataset {
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::uint32_t neg_ratio = 4;  // negatives per train item, carried from SplitConfig
    std::vector<std::vector<ItemId>> train;
    std::vector<std::vector<ItemId>> val;
    std::vector<std::vector<ItemId>> test;
    std::vector<std::vector<ItemId>> val_candidates;
    std::vector<std::vector<ItemId>> test_candidates;

    // All relevant items of one user (train + val + test), sorted.
    std::vector<ItemId> relevant_of(UserId u) const;
    std::size_t n_train_samples(std::uint32_t neg_ratio) const;
};

enum class EvalSide { val, test };

struct NegativeSamples {
    std::vector<std::vector<ItemId>> by_user;
    // Users whose eligible pool was smaller than the request and were
    // sampled with replacement.
    std::vector<UserId> replacement_users;
};

InteractionLog load_interactions(const std::filesystem::path& path, const InputFormat& fmt = {});

// Drops users below min_total interactions, truncates users above
// max_relevant down to exactly max_relevant (seeded uniform sampling
// without replacement), drops now-empty items and re-densifies ids.
InteractionLog filter_and_truncate(const InteractionLog& log, const SplitConfig& cfg);

// Partitions each user's items with proportions min_train:min_val:min_test.
// val/test get floor(m * min/total) items each, leftovers go to train.
SplitDataset split(const InteractionLog& log, const SplitConfig& cfg);

// neg_ratio * |train(u)| items per user, uniform over the complement of the
// user's full relevant set, without replacement when the pool allows.
// Deterministic in (seed, epoch, user).
NegativeSamples sample_training_negatives(const SplitDataset& split, std::uint32_t neg_ratio,
                                          std::uint64_t seed, std::uint64_t epoch);

// Candidate list = the user's val (or test) items plus a seeded sample of
// items irrelevant to the user in every partition, up to candidate_total.
std::vector<std::vector<ItemId>> build_candidates(const SplitDataset& split, EvalSide side,
                                                  const SplitConfig& cfg);

}  // namespace csrec::corpus
