// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "csrec/common.hpp"
#include "csrec/corpus.hpp"

namespace csrec::fm {

using corpus::ItemId;
using corpus::SplitDataset;
using corpus::UserId;

struct TrainConfig {
    double lr = 1e-4;
    double l2 = 1e-3;
    std::uint32_t batch_size = 512;
    std::uint32_t epochs = 300;
    std::uint32_t k = 32;
    std::uint64_t seed = 1;
    double init_scale = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

// Degree-2 FM over (user, item) one-hot fields. With exactly one active
// feature per field the pairwise term collapses to a single dot product:
//   logit(u, i) = w0 + w[u] + w[i'] + <V[u], V[i']>,  i' = n_users + i.
// Parameters live in one flat vector, layout [w0 | w (F) | V (F*k)],
// F = n_users + n_items, so optimizer state and gradients are congruent
// plain arrays.
class FmModel {
  public:
    FmModel(std::uint32_t n_users, std::uint32_t n_items, std::uint32_t k);

    static FmModel init(std::uint32_t n_users, std::uint32_t n_items, const TrainConfig& cfg);

    std::uint32_t n_users() const { return n_users_; }
    std::uint32_t n_items() const { return n_items_; }
    std::uint32_t k() const { return k_; }
    std::size_t n_features() const { return std::size_t(n_users_) + n_items_; }
    std::size_t n_params() const { return theta_.size(); }

    std::size_t user_feature(UserId u) const { return u; }
    std::size_t item_feature(ItemId i) const { return std::size_t(n_users_) + i; }

    double w0() const { return theta_[0]; }
    double& w0() { return theta_[0]; }
    double w(std::size_t feature) const { return theta_[1 + feature]; }
    double& w(std::size_t feature) { return theta_[1 + feature]; }
    std::span<const double> vrow(std::size_t feature) const {
        return {theta_.data() + v_offset_ + feature * k_, k_};
    }
    std::span<double> vrow(std::size_t feature) {
        return {theta_.data() + v_offset_ + feature * k_, k_};
    }

    std::span<const double> params() const { return theta_; }
    std::span<double> params() { return theta_; }
    std::size_t v_offset() const { return v_offset_; }

    double predict(UserId u, ItemId i) const;
    bool finite() const;

  private:
    std::uint32_t n_users_, n_items_, k_;
    std::size_t v_offset_;
    std::vector<double> theta_;
};

// One labeled (user, item) training sample with its loss coefficient
// omega(u) / n_u.
struct Sample {
    UserId user;
    ItemId item;
    float label;
    double coeff;
};

// sum_i coeff_i * BCE(sigmoid(logit_i), label_i) + l2/2 * (|w|^2 + |V|^2).
// w0 is not regularized.
struct Gradients {
    std::vector<double> g;  // congruent to FmModel::params()
    void reset() { std::fill(g.begin(), g.end(), 0.0); }
};

// Fills grads with the analytic gradient of the batch objective above and
// returns the coefficient-weighted BCE part of that objective.
double gradients(const FmModel& model, std::span<const Sample> batch, double l2, Gradients& grads);

// Batch objective value only (same quantity gradients() returns).
double batch_objective(const FmModel& model, std::span<const Sample> batch);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard Adam with bias correction, dense over all coordinates.
void adam_step(AdamState& state, FmModel& model, const Gradients& grads, const TrainConfig& cfg);

// Numerically stable BCE from the logit: softplus(z) - label * z.
double bce_from_logit(double logit, double label);

double user_loss(const FmModel& model, UserId user, std::span<const ItemId> positives,
                 std::span<const ItemId> negatives);

struct EpochStats {
    double data_loss = 0.0;   // sum_u omega(u) * L_R(u) at the end-of-epoch snapshot
    double l2_penalty = 0.0;  // l2/2 * (|w|^2 + |V|^2), reported separately
};

using EpochCallback = std::function<void(std::uint32_t epoch, const FmModel& model, const EpochStats&)>;

struct TrainResult {
    FmModel model;
    std::vector<EpochStats> history;
    bool negatives_with_replacement = false;
};

// Minimizes sum_u omega(u) * L_R(u), L_R the per-user BCE normalized by the
// user's sample count. Samples stream in seeded shuffled mini-batches with
// per-sample coefficient omega(u)/n_u; negatives are redrawn every epoch,
// keyed by (seed, epoch). Aborts with NumericError on a non-finite loss.
TrainResult train(const SplitDataset& split, const std::vector<double>& user_weights,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = nullptr);

}  // namespace csrec::fm
