// SPDX-License-Identifier: Apache-2.0
#include "csrec/fm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csrec::fm {

void TrainConfig::validate() const {
    if (!(lr > 0)) throw ConfigError("train: lr must be > 0");
    if (l2 < 0) throw ConfigError("train: l2 must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (k < 1) throw ConfigError("train: k must be >= 1");
    if (init_scale < 0) throw ConfigError("train: init_scale must be >= 0");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
        throw ConfigError("train: beta1/beta2 must be in [0,1)");
    if (!(eps > 0)) throw ConfigError("train: eps must be > 0");
}

FmModel::FmModel(std::uint32_t n_users, std::uint32_t n_items, std::uint32_t k)
    : n_users_(n_users), n_items_(n_items), k_(k) {
    if (n_users == 0 || n_items == 0) throw ConfigError("model: need positive user/item counts");
    v_offset_ = 1 + n_features();
    theta_.assign(v_offset_ + n_features() * k_, 0.0);
}

FmModel FmModel::init(std::uint32_t n_users, std::uint32_t n_items, const TrainConfig& cfg) {
    cfg.validate();
    FmModel model(n_users, n_items, cfg.k);
    if (cfg.init_scale > 0) {
        auto gen = rng::engine(cfg.seed, {rng::kInit});
        std::normal_distribution<double> dist(0.0, cfg.init_scale);
        for (std::size_t i = model.v_offset_; i < model.theta_.size(); ++i)
            model.theta_[i] = dist(gen);
    }
    return model;
}

double FmModel::predict(UserId u, ItemId i) const {
    if (u >= n_users_ || i >= n_items_) throw DataError("predict: id out of range");
    const std::size_t fu = user_feature(u), fi = item_feature(i);
    const double* vu = theta_.data() + v_offset_ + fu * k_;
    const double* vi = theta_.data() + v_offset_ + fi * k_;
    double dot = 0.0;
    for (std::uint32_t d = 0; d < k_; ++d) dot += vu[d] * vi[d];
    return theta_[0] + theta_[1 + fu] + theta_[1 + fi] + dot;
}

bool FmModel::finite() const {
    for (double p : theta_)
        if (!std::isfinite(p)) return false;
    return true;
}

double bce_from_logit(double logit, double label) {
    // softplus(z) - y*z, softplus evaluated stably
    const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
    return softplus - label * logit;
}

namespace {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double gradients(const FmModel& model, std::span<const Sample> batch, double l2, Gradients& grads) {
    if (batch.empty()) throw DataError("gradients: empty batch");
    if (grads.g.size() != model.n_params()) grads.g.assign(model.n_params(), 0.0);
    grads.reset();

    const auto k = model.k();
    const std::size_t voff = model.v_offset();
    const double* theta = model.params().data();
    double* g = grads.g.data();
    double loss = 0.0;

    for (const Sample& s : batch) {
        const std::size_t fu = model.user_feature(s.user);
        const std::size_t fi = model.item_feature(s.item);
        const double* vu = theta + voff + fu * k;
        const double* vi = theta + voff + fi * k;
        double dot = 0.0;
        for (std::uint32_t d = 0; d < k; ++d) dot += vu[d] * vi[d];
        const double z = theta[0] + theta[1 + fu] + theta[1 + fi] + dot;

        loss += s.coeff * bce_from_logit(z, s.label);
        const double gz = s.coeff * (sigmoid(z) - s.label);
        g[0] += gz;
        g[1 + fu] += gz;
        g[1 + fi] += gz;
        double* gu = g + voff + fu * k;
        double* gi = g + voff + fi * k;
        for (std::uint32_t d = 0; d < k; ++d) {
            gu[d] += gz * vi[d];
            gi[d] += gz * vu[d];
        }
    }
    if (l2 != 0.0) {  // w and V regularized, w0 not
        for (std::size_t i = 1; i < grads.g.size(); ++i) g[i] += l2 * theta[i];
    }
    return loss;
}

double batch_objective(const FmModel& model, std::span<const Sample> batch) {
    double loss = 0.0;
    for (const Sample& s : batch)
        loss += s.coeff * bce_from_logit(model.predict(s.user, s.item), s.label);
    return loss;
}

void adam_step(AdamState& state, FmModel& model, const Gradients& grads, const TrainConfig& cfg) {
    if (state.m.size() != model.n_params() || grads.g.size() != model.n_params())
        throw ConfigError("adam_step: shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
    double* theta = model.params().data();
    const double* g = grads.g.data();
    for (std::size_t i = 0; i < state.m.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

double user_loss(const FmModel& model, UserId user, std::span<const ItemId> positives,
                 std::span<const ItemId> negatives) {
    if (positives.empty()) throw DataError("user_loss: positives must be non-empty");
    double sum = 0.0;
    for (ItemId i : positives) sum += bce_from_logit(model.predict(user, i), 1.0);
    for (ItemId i : negatives) sum += bce_from_logit(model.predict(user, i), 0.0);
    return sum / double(positives.size() + negatives.size());
}

TrainResult train(const SplitDataset& split, const std::vector<double>& user_weights,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    if (user_weights.size() != split.n_users)
        throw ConfigError("train: one weight per user required");
    for (double w : user_weights)
        if (!(w > 0) || !std::isfinite(w)) throw ConfigError("train: user weights must be positive");

    TrainResult result{FmModel::init(split.n_users, split.n_items, cfg), {}, false};
    FmModel& model = result.model;
    AdamState state(model.n_params());
    Gradients grads;
    grads.g.assign(model.n_params(), 0.0);

    std::vector<Sample> samples;
    samples.reserve(split.n_train_samples(split.neg_ratio));

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto negatives = corpus::sample_training_negatives(split, split.neg_ratio, cfg.seed, epoch);
        if (!negatives.replacement_users.empty()) result.negatives_with_replacement = true;

        samples.clear();
        for (UserId u = 0; u < split.n_users; ++u) {
            const auto& pos = split.train[u];
            const auto& neg = negatives.by_user[u];
            if (pos.empty()) continue;
            const double coeff = user_weights[u] / double(pos.size() + neg.size());
            for (ItemId i : pos) samples.push_back({u, i, 1.0f, coeff});
            for (ItemId i : neg) samples.push_back({u, i, 0.0f, coeff});
        }
        auto gen = rng::engine(cfg.seed, {rng::kShuffle, epoch});
        std::shuffle(samples.begin(), samples.end(), gen);

        for (std::size_t off = 0, batch_idx = 0; off < samples.size();
             off += cfg.batch_size, ++batch_idx) {
            const std::size_t len = std::min<std::size_t>(cfg.batch_size, samples.size() - off);
            const double batch_loss =
                gradients(model, {samples.data() + off, len}, cfg.l2, grads);
            if (!std::isfinite(batch_loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_idx));
            adam_step(state, model, grads, cfg);
        }

        // Recorded loss is the weighted objective at the end-of-epoch snapshot
        // over this epoch's samples, summed user by user so it can be audited
        // against an independent recomputation.
        EpochStats stats;
        for (UserId u = 0; u < split.n_users; ++u) {
            if (split.train[u].empty()) continue;
            stats.data_loss +=
                user_weights[u] * user_loss(model, u, split.train[u], negatives.by_user[u]);
        }
        const auto theta = model.params();
        double sq = 0.0;
        for (std::size_t i = 1; i < theta.size(); ++i) sq += theta[i] * theta[i];
        stats.l2_penalty = 0.5 * cfg.l2 * sq;
        if (!std::isfinite(stats.data_loss))
            throw NumericError("train: non-finite epoch loss at epoch " + std::to_string(epoch));

        result.history.push_back(stats);
        if (on_epoch) on_epoch(epoch, model, stats);
    }
    return result;
}

}  // namespace csrec::fm
