// SPDX-License-Identifier: Apache-2.0
#include "csrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace csrec::synthetic {

void SyntheticConfig::validate() const {
    if (n_users < 10) throw ConfigError("synthetic: need at least 10 users");
    if (!(niche_fraction >= 0.0 && niche_fraction <= 1.0))
        throw ConfigError("synthetic: niche_fraction must be in [0,1]");
    if (popular_pool == 0 || niche_item_space == 0 || niche_pool == 0)
        throw ConfigError("synthetic: item pools must be non-empty");
    if (niche_pool > niche_item_space)
        throw ConfigError("synthetic: niche_pool exceeds niche_item_space");
    if (mainstream_min_activity > mainstream_max_activity ||
        niche_min_activity > niche_max_activity)
        throw ConfigError("synthetic: activity min exceeds max");
    if (mainstream_max_activity > popular_pool)
        throw ConfigError("synthetic: mainstream activity exceeds popular pool");
    if (niche_max_activity > niche_pool)
        throw ConfigError("synthetic: niche activity exceeds niche pool");
    if (!(popular_mix >= 0.0 && popular_mix < 1.0))
        throw ConfigError("synthetic: popular_mix must be in [0,1)");
}

namespace {

// k distinct values from {0..n-1} via partial Fisher-Yates over a scratch
// index vector.
std::vector<std::uint32_t> choose(std::uint32_t n, std::uint32_t k, std::mt19937_64& gen) {
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::uint32_t j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::uint32_t> d(j, n - 1);
        std::swap(idx[j], idx[d(gen)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

corpus::InteractionLog generate(const SyntheticConfig& cfg) {
    cfg.validate();
    auto gen = rng::engine(cfg.seed, {rng::kSynthetic});

    const auto n_niche = std::uint32_t(std::lround(cfg.n_users * cfg.niche_fraction));
    const std::uint32_t n_main = cfg.n_users - n_niche;

    corpus::InteractionLog log;
    auto pop_item = [&](std::uint32_t k) { return log.items.intern("pop" + std::to_string(k)); };
    auto niche_item = [&](std::uint32_t k) { return log.items.intern("niche" + std::to_string(k)); };

    for (std::uint32_t u = 0; u < n_main; ++u) {
        std::uniform_int_distribution<std::uint32_t> act(cfg.mainstream_min_activity,
                                                         cfg.mainstream_max_activity);
        const std::uint32_t a = act(gen);
        auto picks = choose(cfg.popular_pool, a, gen);
        const auto uid = log.users.intern("m" + std::to_string(u));
        log.by_user.resize(uid + 1);
        for (auto p : picks) log.by_user[uid].push_back(pop_item(p));
    }

    for (std::uint32_t u = 0; u < n_niche; ++u) {
        std::uniform_int_distribution<std::uint32_t> act(cfg.niche_min_activity,
                                                         cfg.niche_max_activity);
        const std::uint32_t a = act(gen);
        auto n_pop = std::uint32_t(std::lround(a * cfg.popular_mix));
        if (n_pop >= a) n_pop = a - 1;  // keep at least one niche draw
        const std::uint32_t n_own = a - n_pop;

        const auto pool = choose(cfg.niche_item_space, cfg.niche_pool, gen);
        auto own_picks = choose(cfg.niche_pool, n_own, gen);
        auto pop_picks = choose(cfg.popular_pool, n_pop, gen);

        const auto uid = log.users.intern("n" + std::to_string(u));
        log.by_user.resize(uid + 1);
        for (auto p : own_picks) log.by_user[uid].push_back(niche_item(pool[p]));
        for (auto p : pop_picks) log.by_user[uid].push_back(pop_item(p));
    }
    return log;
}

}  // namespace csrec::synthetic
