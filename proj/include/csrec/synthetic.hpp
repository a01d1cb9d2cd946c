// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "csrec/corpus.hpp"

namespace csrec::synthetic {

// Planted mainstream/niche population. A majority block samples from one
// shared popular-item pool with high overlap; a minority block samples from
// per-user niche pools (drawn from a separate item space) with low overlap
// and lower activity. popular_mix is the share of a niche user's
// interactions taken from the popular pool.
struct SyntheticConfig {
    std::uint32_t n_users = 1000;
    double niche_fraction = 0.2;
    std::uint32_t popular_pool = 200;
    std::uint32_t niche_item_space = 400;
    std::uint32_t niche_pool = 60;
    std::uint32_t mainstream_min_activity = 25;
    std::uint32_t mainstream_max_activity = 60;
    std::uint32_t niche_min_activity = 16;
    std::uint32_t niche_max_activity = 30;
    double popular_mix = 0.15;
    std::uint64_t seed = 1;

    void validate() const;
};

// User external ids are "m<k>" for the mainstream block and "n<k>" for the
// niche block; item external ids are "pop<k>" / "niche<k>".
corpus::InteractionLog generate(const SyntheticConfig& cfg);

}  // namespace csrec::synthetic
