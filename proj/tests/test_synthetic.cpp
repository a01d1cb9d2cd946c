// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "csrec/synthetic.hpp"

using namespace csrec;

TEST_CASE("synthetic generator") {
    synthetic::SyntheticConfig cfg;
    cfg.n_users = 200;
    cfg.seed = 3;
    auto log = synthetic::generate(cfg);

    SUBCASE("population structure") {
        CHECK(log.n_users() == 200);
        std::size_t niche = 0;
        for (std::uint32_t u = 0; u < log.n_users(); ++u)
            if (log.users.name(u)[0] == 'n') ++niche;
        CHECK(niche == 40);  // 20% niche block
    }
    SUBCASE("activity bounds and no duplicates") {
        for (std::uint32_t u = 0; u < log.n_users(); ++u) {
            const bool is_niche = log.users.name(u)[0] == 'n';
            const auto& items = log.by_user[u];
            std::set<corpus::ItemId> uniq(items.begin(), items.end());
            CHECK(uniq.size() == items.size());
            if (is_niche) {
                CHECK(items.size() >= cfg.niche_min_activity);
                CHECK(items.size() <= cfg.niche_max_activity);
            } else {
                CHECK(items.size() >= cfg.mainstream_min_activity);
                CHECK(items.size() <= cfg.mainstream_max_activity);
            }
        }
    }
    SUBCASE("mainstream users stay in the popular pool, niche users mostly outside") {
        for (std::uint32_t u = 0; u < log.n_users(); ++u) {
            const bool is_niche = log.users.name(u)[0] == 'n';
            std::size_t pop = 0;
            for (auto i : log.by_user[u])
                if (log.items.name(i).rfind("pop", 0) == 0) ++pop;
            if (!is_niche) CHECK(pop == log.by_user[u].size());
            else CHECK(pop < log.by_user[u].size());
        }
    }
    SUBCASE("deterministic per seed") {
        auto again = synthetic::generate(cfg);
        REQUIRE(again.n_users() == log.n_users());
        for (std::uint32_t u = 0; u < log.n_users(); ++u) CHECK(again.by_user[u] == log.by_user[u]);
        cfg.seed = 4;
        auto other = synthetic::generate(cfg);
        bool differ = other.n_items() != log.n_items();
        for (std::uint32_t u = 0; !differ && u < log.n_users(); ++u)
            differ = other.by_user[u] != log.by_user[u];
        CHECK(differ);
    }
    SUBCASE("config validation") {
        synthetic::SyntheticConfig bad = cfg;
        bad.niche_pool = bad.niche_item_space + 1;
        CHECK_THROWS_AS(synthetic::generate(bad), ConfigError);
        bad = cfg;
        bad.mainstream_max_activity = bad.popular_pool + 1;
        CHECK_THROWS_AS(synthetic::generate(bad), ConfigError);
    }
}
