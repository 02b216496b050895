#include "doctest.h"

#include <random>
#include <vector>

#include "hmip/mobile_node.hpp"
#include "oracles.hpp"

using namespace hmip;

TEST_CASE("data activity arms the ready timer") {
    MobileNode mn;

    on_data_activity(mn, 10.0, 10.0);
    CHECK(mn.state == MnState::Ready);
    CHECK(mn.ready_timer_deadline == 20.0);

    // A reset moves the deadline forward from the new activity time.
    mn.ready_timer_deadline = 15.0;
    on_data_activity(mn, 12.0, 10.0);
    CHECK(mn.ready_timer_deadline == 22.0);

    // Same-tick activity is idempotent.
    on_data_activity(mn, 12.0, 10.0);
    CHECK(mn.ready_timer_deadline == 22.0);
}

TEST_CASE("timer expiry is a no-op unless the armed deadline was reached") {
    MobileNode mn;
    on_data_activity(mn, 10.0, 10.0);

    SUBCASE("expiry exactly at the deadline") {
        on_timer_expiry(mn, 20.0);
        CHECK(mn.state == MnState::Idle);
        CHECK_FALSE(mn.ready_timer_deadline.has_value());
    }
    SUBCASE("stale expiry after a re-arm") {
        on_data_activity(mn, 12.0, 10.0); // deadline now 22
        on_timer_expiry(mn, 20.0);        // scheduled for the superseded deadline
        CHECK(mn.state == MnState::Ready);
        CHECK(mn.ready_timer_deadline == 22.0);
    }
    SUBCASE("spurious expiry while idle") {
        on_timer_expiry(mn, 20.0);
        on_timer_expiry(mn, 25.0);
        CHECK(mn.state == MnState::Idle);
    }
}

TEST_CASE("timer state matches an event-log replay") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dt(0.1, 3.0);

    for (int round = 0; round < 200; ++round) {
        MobileNode mn;
        oracle::TimerReplay replay;
        std::vector<double> pending; // expiry events the engine would schedule

        double now = 0.0;
        for (int step = 0; step < 40; ++step) {
            now += dt(rng);

            // Fire every scheduled expiry that is due, oldest first.
            std::sort(pending.begin(), pending.end());
            while (!pending.empty() && pending.front() <= now) {
                const double t = pending.front();
                pending.erase(pending.begin());
                on_timer_expiry(mn, t);
                replay.expiry(t);
            }

            if (rng() % 2 == 0) {
                const double duration = dt(rng);
                on_data_activity(mn, now, duration);
                replay.activity(now, duration);
                pending.push_back(now + duration);
            }

            CHECK((mn.state == MnState::Ready) == replay.ready);
            if (replay.ready) CHECK(mn.ready_timer_deadline == replay.deadline);
        }
    }
}

TEST_CASE("map table replacement keeps the last duplicate") {
    MobileNode mn;
    mn.map_table = {{1, 5, 10, 1}};

    update_map_table(mn, {{2, 0, 8, 2}, {3, 1, 8, 3}});
    REQUIRE(mn.map_table.size() == 2);
    CHECK(mn.map_table[0].map_id == 2);
    CHECK(mn.map_table[1].map_id == 3);

    update_map_table(mn, {{1, 4, 10, 1}, {1, 7, 10, 1}});
    REQUIRE(mn.map_table.size() == 1);
    CHECK(mn.map_table[0].tot_cn == 7);

    update_map_table(mn, {});
    CHECK(mn.map_table.empty());
}
