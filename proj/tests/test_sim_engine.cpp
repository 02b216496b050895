#include "doctest.h"

#include <algorithm>
#include <string>

#include "hmip/event_queue.hpp"
#include "hmip/scenario.hpp"
#include "hmip/sim_engine.hpp"

using namespace hmip;

namespace {

Scenario load(const char* name) {
    const ParseResult r = load_scenario_file(std::string(HMIPLAB_SCENARIO_DIR) + "/" + name);
    REQUIRE_MESSAGE(r.ok(), format_diagnostics(name, r.diagnostics));
    return *r.scenario;
}

Scenario tiny_scenario(const char* extra = "") {
    const std::string text = std::string(
        "sim_time_s = 10\n"
        "start_jitter_s = 0\n"
        "[map]\nid = M1\nn_thr = 2\nh_thr = 4\n"
        "[ar]\nid = A1\nmap = M1\nx = 0\n"
        "[ar]\nid = A2\nmap = M1\nx = 100\n"
        "[cn]\nid = C1\n"
        "[link]\na = C1\nb = M1\n"
        "[link]\na = M1\nb = A1\n"
        "[link]\na = M1\nb = A2\n") + extra;
    const ParseResult r = parse_scenario(text);
    REQUIRE_MESSAGE(r.ok(), format_diagnostics("tiny", r.diagnostics));
    return *r.scenario;
}

long count_tag(const RunResult& r, const char* tag) {
    return std::count_if(r.trace.begin(), r.trace.end(),
                         [&](const TraceEntry& t) { return t.tag == tag; });
}

} // namespace

TEST_CASE("event queue orders by time, then insertion") {
    EventQueue q;
    q.push(1.0, RouterAdvertEvent{1});
    q.push(1.0, RouterAdvertEvent{2});
    q.push(0.5, RouterAdvertEvent{3});
    REQUIRE(q.size() == 3);
    CHECK(std::get<RouterAdvertEvent>(q.pop().payload).ar == 3);
    CHECK(std::get<RouterAdvertEvent>(q.pop().payload).ar == 1);
    CHECK(std::get<RouterAdvertEvent>(q.pop().payload).ar == 2);
    CHECK(q.empty());
}

TEST_CASE("policy labels") {
    CHECK(PolicyConfig::ac().label() == "ac");
    CHECK(PolicyConfig::baseline().label() == "baseline");
    CHECK(PolicyConfig{PolicyConfig::Scheme::AdmissionControl, false, true}.label() == "ac-norepl");
    CHECK(PolicyConfig{PolicyConfig::Scheme::AdmissionControl, true, false}.label() == "ac-noresel");
    CHECK(PolicyConfig{PolicyConfig::Scheme::AdmissionControl, false, false}.label() ==
          "ac-norepl-noresel");
}

TEST_CASE("wired topology metrics") {
    const Topology t = build_topology(load("fig4.scn"));
    REQUIRE(t.index_of.size() == 12); // 3 MAPs + NET + 6 ARs + 2 CNs
    const int cn = t.index_of.at("CN20");
    const int ar6 = t.index_of.at("AR6");

    CHECK(t.path_hops(cn, ar6) == 3);
    CHECK(t.path_latency(cn, ar6) == doctest::Approx(0.03));
    // 512-byte packet over three 2 Mb/s links: 0.03 s latency + 3 * 2.048 ms.
    CHECK(t.data_delay(cn, ar6, 512) == doctest::Approx(0.036144));
    CHECK(t.data_delay(ar6, ar6, 512) == 0.0);
    CHECK(t.reachable(cn, ar6));
    CHECK(t.path_hops(t.index_of.at("MAP3"), ar6) == 1);
}

TEST_CASE("a single flow delivers with the closed-form latency") {
    Scenario s = tiny_scenario(
        "[mn]\nid = N1\nar = A1\n"
        "[flow]\ncn = C1\nmn = N1\nrate_bps = 200000\npacket_bytes = 512\n"
        "start_s = 1\nstop_s = 9\n");

    const RunResult r = run_simulation(s, PolicyConfig::ac());
    CHECK(r.violations.empty());
    REQUIRE_FALSE(r.metrics.deliveries.empty());

    // Two links (C1 -> M1 -> A1), each 10 ms + 512 * 8 / 2 Mb/s.
    CHECK(r.metrics.deliveries.front().time_s == doctest::Approx(1.024096));

    // CBR accounting: 8 s window at 48.83 pkt/s, everything delivered.
    const MetricsReport& m = r.metrics;
    CHECK(m.total_sent() > 300);
    CHECK(m.total_lost() == 0);
    CHECK(m.total_sent() == m.total_delivered() + m.total_in_flight());
    CHECK(m.new_attempts == 1);
    CHECK(m.new_rejected == 0);
    CHECK(m.handoffs.empty());

    // One advert per AR per second, scheduled on the whole-second grid.
    CHECK(count_tag(r, "advert") == 20);
}

TEST_CASE("a leg to the AR the MN already sits on is a no-op") {
    Scenario s = tiny_scenario(
        "[mn]\nid = N1\nar = A1\n"
        "[flow]\ncn = C1\nmn = N1\nrate_bps = 200000\npacket_bytes = 512\n"
        "start_s = 1\nstop_s = 9\n"
        "[leg]\nmn = N1\nfrom = A1\nto = A1\nat_s = 5\n");

    const RunResult r = run_simulation(s, PolicyConfig::ac());
    CHECK(r.violations.empty());
    CHECK(r.metrics.handoffs.empty());
    CHECK(r.metrics.total_lost() == 0);
    CHECK(r.metrics.handoff_attempts == 0);
}

TEST_CASE("an intra-domain leg keeps traffic flowing with a small gap") {
    Scenario s = tiny_scenario(
        "[mn]\nid = N1\nar = A1\n"
        "[flow]\ncn = C1\nmn = N1\nrate_bps = 200000\npacket_bytes = 512\n"
        "start_s = 1\nstop_s = 9\n"
        "[leg]\nmn = N1\nfrom = A1\nto = A2\nat_s = 5\n");

    const RunResult r = run_simulation(s, PolicyConfig::ac());
    CHECK(r.violations.empty());
    REQUIRE(r.metrics.handoffs.size() == 1);
    const HandoffRecord& h = r.metrics.handoffs.front();
    CHECK(h.type == HandoffType::Intra);
    CHECK(h.start_s == doctest::Approx(5.0));
    CHECK_FALSE(h.dropped);
    REQUIRE(h.latency_s.has_value());
    CHECK(*h.latency_s > 0.0);
    CHECK(*h.latency_s < 0.5);

    // The MN never re-registers with a different MAP, so no HA round trip
    // is involved and packets in flight to the old AR are the only losses.
    CHECK(r.metrics.total_lost() <= 3);
    CHECK(r.metrics.total_sent() ==
          r.metrics.total_delivered() + r.metrics.total_lost() + r.metrics.total_in_flight());
}

TEST_CASE("fig4 walk produces the canonical handoff sequence") {
    const Scenario s = load("fig4.scn");

    for (const PolicyConfig policy : {PolicyConfig::ac(), PolicyConfig::baseline()}) {
        CAPTURE(policy.label());
        const RunResult r = run_simulation(s, policy);
        CHECK(r.violations.empty());

        std::vector<HandoffRecord> mn19;
        for (const HandoffRecord& h : r.metrics.handoffs)
            if (h.mn == "MN19") mn19.push_back(h);

        REQUIRE(mn19.size() == 4);
        CHECK(mn19[0].type == HandoffType::Intra);
        CHECK(mn19[1].type == HandoffType::Inter);
        CHECK(mn19[2].type == HandoffType::Intra);
        CHECK(mn19[3].type == HandoffType::Inter);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(mn19[i].start_s == doctest::Approx(10.0 * (1.0 + static_cast<double>(i))));
            CHECK_FALSE(mn19[i].dropped);
            REQUIRE(mn19[i].latency_s.has_value());
            CHECK(*mn19[i].latency_s > 0.0);
            CHECK(*mn19[i].latency_s < 1.0);
        }

        CHECK(r.metrics.insufficient_resources_bas == 0);
        CHECK(r.metrics.handoff_dropped == 0);
        CHECK(r.metrics.new_rejected == 0);
        CHECK(count_tag(r, "advert") == 300); // 6 ARs, 50 one-second ticks
    }
}

TEST_CASE("identical inputs replay to identical reports") {
    const Scenario s = load("rate_sweep.scn");
    RunOptions opt;
    opt.seed = 1;

    const RunResult a = run_simulation(s, PolicyConfig::ac(), opt);
    const RunResult b = run_simulation(s, PolicyConfig::ac(), opt);
    CHECK(a.report_text() == b.report_text());

    opt.seed = 2;
    const RunResult c = run_simulation(s, PolicyConfig::ac(), opt);
    CHECK(a.report_text() != c.report_text()); // jitter depends on the seed
}

TEST_CASE("selection threshold override can starve every registration") {
    const Scenario s = load("fig4.scn");
    RunOptions opt;
    // The weight comparison is strict, so a zero threshold rejects every
    // candidate, idle weight-0 MNs included. (Any positive threshold would
    // still admit stationary idle MNs, whose weight is exactly 0.)
    opt.t_map = 0.0;

    const RunResult r = run_simulation(s, PolicyConfig::ac(), opt);
    CHECK(r.violations.empty());
    // power-on for all three MNs, one retry per session open (MN1, MN19)
    // and one per MN19 leg: 3 + 2 + 4 attempts, every one rejected
    CHECK(r.metrics.new_attempts == 9);
    CHECK(r.metrics.new_rejected == 9);
    CHECK(r.metrics.total_delivered() == 0);
    CHECK(r.metrics.total_sent() == r.metrics.total_lost());
}

TEST_CASE("a scenario with no traffic reports empty statistics") {
    const Scenario s = tiny_scenario();
    const RunResult r = run_simulation(s, PolicyConfig::ac());
    CHECK(r.violations.empty());
    CHECK(r.metrics.total_sent() == 0);
    CHECK_FALSE(r.metrics.blocking_probability().has_value());
    CHECK_FALSE(r.metrics.dropping_probability().has_value());
    CHECK(metrics_csv_row(r.metrics, "ac", 1, 0.0, 0.0) == "ac,1,0,0,0,n/a,0,n/a,n/a");
}

TEST_CASE("invalid scenarios are rejected before any event runs") {
    Scenario s = tiny_scenario();
    s.mns.push_back({"GHOST", "A9", 0.0, 0.0});
    CHECK_THROWS_AS(run_simulation(s, PolicyConfig::ac()), std::invalid_argument);
}
