#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "hmip/scenario.hpp"

using namespace hmip;

namespace {

std::string scenario_path(const char* name) {
    return std::string(HMIPLAB_SCENARIO_DIR) + "/" + name;
}

bool has_message(const ParseResult& r, const std::string& needle, int line = -1) {
    for (const Diagnostic& d : r.diagnostics) {
        if (d.message.find(needle) == std::string::npos) continue;
        if (line >= 0 && d.line != line) continue;
        return true;
    }
    return false;
}

const char* kTinyTopology =
    "[map]\n"        // line 1
    "id = M1\n"
    "n_thr = 2\n"
    "h_thr = 4\n"
    "[ar]\n"         // line 5
    "id = A1\n"
    "map = M1\n"
    "[cn]\n"         // line 8
    "id = C1\n"
    "[link]\n"       // line 10
    "a = C1\n"
    "b = M1\n"
    "[link]\n"       // line 13
    "a = M1\n"
    "b = A1\n"
    "[mn]\n"         // line 16
    "id = N1\n"
    "ar = A1\n";

} // namespace

TEST_CASE("bundled scenarios parse and validate") {
    const ParseResult fig4 = load_scenario_file(scenario_path("fig4.scn"));
    REQUIRE_MESSAGE(fig4.ok(), format_diagnostics("fig4.scn", fig4.diagnostics));
    const Scenario& s = *fig4.scenario;
    CHECK(s.maps.size() == 3);
    CHECK(s.ars.size() == 6);
    CHECK(s.cns.size() == 2);
    CHECK(s.globals.sim_time_s == 50.0);

    int mn19_legs = 0;
    for (const LegDecl& l : s.legs)
        if (l.mn == "MN19") ++mn19_legs;
    CHECK(mn19_legs == 4);

    for (const char* name : {"rate_sweep.scn", "speed_sweep.scn", "overload.scn"}) {
        const ParseResult r = load_scenario_file(scenario_path(name));
        CHECK_MESSAGE(r.ok(), format_diagnostics(name, r.diagnostics));
    }
}

TEST_CASE("round trip through the canonical text form") {
    const ParseResult first = load_scenario_file(scenario_path("fig4.scn"));
    REQUIRE(first.ok());

    const std::string text = serialize_scenario(*first.scenario);
    const ParseResult second = parse_scenario(text);
    REQUIRE_MESSAGE(second.ok(), format_diagnostics("serialized", second.diagnostics));
    CHECK(*second.scenario == *first.scenario);

    CHECK(serialize_scenario(*second.scenario) == text);
}

TEST_CASE("dangling references carry the offending line") {
    std::string text = kTinyTopology;
    text += "[leg]\n";  // line 19
    text += "mn = N1\n";
    text += "from = A1\n";
    text += "to = AR99\n";
    text += "at_s = 5\n";

    const ParseResult r = parse_scenario(text);
    CHECK_FALSE(r.ok());
    CHECK(has_message(r, "unknown ar 'AR99'", 19));
}

TEST_CASE("threshold ordering is rejected") {
    const ParseResult r = parse_scenario(
        "[map]\nid = M1\nn_thr = 10\nh_thr = 5\n"
        "[ar]\nid = A1\nmap = M1\n"
        "[link]\na = M1\nb = A1\n");
    CHECK_FALSE(r.ok());
    CHECK(has_message(r, "n_thr exceeds h_thr"));
}

TEST_CASE("parser diagnostics") {
    SUBCASE("unknown key") {
        const ParseResult r = parse_scenario("[map]\nid = M1\nn_thr = 1\nh_thr = 2\nfoo = 3\n");
        CHECK(has_message(r, "unknown key 'foo'", 5));
    }
    SUBCASE("unknown section") {
        const ParseResult r = parse_scenario("[frobnicator]\nid = X\n");
        CHECK_FALSE(r.ok());
        CHECK(has_message(r, "frobnicator", 1));
    }
    SUBCASE("missing required key") {
        const ParseResult r = parse_scenario("[map]\nid = M1\nn_thr = 1\n");
        CHECK(has_message(r, "missing required key 'h_thr'", 1));
    }
    SUBCASE("duplicate key") {
        const ParseResult r = parse_scenario("[map]\nid = M1\nid = M2\nn_thr = 1\nh_thr = 2\n");
        CHECK_FALSE(r.ok());
    }
    SUBCASE("malformed number") {
        const ParseResult r = parse_scenario("sim_time_s = banana\n" + std::string(kTinyTopology));
        CHECK(has_message(r, "expected a number", 1));
    }
    SUBCASE("global key after the first section") {
        const ParseResult r = parse_scenario(std::string(kTinyTopology) + "sim_time_s = 9\n");
        CHECK_FALSE(r.ok());
    }
}

TEST_CASE("semantic validation of built scenarios") {
    const ParseResult base = parse_scenario(kTinyTopology);
    REQUIRE_MESSAGE(base.ok(), format_diagnostics("tiny", base.diagnostics));

    SUBCASE("flows must reference declared endpoints and order their window") {
        Scenario s = *base.scenario;
        s.flows.push_back({"C9", "N1", 1e5, 512, 1.0, 2.0});
        CHECK_FALSE(validate_scenario(s).empty());

        s = *base.scenario;
        s.flows.push_back({"C1", "N1", 1e5, 512, 5.0, 2.0});
        CHECK_FALSE(validate_scenario(s).empty());

        s = *base.scenario;
        s.flows.push_back({"C1", "N1", 1e5, 512, 1.0, 9.0});
        s.flows.push_back({"C1", "N1", 2e5, 512, 2.0, 8.0});
        CHECK_FALSE(validate_scenario(s).empty()); // duplicate (cn, mn) pair
    }
    SUBCASE("legs must chain from the initial attachment") {
        Scenario s = *base.scenario;
        s.ars.push_back({"A2", "M1", 50.0, 0.0, 75.0});
        s.links.push_back({"M1", "A2", {}, {}});
        s.legs.push_back({"N1", "A2", "A1", 5.0, {}});
        CHECK_FALSE(validate_scenario(s).empty()); // N1 sits at A1, not A2

        s.legs = {{"N1", "A1", "A2", 5.0, {}}, {"N1", "A2", "A1", 5.0, {}}};
        CHECK_FALSE(validate_scenario(s).empty()); // at_s not strictly increasing
    }
    SUBCASE("routes need geometry and a positive speed") {
        Scenario s = *base.scenario;
        s.ars.push_back({"A2", "M1", 50.0, 0.0, 75.0});
        s.links.push_back({"M1", "A2", {}, {}});
        s.routes.push_back({"N1", {"A1", "A2"}, 0.0, false});
        CHECK_FALSE(validate_scenario(s).empty()); // speed is 0

        s.mns[0].speed = 10.0;
        CHECK(validate_scenario(s).empty());

        s.routes[0].path = {"A2", "A1"};
        CHECK_FALSE(validate_scenario(s).empty()); // must start at the MN's AR

        s.routes[0].path = {"A1", "A1"};
        CHECK_FALSE(validate_scenario(s).empty()); // zero-length segment
    }
    SUBCASE("legs and a route are mutually exclusive") {
        Scenario s = *base.scenario;
        s.ars.push_back({"A2", "M1", 50.0, 0.0, 75.0});
        s.links.push_back({"M1", "A2", {}, {}});
        s.mns[0].speed = 10.0;
        s.legs.push_back({"N1", "A1", "A2", 5.0, {}});
        s.routes.push_back({"N1", {"A1", "A2"}, 0.0, false});
        CHECK_FALSE(validate_scenario(s).empty());
    }
    SUBCASE("s_max must cover the fastest MN") {
        Scenario s = *base.scenario;
        s.mns[0].speed = 50.0;
        CHECK_FALSE(validate_scenario(s).empty());
    }
    SUBCASE("disconnected wired nodes are rejected") {
        Scenario s = *base.scenario;
        s.routers.push_back({"LONER"});
        CHECK_FALSE(validate_scenario(s).empty());
    }
    SUBCASE("shared id namespace") {
        Scenario s = *base.scenario;
        s.cns.push_back({"M1"});
        CHECK_FALSE(validate_scenario(s).empty());
    }
}

TEST_CASE("serialization is deterministic and covers optionals") {
    // speed_sweep has a route with a loop, overload has explicit on_s values;
    // both must survive the round trip exactly.
    for (const char* name : {"speed_sweep.scn", "overload.scn"}) {
        const ParseResult r = load_scenario_file(scenario_path(name));
        REQUIRE(r.ok());
        const std::string a = serialize_scenario(*r.scenario);
        CHECK(a == serialize_scenario(*r.scenario));
        const ParseResult back = parse_scenario(a);
        REQUIRE_MESSAGE(back.ok(), format_diagnostics(name, back.diagnostics));
        CHECK(*back.scenario == *r.scenario);
    }
}
