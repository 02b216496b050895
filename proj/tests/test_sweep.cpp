#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "hmip/scenario.hpp"
#include "hmip/sweep.hpp"

using namespace hmip;

namespace {

Scenario load(const char* name) {
    const ParseResult r = load_scenario_file(std::string(HMIPLAB_SCENARIO_DIR) + "/" + name);
    REQUIRE_MESSAGE(r.ok(), format_diagnostics(name, r.diagnostics));
    return *r.scenario;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

TEST_CASE("representative values fall back to the scenario contents") {
    const Scenario s = load("rate_sweep.scn");
    CHECK(representative_rate(s) == doctest::Approx(200000.0));
    CHECK(representative_speed(s) == doctest::Approx(10.0));

    const Scenario fig4 = load("fig4.scn");
    CHECK(representative_speed(fig4) == doctest::Approx(5.0));
}

TEST_CASE("apply_sweep_value rewrites only the swept dimension") {
    SUBCASE("rate applies to every flow") {
        Scenario s = load("rate_sweep.scn");
        apply_sweep_value(s, SweepParam::Rate, 350000.0);
        for (const FlowDecl& f : s.flows) CHECK(f.rate_bps == doctest::Approx(350000.0));
        CHECK(s.mns[0].speed == doctest::Approx(0.0)); // stationary nodes untouched
    }

    SUBCASE("speed applies to moving nodes and overrides per-leg speeds") {
        Scenario s = load("speed_sweep.scn");
        apply_sweep_value(s, SweepParam::Speed, 7.0);
        for (const MnDecl& mn : s.mns) {
            const bool moves = mn.id == "X" || mn.id == "MN19";
            CHECK(mn.speed == doctest::Approx(moves ? 7.0 : 0.0));
        }
        for (const LegDecl& leg : s.legs) CHECK_FALSE(leg.speed.has_value());
    }

    SUBCASE("none leaves the scenario alone") {
        Scenario s = load("rate_sweep.scn");
        const std::string before = serialize_scenario(s);
        apply_sweep_value(s, SweepParam::None, 123.0);
        CHECK(serialize_scenario(s) == before);
    }
}

TEST_CASE("a rate sweep emits one row per (value, policy, seed)") {
    RunConfig cfg;
    cfg.policies = {PolicyConfig::ac(), PolicyConfig::baseline()};
    cfg.seeds = {1, 2, 3};
    cfg.sweep = SweepParam::Rate;
    cfg.sweep_values = {100000, 200000, 300000, 400000, 500000};

    const SweepResult res = run_sweep(load("rate_sweep.scn"), cfg);
    REQUIRE(res.ok);
    REQUIRE(res.runs.size() == 30);

    const std::vector<std::string> rows = lines_of(res.csv);
    REQUIRE(rows.size() == 31);
    CHECK(rows[0] == metrics_csv_header());

    std::size_t i = 1;
    for (double value : cfg.sweep_values) {
        for (const char* policy : {"ac", "baseline"}) {
            for (unsigned seed : cfg.seeds) {
                CAPTURE(i);
                const std::vector<std::string> cells = split_row(rows[i]);
                REQUIRE(cells.size() == 9);
                CHECK(cells[0] == policy);
                CHECK(cells[1] == std::to_string(seed));
                CHECK(std::stod(cells[2]) == doctest::Approx(value));
                CHECK(std::stod(cells[3]) == doctest::Approx(10.0));
                ++i;
            }
        }
    }

    for (const SweepOutcome& run : res.runs) CHECK(run.report.total_sent() > 0);
}

TEST_CASE("a sweep without seeds aborts with a diagnostic") {
    RunConfig cfg;
    cfg.policies = {PolicyConfig::ac()};
    cfg.seeds = {};
    const SweepResult res = run_sweep(load("rate_sweep.scn"), cfg);
    CHECK_FALSE(res.ok);
    CHECK(res.error == "at least one seed required");
    CHECK(res.csv.find("# aborted:") != std::string::npos);
    CHECK(res.runs.empty());
}

TEST_CASE("a plain run reports the scenario's own operating point") {
    RunConfig cfg;
    cfg.policies = {PolicyConfig::ac()};
    cfg.seeds = {7};
    const SweepResult res = run_sweep(load("fig4.scn"), cfg);
    REQUIRE(res.ok);
    REQUIRE(res.runs.size() == 1);

    const std::vector<std::string> rows = lines_of(res.csv);
    REQUIRE(rows.size() == 2);
    const std::vector<std::string> cells = split_row(rows[1]);
    REQUIRE(cells.size() == 9);
    CHECK(cells[0] == "ac");
    CHECK(cells[1] == "7");
    CHECK(std::stod(cells[2]) == doctest::Approx(200000.0)); // first flow's rate in fig4
    CHECK(std::stod(cells[3]) == doctest::Approx(5.0));
    CHECK(std::stod(cells[4]) > 0.0);
}
