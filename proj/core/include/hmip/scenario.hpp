#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmip {

// Scenario globals. Keys match the scenario file one to one.
struct ScenarioGlobals {
    double sim_time_s = 50.0;
    double ready_timer_s = 5.0;
    double advert_period_s = 1.0;
    double alpha = 1.0;
    double t_map = 1.5;
    double s_max = 20.0;
    std::uint64_t seed = 1;
    double ha_rtt_s = 0.04;        // home-agent stub: extra round trip per inter-domain handoff
    double start_jitter_s = 0.0;   // uniform jitter applied to power-on and flow starts
    double default_bw_bps = 2e6;
    double default_latency_s = 0.01;

    friend bool operator==(const ScenarioGlobals&, const ScenarioGlobals&) = default;
};

struct MapDecl {
    std::string id;
    int n_thr = 0;
    int h_thr = 0;

    friend bool operator==(const MapDecl&, const MapDecl&) = default;
};

// Plain wired node, e.g. a core router between the MAPs and the CN side.
struct RouterDecl {
    std::string id;

    friend bool operator==(const RouterDecl&, const RouterDecl&) = default;
};

struct ArDecl {
    std::string id;
    std::string map; // parent MAP
    double x = 0.0;
    double y = 0.0;
    double range = 75.0;

    friend bool operator==(const ArDecl&, const ArDecl&) = default;
};

struct CnDecl {
    std::string id;

    friend bool operator==(const CnDecl&, const CnDecl&) = default;
};

struct LinkDecl {
    std::string a;
    std::string b;
    std::optional<double> bw_bps;     // default_bw_bps when absent
    std::optional<double> latency_s;  // default_latency_s when absent

    friend bool operator==(const LinkDecl&, const LinkDecl&) = default;
};

struct MnDecl {
    std::string id;
    std::string ar;      // initial attachment
    double speed = 0.0;
    double on_s = 0.0;   // power-on: time of the initial registration

    friend bool operator==(const MnDecl&, const MnDecl&) = default;
};

struct FlowDecl {
    std::string cn;
    std::string mn;
    double rate_bps = 0.0;
    int packet_bytes = 512;
    double start_s = 0.0;
    double stop_s = 0.0;

    friend bool operator==(const FlowDecl&, const FlowDecl&) = default;
};

struct LegDecl {
    std::string mn;
    std::string from;
    std::string to;
    double at_s = 0.0;
    std::optional<double> speed; // mn.speed when absent

    friend bool operator==(const LegDecl&, const LegDecl&) = default;
};

// Waypoint form of movement: legs are derived from AR positions and the
// MN's speed, optionally looping until the end of the run.
struct RouteDecl {
    std::string mn;
    std::vector<std::string> path;
    double start_s = 0.0;
    bool loop = false;

    friend bool operator==(const RouteDecl&, const RouteDecl&) = default;
};

struct Scenario {
    ScenarioGlobals globals;
    std::vector<MapDecl> maps;
    std::vector<RouterDecl> routers;
    std::vector<ArDecl> ars;
    std::vector<CnDecl> cns;
    std::vector<LinkDecl> links;
    std::vector<MnDecl> mns;
    std::vector<FlowDecl> flows;
    std::vector<LegDecl> legs;
    std::vector<RouteDecl> routes;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Diagnostic {
    int line = 0; // 1-based; 0 when no line applies (file errors, struct-built scenarios)
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ParseResult {
    std::optional<Scenario> scenario; // set iff diagnostics is empty
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return diagnostics.empty() && scenario.has_value(); }
};

// Parses and validates scenario text. Unknown sections and unknown keys
// are errors. All collected diagnostics carry 1-based line numbers.
ParseResult parse_scenario(std::string_view text);

ParseResult load_scenario_file(const std::string& path);

// Semantic validation of an already-built scenario (dangling references,
// threshold ordering, chained legs, connectivity, ...). parse_scenario
// runs this automatically.
std::vector<Diagnostic> validate_scenario(const Scenario& s);

// Canonical text form. Round-trips: parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

std::string format_diagnostics(const std::string& origin, const std::vector<Diagnostic>& ds);

} // namespace hmip
