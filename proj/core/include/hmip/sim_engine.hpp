#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmip/admission.hpp"
#include "hmip/metrics.hpp"
#include "hmip/scenario.hpp"

namespace hmip {

// Which registration policy the MAPs run.
struct PolicyConfig {
    enum class Scheme {
        AdmissionControl, // thresholds, replacement, MAP reselection
        Baseline,         // plain HMIPv6: every registration is accepted
    };

    Scheme scheme = Scheme::AdmissionControl;
    bool replacement = true; // evict a fatter resident instead of rejecting
    bool reselection = true; // rejected/evicted MNs try other advertised MAPs

    static PolicyConfig ac() { return {Scheme::AdmissionControl, true, true}; }
    static PolicyConfig baseline() { return {Scheme::Baseline, true, true}; }

    std::string label() const;
};

struct RunOptions {
    std::optional<std::uint64_t> seed;   // overrides scenario globals.seed
    std::optional<double> ready_timer_s; // overrides, matching the CLI flags
    std::optional<double> alpha;
    std::optional<double> t_map;
    std::optional<double> s_max;
    bool check_invariants = true; // verify cache/tot_cn consistency after every event
    bool record_trace = true;
};

struct TraceEntry {
    double time = 0.0;
    std::string tag;  // "move", "bu", "ba", "evict", "handoff", "drop", "ha", ...
    std::string text;
};

struct RunResult {
    MetricsReport metrics;
    std::vector<TraceEntry> trace;
    std::vector<std::string> violations; // invariant breaches; empty on a healthy run

    // Deterministic text form of the whole run (metrics + trace); equal
    // inputs must produce byte-identical reports.
    std::string report_text() const;
};

// Wired-topology view derived from a scenario: dense node indices and
// all-pairs path metrics over the link graph. MNs are not wired nodes;
// they hang off their current AR at zero radio cost.
struct Topology {
    enum class NodeKind { Map, Router, Ar, Cn };

    struct Node {
        NodeKind kind;
        std::string id;
        int decl = -1; // index into the matching scenario vector
    };

    std::vector<Node> nodes;
    std::map<std::string, int> index_of;

    // Flattened NxN tables. infinite() marks unreachable pairs.
    std::vector<double> latency;    // sum of link latencies on the chosen path
    std::vector<double> inv_bw_sum; // sum of 1/bandwidth, for transmission delay
    std::vector<int> hops;

    int n() const { return static_cast<int>(nodes.size()); }
    double path_latency(int a, int b) const { return latency[static_cast<std::size_t>(a) * nodes.size() + b]; }
    double path_inv_bw(int a, int b) const { return inv_bw_sum[static_cast<std::size_t>(a) * nodes.size() + b]; }
    int path_hops(int a, int b) const { return hops[static_cast<std::size_t>(a) * nodes.size() + b]; }
    bool reachable(int a, int b) const;

    // One-way delay for a data packet of `bytes` along a -> b.
    double data_delay(int a, int b, int bytes) const;

    static double infinite();
};

// Builds the wired topology. The scenario must already be valid.
Topology build_topology(const Scenario& s);

// Runs the scenario to completion under the given policy. Deterministic:
// fixed (scenario, policy, seed) yields a bit-identical RunResult.
// Throws std::invalid_argument when the scenario fails validation and
// std::runtime_error on internal failures.
RunResult run_simulation(const Scenario& scenario, const PolicyConfig& policy,
                         const RunOptions& options = {});

} // namespace hmip
