#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmip/metrics.hpp"
#include "hmip/scenario.hpp"
#include "hmip/sim_engine.hpp"

namespace hmip {

enum class SweepParam { None, Rate, Speed };

// One experiment: a scenario, one or more policies, one or more seeds and
// an optional one-dimensional parameter sweep.
struct RunConfig {
    std::vector<PolicyConfig> policies;
    std::vector<std::uint64_t> seeds;
    SweepParam sweep = SweepParam::None;
    std::vector<double> sweep_values; // bps for Rate, m/s for Speed
    RunOptions options;
};

struct SweepOutcome {
    double sweep_value = 0.0; // representative rate/speed when not sweeping
    std::string policy;
    std::uint64_t seed = 0;
    double rate_bps = 0.0;
    double speed_mps = 0.0;
    MetricsReport report;
};

struct SweepResult {
    bool ok = false;
    std::string error; // set when a run failed and the sweep was aborted
    std::vector<SweepOutcome> runs;
    std::string csv; // header + one row per run; aborted sweeps end in a marker row
};

// Applies one sweep point. Rate: every flow's rate_bps. Speed: the speed
// of every mobile MN (one with legs or a route); explicit leg times stay
// put, route-derived legs are re-timed from the new speed.
void apply_sweep_value(Scenario& s, SweepParam param, double value);

// Scenario-level values reported in the CSV when a column is not swept:
// the first flow's rate and the first mobile MN's speed (0 when absent).
double representative_rate(const Scenario& s);
double representative_speed(const Scenario& s);

// Runs the full (sweep value x policy x seed) grid, rows sorted by
// (sweep value, policy label, seed). Requires at least one seed and one
// policy. A failing run aborts the sweep: ok = false, the rows produced
// so far are kept and the CSV ends with a "# aborted:" marker row.
SweepResult run_sweep(const Scenario& scenario, const RunConfig& config);

} // namespace hmip
