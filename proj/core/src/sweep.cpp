#include "hmip/sweep.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hmip {
namespace {

std::set<std::string> mobile_mns(const Scenario& s) {
    std::set<std::string> mobile;
    for (const LegDecl& l : s.legs) mobile.insert(l.mn);
    for (const RouteDecl& r : s.routes) mobile.insert(r.mn);
    return mobile;
}

} // namespace

void apply_sweep_value(Scenario& s, SweepParam param, double value) {
    switch (param) {
    case SweepParam::None:
        return;
    case SweepParam::Rate:
        for (FlowDecl& f : s.flows) f.rate_bps = value;
        return;
    case SweepParam::Speed: {
        // Only MNs that actually move are swept; stationary MNs keep their
        // declared speed so their selection weights stay put. Explicit leg
        // speeds are dropped in favour of the swept value; route timing is
        // re-derived from the new speed by the engine.
        const std::set<std::string> mobile = mobile_mns(s);
        for (MnDecl& m : s.mns)
            if (mobile.count(m.id)) m.speed = value;
        for (LegDecl& l : s.legs) l.speed.reset();
        return;
    }
    }
}

double representative_rate(const Scenario& s) {
    return s.flows.empty() ? 0.0 : s.flows.front().rate_bps;
}

double representative_speed(const Scenario& s) {
    const std::set<std::string> mobile = mobile_mns(s);
    for (const MnDecl& m : s.mns)
        if (mobile.count(m.id)) return m.speed;
    return 0.0;
}

SweepResult run_sweep(const Scenario& scenario, const RunConfig& config) {
    SweepResult result;
    result.csv = metrics_csv_header() + "\n";
    if (config.seeds.empty()) {
        result.error = "at least one seed required";
        result.csv += "# aborted: " + result.error + "\n";
        return result;
    }
    if (config.policies.empty()) {
        result.error = "at least one policy required";
        result.csv += "# aborted: " + result.error + "\n";
        return result;
    }
    std::vector<double> values = config.sweep_values;
    if (config.sweep == SweepParam::None || values.empty()) values = {0.0};

    // (sweep value, policy label, seed), sorted
    std::vector<double> sorted_values = values;
    std::sort(sorted_values.begin(), sorted_values.end());
    std::vector<std::string> labels;
    for (const PolicyConfig& p : config.policies) labels.push_back(p.label());
    std::vector<std::size_t> policy_order(config.policies.size());
    for (std::size_t i = 0; i < policy_order.size(); ++i) policy_order[i] = i;
    std::sort(policy_order.begin(), policy_order.end(),
              [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());

    for (double value : sorted_values) {
        Scenario point = scenario;
        apply_sweep_value(point, config.sweep, value);
        const double rate = representative_rate(point);
        const double speed = representative_speed(point);
        for (std::size_t pi : policy_order) {
            for (std::uint64_t seed : seeds) {
                RunOptions options = config.options;
                options.seed = seed;
                try {
                    RunResult run = run_simulation(point, config.policies[pi], options);
                    SweepOutcome out;
                    out.sweep_value = config.sweep == SweepParam::None ? 0.0 : value;
                    out.policy = labels[pi];
                    out.seed = seed;
                    out.rate_bps = rate;
                    out.speed_mps = speed;
                    out.report = std::move(run.metrics);
                    result.csv += metrics_csv_row(out.report, out.policy, seed, rate, speed) + "\n";
                    result.runs.push_back(std::move(out));
                } catch (const std::exception& e) {
                    result.error = e.what();
                    result.csv += std::string("# aborted: ") + e.what() + "\n";
                    return result;
                }
            }
        }
    }
    result.ok = true;
    return result;
}

} // namespace hmip
