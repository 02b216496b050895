// hmiplab: scenario runner for the HMIPv6 admission-control simulator.
// Exit codes: 0 success, 2 scenario/usage error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hmip/metrics.hpp"
#include "hmip/scenario.hpp"
#include "hmip/sim_engine.hpp"
#include "hmip/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string resolve_scenario(const std::string& path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(path, ec)) return path;
    if (fs::path(path).is_relative()) {
        if (const char* dir = std::getenv("HMIP_LAB_SCENARIO_DIR")) {
            const fs::path candidate = fs::path(dir) / path;
            if (fs::exists(candidate, ec)) return candidate.string();
        }
    }
    return path;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        parts.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    if (parts.size() == 1 && parts.front().empty()) parts.clear();
    return parts;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

std::string opt_str(const std::optional<double>& v) {
    return v ? hmip::format_double(*v) : std::string("n/a");
}

void print_summary(const hmip::SweepResult& result, hmip::SweepParam sweep) {
    const char* param = sweep == hmip::SweepParam::Rate    ? "rate_bps"
                        : sweep == hmip::SweepParam::Speed ? "speed_mps"
                                                           : nullptr;
    for (const hmip::SweepOutcome& run : result.runs) {
        const hmip::MetricsReport& m = run.report;
        std::string line = run.policy + " seed=" + std::to_string(run.seed);
        if (param)
            line += std::string(" ") + param + "=" +
                    hmip::format_double(sweep == hmip::SweepParam::Rate ? run.rate_bps
                                                                        : run.speed_mps);
        line += " delivered=" + std::to_string(m.total_delivered());
        line += " lost=" + std::to_string(m.total_lost());
        line += " handoff_delay=" + opt_str(m.handoff_delay_mean());
        line += " blocking=" + opt_str(m.blocking_probability());
        line += " dropping=" + opt_str(m.dropping_probability());
        std::cout << line << "\n";
    }
    std::cout << result.runs.size() << " run(s) complete\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HMIPv6 domain simulator: admission control vs plain-HMIPv6 baseline"};

    std::string scenario_path;
    std::string policy = "ac";
    std::string seeds_text;
    std::string sweep_text;
    std::string out_path;
    std::string handoff_out;
    std::string trace_out;
    bool no_replacement = false;
    bool no_reselection = false;
    bool validate_only = false;
    double ready_timer = 0, alpha = 0, t_map = 0, s_max = 0;

    app.add_option("scenario,--scenario", scenario_path, "scenario file (.scn)")->required();
    app.add_option("--policy", policy, "registration policy: ac, baseline or both")
        ->check(CLI::IsMember({"ac", "baseline", "both"}));
    app.add_option("--seeds", seeds_text, "comma-separated RNG seeds (default: the scenario's seed)");
    app.add_option("--sweep", sweep_text,
                   "one-dimensional sweep, e.g. rate=0.1,0.2,0.3 (Mb/s) or speed=5,10,15,20 (m/s)");
    app.add_option("--out", out_path, "CSV output file; '-' prints CSV to stdout instead of a summary");
    app.add_option("--handoff-out", handoff_out, "per-handoff detail CSV file");
    app.add_option("--trace-out", trace_out,
                   "full run report (single policy, single seed, no sweep)");
    app.add_flag("--no-replacement", no_replacement, "disable the replacement mechanism");
    app.add_flag("--no-reselection", no_reselection, "disable MAP reselection after rejections");
    app.add_flag("--validate", validate_only, "parse and validate the scenario, run nothing");
    auto* o_ready = app.add_option("--ready-timer", ready_timer, "ready timer override (s)");
    auto* o_alpha = app.add_option("--alpha", alpha, "selection weight factor override");
    auto* o_tmap = app.add_option("--t-map", t_map, "selection threshold override");
    auto* o_smax = app.add_option("--s-max", s_max, "speed normalization override (m/s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string resolved = resolve_scenario(scenario_path);
    hmip::ParseResult parsed = hmip::load_scenario_file(resolved);
    if (!parsed.ok()) {
        std::cerr << hmip::format_diagnostics(resolved, parsed.diagnostics);
        return kExitUsage;
    }
    if (validate_only) {
        std::cout << resolved << ": ok\n";
        return kExitOk;
    }
    const hmip::Scenario& scenario = *parsed.scenario;

    hmip::RunConfig config;
    hmip::PolicyConfig ac = hmip::PolicyConfig::ac();
    ac.replacement = !no_replacement;
    ac.reselection = !no_reselection;
    if (policy == "ac") config.policies = {ac};
    else if (policy == "baseline") config.policies = {hmip::PolicyConfig::baseline()};
    else config.policies = {ac, hmip::PolicyConfig::baseline()};

    if (seeds_text.empty()) {
        config.seeds = {scenario.globals.seed};
    } else {
        for (const std::string& part : split_csv(seeds_text)) {
            try {
                config.seeds.push_back(std::stoull(part));
            } catch (const std::exception&) {
                std::cerr << "bad seed '" << part << "'\n";
                return kExitUsage;
            }
        }
    }
    if (config.seeds.empty()) {
        std::cerr << "at least one seed required\n";
        return kExitUsage;
    }

    if (!sweep_text.empty()) {
        const std::size_t eq = sweep_text.find('=');
        const std::string name = sweep_text.substr(0, eq == std::string::npos ? sweep_text.size() : eq);
        if (eq == std::string::npos || (name != "rate" && name != "speed")) {
            std::cerr << "--sweep expects rate=... or speed=...\n";
            return kExitUsage;
        }
        config.sweep = name == "rate" ? hmip::SweepParam::Rate : hmip::SweepParam::Speed;
        for (const std::string& part : split_csv(sweep_text.substr(eq + 1))) {
            char* end = nullptr;
            const double v = std::strtod(part.c_str(), &end);
            if (part.empty() || end != part.c_str() + part.size() || v <= 0) {
                std::cerr << "bad sweep value '" << part << "'\n";
                return kExitUsage;
            }
            // rates are given in Mb/s on the command line
            config.sweep_values.push_back(name == "rate" ? v * 1e6 : v);
        }
        if (config.sweep_values.empty()) {
            std::cerr << "--sweep needs at least one value\n";
            return kExitUsage;
        }
    }

    if (o_ready->count()) config.options.ready_timer_s = ready_timer;
    if (o_alpha->count()) config.options.alpha = alpha;
    if (o_tmap->count()) config.options.t_map = t_map;
    if (o_smax->count()) config.options.s_max = s_max;

    if (!trace_out.empty()) {
        if (config.policies.size() != 1 || config.seeds.size() != 1 ||
            config.sweep != hmip::SweepParam::None) {
            std::cerr << "--trace-out needs a single policy, a single seed and no sweep\n";
            return kExitUsage;
        }
        hmip::RunOptions options = config.options;
        options.seed = config.seeds.front();
        try {
            const hmip::RunResult run = hmip::run_simulation(scenario, config.policies.front(), options);
            if (!write_file(trace_out, run.report_text())) {
                std::cerr << "cannot write '" << trace_out << "'\n";
                return kExitRuntime;
            }
            const std::string csv =
                hmip::metrics_csv_header() + "\n" +
                hmip::metrics_csv_row(run.metrics, config.policies.front().label(),
                                      config.seeds.front(), hmip::representative_rate(scenario),
                                      hmip::representative_speed(scenario)) +
                "\n";
            if (out_path == "-") {
                std::cout << csv;
            } else if (!out_path.empty() && !write_file(out_path, csv)) {
                std::cerr << "cannot write '" << out_path << "'\n";
                return kExitRuntime;
            }
            if (out_path != "-")
                std::cout << "trace written to " << trace_out << "\n";
            return run.violations.empty() ? kExitOk : kExitRuntime;
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return kExitRuntime;
        }
    }

    const hmip::SweepResult result = hmip::run_sweep(scenario, config);
    if (!result.ok) {
        std::cerr << result.error << "\n";
        return kExitRuntime;
    }

    if (out_path == "-") {
        std::cout << result.csv;
    } else {
        print_summary(result, config.sweep);
        if (!out_path.empty()) {
            if (!write_file(out_path, result.csv)) {
                std::cerr << "cannot write '" << out_path << "'\n";
                return kExitRuntime;
            }
            std::cout << "csv written to " << out_path << "\n";
        }
    }

    if (!handoff_out.empty()) {
        std::string csv = hmip::handoff_csv_header() + "\n";
        for (const hmip::SweepOutcome& run : result.runs)
            for (const hmip::HandoffRecord& h : run.report.handoffs)
                csv += hmip::handoff_csv_row(h, run.policy, run.seed) + "\n";
        if (!write_file(handoff_out, csv)) {
            std::cerr << "cannot write '" << handoff_out << "'\n";
            return kExitRuntime;
        }
    }
    return kExitOk;
}
