#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "hmip/admission.hpp"
#include "hmip/scenario.hpp"
#include "hmip/sim_engine.hpp"

using namespace hmip;

namespace {

std::string scenario_text(const char* name) {
    std::ifstream in(std::string(HMIPLAB_SCENARIO_DIR) + "/" + name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MapState loaded_map(int entries) {
    MapState map;
    map.map_id = 1;
    map.thresholds = {4, 8};
    for (int i = 0; i < entries; ++i) {
        BindingCacheEntry e;
        e.mn_home_address = {static_cast<std::uint32_t>(i + 1)};
        e.rcoa = {0x4000u + static_cast<std::uint32_t>(i)};
        e.lcoa = {0x5000u + static_cast<std::uint32_t>(i)};
        e.con_cn = i % 4;
        e.registered_at = 0.5 * i;
        map.cache.push_back(e);
        map.tot_cn += e.con_cn;
    }
    return map;
}

} // namespace

// Registration against a well-filled cache; the totals force the victim
// search and eviction path on every iteration.
static void BM_HandleRegistration(benchmark::State& state) {
    const MapState map = loaded_map(32);
    BindingUpdate bu;
    bu.mn_home_address = {900};
    bu.lcoa = {0x999};
    bu.flag_a = true;
    bu.con_cn = 2;
    bu.timestamp = 100.0;

    for (auto _ : state) {
        RegistrationResult r = handle_registration(map, bu, NodeAddress{0x888});
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_HandleRegistration);

static void BM_SelectMap(benchmark::State& state) {
    MobileNode mn;
    mn.home_address = {7};
    mn.state = MnState::Ready;
    mn.speed = 12.0;
    for (std::uint32_t cn = 1; cn <= 3; ++cn) mn.connected_cns.insert({0x2000u + cn});
    for (int i = 0; i < 16; ++i)
        mn.map_table.push_back({static_cast<MapId>(i + 1), 20 - i, 24, 1 + i / 4});

    const SelectionParams params;
    const std::set<MapId> excluded = {1, 2};
    for (auto _ : state) {
        auto chosen = select_map(mn, params, excluded);
        benchmark::DoNotOptimize(chosen);
    }
}
BENCHMARK(BM_SelectMap);

static void BM_ParseScenario(benchmark::State& state) {
    const std::string text = scenario_text("fig4.scn");
    for (auto _ : state) {
        ParseResult r = parse_scenario(text);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_ParseScenario);

static void BM_Fig4Run(benchmark::State& state) {
    const ParseResult parsed = parse_scenario(scenario_text("fig4.scn"));
    RunOptions options;
    options.record_trace = false;
    for (auto _ : state) {
        RunResult r = run_simulation(*parsed.scenario, PolicyConfig::ac(), options);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Fig4Run);

BENCHMARK_MAIN();
