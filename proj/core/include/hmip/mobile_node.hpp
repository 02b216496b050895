#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "hmip/addressing.hpp"

namespace hmip {

using MapId = std::uint32_t;

// One row of the MAP table an MN builds from router advertisements.
struct MapAdvert {
    MapId map_id = 0;
    int tot_cn = 0;          // advertised load snapshot, taken at emission time
    int capacity_h_thr = 0;
    int distance_hops = 0;

    friend bool operator==(const MapAdvert&, const MapAdvert&) = default;
};

enum class MnState { Idle, Ready };

struct MobileNode {
    NodeAddress home_address;
    CareOfAddresses coas;
    MnState state = MnState::Idle;
    std::optional<double> ready_timer_deadline;
    std::set<NodeAddress> connected_cns;
    double speed = 0.0; // m/s, piecewise constant
    std::vector<MapAdvert> map_table;
};

// Data sent or received: the MN (re)enters ready state and the timer is
// re-armed to now + ready_duration. Control traffic (BU/BA) does not
// count as data and must not be routed through here.
void on_data_activity(MobileNode& mn, double now, double ready_duration);

// Ready-timer expiry. A stale expiry (deadline re-armed since the event
// was scheduled, i.e. deadline > now) and a spurious expiry while idle
// are both no-ops; latest deadline wins.
void on_timer_expiry(MobileNode& mn, double now);

// Replaces the whole MAP table with the advert set. Duplicate map_ids
// keep the last occurrence.
void update_map_table(MobileNode& mn, const std::vector<MapAdvert>& adverts);

const char* to_string(MnState s);

} // namespace hmip
