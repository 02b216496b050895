#include "hmip/mobile_node.hpp"

#include <algorithm>

namespace hmip {

void on_data_activity(MobileNode& mn, double now, double ready_duration) {
    mn.state = MnState::Ready;
    mn.ready_timer_deadline = now + ready_duration;
}

void on_timer_expiry(MobileNode& mn, double now) {
    if (!mn.ready_timer_deadline) return;        // spurious: never armed or already idle
    if (*mn.ready_timer_deadline > now) return;  // stale: timer was re-armed meanwhile
    mn.state = MnState::Idle;
    mn.ready_timer_deadline.reset();
}

void update_map_table(MobileNode& mn, const std::vector<MapAdvert>& adverts) {
    mn.map_table.clear();
    mn.map_table.reserve(adverts.size());
    for (const MapAdvert& a : adverts) {
        auto it = std::find_if(mn.map_table.begin(), mn.map_table.end(),
                               [&](const MapAdvert& e) { return e.map_id == a.map_id; });
        if (it != mn.map_table.end())
            *it = a; // duplicate map_id: last one wins, position kept
        else
            mn.map_table.push_back(a);
    }
}

const char* to_string(MnState s) {
    switch (s) {
    case MnState::Idle: return "idle";
    case MnState::Ready: return "ready";
    }
    return "?";
}

} // namespace hmip
