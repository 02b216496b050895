#include "hmip/admission.hpp"

#include <algorithm>
#include <stdexcept>

namespace hmip {

const BindingCacheEntry* MapState::find(NodeAddress home) const {
    for (const auto& e : cache)
        if (e.mn_home_address == home) return &e;
    return nullptr;
}

BindingCacheEntry* MapState::find(NodeAddress home) {
    for (auto& e : cache)
        if (e.mn_home_address == home) return &e;
    return nullptr;
}

int MapState::recompute_tot_cn() const {
    int sum = 0;
    for (const auto& e : cache) sum += e.con_cn;
    return sum;
}

AdmissionDecision admit(const MapState& map, MnClass cls, int /*incoming_con_cn*/) {
    if (map.tot_cn <= map.thresholds.n_thr)
        return {AdmissionDecision::Outcome::Admit, std::nullopt};
    if (cls == MnClass::Handoff && map.tot_cn <= map.thresholds.h_thr)
        return {AdmissionDecision::Outcome::Admit, std::nullopt};
    return {AdmissionDecision::Outcome::Reject, std::nullopt};
}

std::optional<NodeAddress> pick_replacement_victim(const MapState& map, int incoming_con_cn) {
    const BindingCacheEntry* best = nullptr;
    for (const auto& e : map.cache) {
        if (e.con_cn < incoming_con_cn) continue;
        if (!best || e.con_cn > best->con_cn ||
            (e.con_cn == best->con_cn && e.registered_at >= best->registered_at)) {
            // >= on registered_at: among equal (con_cn, registered_at) the
            // later cache position wins, i.e. the newest arrival.
            best = &e;
        }
    }
    if (!best) return std::nullopt;
    return best->mn_home_address;
}

AdmissionDecision decide(const MapState& map, MnClass cls, int incoming_con_cn,
                         bool allow_replacement) {
    AdmissionDecision d = admit(map, cls, incoming_con_cn);
    if (d.outcome == AdmissionDecision::Outcome::Admit || !allow_replacement) return d;
    if (auto victim = pick_replacement_victim(map, incoming_con_cn))
        return {AdmissionDecision::Outcome::ReplaceThenAdmit, victim};
    return d;
}

RegistrationResult handle_registration(MapState map, const BindingUpdate& bu, NodeAddress rcoa,
                                       bool allow_replacement) {
    RegistrationResult res;

    if (BindingCacheEntry* entry = map.find(bu.mn_home_address)) {
        // Refresh: the MN is already served here, only its on-link address
        // (and live session count) changed. No admission, no re-ordering.
        entry->lcoa = bu.lcoa;
        entry->con_cn = bu.con_cn;
        map.tot_cn = map.recompute_tot_cn();
        res.map = std::move(map);
        res.ack = {bu.mn_home_address, BaStatus::Accepted};
        res.decision = {AdmissionDecision::Outcome::Admit, std::nullopt};
        res.refreshed = true;
        return res;
    }

    const MnClass cls = classify_bu(bu);
    AdmissionDecision d = decide(map, cls, bu.con_cn, allow_replacement);

    if (d.outcome == AdmissionDecision::Outcome::Reject) {
        res.map = std::move(map);
        res.ack = {bu.mn_home_address, BaStatus::InsufficientResources};
        res.decision = d;
        return res;
    }

    if (d.outcome == AdmissionDecision::Outcome::ReplaceThenAdmit) {
        auto it = std::find_if(map.cache.begin(), map.cache.end(), [&](const BindingCacheEntry& e) {
            return e.mn_home_address == *d.victim;
        });
        if (it == map.cache.end())
            throw std::logic_error("replacement victim vanished from the cache");
        res.eviction = BindingAck{*d.victim, BaStatus::InsufficientResources};
        map.cache.erase(it);
    }

    map.cache.push_back(BindingCacheEntry{bu.mn_home_address, rcoa, bu.lcoa, bu.con_cn,
                                          bu.timestamp});
    map.tot_cn = map.recompute_tot_cn();
    res.map = std::move(map);
    res.ack = {bu.mn_home_address, BaStatus::Accepted};
    res.decision = d;
    return res;
}

double selection_load_ratio(int con_cn, int advertised_tot_cn) {
    if (con_cn <= 0) return 0.0;
    if (advertised_tot_cn <= 0) return 1.0;
    double y = static_cast<double>(con_cn) / static_cast<double>(advertised_tot_cn);
    return y > 1.0 ? 1.0 : y;
}

double selection_weight(const SelectionParams& params, int con_cn, int advertised_tot_cn,
                        double speed) {
    const double y = selection_load_ratio(con_cn, advertised_tot_cn);
    const double s = speed / params.s_max;
    return params.alpha * (y + s);
}

std::optional<MapId> select_map(const MobileNode& mn, const SelectionParams& params,
                                const std::set<MapId>& excluded) {
    const int con = static_cast<int>(mn.connected_cns.size());
    for (const MapAdvert& cand : mn.map_table) {
        if (excluded.count(cand.map_id)) continue;
        const double w = selection_weight(params, con, cand.tot_cn, mn.speed);
        if (w < params.t_map) return cand.map_id;
    }
    return std::nullopt;
}

} // namespace hmip
