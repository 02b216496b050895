#pragma once

#include <optional>
#include <set>
#include <vector>

#include "hmip/addressing.hpp"
#include "hmip/mobile_node.hpp"

namespace hmip {

// Threshold pair driving registration admission at a MAP. n_thr gates new
// MNs, h_thr gates handoff MNs; h_thr is also the MAP's serving capacity,
// expressed as the maximum number of CN sessions it can carry.
struct AdmissionThresholds {
    int n_thr = 0;
    int h_thr = 0; // invariant: n_thr <= h_thr

    friend bool operator==(const AdmissionThresholds&, const AdmissionThresholds&) = default;
};

// Binding-cache view of one MAP. Entries are kept in admission order and
// hold at most one entry per home address. tot_cn caches the sum of entry
// con_cn values.
struct MapState {
    MapId map_id = 0;
    AdmissionThresholds thresholds;
    std::vector<BindingCacheEntry> cache;
    int tot_cn = 0;

    const BindingCacheEntry* find(NodeAddress home) const;
    BindingCacheEntry* find(NodeAddress home);
    int recompute_tot_cn() const;
};

struct AdmissionDecision {
    enum class Outcome { Admit, Reject, ReplaceThenAdmit };

    Outcome outcome = Outcome::Reject;
    std::optional<NodeAddress> victim; // set iff outcome == ReplaceThenAdmit

    friend bool operator==(const AdmissionDecision&, const AdmissionDecision&) = default;
};

// Parameters of the MAP selection weight W = alpha * (Y + speed / s_max).
struct SelectionParams {
    double alpha = 1.0;
    double t_map = 1.5;
    double s_max = 20.0; // m/s; at least the fastest MN in the scenario

    friend bool operator==(const SelectionParams&, const SelectionParams&) = default;
};

// Threshold check without replacement:
//   tot_cn <= n_thr                 -> admit anyone
//   n_thr < tot_cn <= h_thr         -> admit handoff MNs only
//   h_thr < tot_cn                  -> reject everyone
// The comparison uses the MAP's current tot_cn; the incoming session count
// does not enter the check, so admission may legitimately push the total
// past h_thr.
AdmissionDecision admit(const MapState& map, MnClass cls, int /*incoming_con_cn*/);

// Replacement candidate: a cached MN whose con_cn is >= the incoming MN's.
// Among candidates the one with the largest con_cn wins; ties fall to the
// most recent registered_at (and then to cache order, newest last).
std::optional<NodeAddress> pick_replacement_victim(const MapState& map, int incoming_con_cn);

// admit() composed with victim search. allow_replacement = false degrades
// Reject-with-candidate into a plain Reject.
AdmissionDecision decide(const MapState& map, MnClass cls, int incoming_con_cn,
                         bool allow_replacement = true);

struct RegistrationResult {
    MapState map;
    BindingAck ack;
    std::optional<BindingAck> eviction; // InsufficientResources BA to the victim
    AdmissionDecision decision;
    bool refreshed = false; // BU from an already-cached MN: no admission ran
};

// Full registration handling at one MAP. A BU from an already-cached MN
// refreshes that entry in place (lcoa/con_cn update, registered_at and
// cache position preserved) and is always acknowledged. Otherwise the BU
// is classified and admitted per decide(); a replacement evicts the victim
// and inserts the incoming MN in one step. rcoa is the regional CoA the
// MN formed from the MAP's advertised prefix.
RegistrationResult handle_registration(MapState map, const BindingUpdate& bu, NodeAddress rcoa,
                                       bool allow_replacement = true);

// Load ratio Y for one candidate MAP: 0 when the MN has no CN sessions,
// otherwise con_cn / tot_cn capped at 1 (an advertised tot_cn of 0 with
// live sessions caps straight to 1). Keeps W finite and bounded.
double selection_load_ratio(int con_cn, int advertised_tot_cn);

double selection_weight(const SelectionParams& params, int con_cn, int advertised_tot_cn,
                        double speed);

// Walks mn.map_table in table order and returns the first candidate not in
// `excluded` whose W = alpha * (Y + speed/s_max) is strictly below t_map.
// The MN's own session count and current speed feed the weight. Returns
// nullopt when no candidate qualifies; the caller records a block or drop.
std::optional<MapId> select_map(const MobileNode& mn, const SelectionParams& params,
                                const std::set<MapId>& excluded);

} // namespace hmip
