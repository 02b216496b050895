#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace hmip {

// Opaque node identifier. Home addresses, care-of addresses and CN
// addresses all draw from the same space; uniqueness is what matters,
// not structure.
struct NodeAddress {
    std::uint32_t value = 0;

    friend auto operator<=>(const NodeAddress&, const NodeAddress&) = default;
};

struct CareOfAddresses {
    NodeAddress rcoa; // regional CoA, scoped to the serving MAP's domain
    NodeAddress lcoa; // on-link CoA, scoped to the current AR

    friend bool operator==(const CareOfAddresses&, const CareOfAddresses&) = default;
};

enum class MnClass { New, Handoff };

enum class BaStatus { Accepted, InsufficientResources };

// Binding update as sent by an MN to a MAP. flag_a is set iff the sender
// is in ready state; con_cn carries the sender's live CN-session count
// and is 0 whenever flag_a is false.
struct BindingUpdate {
    NodeAddress mn_home_address;
    NodeAddress lcoa;
    bool flag_a = false;
    int con_cn = 0;
    double timestamp = 0.0;

    friend bool operator==(const BindingUpdate&, const BindingUpdate&) = default;
};

struct BindingAck {
    NodeAddress mn_home_address;
    BaStatus status = BaStatus::Accepted;

    friend bool operator==(const BindingAck&, const BindingAck&) = default;
};

struct BindingCacheEntry {
    NodeAddress mn_home_address;
    NodeAddress rcoa;
    NodeAddress lcoa;
    int con_cn = 0;         // live CN-session count, updated on session open/close
    double registered_at = 0.0;

    friend bool operator==(const BindingCacheEntry&, const BindingCacheEntry&) = default;
};

struct MobileNode;

// Composes the BU an MN sends when registering: flag_a reflects the ready
// state, con_cn the number of connected CNs (0 when idle).
BindingUpdate make_binding_update(const MobileNode& mn, double now);

// A MAP classifies the sender purely from flag A.
MnClass classify_bu(const BindingUpdate& bu);

const char* to_string(MnClass c);
const char* to_string(BaStatus s);

} // namespace hmip
