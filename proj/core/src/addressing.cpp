#include "hmip/addressing.hpp"

#include "hmip/mobile_node.hpp"

namespace hmip {

BindingUpdate make_binding_update(const MobileNode& mn, double now) {
    BindingUpdate bu;
    bu.mn_home_address = mn.home_address;
    bu.lcoa = mn.coas.lcoa;
    bu.flag_a = (mn.state == MnState::Ready);
    bu.con_cn = bu.flag_a ? static_cast<int>(mn.connected_cns.size()) : 0;
    bu.timestamp = now;
    return bu;
}

MnClass classify_bu(const BindingUpdate& bu) {
    return bu.flag_a ? MnClass::Handoff : MnClass::New;
}

const char* to_string(MnClass c) {
    switch (c) {
    case MnClass::New: return "new";
    case MnClass::Handoff: return "handoff";
    }
    return "?";
}

const char* to_string(BaStatus s) {
    switch (s) {
    case BaStatus::Accepted: return "accepted";
    case BaStatus::InsufficientResources: return "insufficient-resources";
    }
    return "?";
}

} // namespace hmip
