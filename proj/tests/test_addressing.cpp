#include "doctest.h"

#include <string>

#include "hmip/addressing.hpp"
#include "hmip/mobile_node.hpp"

using namespace hmip;

namespace {

MobileNode make_mn(MnState state, int n_cns) {
    MobileNode mn;
    mn.home_address = {0x01000001};
    mn.coas.lcoa = {0x03001001};
    mn.coas.rcoa = {0x04001001};
    mn.state = state;
    if (state == MnState::Ready) mn.ready_timer_deadline = 100.0;
    for (int i = 0; i < n_cns; ++i) mn.connected_cns.insert(NodeAddress{0x02000000u + static_cast<std::uint32_t>(i)});
    return mn;
}

} // namespace

TEST_CASE("binding update reflects ready state and session count") {
    SUBCASE("idle with no sessions") {
        const BindingUpdate bu = make_binding_update(make_mn(MnState::Idle, 0), 3.5);
        CHECK_FALSE(bu.flag_a);
        CHECK(bu.con_cn == 0);
        CHECK(bu.timestamp == 3.5);
        CHECK(bu.mn_home_address.value == 0x01000001);
        CHECK(bu.lcoa.value == 0x03001001);
    }
    SUBCASE("ready with three sessions") {
        const BindingUpdate bu = make_binding_update(make_mn(MnState::Ready, 3), 7.0);
        CHECK(bu.flag_a);
        CHECK(bu.con_cn == 3);
    }
    SUBCASE("ready after the last session closed but before the timer ran out") {
        const BindingUpdate bu = make_binding_update(make_mn(MnState::Ready, 0), 9.0);
        CHECK(bu.flag_a);
        CHECK(bu.con_cn == 0);
    }
}

TEST_CASE("classification looks at flag A only") {
    BindingUpdate bu;
    bu.flag_a = true;
    bu.con_cn = 0;
    CHECK(classify_bu(bu) == MnClass::Handoff);
    bu.flag_a = false;
    CHECK(classify_bu(bu) == MnClass::New);

    CHECK(classify_bu(make_binding_update(make_mn(MnState::Idle, 0), 0.0)) == MnClass::New);
    CHECK(classify_bu(make_binding_update(make_mn(MnState::Ready, 2), 0.0)) == MnClass::Handoff);
}

TEST_CASE("enum names") {
    CHECK(std::string(to_string(MnClass::New)) == "new");
    CHECK(std::string(to_string(MnClass::Handoff)) == "handoff");
    CHECK(std::string(to_string(BaStatus::Accepted)) == "accepted");
    CHECK(std::string(to_string(BaStatus::InsufficientResources)) == "insufficient-resources");
}
