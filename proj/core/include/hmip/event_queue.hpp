#pragma once

#include <cstdint>
#include <queue>
#include <variant>
#include <vector>

namespace hmip {

// Event payloads. Indices refer to the simulator's dense node/flow tables.
struct MoveEvent {
    int mn = -1;
    int to_ar = -1;
    double speed = 0.0;
};

struct RouterAdvertEvent {
    int ar = -1;
};

// A BU arriving at a MAP for processing.
struct SendBuEvent {
    int mn = -1;
    int map = -1;
    std::uint64_t chain = 0; // registration chain generation, stale BUs are ignored
};

// A BA arriving back at the MN.
struct DeliverBaEvent {
    int mn = -1;
    int map = -1;
    bool accepted = false;
    bool eviction = false;   // BA carried InsufficientResources due to replacement
    std::uint64_t chain = 0; // 0 for eviction notices (victims have no chain yet)
};

struct PacketEmitEvent {
    int flow = -1;
};

// One packet progressing along CN -> MAP -> AR -> MN.
struct PacketArriveEvent {
    enum class Stage { AtMap, AtAr };

    Stage stage = Stage::AtMap;
    int flow = -1;
    std::uint64_t packet = 0;
    int map = -1;
    int ar = -1;
    std::uint32_t rcoa = 0; // addressed regional CoA, checked against the cache
    std::uint32_t lcoa = 0; // forwarding target once past the MAP
};

struct TimerExpiryEvent {
    int mn = -1;
};

struct SessionOpenEvent {
    int flow = -1;
};

struct SessionCloseEvent {
    int flow = -1;
};

// Registration chain fully settled (BA received, HA updated when the
// anchor changed): traffic redirects from here on.
struct RegistrationCompleteEvent {
    int mn = -1;
    int map = -1;
    std::uint64_t chain = 0;
};

using EventPayload =
    std::variant<MoveEvent, RouterAdvertEvent, SendBuEvent, DeliverBaEvent, PacketEmitEvent,
                 PacketArriveEvent, TimerExpiryEvent, SessionOpenEvent, SessionCloseEvent,
                 RegistrationCompleteEvent>;

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // insertion sequence, breaks same-time ties
    EventPayload payload;
};

// Min-heap over (time, seq): events fire in time order, same-time events
// in insertion order. This is the only ordering rule in the simulator.
class EventQueue {
  public:
    void push(double time, EventPayload payload) {
        heap_.push(Event{time, next_seq_++, std::move(payload)});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    const Event& top() const { return heap_.top(); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

  private:
    struct After {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, After> heap_;
    std::uint64_t next_seq_ = 0;
};

} // namespace hmip
