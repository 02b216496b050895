#pragma once

// Brute-force reference implementations used to check the policy code.
// Everything here is written straight from the stated rules and shares no
// code with the library.

#include <cstdint>
#include <optional>
#include <vector>

#include "hmip/addressing.hpp"

namespace oracle {

inline bool admits(int tot_cn, int n_thr, int h_thr, hmip::MnClass cls) {
    if (tot_cn <= n_thr) return true;
    if (tot_cn <= h_thr) return cls == hmip::MnClass::Handoff;
    return false;
}

struct CacheRow {
    std::uint32_t home = 0;
    int con_cn = 0;
    double registered_at = 0.0;
};

// Victim search by linear scan: keep every entry whose con_cn is at least
// the incoming count, prefer larger con_cn, then a later registered_at,
// then a later cache position (the >= comparison plus ascending scan order
// gives the position rule for free).
inline std::optional<std::uint32_t> victim(const std::vector<CacheRow>& cache, int incoming_con) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < cache.size(); ++i) {
        if (cache[i].con_cn < incoming_con) continue;
        if (!best || cache[i].con_cn > cache[*best].con_cn ||
            (cache[i].con_cn == cache[*best].con_cn &&
             cache[i].registered_at >= cache[*best].registered_at)) {
            best = i;
        }
    }
    if (!best) return std::nullopt;
    return cache[*best].home;
}

struct RegistrationOutcome {
    bool accepted = false;
    std::optional<std::uint32_t> evicted;
    std::size_t cache_size = 0;
    int tot_cn = 0;
};

// One registration of a not-yet-cached MN, replayed rule by rule.
inline RegistrationOutcome registration(std::vector<CacheRow> cache, int n_thr, int h_thr,
                                        hmip::MnClass cls, int incoming_con,
                                        std::uint32_t incoming_home, bool allow_replacement,
                                        double now) {
    const auto total = [&cache] {
        int t = 0;
        for (const CacheRow& r : cache) t += r.con_cn;
        return t;
    };

    RegistrationOutcome out;
    if (admits(total(), n_thr, h_thr, cls)) {
        out.accepted = true;
        cache.push_back({incoming_home, incoming_con, now});
    } else if (allow_replacement) {
        if (const auto v = victim(cache, incoming_con)) {
            out.accepted = true;
            out.evicted = v;
            std::erase_if(cache, [&](const CacheRow& r) { return r.home == *v; });
            cache.push_back({incoming_home, incoming_con, now});
        }
    }
    out.cache_size = cache.size();
    out.tot_cn = total();
    return out;
}

// Ready/idle replay with the latest-deadline-wins discipline. An expiry
// only fires if the armed deadline has actually been reached.
struct TimerReplay {
    bool ready = false;
    double deadline = 0.0;

    void activity(double now, double duration) {
        ready = true;
        deadline = now + duration;
    }
    void expiry(double now) {
        if (ready && deadline <= now) ready = false;
    }
};

} // namespace oracle
