#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmip {

struct FlowStats {
    std::string cn;
    std::string mn;
    double rate_bps = 0.0;
    int packet_bytes = 0;
    long sent = 0;
    long delivered = 0;
    long lost = 0;
    long in_flight_end = 0; // emitted but neither delivered nor lost at sim end
};

enum class HandoffType { Intra, Inter };

struct HandoffRecord {
    std::string mn;
    HandoffType type = HandoffType::Intra;
    double start_s = 0.0;              // detach from the old AR
    double end_s = 0.0;                // registration settled (or the MN was dropped)
    std::optional<double> latency_s;   // first-packet-after minus last-packet-before
    bool dropped = false;
};

struct Delivery {
    double time_s = 0.0;
    int bytes = 0;
};

struct MetricsReport {
    double sim_time_s = 0.0;

    std::vector<FlowStats> per_flow;
    std::vector<HandoffRecord> handoffs;
    std::vector<Delivery> deliveries; // every delivered packet, in delivery order

    long new_attempts = 0;
    long new_rejected = 0;
    long handoff_attempts = 0;
    long handoff_dropped = 0;
    long insufficient_resources_bas = 0;

    // Delivered packets per 1-second bucket.
    std::vector<long> throughput_series;

    // Loss breakdown (totals also appear per flow).
    long lost_no_binding = 0;   // no (or stale) cache entry at the anchor MAP
    long lost_stale_attach = 0; // forwarded to an AR the MN had already left
    long lost_over_capacity = 0;

    long total_sent() const;
    long total_delivered() const;
    long total_lost() const;
    long total_in_flight() const;

    std::optional<double> handoff_delay_mean() const;
    std::optional<double> blocking_probability() const;
    std::optional<double> dropping_probability() const;
};

// Handoff latency from the surrounding data packets: the gap between the
// last packet received through the old attachment and the first received
// through the new one. Requires first >= last.
double record_handoff_latency(double last_pkt_from_old, double first_pkt_from_new);

struct Throughput {
    double packets_per_s = 0.0;
    double bits_per_s = 0.0;
};

// Delivered traffic inside the window [t0, t1).
Throughput throughput(const MetricsReport& report, double t0, double t1);

struct Probabilities {
    std::optional<double> blocking; // nullopt when there were no attempts
    std::optional<double> dropping;
};

Probabilities probabilities(const MetricsReport& report);

// Machine-readable output. One row per run, fixed column order:
//   policy,seed,rate_bps,speed_mps,throughput_pkts,handoff_delay_mean_s,
//   packet_loss,blocking_prob,dropping_prob
// Decimal point always '.', locale-independent; empty statistics render
// as "n/a".
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report, std::string_view policy,
                            std::uint64_t seed, double rate_bps, double speed_mps);

// Optional per-handoff detail CSV.
std::string handoff_csv_header();
std::string handoff_csv_row(const HandoffRecord& h, std::string_view policy, std::uint64_t seed);

// Locale-independent shortest-round-trip formatting used by all CSV output.
std::string format_double(double v);

const char* to_string(HandoffType t);

} // namespace hmip
