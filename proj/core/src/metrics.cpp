#include "hmip/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hmip {

long MetricsReport::total_sent() const {
    long n = 0;
    for (const FlowStats& f : per_flow) n += f.sent;
    return n;
}

long MetricsReport::total_delivered() const {
    long n = 0;
    for (const FlowStats& f : per_flow) n += f.delivered;
    return n;
}

long MetricsReport::total_lost() const {
    long n = 0;
    for (const FlowStats& f : per_flow) n += f.lost;
    return n;
}

long MetricsReport::total_in_flight() const {
    long n = 0;
    for (const FlowStats& f : per_flow) n += f.in_flight_end;
    return n;
}

std::optional<double> MetricsReport::handoff_delay_mean() const {
    double sum = 0.0;
    long n = 0;
    for (const HandoffRecord& h : handoffs) {
        if (h.latency_s) {
            sum += *h.latency_s;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> MetricsReport::blocking_probability() const {
    if (new_attempts == 0) return std::nullopt;
    return static_cast<double>(new_rejected) / static_cast<double>(new_attempts);
}

std::optional<double> MetricsReport::dropping_probability() const {
    if (handoff_attempts == 0) return std::nullopt;
    return static_cast<double>(handoff_dropped) / static_cast<double>(handoff_attempts);
}

double record_handoff_latency(double last_pkt_from_old, double first_pkt_from_new) {
    if (first_pkt_from_new < last_pkt_from_old)
        throw std::invalid_argument("handoff latency needs first_pkt_from_new >= last_pkt_from_old");
    return first_pkt_from_new - last_pkt_from_old;
}

Throughput throughput(const MetricsReport& report, double t0, double t1) {
    Throughput t;
    if (!(t1 > t0)) return t;
    long packets = 0;
    long bits = 0;
    for (const Delivery& d : report.deliveries) {
        if (d.time_s >= t0 && d.time_s < t1) {
            ++packets;
            bits += 8L * d.bytes;
        }
    }
    const double window = t1 - t0;
    t.packets_per_s = static_cast<double>(packets) / window;
    t.bits_per_s = static_cast<double>(bits) / window;
    return t;
}

Probabilities probabilities(const MetricsReport& report) {
    return {report.blocking_probability(), report.dropping_probability()};
}

std::string format_double(double v) {
    // to_chars picks the shortest representation that parses back exactly,
    // independent of the global locale.
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    assert(ec == std::errc());
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("n/a");
}

} // namespace

std::string metrics_csv_header() {
    return "policy,seed,rate_bps,speed_mps,throughput_pkts,handoff_delay_mean_s,"
           "packet_loss,blocking_prob,dropping_prob";
}

std::string metrics_csv_row(const MetricsReport& report, std::string_view policy,
                            std::uint64_t seed, double rate_bps, double speed_mps) {
    std::string row;
    row += policy;
    row += ',';
    row += std::to_string(seed);
    row += ',';
    row += format_double(rate_bps);
    row += ',';
    row += format_double(speed_mps);
    row += ',';
    row += std::to_string(report.total_delivered());
    row += ',';
    row += opt_cell(report.handoff_delay_mean());
    row += ',';
    row += std::to_string(report.total_lost());
    row += ',';
    row += opt_cell(report.blocking_probability());
    row += ',';
    row += opt_cell(report.dropping_probability());
    return row;
}

std::string handoff_csv_header() {
    return "policy,seed,mn,type,start_s,end_s,latency_s,dropped";
}

std::string handoff_csv_row(const HandoffRecord& h, std::string_view policy, std::uint64_t seed) {
    std::string row;
    row += policy;
    row += ',';
    row += std::to_string(seed);
    row += ',';
    row += h.mn;
    row += ',';
    row += to_string(h.type);
    row += ',';
    row += format_double(h.start_s);
    row += ',';
    row += format_double(h.end_s);
    row += ',';
    row += h.latency_s ? format_double(*h.latency_s) : std::string("n/a");
    row += ',';
    row += h.dropped ? "1" : "0";
    return row;
}

const char* to_string(HandoffType t) {
    return t == HandoffType::Intra ? "intra" : "inter";
}

} // namespace hmip
