#include "hmip/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "hmip/event_queue.hpp"

namespace hmip {

std::string PolicyConfig::label() const {
    if (scheme == Scheme::Baseline) return "baseline";
    std::string l = "ac";
    if (!replacement) l += "-norepl";
    if (!reselection) l += "-noresel";
    return l;
}

double Topology::infinite() { return std::numeric_limits<double>::infinity(); }

bool Topology::reachable(int a, int b) const {
    return path_latency(a, b) < infinite();
}

double Topology::data_delay(int a, int b, int bytes) const {
    if (a == b) return 0.0;
    return path_latency(a, b) + static_cast<double>(bytes) * 8.0 * path_inv_bw(a, b);
}

Topology build_topology(const Scenario& s) {
    Topology t;
    auto add = [&](Topology::NodeKind kind, const std::string& id, int decl) {
        t.index_of[id] = static_cast<int>(t.nodes.size());
        t.nodes.push_back({kind, id, decl});
    };
    for (std::size_t i = 0; i < s.maps.size(); ++i)
        add(Topology::NodeKind::Map, s.maps[i].id, static_cast<int>(i));
    for (std::size_t i = 0; i < s.routers.size(); ++i)
        add(Topology::NodeKind::Router, s.routers[i].id, static_cast<int>(i));
    for (std::size_t i = 0; i < s.ars.size(); ++i)
        add(Topology::NodeKind::Ar, s.ars[i].id, static_cast<int>(i));
    for (std::size_t i = 0; i < s.cns.size(); ++i)
        add(Topology::NodeKind::Cn, s.cns[i].id, static_cast<int>(i));

    const int n = t.n();
    const double inf = Topology::infinite();
    t.latency.assign(static_cast<std::size_t>(n) * n, inf);
    t.inv_bw_sum.assign(static_cast<std::size_t>(n) * n, inf);
    t.hops.assign(static_cast<std::size_t>(n) * n, 1 << 29);
    auto at = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
    for (int i = 0; i < n; ++i) {
        t.latency[at(i, i)] = 0.0;
        t.inv_bw_sum[at(i, i)] = 0.0;
        t.hops[at(i, i)] = 0;
    }
    for (const LinkDecl& l : s.links) {
        auto ia = t.index_of.find(l.a);
        auto ib = t.index_of.find(l.b);
        if (ia == t.index_of.end() || ib == t.index_of.end() || l.a == l.b) continue;
        const double lat = l.latency_s.value_or(s.globals.default_latency_s);
        const double ibw = 1.0 / l.bw_bps.value_or(s.globals.default_bw_bps);
        for (auto [a, b] : {std::pair{ia->second, ib->second}, std::pair{ib->second, ia->second}}) {
            // parallel links: keep the lower-latency edge
            if (lat < t.latency[at(a, b)] || (lat == t.latency[at(a, b)] && 1 < t.hops[at(a, b)])) {
                t.latency[at(a, b)] = lat;
                t.inv_bw_sum[at(a, b)] = ibw;
                t.hops[at(a, b)] = 1;
            }
        }
    }
    // all-pairs shortest paths by (latency, hops); the bandwidth term rides
    // along the chosen path
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a) {
            if (t.latency[at(a, k)] == inf) continue;
            for (int b = 0; b < n; ++b) {
                if (t.latency[at(k, b)] == inf) continue;
                const double lat = t.latency[at(a, k)] + t.latency[at(k, b)];
                const int hop = t.hops[at(a, k)] + t.hops[at(k, b)];
                if (lat < t.latency[at(a, b)] ||
                    (lat == t.latency[at(a, b)] && hop < t.hops[at(a, b)])) {
                    t.latency[at(a, b)] = lat;
                    t.hops[at(a, b)] = hop;
                    t.inv_bw_sum[at(a, b)] = t.inv_bw_sum[at(a, k)] + t.inv_bw_sum[at(k, b)];
                }
            }
        }
    return t;
}

namespace {

constexpr std::uint32_t kHomeBase = 0x01000000u;
constexpr std::uint32_t kCnBase = 0x02000000u;
constexpr std::uint32_t kLcoaBase = 0x03000000u;
constexpr std::uint32_t kRcoaBase = 0x04000000u;
constexpr int kControlBytes = 64;
constexpr std::uint64_t kEventBudget = 50'000'000;

// One in-flight registration conversation of an MN. A chain spans target
// selection, the BU/BA exchange, reselection after rejections and the
// final traffic redirect; a Move replaces the whole chain.
struct ChainState {
    bool active = false;
    std::uint64_t id = 0;
    MnClass cls = MnClass::New; // class of the first BU, fixed for attribution
    bool allow_replacement = false;
    bool use_selection = false; // pick targets with the weight rule, retry after rejects
    bool forced_target = false; // refresh chains pin the target MAP
    bool refresh = false;       // bookkeeping refresh chain, not a registration attempt
    bool ran_admission = false; // some BU of this chain went through the threshold check
    bool counted = false;
    std::set<MapId> excluded;
    int target = -1;
    int old_anchor = -1;
    int handoff_record = -1; // index into metrics.handoffs, -1 when nothing to patch
    BindingUpdate bu;
};

struct MnRuntime {
    MobileNode node;
    int at_ar = -1;    // -1 until power-on
    int entry_at = -1; // MAP whose cache holds our entry, -1 when unregistered
    double on_time = 0.0;
    ChainState chain;
    std::uint64_t chain_counter = 0;
    bool refresh_pending = false; // session change arrived while a chain was in flight

    // handoff latency sampling
    int open_record = -1; // record of the latest data-path disruption
    std::optional<double> latency_baseline;
    double last_delivery = 0.0;
    bool any_delivery = false;
};

struct MapRuntime {
    MapState state;
    int node = -1; // wired-topology index
    std::uint64_t advert_tick = 0;
};

struct FlowRuntime {
    int cn = -1; // cn decl index
    int mn = -1;
    int cn_node = -1;
    bool session_open = false;
    double open_time = 0.0;
    double start_eff = 0.0;
    double stop_s = 0.0;
    double interval_s = 0.0;
    std::uint64_t next_packet = 0;
    long in_flight = 0;
    FlowStats stats;
};

struct CnBinding {
    int map = -1;
    std::uint32_t rcoa = 0;
};

class Engine {
  public:
    Engine(const Scenario& s, const PolicyConfig& policy, const RunOptions& opt)
        : scn_(s), policy_(policy), opt_(opt), topo_(build_topology(s)) {
        seed_ = opt.seed.value_or(s.globals.seed);
        ready_timer_ = opt.ready_timer_s.value_or(s.globals.ready_timer_s);
        params_.alpha = opt.alpha.value_or(s.globals.alpha);
        params_.t_map = opt.t_map.value_or(s.globals.t_map);
        params_.s_max = opt.s_max.value_or(s.globals.s_max);
        sim_time_ = s.globals.sim_time_s;
    }

    RunResult run() {
        init();
        std::uint64_t processed = 0;
        while (!queue_.empty() && queue_.top().time < sim_time_) {
            if (++processed > kEventBudget)
                throw std::runtime_error("event budget exceeded, simulation is not converging");
            Event e = queue_.pop();
            now_ = e.time;
            std::visit([this](const auto& ev) { handle(ev); }, e.payload);
            if (opt_.check_invariants) check_state();
        }
        finalize();
        RunResult r;
        r.metrics = std::move(report_);
        r.trace = std::move(trace_);
        r.violations = std::move(violations_);
        return r;
    }

  private:
    // --- identity helpers -------------------------------------------------

    std::uint32_t home_value(int mn) const { return kHomeBase + static_cast<std::uint32_t>(mn); }
    std::uint32_t cn_value(int cn) const { return kCnBase + static_cast<std::uint32_t>(cn); }
    std::uint32_t lcoa_value(int mn, int ar) const {
        return kLcoaBase + (static_cast<std::uint32_t>(ar) << 12) + static_cast<std::uint32_t>(mn);
    }
    std::uint32_t rcoa_value(int mn, int map) const {
        return kRcoaBase + (static_cast<std::uint32_t>(map) << 12) + static_cast<std::uint32_t>(mn);
    }
    int ar_of_lcoa(std::uint32_t v) const { return static_cast<int>((v - kLcoaBase) >> 12); }
    int mn_of_home(std::uint32_t v) const { return static_cast<int>(v - kHomeBase); }

    int map_node(int map) const { return maps_[static_cast<std::size_t>(map)].node; }
    int ar_node(int ar) const { return ar_nodes_[static_cast<std::size_t>(ar)]; }
    int serving_map(int ar) const { return ar_serving_map_[static_cast<std::size_t>(ar)]; }

    double ctrl_delay(int node_a, int node_b) const {
        return topo_.data_delay(node_a, node_b, kControlBytes);
    }

    // --- setup ------------------------------------------------------------

    void init() {
        if (scn_.mns.size() >= 4096 || scn_.ars.size() >= 4096 || scn_.maps.size() >= 4096)
            throw std::runtime_error("scenario exceeds the addressable node count");

        if (opt_.check_invariants) {
            ParseResult round = parse_scenario(serialize_scenario(scn_));
            if (!round.ok() || !(*round.scenario == scn_))
                violations_.push_back("scenario text round-trip mismatch");
        }

        maps_.resize(scn_.maps.size());
        for (std::size_t m = 0; m < scn_.maps.size(); ++m) {
            maps_[m].state.map_id = static_cast<MapId>(m);
            maps_[m].state.thresholds = {scn_.maps[m].n_thr, scn_.maps[m].h_thr};
            maps_[m].node = topo_.index_of.at(scn_.maps[m].id);
        }

        std::map<std::string, int> map_index, ar_index, cn_index, mn_index;
        for (std::size_t i = 0; i < scn_.maps.size(); ++i) map_index[scn_.maps[i].id] = static_cast<int>(i);
        for (std::size_t i = 0; i < scn_.ars.size(); ++i) ar_index[scn_.ars[i].id] = static_cast<int>(i);
        for (std::size_t i = 0; i < scn_.cns.size(); ++i) cn_index[scn_.cns[i].id] = static_cast<int>(i);
        for (std::size_t i = 0; i < scn_.mns.size(); ++i) mn_index[scn_.mns[i].id] = static_cast<int>(i);

        ar_nodes_.resize(scn_.ars.size());
        ar_serving_map_.resize(scn_.ars.size());
        for (std::size_t a = 0; a < scn_.ars.size(); ++a) {
            ar_nodes_[a] = topo_.index_of.at(scn_.ars[a].id);
            ar_serving_map_[a] = map_index.at(scn_.ars[a].map);
        }

        mns_.resize(scn_.mns.size());
        for (std::size_t i = 0; i < scn_.mns.size(); ++i) {
            MnRuntime& m = mns_[i];
            m.node.home_address = {home_value(static_cast<int>(i))};
            m.node.speed = scn_.mns[i].speed;
        }
        cn_view_.assign(scn_.mns.size(), std::nullopt);
        flows_of_mn_.assign(scn_.mns.size(), {});
        advert_tick_.assign(scn_.ars.size(), 0);
        report_.throughput_series.assign(static_cast<std::size_t>(std::ceil(sim_time_)), 0);

        flows_.resize(scn_.flows.size());
        for (std::size_t f = 0; f < scn_.flows.size(); ++f) {
            const FlowDecl& d = scn_.flows[f];
            FlowRuntime& fr = flows_[f];
            fr.cn = cn_index.at(d.cn);
            fr.mn = mn_index.at(d.mn);
            fr.cn_node = topo_.index_of.at(d.cn);
            fr.stop_s = d.stop_s;
            fr.interval_s = static_cast<double>(d.packet_bytes) * 8.0 / d.rate_bps;
            fr.stats.cn = d.cn;
            fr.stats.mn = d.mn;
            fr.stats.rate_bps = d.rate_bps;
            fr.stats.packet_bytes = d.packet_bytes;
            flows_of_mn_[static_cast<std::size_t>(fr.mn)].push_back(static_cast<int>(f));
        }

        // Start jitter is drawn in declaration order before any event runs,
        // so equal seeds give equal timelines under every policy.
        std::mt19937_64 gen(seed_);
        auto draw = [&]() {
            return static_cast<double>(gen() >> 11) * 0x1.0p-53 * scn_.globals.start_jitter_s;
        };
        std::vector<double> mn_jitter(scn_.mns.size());
        for (double& j : mn_jitter) j = draw();
        std::vector<double> flow_jitter(scn_.flows.size());
        for (double& j : flow_jitter) j = draw();

        for (std::size_t a = 0; a < scn_.ars.size(); ++a)
            queue_.push(0.0, RouterAdvertEvent{static_cast<int>(a)});

        // power-on doubles as the initial attach: a Move onto the declared AR
        for (std::size_t i = 0; i < scn_.mns.size(); ++i) {
            mns_[i].on_time = scn_.mns[i].on_s + mn_jitter[i];
            queue_.push(mns_[i].on_time,
                        MoveEvent{static_cast<int>(i), ar_index.at(scn_.mns[i].ar), scn_.mns[i].speed});
        }

        for (const LegDecl& leg : scn_.legs) {
            const int mn = mn_index.at(leg.mn);
            queue_.push(leg.at_s, MoveEvent{mn, ar_index.at(leg.to),
                                            leg.speed.value_or(leg_speed_before(leg, mn))});
        }
        for (const RouteDecl& route : scn_.routes) {
            const int mn = mn_index.at(route.mn);
            const double v = scn_.mns[static_cast<std::size_t>(mn)].speed;
            double t = route.start_s;
            std::size_t k = 0;
            const std::size_t n = route.path.size();
            while (true) {
                const std::size_t next = (k + 1) % n;
                if (!route.loop && next == 0) break;
                const ArDecl& a = scn_.ars[static_cast<std::size_t>(ar_index.at(route.path[k]))];
                const ArDecl& b = scn_.ars[static_cast<std::size_t>(ar_index.at(route.path[next]))];
                t += std::hypot(b.x - a.x, b.y - a.y) / v;
                if (t >= sim_time_) break;
                queue_.push(t, MoveEvent{mn, ar_index.at(route.path[next]), v});
                k = next;
            }
        }

        for (std::size_t f = 0; f < scn_.flows.size(); ++f) {
            flows_[f].start_eff = scn_.flows[f].start_s + flow_jitter[f];
            queue_.push(flows_[f].start_eff, SessionOpenEvent{static_cast<int>(f)});
            queue_.push(scn_.flows[f].stop_s, SessionCloseEvent{static_cast<int>(f)});
        }
    }

    // Running speed an MN would have just before this leg fires: the last
    // explicit speed of an earlier leg, else the declared speed.
    double leg_speed_before(const LegDecl& leg, int mn) const {
        double v = scn_.mns[static_cast<std::size_t>(mn)].speed;
        for (const LegDecl& l : scn_.legs) {
            if (l.mn != leg.mn) continue;
            if (l.at_s >= leg.at_s) break; // legs of one MN are time-sorted by validation
            if (l.speed) v = *l.speed;
        }
        return v;
    }

    // --- event handlers ---------------------------------------------------

    void handle(const MoveEvent& ev) {
        MnRuntime& m = mns_[static_cast<std::size_t>(ev.mn)];
        if (ev.to_ar == m.at_ar) {
            m.node.speed = ev.speed;
            return;
        }
        const int from = m.at_ar;
        trace("move", scn_.mns[static_cast<std::size_t>(ev.mn)].id + " -> " +
                          scn_.ars[static_cast<std::size_t>(ev.to_ar)].id);

        int record = -1;
        if (from != -1 && has_open_session(ev.mn)) {
            const HandoffType t =
                serving_map(from) == serving_map(ev.to_ar) ? HandoffType::Intra : HandoffType::Inter;
            record = begin_disruption(ev.mn, t);
        } else {
            m.open_record = -1;
            m.latency_baseline.reset();
        }

        m.at_ar = ev.to_ar;
        m.node.speed = ev.speed;
        m.node.coas.lcoa = {lcoa_value(ev.mn, ev.to_ar)};
        update_map_table(m.node, advert_rows(ev.to_ar));

        const bool ac = policy_.scheme == PolicyConfig::Scheme::AdmissionControl;
        start_chain(ev.mn, ac && policy_.replacement, ac && policy_.reselection, {}, record);
    }

    void handle(const RouterAdvertEvent& ev) {
        const std::vector<MapAdvert> rows = advert_rows(ev.ar);
        for (std::size_t i = 0; i < mns_.size(); ++i)
            if (mns_[i].at_ar == ev.ar) update_map_table(mns_[i].node, rows);
        trace("advert", scn_.ars[static_cast<std::size_t>(ev.ar)].id);
        const double next =
            static_cast<double>(++advert_tick_[static_cast<std::size_t>(ev.ar)]) *
            scn_.globals.advert_period_s;
        if (next < sim_time_) queue_.push(next, RouterAdvertEvent{ev.ar});
    }

    void handle(const SendBuEvent& ev) {
        MnRuntime& m = mns_[static_cast<std::size_t>(ev.mn)];
        ChainState& c = m.chain;
        if (!c.active || c.id != ev.chain) return; // superseded chain
        MapRuntime& M = maps_[static_cast<std::size_t>(ev.map)];

        bool accepted = false;
        if (policy_.scheme == PolicyConfig::Scheme::Baseline) {
            // plain HMIPv6: unconditional upsert
            bool was_refresh = false;
            if (BindingCacheEntry* e = M.state.find(c.bu.mn_home_address)) {
                e->lcoa = c.bu.lcoa;
                e->con_cn = c.bu.con_cn;
                was_refresh = true;
            } else {
                M.state.cache.push_back(BindingCacheEntry{c.bu.mn_home_address,
                                                          {rcoa_value(ev.mn, ev.map)},
                                                          c.bu.lcoa,
                                                          c.bu.con_cn,
                                                          c.bu.timestamp});
                c.ran_admission = true;
            }
            M.state.tot_cn = M.state.recompute_tot_cn();
            accepted = true;
            trace("admit", map_id_str(ev.map) + " <- " + mn_id_str(ev.mn) +
                               (was_refresh ? " (refresh)" : ""));
        } else {
            RegistrationResult r = handle_registration(std::move(M.state), c.bu,
                                                       {rcoa_value(ev.mn, ev.map)},
                                                       c.allow_replacement);
            M.state = std::move(r.map);
            if (!r.refreshed) c.ran_admission = true;
            if (r.eviction) {
                const int victim = mn_of_home(r.eviction->mn_home_address.value);
                ++report_.insufficient_resources_bas;
                evict(victim, ev.map);
                trace("replace", map_id_str(ev.map) + " drops " + mn_id_str(victim) + " for " +
                                     mn_id_str(ev.mn));
            }
            accepted = r.ack.status == BaStatus::Accepted;
            if (accepted) {
                trace("admit", map_id_str(ev.map) + " <- " + mn_id_str(ev.mn) +
                                   (r.refreshed ? " (refresh)" : ""));
            } else {
                ++report_.insufficient_resources_bas;
                trace("reject", map_id_str(ev.map) + " x " + mn_id_str(ev.mn) + " tot_cn=" +
                                    std::to_string(M.state.tot_cn));
            }
        }

        if (accepted) {
            if (m.entry_at != -1 && m.entry_at != ev.map) {
                erase_entry(m.entry_at, ev.mn);
                trace("dereg", map_id_str(m.entry_at) + " releases " + mn_id_str(ev.mn));
            }
            m.entry_at = ev.map;
        }
        queue_.push(now_ + ctrl_delay(map_node(ev.map), ar_node(ar_of_lcoa(c.bu.lcoa.value))),
                    DeliverBaEvent{ev.mn, ev.map, accepted, false, c.id});
    }

    void handle(const DeliverBaEvent& ev) {
        MnRuntime& m = mns_[static_cast<std::size_t>(ev.mn)];
        if (ev.eviction) {
            // re-home after replacement; moot when a newer chain or a
            // successful re-registration got there first
            if (m.chain.active || m.entry_at != -1) return;
            start_chain(ev.mn, false, true, {static_cast<MapId>(ev.map)}, m.open_record);
            return;
        }
        ChainState& c = m.chain;
        if (!c.active || c.id != ev.chain) return;

        if (!ev.accepted) {
            c.excluded.insert(static_cast<MapId>(ev.map));
            if (c.use_selection) advance_chain(ev.mn);
            else terminal_fail(ev.mn);
            return;
        }

        m.node.coas.rcoa = {rcoa_value(ev.mn, c.target)};
        // A registration attempt is one root chain that faced the threshold
        // check somewhere. Bookkeeping refreshes and purely intra-domain
        // re-registrations (accepted as cache refreshes) stay uncounted.
        if (!c.refresh && !c.counted && c.ran_admission) {
            count_attempt(c.cls, false);
            c.counted = true;
        }
        if (c.handoff_record != -1) {
            HandoffRecord& rec = report_.handoffs[static_cast<std::size_t>(c.handoff_record)];
            rec.end_s = now_;
            rec.type = c.old_anchor == c.target ? HandoffType::Intra : HandoffType::Inter;
        }
        // anchor change implies a home-agent round trip before correspondents
        // switch to the new regional address
        const double extra = c.old_anchor == c.target ? 0.0 : scn_.globals.ha_rtt_s;
        queue_.push(now_ + extra, RegistrationCompleteEvent{ev.mn, c.target, c.id});
    }

    void handle(const RegistrationCompleteEvent& ev) {
        MnRuntime& m = mns_[static_cast<std::size_t>(ev.mn)];
        ChainState& c = m.chain;
        if (!c.active || c.id != ev.chain) return;
        cn_view_[static_cast<std::size_t>(ev.mn)] = CnBinding{ev.map, rcoa_value(ev.mn, ev.map)};
        c.active = false;
        trace("redirect", mn_id_str(ev.mn) + " via " + map_id_str(ev.map));
        if (m.refresh_pending) {
            m.refresh_pending = false;
            notify_session_change(ev.mn); // replay the change the chain shadowed
        }
    }

    void handle(const PacketEmitEvent& ev) {
        FlowRuntime& f = flows_[static_cast<std::size_t>(ev.flow)];
        if (!f.session_open) return;
        ++f.stats.sent;
        const auto& view = cn_view_[static_cast<std::size_t>(f.mn)];
        if (!view) {
            ++f.stats.lost;
            ++report_.lost_no_binding;
        } else {
            ++f.in_flight;
            PacketArriveEvent p;
            p.stage = PacketArriveEvent::Stage::AtMap;
            p.flow = ev.flow;
            p.packet = f.next_packet++;
            p.map = view->map;
            p.rcoa = view->rcoa;
            queue_.push(now_ + topo_.data_delay(f.cn_node, map_node(view->map),
                                                f.stats.packet_bytes),
                        p);
        }
        queue_.push(now_ + f.interval_s, PacketEmitEvent{ev.flow});
    }

    void handle(const PacketArriveEvent& ev) {
        FlowRuntime& f = flows_[static_cast<std::size_t>(ev.flow)];
        if (ev.stage == PacketArriveEvent::Stage::AtMap) {
            MapState& st = maps_[static_cast<std::size_t>(ev.map)].state;
            const BindingCacheEntry* entry = st.find({home_value(f.mn)});
            if (!entry || entry->rcoa.value != ev.rcoa) {
                lose(f, report_.lost_no_binding);
                return;
            }
            if (!session_served(ev.map, ev.flow)) {
                lose(f, report_.lost_over_capacity);
                return;
            }
            PacketArriveEvent p = ev;
            p.stage = PacketArriveEvent::Stage::AtAr;
            p.ar = ar_of_lcoa(entry->lcoa.value);
            p.lcoa = entry->lcoa.value;
            queue_.push(now_ + topo_.data_delay(map_node(ev.map), ar_node(p.ar),
                                                f.stats.packet_bytes),
                        p);
            return;
        }

        MnRuntime& m = mns_[static_cast<std::size_t>(f.mn)];
        if (m.at_ar != ev.ar || m.node.coas.lcoa.value != ev.lcoa) {
            lose(f, report_.lost_stale_attach);
            return;
        }
        --f.in_flight;
        ++f.stats.delivered;
        report_.deliveries.push_back({now_, f.stats.packet_bytes});
        const auto bucket = static_cast<std::size_t>(now_);
        if (bucket < report_.throughput_series.size()) ++report_.throughput_series[bucket];

        const bool was_ready = m.node.state == MnState::Ready;
        on_data_activity(m.node, now_, ready_timer_);
        queue_.push(*m.node.ready_timer_deadline, TimerExpiryEvent{f.mn});
        // flag A just flipped: tell the serving MAP the real session count
        if (!was_ready) notify_session_change(f.mn);

        if (m.open_record != -1 && m.latency_baseline && ev.map == m.entry_at) {
            HandoffRecord& rec = report_.handoffs[static_cast<std::size_t>(m.open_record)];
            if (!rec.latency_s) {
                rec.latency_s = record_handoff_latency(*m.latency_baseline, now_);
                m.latency_baseline.reset();
            }
        }
        m.last_delivery = now_;
        m.any_delivery = true;
    }

    void handle(const TimerExpiryEvent& ev) {
        on_timer_expiry(mns_[static_cast<std::size_t>(ev.mn)].node, now_);
    }

    void handle(const SessionOpenEvent& ev) {
        FlowRuntime& f = flows_[static_cast<std::size_t>(ev.flow)];
        if (now_ >= f.stop_s) return; // jitter pushed the start past the stop
        f.session_open = true;
        f.open_time = now_;
        MnRuntime& m = mns_[static_cast<std::size_t>(f.mn)];
        m.node.connected_cns.insert({cn_value(f.cn)});
        trace("session-open", f.stats.cn + " -> " + f.stats.mn);
        queue_.push(now_, PacketEmitEvent{ev.flow});
        notify_session_change(f.mn);
    }

    void handle(const SessionCloseEvent& ev) {
        FlowRuntime& f = flows_[static_cast<std::size_t>(ev.flow)];
        if (!f.session_open) return;
        f.session_open = false;
        MnRuntime& m = mns_[static_cast<std::size_t>(f.mn)];
        m.node.connected_cns.erase({cn_value(f.cn)});
        trace("session-close", f.stats.cn + " -> " + f.stats.mn);
        notify_session_change(f.mn);
    }

    // The serving MAP learns con_cn only from BUs, so a session change at a
    // registered MN triggers a refresh; an unregistered MN tries to get a
    // binding again. While a chain is in flight the change is queued and
    // replayed at chain completion, otherwise the cached count would stay
    // stale indefinitely.
    void notify_session_change(int mn) {
        MnRuntime& m = mns_[static_cast<std::size_t>(mn)];
        if (m.at_ar == -1) return;
        if (m.chain.active) {
            m.refresh_pending = true;
            return;
        }
        if (m.entry_at != -1) {
            start_chain(mn, false, false, {}, -1, m.entry_at);
        } else {
            const bool ac = policy_.scheme == PolicyConfig::Scheme::AdmissionControl;
            start_chain(mn, ac && policy_.replacement, ac && policy_.reselection, {}, -1);
        }
    }

    // --- registration chains ----------------------------------------------

    void start_chain(int mn, bool allow_repl, bool use_sel, std::set<MapId> excluded, int record,
                     int forced_target = -1) {
        MnRuntime& m = mns_[static_cast<std::size_t>(mn)];
        m.refresh_pending = false; // the fresh BU carries the live session count
        ChainState& c = m.chain;
        c = ChainState{};
        c.active = true;
        c.id = ++m.chain_counter;
        c.cls = classify_bu(make_binding_update(m.node, now_));
        c.allow_replacement = allow_repl;
        c.use_selection = use_sel;
        c.excluded = std::move(excluded);
        c.old_anchor = m.entry_at;
        c.handoff_record = record;
        if (forced_target >= 0) {
            c.forced_target = true;
            c.target = forced_target;
            c.refresh = true; // keeps the serving MAP's con_cn current, no admission intended
        }
        advance_chain(mn);
    }

    void advance_chain(int mn) {
        MnRuntime& m = mns_[static_cast<std::size_t>(mn)];
        ChainState& c = m.chain;
        int target;
        if (c.forced_target) {
            target = c.target;
        } else if (c.use_selection) {
            const std::optional<MapId> sel = select_map(m.node, params_, c.excluded);
            if (!sel) {
                terminal_fail(mn);
                return;
            }
            target = static_cast<int>(*sel);
        } else {
            target = serving_map(m.at_ar);
            if (c.excluded.count(static_cast<MapId>(target))) {
                terminal_fail(mn);
                return;
            }
        }
        c.target = target;
        c.bu = make_binding_update(m.node, now_);
        trace("bu", mn_id_str(mn) + " -> " + map_id_str(target) + " " + to_string(classify_bu(c.bu)) +
                        " con_cn=" + std::to_string(c.bu.con_cn));
        queue_.push(now_ + ctrl_delay(ar_node(m.at_ar), map_node(target)),
                    SendBuEvent{mn, target, c.id});
    }

    void terminal_fail(int mn) {
        MnRuntime& m = mns_[static_cast<std::size_t>(mn)];
        ChainState& c = m.chain;
        // Every terminal failure counts, refresh chains included: a bounced
        // refresh means the MN lost its binding and with it its service.
        if (!c.counted) {
            count_attempt(c.cls, true);
            c.counted = true;
        }
        if (c.handoff_record != -1) {
            HandoffRecord& rec = report_.handoffs[static_cast<std::size_t>(c.handoff_record)];
            rec.dropped = true;
            rec.end_s = now_;
        }
        m.latency_baseline.reset();
        m.open_record = -1;
        if (m.entry_at != -1) {
            erase_entry(m.entry_at, mn);
            m.entry_at = -1;
        }
        cn_view_[static_cast<std::size_t>(mn)].reset();
        for (int fi : flows_of_mn_[static_cast<std::size_t>(mn)])
            flows_[static_cast<std::size_t>(fi)].session_open = false;
        m.node.connected_cns.clear();
        m.refresh_pending = false; // nothing left to report
        trace(c.cls == MnClass::New ? "block" : "drop", mn_id_str(mn));
        c.active = false;
    }

    void count_attempt(MnClass cls, bool failed) {
        if (cls == MnClass::New) {
            ++report_.new_attempts;
            if (failed) ++report_.new_rejected;
        } else {
            ++report_.handoff_attempts;
            if (failed) ++report_.handoff_dropped;
        }
    }

    void evict(int victim, int from_map) {
        MnRuntime& v = mns_[static_cast<std::size_t>(victim)];
        v.entry_at = -1;
        if (has_open_session(victim)) {
            begin_disruption(victim, HandoffType::Inter);
        } else {
            v.open_record = -1;
            v.latency_baseline.reset();
        }
        queue_.push(now_ + ctrl_delay(map_node(from_map), ar_node(v.at_ar)),
                    DeliverBaEvent{victim, from_map, false, true, 0});
        trace("evict", mn_id_str(victim) + " from " + map_id_str(from_map));
    }

    void erase_entry(int map, int mn) {
        MapState& st = maps_[static_cast<std::size_t>(map)].state;
        const NodeAddress home{home_value(mn)};
        st.cache.erase(std::remove_if(st.cache.begin(), st.cache.end(),
                                      [&](const BindingCacheEntry& e) {
                                          return e.mn_home_address == home;
                                      }),
                       st.cache.end());
        st.tot_cn = st.recompute_tot_cn();
    }

    int begin_disruption(int mn, HandoffType type) {
        MnRuntime& m = mns_[static_cast<std::size_t>(mn)];
        HandoffRecord rec;
        rec.mn = mn_id_str(mn);
        rec.type = type;
        rec.start_s = now_;
        rec.end_s = now_;
        report_.handoffs.push_back(std::move(rec));
        m.open_record = static_cast<int>(report_.handoffs.size()) - 1;
        m.latency_baseline = m.any_delivery ? std::optional<double>(m.last_delivery) : std::nullopt;
        return m.open_record;
    }

    // --- traffic ------------------------------------------------------------

    void lose(FlowRuntime& f, long& counter) {
        --f.in_flight;
        ++f.stats.lost;
        ++counter;
    }

    bool has_open_session(int mn) const {
        for (int fi : flows_of_mn_[static_cast<std::size_t>(mn)])
            if (flows_[static_cast<std::size_t>(fi)].session_open) return true;
        return false;
    }

    // A MAP serves at most h_thr concurrent sessions; they are granted in
    // binding-cache order, oldest session of an MN first. Everything past
    // the budget is forwarded nowhere and the packets are lost here.
    bool session_served(int map, int flow) const {
        const MapState& st = maps_[static_cast<std::size_t>(map)].state;
        const int budget = st.thresholds.h_thr;
        int used = 0;
        for (const BindingCacheEntry& e : st.cache) {
            const int mn = mn_of_home(e.mn_home_address.value);
            std::vector<int> open;
            for (int fi : flows_of_mn_[static_cast<std::size_t>(mn)])
                if (flows_[static_cast<std::size_t>(fi)].session_open) open.push_back(fi);
            std::sort(open.begin(), open.end(), [&](int a, int b) {
                const FlowRuntime& fa = flows_[static_cast<std::size_t>(a)];
                const FlowRuntime& fb = flows_[static_cast<std::size_t>(b)];
                if (fa.open_time != fb.open_time) return fa.open_time < fb.open_time;
                return a < b;
            });
            for (int fi : open) {
                ++used;
                if (fi == flow) return used <= budget;
            }
        }
        return true; // session already closed while the packet was in flight
    }

    std::vector<MapAdvert> advert_rows(int ar) const {
        std::vector<MapAdvert> rows;
        rows.reserve(maps_.size());
        for (std::size_t m = 0; m < maps_.size(); ++m)
            rows.push_back(MapAdvert{static_cast<MapId>(m), maps_[m].state.tot_cn,
                                     maps_[m].state.thresholds.h_thr,
                                     topo_.path_hops(ar_node(ar), maps_[m].node)});
        std::sort(rows.begin(), rows.end(), [](const MapAdvert& a, const MapAdvert& b) {
            if (a.distance_hops != b.distance_hops) return a.distance_hops < b.distance_hops;
            return a.map_id < b.map_id;
        });
        return rows;
    }

    // --- bookkeeping --------------------------------------------------------

    void trace(const char* tag, std::string text) {
        if (!opt_.record_trace) return;
        trace_.push_back(TraceEntry{now_, tag, std::move(text)});
    }

    std::string mn_id_str(int mn) const { return scn_.mns[static_cast<std::size_t>(mn)].id; }
    std::string map_id_str(int map) const { return scn_.maps[static_cast<std::size_t>(map)].id; }

    void check_state() {
        if (violations_.size() >= 20) return;
        std::set<std::uint32_t> homes_anywhere;
        for (std::size_t m = 0; m < maps_.size(); ++m) {
            const MapState& st = maps_[m].state;
            if (st.tot_cn != st.recompute_tot_cn())
                violations_.push_back("t=" + format_double(now_) + " " + map_id_str(static_cast<int>(m)) +
                                      ": tot_cn diverged from the cache sum");
            std::set<std::uint32_t> homes_here;
            for (const BindingCacheEntry& e : st.cache) {
                if (!homes_here.insert(e.mn_home_address.value).second)
                    violations_.push_back("t=" + format_double(now_) + " " +
                                          map_id_str(static_cast<int>(m)) +
                                          ": duplicate cache entry for one home address");
                if (!homes_anywhere.insert(e.mn_home_address.value).second)
                    violations_.push_back("t=" + format_double(now_) +
                                          ": one home address is cached at two MAPs");
            }
        }
        for (const FlowRuntime& f : flows_) {
            if (f.stats.sent != f.stats.delivered + f.stats.lost + f.in_flight ||
                f.stats.sent < 0 || f.stats.delivered < 0 || f.stats.lost < 0 || f.in_flight < 0)
                violations_.push_back("t=" + format_double(now_) + " flow " + f.stats.cn + "->" +
                                      f.stats.mn + ": packet conservation broken");
        }
    }

    void finalize() {
        report_.sim_time_s = sim_time_;
        for (FlowRuntime& f : flows_) {
            f.stats.in_flight_end = f.in_flight;
            report_.per_flow.push_back(f.stats);
        }
    }

    // --- data ---------------------------------------------------------------

    const Scenario& scn_;
    PolicyConfig policy_;
    RunOptions opt_;
    Topology topo_;

    std::uint64_t seed_ = 0;
    double ready_timer_ = 0.0;
    SelectionParams params_;
    double sim_time_ = 0.0;
    double now_ = 0.0;

    EventQueue queue_;
    std::vector<MapRuntime> maps_;
    std::vector<MnRuntime> mns_;
    std::vector<FlowRuntime> flows_;
    std::vector<std::vector<int>> flows_of_mn_;
    std::vector<std::optional<CnBinding>> cn_view_;
    std::vector<int> ar_nodes_;
    std::vector<int> ar_serving_map_;
    std::vector<std::uint64_t> advert_tick_ = {};

    MetricsReport report_;
    std::vector<TraceEntry> trace_;
    std::vector<std::string> violations_;
};

} // namespace

std::string RunResult::report_text() const {
    std::string out;
    auto line = [&out](std::initializer_list<std::string> parts) {
        bool first = true;
        for (const std::string& p : parts) {
            if (!first) out += ' ';
            out += p;
            first = false;
        }
        out += '\n';
    };
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("n/a");
    };

    line({"sim_time_s", format_double(metrics.sim_time_s)});
    line({"packets sent", std::to_string(metrics.total_sent()), "delivered",
          std::to_string(metrics.total_delivered()), "lost", std::to_string(metrics.total_lost()),
          "in_flight", std::to_string(metrics.total_in_flight())});
    line({"loss no_binding", std::to_string(metrics.lost_no_binding), "stale_attach",
          std::to_string(metrics.lost_stale_attach), "over_capacity",
          std::to_string(metrics.lost_over_capacity)});
    line({"registrations new", std::to_string(metrics.new_attempts), "rejected",
          std::to_string(metrics.new_rejected), "handoff", std::to_string(metrics.handoff_attempts),
          "dropped", std::to_string(metrics.handoff_dropped), "insufficient_bas",
          std::to_string(metrics.insufficient_resources_bas)});
    line({"blocking", opt(metrics.blocking_probability()), "dropping",
          opt(metrics.dropping_probability()), "handoff_delay_mean",
          opt(metrics.handoff_delay_mean())});
    for (const FlowStats& f : metrics.per_flow)
        line({"flow", f.cn, "->", f.mn, "sent", std::to_string(f.sent), "delivered",
              std::to_string(f.delivered), "lost", std::to_string(f.lost), "in_flight",
              std::to_string(f.in_flight_end)});
    for (const HandoffRecord& h : metrics.handoffs)
        line({"handoff", h.mn, to_string(h.type), "start", format_double(h.start_s), "end",
              format_double(h.end_s), "latency", opt(h.latency_s), h.dropped ? "dropped" : "ok"});
    for (const std::string& v : violations) line({"violation", v});
    for (const TraceEntry& t : trace) line({format_double(t.time), t.tag, t.text});
    return out;
}

RunResult run_simulation(const Scenario& scenario, const PolicyConfig& policy,
                         const RunOptions& options) {
    const std::vector<Diagnostic> diags = validate_scenario(scenario);
    if (!diags.empty())
        throw std::invalid_argument(format_diagnostics("scenario", diags));
    Engine engine(scenario, policy, options);
    return engine.run();
}

} // namespace hmip
