#include "hmip/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hmip/metrics.hpp" // format_double

namespace hmip {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double_value(std::string_view v, double& out) {
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int_value(std::string_view v, int& out) {
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_u64_value(std::string_view v, std::uint64_t& out) {
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_bool_value(std::string_view v, bool& out) {
    if (v == "true" || v == "1") { out = true; return true; }
    if (v == "false" || v == "0") { out = false; return true; }
    return false;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t comma = v.find(',', pos);
        if (comma == std::string_view::npos) comma = v.size();
        parts.emplace_back(trim(v.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (!parts.empty() && parts.back().empty() && v.empty()) parts.clear();
    return parts;
}

// Raw key/value pairs of one section block.
struct Block {
    std::string section;
    int header_line = 0;
    std::vector<std::pair<std::string, std::pair<std::string, int>>> kv; // key -> (value, line)
};

// Header lines per entity, used to attach semantic diagnostics to the
// section that declared the offending entity.
struct LineInfo {
    std::vector<int> maps, routers, ars, cns, links, mns, flows, legs, routes;
    int line(const std::vector<int>& v, std::size_t i) const {
        return i < v.size() ? v[i] : 0;
    }
};

class BlockReader {
  public:
    BlockReader(const Block& b, std::vector<Diagnostic>& diags) : b_(b), diags_(diags) {}

    ~BlockReader() {
        for (const auto& [key, vl] : b_.kv)
            if (!consumed_.count(key))
                diags_.push_back({vl.second, "unknown key '" + key + "' in [" + b_.section + "]"});
    }

    bool has(const std::string& key) const {
        return std::any_of(b_.kv.begin(), b_.kv.end(),
                           [&](const auto& p) { return p.first == key; });
    }

    // Each fetches and consumes a key; missing required keys diagnose at
    // the section header.
    bool id(const std::string& key, std::string& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        if (vl->first.empty()) {
            diags_.push_back({vl->second, "empty value for '" + key + "'"});
            return false;
        }
        out = vl->first;
        return true;
    }

    bool number(const std::string& key, double& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        if (!parse_double_value(vl->first, out)) {
            diags_.push_back({vl->second, "expected a number for '" + key + "', got '" + vl->first + "'"});
            return false;
        }
        return true;
    }

    bool integer(const std::string& key, int& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        if (!parse_int_value(vl->first, out)) {
            diags_.push_back({vl->second, "expected an integer for '" + key + "', got '" + vl->first + "'"});
            return false;
        }
        return true;
    }

    bool unsigned64(const std::string& key, std::uint64_t& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        if (!parse_u64_value(vl->first, out)) {
            diags_.push_back({vl->second, "expected an unsigned integer for '" + key + "', got '" + vl->first + "'"});
            return false;
        }
        return true;
    }

    bool boolean(const std::string& key, bool& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        if (!parse_bool_value(vl->first, out)) {
            diags_.push_back({vl->second, "expected true/false for '" + key + "', got '" + vl->first + "'"});
            return false;
        }
        return true;
    }

    bool list(const std::string& key, std::vector<std::string>& out, bool required = true) {
        const auto* vl = fetch(key, required);
        if (!vl) return false;
        out = split_list(vl->first);
        if (out.empty() || std::any_of(out.begin(), out.end(),
                                       [](const std::string& s) { return s.empty(); })) {
            diags_.push_back({vl->second, "expected a comma-separated list for '" + key + "'"});
            return false;
        }
        return true;
    }

  private:
    const std::pair<std::string, int>* fetch(const std::string& key, bool required) {
        consumed_.insert(key);
        for (const auto& [k, vl] : b_.kv)
            if (k == key) return &vl;
        if (required)
            diags_.push_back({b_.header_line, "[" + b_.section + "] is missing required key '" + key + "'"});
        return nullptr;
    }

    const Block& b_;
    std::vector<Diagnostic>& diags_;
    std::set<std::string> consumed_;
};

bool apply_global(const std::string& key, const std::string& value, int line, ScenarioGlobals& g,
                  std::vector<Diagnostic>& diags) {
    auto num = [&](double& out) {
        if (!parse_double_value(value, out)) {
            diags.push_back({line, "expected a number for '" + key + "', got '" + value + "'"});
            return false;
        }
        return true;
    };
    if (key == "sim_time_s") return num(g.sim_time_s);
    if (key == "ready_timer_s") return num(g.ready_timer_s);
    if (key == "advert_period_s") return num(g.advert_period_s);
    if (key == "alpha") return num(g.alpha);
    if (key == "t_map") return num(g.t_map);
    if (key == "s_max") return num(g.s_max);
    if (key == "ha_rtt_s") return num(g.ha_rtt_s);
    if (key == "start_jitter_s") return num(g.start_jitter_s);
    if (key == "default_bw_bps") return num(g.default_bw_bps);
    if (key == "default_latency_s") return num(g.default_latency_s);
    if (key == "seed") {
        if (!parse_u64_value(value, g.seed)) {
            diags.push_back({line, "expected an unsigned integer for 'seed', got '" + value + "'"});
            return false;
        }
        return true;
    }
    diags.push_back({line, "unknown global key '" + key + "'"});
    return false;
}

void build_entity(const Block& b, Scenario& s, LineInfo& li, std::vector<Diagnostic>& diags) {
    BlockReader r(b, diags);
    if (b.section == "map") {
        MapDecl d;
        r.id("id", d.id);
        r.integer("n_thr", d.n_thr);
        r.integer("h_thr", d.h_thr);
        s.maps.push_back(std::move(d));
        li.maps.push_back(b.header_line);
    } else if (b.section == "router") {
        RouterDecl d;
        r.id("id", d.id);
        s.routers.push_back(std::move(d));
        li.routers.push_back(b.header_line);
    } else if (b.section == "ar") {
        ArDecl d;
        r.id("id", d.id);
        r.id("map", d.map);
        if (r.has("x")) r.number("x", d.x);
        if (r.has("y")) r.number("y", d.y);
        if (r.has("range")) r.number("range", d.range);
        s.ars.push_back(std::move(d));
        li.ars.push_back(b.header_line);
    } else if (b.section == "cn") {
        CnDecl d;
        r.id("id", d.id);
        s.cns.push_back(std::move(d));
        li.cns.push_back(b.header_line);
    } else if (b.section == "link") {
        LinkDecl d;
        r.id("a", d.a);
        r.id("b", d.b);
        if (r.has("bw_bps")) { double v = 0; if (r.number("bw_bps", v)) d.bw_bps = v; }
        if (r.has("latency_s")) { double v = 0; if (r.number("latency_s", v)) d.latency_s = v; }
        s.links.push_back(std::move(d));
        li.links.push_back(b.header_line);
    } else if (b.section == "mn") {
        MnDecl d;
        r.id("id", d.id);
        r.id("ar", d.ar);
        if (r.has("speed")) r.number("speed", d.speed);
        if (r.has("on_s")) r.number("on_s", d.on_s);
        s.mns.push_back(std::move(d));
        li.mns.push_back(b.header_line);
    } else if (b.section == "flow") {
        FlowDecl d;
        r.id("cn", d.cn);
        r.id("mn", d.mn);
        r.number("rate_bps", d.rate_bps);
        if (r.has("packet_bytes")) r.integer("packet_bytes", d.packet_bytes);
        r.number("start_s", d.start_s);
        r.number("stop_s", d.stop_s);
        s.flows.push_back(std::move(d));
        li.flows.push_back(b.header_line);
    } else if (b.section == "leg") {
        LegDecl d;
        r.id("mn", d.mn);
        r.id("from", d.from);
        r.id("to", d.to);
        r.number("at_s", d.at_s);
        if (r.has("speed")) { double v = 0; if (r.number("speed", v)) d.speed = v; }
        s.legs.push_back(std::move(d));
        li.legs.push_back(b.header_line);
    } else if (b.section == "route") {
        RouteDecl d;
        r.id("mn", d.mn);
        r.list("path", d.path);
        if (r.has("start_s")) r.number("start_s", d.start_s);
        if (r.has("loop")) r.boolean("loop", d.loop);
        s.routes.push_back(std::move(d));
        li.routes.push_back(b.header_line);
    }
}

enum class WiredKind { Map, Router, Ar, Cn };

struct WiredNode {
    WiredKind kind;
    int index; // into the per-kind vector
};

void validate_with_lines(const Scenario& s, const LineInfo& li, std::vector<Diagnostic>& diags) {
    const ScenarioGlobals& g = s.globals;
    auto bad = [&](int line, std::string msg) { diags.push_back({line, std::move(msg)}); };

    if (!(g.sim_time_s > 0)) bad(0, "sim_time_s must be positive");
    if (!(g.ready_timer_s > 0)) bad(0, "ready_timer_s must be positive");
    if (!(g.advert_period_s > 0)) bad(0, "advert_period_s must be positive");
    if (!(g.alpha > 0)) bad(0, "alpha must be positive");
    if (!(g.t_map > 0)) bad(0, "t_map must be positive");
    if (!(g.s_max > 0)) bad(0, "s_max must be positive");
    if (g.ha_rtt_s < 0) bad(0, "ha_rtt_s must not be negative");
    if (g.start_jitter_s < 0) bad(0, "start_jitter_s must not be negative");
    if (!(g.default_bw_bps > 0)) bad(0, "default_bw_bps must be positive");
    if (g.default_latency_s < 0) bad(0, "default_latency_s must not be negative");

    // Shared id namespace across every node kind.
    std::map<std::string, WiredNode> wired;
    std::set<std::string> all_ids;
    auto claim = [&](const std::string& id, int line, const char* what) {
        if (!all_ids.insert(id).second) {
            bad(line, std::string(what) + " id '" + id + "' is already in use");
            return false;
        }
        return true;
    };

    for (std::size_t i = 0; i < s.maps.size(); ++i)
        if (claim(s.maps[i].id, li.line(li.maps, i), "map"))
            wired[s.maps[i].id] = {WiredKind::Map, static_cast<int>(i)};
    for (std::size_t i = 0; i < s.routers.size(); ++i)
        if (claim(s.routers[i].id, li.line(li.routers, i), "router"))
            wired[s.routers[i].id] = {WiredKind::Router, static_cast<int>(i)};
    for (std::size_t i = 0; i < s.ars.size(); ++i)
        if (claim(s.ars[i].id, li.line(li.ars, i), "ar"))
            wired[s.ars[i].id] = {WiredKind::Ar, static_cast<int>(i)};
    for (std::size_t i = 0; i < s.cns.size(); ++i)
        if (claim(s.cns[i].id, li.line(li.cns, i), "cn"))
            wired[s.cns[i].id] = {WiredKind::Cn, static_cast<int>(i)};

    std::map<std::string, int> mn_index;
    for (std::size_t i = 0; i < s.mns.size(); ++i)
        if (claim(s.mns[i].id, li.line(li.mns, i), "mn"))
            mn_index[s.mns[i].id] = static_cast<int>(i);

    for (std::size_t i = 0; i < s.maps.size(); ++i) {
        const MapDecl& m = s.maps[i];
        const int line = li.line(li.maps, i);
        if (m.n_thr < 0) bad(line, "map '" + m.id + "': n_thr must not be negative");
        if (m.n_thr > m.h_thr) bad(line, "map '" + m.id + "': n_thr exceeds h_thr");
    }

    auto wired_kind = [&](const std::string& id) -> const WiredNode* {
        auto it = wired.find(id);
        return it == wired.end() ? nullptr : &it->second;
    };

    for (std::size_t i = 0; i < s.ars.size(); ++i) {
        const ArDecl& ar = s.ars[i];
        const int line = li.line(li.ars, i);
        const WiredNode* parent = wired_kind(ar.map);
        if (!parent || parent->kind != WiredKind::Map)
            bad(line, "ar '" + ar.id + "' references unknown map '" + ar.map + "'");
        if (!(ar.range > 0)) bad(line, "ar '" + ar.id + "': range must be positive");
    }

    for (std::size_t i = 0; i < s.links.size(); ++i) {
        const LinkDecl& l = s.links[i];
        const int line = li.line(li.links, i);
        if (!wired_kind(l.a)) bad(line, "link endpoint '" + l.a + "' is not a wired node");
        if (!wired_kind(l.b)) bad(line, "link endpoint '" + l.b + "' is not a wired node");
        if (l.a == l.b) bad(line, "link connects '" + l.a + "' to itself");
        if (l.bw_bps && !(*l.bw_bps > 0)) bad(line, "link bw_bps must be positive");
        if (l.latency_s && *l.latency_s < 0) bad(line, "link latency_s must not be negative");
    }

    double max_speed = 0.0;
    for (std::size_t i = 0; i < s.mns.size(); ++i) {
        const MnDecl& mn = s.mns[i];
        const int line = li.line(li.mns, i);
        const WiredNode* ar = wired_kind(mn.ar);
        if (!ar || ar->kind != WiredKind::Ar)
            bad(line, "mn '" + mn.id + "' references unknown ar '" + mn.ar + "'");
        if (mn.speed < 0) bad(line, "mn '" + mn.id + "': speed must not be negative");
        if (mn.on_s < 0) bad(line, "mn '" + mn.id + "': on_s must not be negative");
        max_speed = std::max(max_speed, mn.speed);
    }

    std::set<std::pair<std::string, std::string>> flow_pairs;
    for (std::size_t i = 0; i < s.flows.size(); ++i) {
        const FlowDecl& f = s.flows[i];
        const int line = li.line(li.flows, i);
        const WiredNode* cn = wired_kind(f.cn);
        if (!cn || cn->kind != WiredKind::Cn)
            bad(line, "flow references unknown cn '" + f.cn + "'");
        if (!mn_index.count(f.mn)) bad(line, "flow references unknown mn '" + f.mn + "'");
        if (!flow_pairs.insert({f.cn, f.mn}).second)
            bad(line, "duplicate flow for cn '" + f.cn + "' and mn '" + f.mn + "'");
        if (!(f.rate_bps > 0)) bad(line, "flow rate_bps must be positive");
        if (f.packet_bytes <= 0) bad(line, "flow packet_bytes must be positive");
        if (f.start_s < 0 || !(f.stop_s > f.start_s))
            bad(line, "flow needs 0 <= start_s < stop_s");
    }

    // Legs of one MN must be time-ordered and chained to its attachment.
    std::map<std::string, std::vector<std::size_t>> legs_by_mn;
    for (std::size_t i = 0; i < s.legs.size(); ++i) {
        const LegDecl& l = s.legs[i];
        const int line = li.line(li.legs, i);
        if (!mn_index.count(l.mn)) bad(line, "leg references unknown mn '" + l.mn + "'");
        const WiredNode* from = wired_kind(l.from);
        if (!from || from->kind != WiredKind::Ar)
            bad(line, "leg references unknown ar '" + l.from + "'");
        const WiredNode* to = wired_kind(l.to);
        if (!to || to->kind != WiredKind::Ar)
            bad(line, "leg references unknown ar '" + l.to + "'");
        if (l.at_s < 0) bad(line, "leg at_s must not be negative");
        if (l.speed) {
            if (*l.speed < 0) bad(line, "leg speed must not be negative");
            max_speed = std::max(max_speed, *l.speed);
        }
        legs_by_mn[l.mn].push_back(i);
    }
    for (const auto& [mn, idxs] : legs_by_mn) {
        auto mit = mn_index.find(mn);
        if (mit == mn_index.end()) continue;
        std::string at = s.mns[static_cast<std::size_t>(mit->second)].ar;
        double prev_t = -1.0;
        for (std::size_t idx : idxs) {
            const LegDecl& l = s.legs[idx];
            const int line = li.line(li.legs, idx);
            if (l.at_s <= prev_t)
                bad(line, "legs of mn '" + mn + "' must have strictly increasing at_s");
            prev_t = l.at_s;
            if (l.from != at)
                bad(line, "leg of mn '" + mn + "' starts at '" + l.from + "' but the mn is at '" + at + "'");
            at = l.to;
        }
    }

    std::set<std::string> routed_mns;
    for (std::size_t i = 0; i < s.routes.size(); ++i) {
        const RouteDecl& r = s.routes[i];
        const int line = li.line(li.routes, i);
        auto mit = mn_index.find(r.mn);
        if (mit == mn_index.end()) {
            bad(line, "route references unknown mn '" + r.mn + "'");
            continue;
        }
        if (!routed_mns.insert(r.mn).second)
            bad(line, "mn '" + r.mn + "' has more than one route");
        if (legs_by_mn.count(r.mn))
            bad(line, "mn '" + r.mn + "' has both legs and a route");
        if (r.path.size() < 2) {
            bad(line, "route path needs at least two ARs");
            continue;
        }
        bool ars_ok = true;
        for (const std::string& hop : r.path) {
            const WiredNode* ar = wired_kind(hop);
            if (!ar || ar->kind != WiredKind::Ar) {
                bad(line, "route references unknown ar '" + hop + "'");
                ars_ok = false;
            }
        }
        const MnDecl& mn = s.mns[static_cast<std::size_t>(mit->second)];
        if (r.path.front() != mn.ar)
            bad(line, "route of mn '" + r.mn + "' must start at its ar '" + mn.ar + "'");
        if (!(mn.speed > 0))
            bad(line, "route of mn '" + r.mn + "' needs a positive mn speed");
        if (r.start_s < 0) bad(line, "route start_s must not be negative");
        if (ars_ok) {
            auto pos = [&](const std::string& id) {
                const WiredNode* w = wired_kind(id);
                const ArDecl& a = s.ars[static_cast<std::size_t>(w->index)];
                return std::pair<double, double>{a.x, a.y};
            };
            const std::size_t n = r.path.size();
            const std::size_t segments = r.loop ? n : n - 1;
            for (std::size_t k = 0; k < segments; ++k) {
                const auto [ax, ay] = pos(r.path[k]);
                const auto [bx, by] = pos(r.path[(k + 1) % n]);
                if (ax == bx && ay == by)
                    bad(line, "route of mn '" + r.mn + "' has zero-length segment at '" + r.path[k] + "'");
            }
        }
    }

    if (max_speed > g.s_max)
        bad(0, "s_max is below the fastest mn speed in the scenario");

    // The wired graph must be one component, otherwise forwarding paths
    // and advert distances are undefined.
    if (wired.size() > 1) {
        std::map<std::string, std::vector<std::string>> adj;
        for (const LinkDecl& l : s.links) {
            if (!wired_kind(l.a) || !wired_kind(l.b) || l.a == l.b) continue;
            adj[l.a].push_back(l.b);
            adj[l.b].push_back(l.a);
        }
        std::set<std::string> seen;
        std::vector<std::string> stack{wired.begin()->first};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            for (const std::string& nxt : adj[cur]) stack.push_back(nxt);
        }
        for (const auto& [id, node] : wired) {
            (void)node;
            if (!seen.count(id)) {
                bad(0, "wired node '" + id + "' is not connected to the rest of the topology");
                break;
            }
        }
    }
}

} // namespace

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
    std::vector<Diagnostic> diags;
    validate_with_lines(s, LineInfo{}, diags);
    return diags;
}

ParseResult parse_scenario(std::string_view text) {
    ParseResult result;
    std::vector<Diagnostic>& diags = result.diagnostics;
    Scenario scenario;
    LineInfo li;

    static const std::set<std::string> known_sections = {
        "map", "router", "ar", "cn", "link", "mn", "flow", "leg", "route"};

    std::optional<Block> current;
    bool skipping_unknown_section = false;
    bool seen_section = false;

    auto close_current = [&]() {
        if (current) {
            build_entity(*current, scenario, li, diags);
            current.reset();
        }
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (pos > text.size() && raw.empty()) break;

        std::string_view line = raw;
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                diags.push_back({line_no, "malformed section header"});
                continue;
            }
            std::string name(trim(line.substr(1, line.size() - 2)));
            close_current();
            seen_section = true;
            if (!known_sections.count(name)) {
                diags.push_back({line_no, "unknown section [" + name + "]"});
                skipping_unknown_section = true;
                continue;
            }
            skipping_unknown_section = false;
            current = Block{name, line_no, {}};
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            diags.push_back({line_no, "expected 'key = value'"});
            continue;
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            diags.push_back({line_no, "empty key"});
            continue;
        }

        if (current) {
            for (const auto& [k, vl] : current->kv) {
                (void)vl;
                if (k == key) {
                    diags.push_back({line_no, "duplicate key '" + key + "' in [" + current->section + "]"});
                    break;
                }
            }
            current->kv.emplace_back(key, std::make_pair(value, line_no));
        } else if (skipping_unknown_section) {
            // body of an unknown section: already reported at its header
        } else if (seen_section) {
            diags.push_back({line_no, "global key '" + key + "' must appear before the first section"});
        } else {
            apply_global(key, value, line_no, scenario.globals, diags);
        }
    }
    close_current();

    if (diags.empty()) validate_with_lines(scenario, li, diags);

    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    if (diags.empty()) result.scenario = std::move(scenario);
    return result;
}

ParseResult load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({0, "cannot open scenario file '" + path + "'"});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

void emit_kv(std::string& out, const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
}

void emit_kv(std::string& out, const char* key, double v) { emit_kv(out, key, format_double(v)); }
void emit_kv(std::string& out, const char* key, int v) { emit_kv(out, key, std::to_string(v)); }

} // namespace

std::string serialize_scenario(const Scenario& s) {
    std::string out;
    const ScenarioGlobals& g = s.globals;
    emit_kv(out, "sim_time_s", g.sim_time_s);
    emit_kv(out, "ready_timer_s", g.ready_timer_s);
    emit_kv(out, "advert_period_s", g.advert_period_s);
    emit_kv(out, "alpha", g.alpha);
    emit_kv(out, "t_map", g.t_map);
    emit_kv(out, "s_max", g.s_max);
    emit_kv(out, "seed", std::to_string(g.seed));
    emit_kv(out, "ha_rtt_s", g.ha_rtt_s);
    emit_kv(out, "start_jitter_s", g.start_jitter_s);
    emit_kv(out, "default_bw_bps", g.default_bw_bps);
    emit_kv(out, "default_latency_s", g.default_latency_s);

    for (const MapDecl& m : s.maps) {
        out += "\n[map]\n";
        emit_kv(out, "id", m.id);
        emit_kv(out, "n_thr", m.n_thr);
        emit_kv(out, "h_thr", m.h_thr);
    }
    for (const RouterDecl& r : s.routers) {
        out += "\n[router]\n";
        emit_kv(out, "id", r.id);
    }
    for (const ArDecl& a : s.ars) {
        out += "\n[ar]\n";
        emit_kv(out, "id", a.id);
        emit_kv(out, "map", a.map);
        emit_kv(out, "x", a.x);
        emit_kv(out, "y", a.y);
        emit_kv(out, "range", a.range);
    }
    for (const CnDecl& c : s.cns) {
        out += "\n[cn]\n";
        emit_kv(out, "id", c.id);
    }
    for (const LinkDecl& l : s.links) {
        out += "\n[link]\n";
        emit_kv(out, "a", l.a);
        emit_kv(out, "b", l.b);
        if (l.bw_bps) emit_kv(out, "bw_bps", *l.bw_bps);
        if (l.latency_s) emit_kv(out, "latency_s", *l.latency_s);
    }
    for (const MnDecl& m : s.mns) {
        out += "\n[mn]\n";
        emit_kv(out, "id", m.id);
        emit_kv(out, "ar", m.ar);
        emit_kv(out, "speed", m.speed);
        emit_kv(out, "on_s", m.on_s);
    }
    for (const FlowDecl& f : s.flows) {
        out += "\n[flow]\n";
        emit_kv(out, "cn", f.cn);
        emit_kv(out, "mn", f.mn);
        emit_kv(out, "rate_bps", f.rate_bps);
        emit_kv(out, "packet_bytes", f.packet_bytes);
        emit_kv(out, "start_s", f.start_s);
        emit_kv(out, "stop_s", f.stop_s);
    }
    for (const LegDecl& l : s.legs) {
        out += "\n[leg]\n";
        emit_kv(out, "mn", l.mn);
        emit_kv(out, "from", l.from);
        emit_kv(out, "to", l.to);
        emit_kv(out, "at_s", l.at_s);
        if (l.speed) emit_kv(out, "speed", *l.speed);
    }
    for (const RouteDecl& r : s.routes) {
        out += "\n[route]\n";
        emit_kv(out, "mn", r.mn);
        std::string path;
        for (std::size_t i = 0; i < r.path.size(); ++i) {
            if (i) path += ',';
            path += r.path[i];
        }
        emit_kv(out, "path", path);
        emit_kv(out, "start_s", r.start_s);
        emit_kv(out, "loop", r.loop ? "true" : "false");
    }
    return out;
}

std::string format_diagnostics(const std::string& origin, const std::vector<Diagnostic>& ds) {
    std::string out;
    for (const Diagnostic& d : ds) {
        out += origin;
        if (d.line > 0) {
            out += ':';
            out += std::to_string(d.line);
        }
        out += ": ";
        out += d.message;
        out += '\n';
    }
    return out;
}

} // namespace hmip
