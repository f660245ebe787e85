#include "a2asl/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "a2asl/errors.hpp"
#include "a2asl/mac_mode2.hpp"

namespace a2asl {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
    if (line > 0) {
        throw ConfigError("line " + std::to_string(line) + ": " + msg);
    }
    throw ConfigError(msg);
}

std::vector<Section> tokenize(std::string_view text) {
    std::vector<Section> sections{{"", 0, {}}};
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail_at(line_no, "unterminated section header");
            }
            auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) {
                fail_at(line_no, "empty section name");
            }
            sections.push_back({std::string(name), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail_at(line_no, "expected 'key = value'");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            fail_at(line_no, "missing key");
        }
        sections.back().entries.push_back({std::string(key), std::string(value), line_no});
    }
    return sections;
}

void apply_override(std::vector<Section>& sections, const std::string& override_text) {
    const auto eq = override_text.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + override_text + "' is not key=value");
    }
    const std::string path(trim(std::string_view(override_text).substr(0, eq)));
    const std::string value(trim(std::string_view(override_text).substr(eq + 1)));
    const auto dot = path.rfind('.');
    const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
    const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    if (key.empty()) {
        throw ConfigError("override '" + override_text + "' has an empty key");
    }
    auto it = std::find_if(sections.begin(), sections.end(),
                           [&](const Section& s) { return s.name == section; });
    if (it == sections.end()) {
        sections.push_back({section, 0, {}});
        it = std::prev(sections.end());
    }
    std::erase_if(it->entries, [&](const Entry& e) { return e.key == key; });
    it->entries.push_back({key, value, 0});
}

double parse_number(std::string_view text, int line, const std::string& key) {
    text = trim(text);
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        fail_at(line, "field '" + key + "': '" + std::string(text) + "' is not a number");
    }
    return v;
}

long long parse_integer(std::string_view text, int line, const std::string& key) {
    text = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail_at(line, "field '" + key + "': '" + std::string(text) + "' is not an integer");
    }
    return v;
}

struct UnitFactor {
    std::string_view unit;
    double factor;
};

std::span<const UnitFactor> units_for(Quantity kind) {
    static const UnitFactor time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    static const UnitFactor distance[] = {{"m", 1.0}, {"km", 1e3}};
    static const UnitFactor frequency[] = {
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const UnitFactor power[] = {{"dBm", 1.0}};
    static const UnitFactor gain[] = {{"dBi", 1.0}, {"dB", 1.0}};
    static const UnitFactor decibel[] = {{"dB", 1.0}};
    static const UnitFactor size[] = {{"B", 1.0}, {"bytes", 1.0}};
    switch (kind) {
        case Quantity::Time: return time;
        case Quantity::Distance: return distance;
        case Quantity::Frequency: return frequency;
        case Quantity::Power: return power;
        case Quantity::Gain: return gain;
        case Quantity::Decibel: return decibel;
        case Quantity::Size: return size;
    }
    return {};
}

std::string unit_list(Quantity kind) {
    std::string out;
    for (const auto& u : units_for(kind)) {
        if (!out.empty()) {
            out += ", ";
        }
        out += u.unit;
    }
    return out;
}

double parse_quantity_at(std::string_view text, Quantity kind, int line, const std::string& key) {
    text = trim(text);
    const auto split = text.find_last_of("0123456789.");
    if (split == std::string_view::npos) {
        fail_at(line, "field '" + key + "': '" + std::string(text) + "' has no number");
    }
    const auto number = text.substr(0, split + 1);
    const auto unit = trim(text.substr(split + 1));
    if (unit.empty()) {
        fail_at(line, "field '" + key + "': '" + std::string(text) +
                          "' needs a unit (one of " + unit_list(kind) + ")");
    }
    for (const auto& u : units_for(kind)) {
        if (u.unit == unit) {
            return parse_number(number, line, key) * u.factor;
        }
    }
    fail_at(line, "field '" + key + "': unit '" + std::string(unit) + "' not one of " +
                      unit_list(kind));
}

bool parse_bool(std::string_view text, int line, const std::string& key) {
    if (text == "true" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "no" || text == "off") {
        return false;
    }
    fail_at(line, "field '" + key + "': expected true/false");
}

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        parts.push_back(trim(text.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return parts;
}

Vec3 parse_vec(std::string_view text, int line, const std::string& key) {
    const auto parts = split_commas(text);
    if (parts.size() != 3) {
        fail_at(line, "field '" + key + "': expected 'x, y, z' with distance units");
    }
    return {parse_quantity_at(parts[0], Quantity::Distance, line, key),
            parse_quantity_at(parts[1], Quantity::Distance, line, key),
            parse_quantity_at(parts[2], Quantity::Distance, line, key)};
}

Waypoint parse_waypoint(std::string_view text, int line, const std::string& key) {
    const auto parts = split_commas(text);
    if (parts.size() != 4) {
        fail_at(line, "field '" + key + "': expected 't, x, y, z'");
    }
    return {parse_quantity_at(parts[0], Quantity::Time, line, key),
            {parse_quantity_at(parts[1], Quantity::Distance, line, key),
             parse_quantity_at(parts[2], Quantity::Distance, line, key),
             parse_quantity_at(parts[3], Quantity::Distance, line, key)}};
}

int as_int(const Entry& e) {
    const auto v = parse_integer(e.value, e.line, e.key);
    if (v < INT32_MIN || v > INT32_MAX) {
        fail_at(e.line, "field '" + e.key + "': out of range");
    }
    return static_cast<int>(v);
}

double as_qty(const Entry& e, Quantity q) { return parse_quantity_at(e.value, q, e.line, e.key); }

double as_ratio(const Entry& e) { return parse_number(e.value, e.line, e.key); }

[[noreturn]] void unknown_key(const Section& s, const Entry& e) {
    fail_at(e.line, "unknown field '" + e.key + "' in section [" + s.name + "]");
}

void read_root(const Section& s, ScenarioConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "name") {
            cfg.name = e.value;
        } else if (e.key == "duration") {
            cfg.duration_s = as_qty(e, Quantity::Time);
        } else if (e.key == "seed") {
            const auto v = parse_integer(e.value, e.line, e.key);
            if (v < 0) {
                fail_at(e.line, "field 'seed': must be non-negative");
            }
            cfg.seed = static_cast<std::uint64_t>(v);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_grid(const Section& s, ScenarioConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "numerology") {
            cfg.numerology = as_int(e);
        } else if (e.key == "subchannels") {
            cfg.num_subchannels = as_int(e);
        } else if (e.key == "subchannel_size") {
            auto v = trim(e.value);
            if (!v.ends_with("prb")) {
                fail_at(e.line, "field 'subchannel_size': expected '<n> prb'");
            }
            cfg.subchannel_size_prb =
                static_cast<int>(parse_integer(trim(v.substr(0, v.size() - 3)), e.line, e.key));
        } else if (e.key == "guard_mode") {
            if (e.value == "auto") {
                cfg.guard.setting = GuardSetting::Auto;
            } else if (e.value == "symbol_gap") {
                cfg.guard.setting = GuardSetting::SymbolGap;
            } else if (e.value == "slot_inhibition") {
                cfg.guard.setting = GuardSetting::SlotInhibition;
            } else {
                fail_at(e.line, "field 'guard_mode': expected auto, symbol_gap or slot_inhibition");
            }
        } else if (e.key == "guard_symbols") {
            cfg.guard.guard_symbols = as_int(e);
        } else if (e.key == "inhibited_slots") {
            cfg.guard.inhibited_slots = as_int(e);
        } else if (e.key == "max_guard_symbols") {
            cfg.guard.max_guard_symbols = as_int(e);
        } else if (e.key == "mode_switch_distance") {
            cfg.guard.switch_distance_m = as_qty(e, Quantity::Distance);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_link(const Section& s, ScenarioConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "tx_power") {
            cfg.link.tx_power_dbm = as_qty(e, Quantity::Power);
        } else if (e.key == "tx_gain") {
            cfg.link.tx_gain_dbi = as_qty(e, Quantity::Gain);
        } else if (e.key == "rx_gain") {
            cfg.link.rx_gain_dbi = as_qty(e, Quantity::Gain);
        } else if (e.key == "carrier") {
            cfg.link.carrier_freq_ghz = as_qty(e, Quantity::Frequency) / 1e9;
        } else if (e.key == "bandwidth") {
            cfg.link.bandwidth_hz = as_qty(e, Quantity::Frequency);
        } else if (e.key == "noise_figure") {
            cfg.link.noise_figure_db = as_qty(e, Quantity::Decibel);
        } else if (e.key == "snr_min") {
            cfg.snr_min_db = as_qty(e, Quantity::Decibel);
        } else if (e.key == "mcs") {
            cfg.mcs = as_int(e);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_doppler(const Section& s, ScenarioConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "tolerable_fraction") {
            cfg.doppler_tolerable_fraction = as_ratio(e);
        } else if (e.key == "enforce") {
            cfg.doppler_enforce = parse_bool(e.value, e.line, e.key);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_metrics(const Section& s, ScenarioConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "prr_bin") {
            cfg.prr_bin_m = as_qty(e, Quantity::Distance);
        } else if (e.key == "cbr_threshold") {
            cfg.cbr_threshold_dbm = as_qty(e, Quantity::Power);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_class(const Section& s, NodeClass& nc) {
    for (const auto& e : s.entries) {
        if (e.key == "count") {
            nc.count = as_int(e);
        } else if (e.key == "waypoint") {
            nc.waypoints.push_back(parse_waypoint(e.value, e.line, e.key));
        } else if (e.key == "spacing") {
            nc.spacing = parse_vec(e.value, e.line, e.key);
        } else if (e.key == "offset") {
            nc.offsets.push_back(parse_vec(e.value, e.line, e.key));
        } else if (e.key == "clock_offset") {
            nc.clock_offset_s = as_qty(e, Quantity::Time);
        } else if (e.key == "scheduler") {
            if (e.value == "sps") {
                nc.mac.scheduler = SchedulerKind::Sps;
            } else if (e.value == "ds") {
                nc.mac.scheduler = SchedulerKind::Ds;
            } else {
                fail_at(e.line, "field 'scheduler': expected sps or ds");
            }
        } else if (e.key == "destination") {
            nc.destination = e.value;
        } else {
            unknown_key(s, e);
        }
    }
}

void read_traffic(const Section& s, TrafficSpec& t) {
    for (const auto& e : s.entries) {
        if (e.key == "kind") {
            if (e.value == "periodic") {
                t.kind = TrafficKind::Periodic;
            } else if (e.value == "aperiodic") {
                t.kind = TrafficKind::Aperiodic;
            } else {
                fail_at(e.line, "field 'kind': expected periodic or aperiodic");
            }
        } else if (e.key == "period" || e.key == "mean_interval") {
            t.interval_s = as_qty(e, Quantity::Time);
        } else if (e.key == "phase") {
            t.phase_s = as_qty(e, Quantity::Time);
        } else if (e.key == "size") {
            t.packet_size_bytes = static_cast<int>(as_qty(e, Quantity::Size));
        } else if (e.key == "subchannels") {
            t.subchannels = as_int(e);
        } else {
            unknown_key(s, e);
        }
    }
}

void read_mac(const Section& s, MacSpec& m) {
    for (const auto& e : s.entries) {
        if (e.key == "sensing_window") {
            m.sensing_window_s = as_qty(e, Quantity::Time);
        } else if (e.key == "t1") {
            m.t1_s = as_qty(e, Quantity::Time);
        } else if (e.key == "t2") {
            m.t2_s = as_qty(e, Quantity::Time);
        } else if (e.key == "rri") {
            m.rri_s = as_qty(e, Quantity::Time);
        } else if (e.key == "keep_probability") {
            m.keep_probability = as_ratio(e);
        } else if (e.key == "counter_min") {
            m.counter_min = as_int(e);
        } else if (e.key == "counter_max") {
            m.counter_max = as_int(e);
        } else if (e.key == "rsrp_threshold") {
            m.rsrp_threshold_dbm = as_qty(e, Quantity::Power);
        } else if (e.key == "threshold_step") {
            m.threshold_step_db = as_qty(e, Quantity::Decibel);
        } else if (e.key == "min_available_ratio") {
            m.min_available_ratio = as_ratio(e);
        } else {
            unknown_key(s, e);
        }
    }
}

NodeClass& class_named(ScenarioConfig& cfg, const std::string& name) {
    for (auto& c : cfg.classes) {
        if (c.name == name) {
            return c;
        }
    }
    cfg.classes.push_back(NodeClass{});
    cfg.classes.back().name = name;
    return cfg.classes.back();
}

std::string fmt_num(double v) { return fmt::format("{}", v); }

}  // namespace

double parse_quantity(std::string_view text, Quantity kind) {
    return parse_quantity_at(text, kind, 0, "value");
}

double ScenarioConfig::effective_snr_min_db() const {
    if (snr_min_db) {
        return *snr_min_db;
    }
    if (mcs) {
        return mcs_entry(*mcs).snr_min_db;
    }
    throw ConfigError("link needs either 'snr_min' or 'mcs'");
}

int ScenarioConfig::total_nodes() const {
    int n = 0;
    for (const auto& c : classes) {
        n += c.count;
    }
    return n;
}

ScenarioConfig parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
    auto sections = tokenize(text);
    for (const auto& o : overrides) {
        apply_override(sections, o);
    }
    ScenarioConfig cfg;
    std::set<std::string> seen;
    for (const auto& s : sections) {
        if (!s.name.empty() && !seen.insert(s.name).second) {
            fail_at(s.line, "duplicate section [" + s.name + "]");
        }
        if (s.name.empty()) {
            read_root(s, cfg);
        } else if (s.name == "grid") {
            read_grid(s, cfg);
        } else if (s.name == "link") {
            read_link(s, cfg);
        } else if (s.name == "doppler") {
            read_doppler(s, cfg);
        } else if (s.name == "metrics") {
            read_metrics(s, cfg);
        } else if (s.name.starts_with("class.")) {
            std::string rest = s.name.substr(6);
            std::string sub;
            if (auto dot = rest.find('.'); dot != std::string::npos) {
                sub = rest.substr(dot + 1);
                rest = rest.substr(0, dot);
            }
            if (rest.empty()) {
                fail_at(s.line, "class section needs a name");
            }
            auto& nc = class_named(cfg, rest);
            if (sub.empty()) {
                read_class(s, nc);
            } else if (sub == "traffic") {
                if (!nc.traffic) {
                    nc.traffic.emplace();
                }
                read_traffic(s, *nc.traffic);
            } else if (sub == "mac") {
                read_mac(s, nc.mac);
            } else {
                fail_at(s.line, "unknown section [" + s.name + "]");
            }
        } else {
            fail_at(s.line, "unknown section [" + s.name + "]");
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), overrides);
}

std::string emit_scenario(const ScenarioConfig& cfg) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    auto with_unit = [](double v, std::string_view unit) {
        return fmt::format("{} {}", v, unit);
    };
    line("name", cfg.name);
    line("duration", with_unit(cfg.duration_s, "s"));
    line("seed", std::to_string(cfg.seed));

    out += "\n[grid]\n";
    line("numerology", std::to_string(cfg.numerology));
    line("subchannels", std::to_string(cfg.num_subchannels));
    line("subchannel_size", std::to_string(cfg.subchannel_size_prb) + " prb");
    switch (cfg.guard.setting) {
        case GuardSetting::Auto: line("guard_mode", "auto"); break;
        case GuardSetting::SymbolGap: line("guard_mode", "symbol_gap"); break;
        case GuardSetting::SlotInhibition: line("guard_mode", "slot_inhibition"); break;
    }
    line("guard_symbols", std::to_string(cfg.guard.guard_symbols));
    line("inhibited_slots", std::to_string(cfg.guard.inhibited_slots));
    line("max_guard_symbols", std::to_string(cfg.guard.max_guard_symbols));
    if (cfg.guard.switch_distance_m) {
        line("mode_switch_distance", with_unit(*cfg.guard.switch_distance_m, "m"));
    }

    out += "\n[link]\n";
    line("tx_power", with_unit(cfg.link.tx_power_dbm, "dBm"));
    line("tx_gain", with_unit(cfg.link.tx_gain_dbi, "dBi"));
    line("rx_gain", with_unit(cfg.link.rx_gain_dbi, "dBi"));
    line("carrier", with_unit(cfg.link.carrier_freq_ghz, "GHz"));
    line("bandwidth", with_unit(cfg.link.bandwidth_hz, "Hz"));
    line("noise_figure", with_unit(cfg.link.noise_figure_db, "dB"));
    if (cfg.snr_min_db) {
        line("snr_min", with_unit(*cfg.snr_min_db, "dB"));
    }
    if (cfg.mcs) {
        line("mcs", std::to_string(*cfg.mcs));
    }

    out += "\n[doppler]\n";
    line("tolerable_fraction", fmt_num(cfg.doppler_tolerable_fraction));
    line("enforce", cfg.doppler_enforce ? "true" : "false");

    out += "\n[metrics]\n";
    line("prr_bin", with_unit(cfg.prr_bin_m, "m"));
    line("cbr_threshold", with_unit(cfg.cbr_threshold_dbm, "dBm"));

    for (const auto& c : cfg.classes) {
        out += fmt::format("\n[class.{}]\n", c.name);
        line("count", std::to_string(c.count));
        line("spacing", fmt::format("{} m, {} m, {} m", c.spacing.x, c.spacing.y, c.spacing.z));
        for (const auto& o : c.offsets) {
            line("offset", fmt::format("{} m, {} m, {} m", o.x, o.y, o.z));
        }
        line("clock_offset", with_unit(c.clock_offset_s, "s"));
        line("scheduler", c.mac.scheduler == SchedulerKind::Sps ? "sps" : "ds");
        line("destination", c.destination);
        for (const auto& w : c.waypoints) {
            line("waypoint", fmt::format("{} s, {} m, {} m, {} m", w.time_s, w.position.x,
                                         w.position.y, w.position.z));
        }
        if (c.traffic) {
            const auto& t = *c.traffic;
            out += fmt::format("\n[class.{}.traffic]\n", c.name);
            const bool periodic = t.kind == TrafficKind::Periodic;
            line("kind", periodic ? "periodic" : "aperiodic");
            line(periodic ? "period" : "mean_interval", with_unit(t.interval_s, "s"));
            if (t.phase_s) {
                line("phase", with_unit(*t.phase_s, "s"));
            }
            line("size", with_unit(t.packet_size_bytes, "B"));
            line("subchannels", std::to_string(t.subchannels));
        }
        const auto& m = c.mac;
        out += fmt::format("\n[class.{}.mac]\n", c.name);
        line("sensing_window", with_unit(m.sensing_window_s, "s"));
        line("t1", with_unit(m.t1_s, "s"));
        line("t2", with_unit(m.t2_s, "s"));
        line("rri", with_unit(m.rri_s, "s"));
        line("keep_probability", fmt_num(m.keep_probability));
        line("counter_min", std::to_string(m.counter_min));
        line("counter_max", std::to_string(m.counter_max));
        line("rsrp_threshold", with_unit(m.rsrp_threshold_dbm, "dBm"));
        line("threshold_step", with_unit(m.threshold_step_db, "dB"));
        line("min_available_ratio", fmt_num(m.min_available_ratio));
    }
    return out;
}

std::vector<NodeKinematics> build_nodes(const ScenarioConfig& cfg) {
    std::vector<NodeKinematics> nodes;
    NodeId next = 0;
    for (const auto& c : cfg.classes) {
        const Trajectory base(c.waypoints);
        for (int j = 0; j < c.count; ++j) {
            const Vec3 offset = c.offsets.empty() ? static_cast<double>(j) * c.spacing
                                                  : c.offsets[static_cast<std::size_t>(j)];
            nodes.push_back({next++, base.shifted(offset), c.clock_offset_s});
        }
    }
    return nodes;
}

double max_effective_distance_m(const ScenarioConfig& cfg) {
    const auto nodes = build_nodes(cfg);
    double best = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double d = max_distance_over(nodes[i], nodes[j], 0.0, cfg.duration_s) +
                             std::abs(nodes[i].clock_offset_s - nodes[j].clock_offset_s) *
                                 PhysConstants::c;
            best = std::max(best, d);
        }
    }
    return best;
}

AllocationMode resolve_allocation_mode(const ScenarioConfig& cfg) {
    switch (cfg.guard.setting) {
        case GuardSetting::SymbolGap: return SymbolGap{cfg.guard.guard_symbols};
        case GuardSetting::SlotInhibition: return SlotInhibition{cfg.guard.inhibited_slots};
        case GuardSetting::Auto: break;
    }
    return allocation_mode(max_effective_distance_m(cfg), Numerology(cfg.numerology),
                           cfg.guard.max_guard_symbols, cfg.guard.switch_distance_m);
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg, bool strict) {
    std::vector<std::string> warnings;
    if (!(cfg.duration_s > 0.0)) {
        throw ConfigError("duration must be positive");
    }
    if (cfg.numerology < 0 || cfg.numerology > 3) {
        throw ConfigError("numerology must be 0..3");
    }
    const Numerology num(cfg.numerology);
    GridConfig grid{num, cfg.num_subchannels, cfg.subchannel_size_prb, 1};
    grid.validate();
    try {
        cfg.link.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("link: ") + e.what());
    }
    if (cfg.mcs && (*cfg.mcs < 0 || *cfg.mcs >= static_cast<int>(default_mcs_table().size()))) {
        throw ConfigError(fmt::format("link: mcs {} outside the table", *cfg.mcs));
    }
    try {
        (void)cfg.effective_snr_min_db();
    } catch (const std::out_of_range& e) {
        throw ConfigError(std::string("link: ") + e.what());
    }
    const auto& g = cfg.guard;
    if (g.max_guard_symbols < 1 || g.max_guard_symbols > 9) {
        throw ConfigError("max_guard_symbols must be 1..9");
    }
    if (g.setting == GuardSetting::SymbolGap && (g.guard_symbols < 0 || g.guard_symbols > 8)) {
        throw ConfigError("guard_symbols must be 0..8 (at least 5 PSSCH symbols)");
    }
    if (g.setting == GuardSetting::SlotInhibition && g.inhibited_slots < 1) {
        throw ConfigError("inhibited_slots must be at least 1");
    }
    if (!(cfg.doppler_tolerable_fraction > 0.0 && cfg.doppler_tolerable_fraction <= 1.0)) {
        throw ConfigError("doppler tolerable_fraction must lie in (0, 1]");
    }
    if (!(cfg.prr_bin_m > 0.0)) {
        throw ConfigError("prr_bin must be positive");
    }

    std::set<std::string> names;
    for (const auto& c : cfg.classes) {
        names.insert(c.name);
    }
    for (const auto& c : cfg.classes) {
        const std::string where = "class '" + c.name + "': ";
        if (c.count < 0) {
            throw ConfigError(where + "count cannot be negative");
        }
        if (!c.offsets.empty() && c.offsets.size() != static_cast<std::size_t>(c.count)) {
            throw ConfigError(where + "count must match the number of offsets");
        }
        if (c.waypoints.empty()) {
            throw ConfigError(where + "needs at least one waypoint");
        }
        (void)Trajectory(c.waypoints);
        if (c.destination != "broadcast" && !names.contains(c.destination)) {
            throw ConfigError(where + "destination '" + c.destination + "' is not a class");
        }
        if (!std::isfinite(c.clock_offset_s)) {
            throw ConfigError(where + "clock_offset must be finite");
        }
        const auto& m = c.mac;
        if (std::abs(m.sensing_window_s - 1.1) > 1e-12 && std::abs(m.sensing_window_s - 0.1) > 1e-12) {
            throw ConfigError(where + "sensing_window must be 1100 ms or 100 ms");
        }
        if (!(m.t1_s > 0.0 && m.t1_s < m.t2_s)) {
            throw ConfigError(where + "selection window needs 0 < t1 < t2");
        }
        if (!(m.keep_probability >= 0.0 && m.keep_probability <= 0.8)) {
            throw ConfigError(where + "keep_probability must lie in [0, 0.8]");
        }
        if (m.counter_min < 0 || m.counter_min > m.counter_max) {
            throw ConfigError(where + "need 0 <= counter_min <= counter_max");
        }
        ExclusionConfig ex{m.rsrp_threshold_dbm, m.threshold_step_db, m.min_available_ratio, {}};
        ex.validate();
        if (!c.traffic) {
            continue;
        }
        const auto& t = *c.traffic;
        if (t.packet_size_bytes <= 0) {
            throw ConfigError(where + "packet size must be positive");
        }
        if (t.subchannels < 1 || t.subchannels > cfg.num_subchannels) {
            throw ConfigError(where + "packet subchannels must be 1.." +
                              std::to_string(cfg.num_subchannels));
        }
        if (!(t.interval_s > 0.0)) {
            throw ConfigError(where + "traffic interval must be positive");
        }
        if (m.scheduler == SchedulerKind::Sps) {
            if (t.kind != TrafficKind::Periodic) {
                throw ConfigError(where + "sps needs periodic traffic");
            }
            if (std::abs(t.interval_s - m.rri_s) > 1e-12) {
                throw ConfigError(where + "sps traffic period must equal the rri");
            }
            const double rri_slots = m.rri_s / num.slot_duration_s();
            if (std::abs(rri_slots - std::round(rri_slots)) > 1e-9 || rri_slots < 1.0) {
                throw ConfigError(where + "rri must be a whole number of slots");
            }
        }
    }

    // Guard provisioning against the geometry.
    const auto mode = resolve_allocation_mode(cfg);
    const auto needed = allocation_mode(max_effective_distance_m(cfg), num,
                                        g.max_guard_symbols);
    const double slot = num.slot_duration_s();
    const auto plan = guard_plan(mode);
    const double budget_s = plan.inhibition_period * slot -
                            plan.format.occupied_symbols() * num.symbol_duration_s();
    const double delay_s = propagation_delay_s(max_effective_distance_m(cfg));
    if (delay_s > budget_s + 1e-12) {
        const std::string msg = "configured " + to_string(mode) + " absorbs " +
                                fmt::format("{:.3f}", budget_s * 1e6) + " us but the scenario needs " +
                                fmt::format("{:.3f}", delay_s * 1e6) + " us (" +
                                to_string(needed) + "); expect slot mismatches";
        if (strict) {
            throw ConfigError(msg);
        }
        warnings.push_back(msg);
    }
    if (plan.inhibition_period > 1) {
        for (const auto& c : cfg.classes) {
            if (!c.traffic || c.mac.scheduler != SchedulerKind::Sps) {
                continue;
            }
            const auto rri_slots = std::llround(c.mac.rri_s / slot);
            if (rri_slots % plan.inhibition_period != 0) {
                throw ConfigError("class '" + c.name + "': rri of " + std::to_string(rri_slots) +
                                  " slots is not a multiple of the inhibition period " +
                                  std::to_string(plan.inhibition_period));
            }
        }
    }
    return warnings;
}

}  // namespace a2asl
