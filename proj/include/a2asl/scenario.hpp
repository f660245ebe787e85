#ifndef A2ASL_SCENARIO_HPP
#define A2ASL_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "a2asl/linkbudget.hpp"
#include "a2asl/mobility.hpp"
#include "a2asl/phy_grid.hpp"

namespace a2asl {

// Scenario file model. The on-disk format is documented in
// docs/scenario-format.md; a short version:
//
//   key = value            # root section
//   [grid]                 # section
//   [class.leader.mac]     # nested section (dots)
//
// Physical quantities must carry a unit suffix (ms, km, GHz, dBm, ...).
// Counts, ratios, flags and identifiers are bare.

enum class TrafficKind { Periodic, Aperiodic };
enum class SchedulerKind { Sps, Ds };
enum class GuardSetting { Auto, SymbolGap, SlotInhibition };

struct TrafficSpec {
    TrafficKind kind = TrafficKind::Periodic;
    double interval_s = 0.1;           // period, or mean inter-arrival
    std::optional<double> phase_s;     // periodic only; random when unset
    int packet_size_bytes = 300;
    int subchannels = 1;
};

struct MacSpec {
    SchedulerKind scheduler = SchedulerKind::Sps;
    double sensing_window_s = 1.1;
    double t1_s = 1e-3;
    double t2_s = 4e-3;
    double rri_s = 0.1;
    double keep_probability = 0.0;
    int counter_min = 5;
    int counter_max = 15;
    double rsrp_threshold_dbm = -126.0;
    double threshold_step_db = 3.0;
    double min_available_ratio = 0.2;
};

struct NodeClass {
    std::string name;
    int count = 1;
    std::vector<Waypoint> waypoints;
    Vec3 spacing;  // offset between consecutive nodes of the class
    /// Explicit per-member offsets; when given, count must match and spacing
    /// is ignored.
    std::vector<Vec3> offsets;
    double clock_offset_s = 0.0;
    std::optional<TrafficSpec> traffic;  // unset: receive-only
    MacSpec mac;
    std::string destination = "broadcast";  // or the name of a class
};

struct GuardSpec {
    GuardSetting setting = GuardSetting::Auto;
    int guard_symbols = 1;
    int inhibited_slots = 1;
    int max_guard_symbols = kDefaultMaxGuardSymbols;
    std::optional<double> switch_distance_m;
};

struct ScenarioConfig {
    std::string name = "scenario";
    double duration_s = 1.0;
    std::uint64_t seed = 1;
    int numerology = 2;
    int num_subchannels = 13;
    int subchannel_size_prb = 10;
    GuardSpec guard;
    LinkParams link;
    std::optional<int> mcs;
    std::optional<double> snr_min_db;
    double doppler_tolerable_fraction = 0.1;
    bool doppler_enforce = true;
    double prr_bin_m = 10e3;
    double cbr_threshold_dbm = -94.0;
    std::vector<NodeClass> classes;

    double effective_snr_min_db() const;
    int total_nodes() const;
};

/// Parses scenario text. Throws ConfigError with a "line N" diagnostic.
/// Overrides ("section.key=value", root keys without a section) replace every
/// occurrence of the key before the text is interpreted.
ScenarioConfig parse_scenario(std::string_view text,
                              const std::vector<std::string>& overrides = {});

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_scenario(emit_scenario(c)) reproduces c.
std::string emit_scenario(const ScenarioConfig& cfg);

/// Node kinematics as laid out by the classes, ids in declaration order.
std::vector<NodeKinematics> build_nodes(const ScenarioConfig& cfg);

/// Allocation mode the run will use: the configured one, or for Auto the
/// mode needed by the largest pairwise distance (clock skew included).
AllocationMode resolve_allocation_mode(const ScenarioConfig& cfg);

/// Largest pairwise distance over the run plus c * the largest clock-offset
/// difference, i.e. the delay budget expressed as a distance.
double max_effective_distance_m(const ScenarioConfig& cfg);

/// Semantic checks. Throws ConfigError for invalid scenarios; returns
/// warnings for suspicious but runnable ones. With strict set, an
/// under-provisioned guard configuration is an error instead of a warning.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg, bool strict = false);

/// Parses "<number> <unit>" for the given quantity family. Exposed for the
/// CLI calculators. Throws ConfigError on a missing or unknown unit.
enum class Quantity { Time, Distance, Frequency, Power, Gain, Decibel, Size };
double parse_quantity(std::string_view text, Quantity kind);

}  // namespace a2asl

#endif
