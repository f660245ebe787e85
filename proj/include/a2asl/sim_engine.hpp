#ifndef A2ASL_SIM_ENGINE_HPP
#define A2ASL_SIM_ENGINE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "a2asl/linkbudget.hpp"
#include "a2asl/mac_mode2.hpp"
#include "a2asl/mobility.hpp"
#include "a2asl/phy_grid.hpp"
#include "a2asl/scenario.hpp"

namespace a2asl {

inline constexpr NodeId kBroadcast = 0xffffffffu;

struct Packet {
    std::uint64_t id = 0;
    NodeId source = 0;
    NodeId destination = kBroadcast;
    int size_bytes = 0;
    double generated_at_s = 0.0;
    TrafficKind traffic = TrafficKind::Periodic;
};

/// One transmission: a single slot, contiguous subchannels.
struct TransmissionEvent {
    NodeId sender = 0;
    ResourceId resource;
    SlotFormat slot_format;
    Packet packet;
    double tx_power_dbm = 0.0;  // total over the allocation
    SciReservation sci;         // rsrp/heard_at are filled in per receiver

    /// Power on each allocated subchannel (total spread evenly).
    double tx_power_per_subchannel_dbm() const;
};

enum class DeliveryStatus {
    Decoded,
    Collision,
    BelowSensitivity,
    SlotMismatch,
    HalfDuplexMiss,
    DopplerFail,
};
inline constexpr std::size_t kNumDeliveryStatuses = 6;

std::string_view to_string(DeliveryStatus s);

struct DeliveryOutcome {
    std::int64_t tx_slot = 0;
    NodeId sender = 0;
    NodeId receiver = 0;
    DeliveryStatus status = DeliveryStatus::Decoded;
    double sinr_db = 0.0;
    double rx_power_dbm = 0.0;
    double distance_m = 0.0;
    std::int64_t rx_slot = 0;
    double symbol_offset = 0.0;
    /// Slot the receiver attributes the transmission to (differs from
    /// tx_slot on a mismatch).
    std::int64_t perceived_slot = 0;
};

/// Where and when a transmission lands at one receiver, on the receiver's
/// slot grid, in slot units.
struct ReceptionWindow {
    double start_slots = 0.0;
    double end_slots = 0.0;
    double distance_m = 0.0;
    double rx_power_dbm = 0.0;
    ArrivalTiming arrival;
};

/// Physical layer view of a run: geometry, link budget and slot grid.
class RadioEnvironment {
public:
    RadioEnvironment(std::vector<NodeKinematics> nodes, LinkParams link, GridConfig grid,
                     double snr_min_db, double doppler_tolerable_fraction, bool doppler_enforce);

    const std::vector<NodeKinematics>& nodes() const { return nodes_; }
    const GridConfig& grid() const { return grid_; }
    const LinkParams& link() const { return link_; }
    double snr_min_db() const { return snr_min_db_; }
    double slot_duration_s() const { return grid_.numerology.slot_duration_s(); }

    ReceptionWindow reception(const TransmissionEvent& tx, NodeId receiver) const;

    /// S / (N + sum I). Each interferer's received power is scaled by the
    /// share of its subchannels that overlap the intended allocation and by
    /// the fraction of the intended occupied symbols it overlaps in time.
    double sinr_db(const TransmissionEvent& intended,
                   std::span<const TransmissionEvent> interferers, NodeId receiver) const;

    /// Scores one (transmission, receiver) pair. Checks in order: half
    /// duplex (receiver transmitted in rx_slot), slot mismatch (occupied
    /// symbols touch a usable slot other than tx_slot; the boundary itself
    /// is inclusive), Doppler gate, then SNR (below_sensitivity) and SINR
    /// (collision) against snr_min. interferers may include intended; it
    /// is skipped by identity of sender and slot.
    DeliveryOutcome deliver(const TransmissionEvent& tx, NodeId receiver,
                            std::span<const TransmissionEvent> interferers,
                            const std::set<std::int64_t>& receiver_tx_slots) const;

    /// |Doppler| of the a-b link at time t exceeds the tolerable share of SCS.
    bool doppler_exceeded(NodeId a, NodeId b, double t) const;

private:
    std::vector<NodeKinematics> nodes_;
    LinkParams link_;
    GridConfig grid_;
    double snr_min_db_;
    double noise_dbm_;
    double doppler_fraction_;
    bool doppler_enforce_;
};

bool decode(double sinr_db, const MCSEntry& mcs);

struct LinkTally {
    std::uint64_t decoded = 0;
    std::uint64_t attempted = 0;
    friend bool operator==(const LinkTally&, const LinkTally&) = default;
};

struct NodeTally {
    std::uint64_t transmissions = 0;
    std::uint64_t tx_opportunities = 0;
    std::uint64_t busy_subchannel_slots = 0;
    std::uint64_t observed_subchannel_slots = 0;
    friend bool operator==(const NodeTally&, const NodeTally&) = default;
};

/// Aggregated run results. merge() sums tallies, so merging is associative
/// and commutative; ratios are derived from the tallies on output.
struct MetricsReport {
    double prr_bin_m = 10e3;
    std::map<std::int64_t, LinkTally> prr_bins;  // key: distance bin index
    std::array<std::uint64_t, kNumDeliveryStatuses> status_counts{};
    std::uint64_t transmissions = 0;
    std::uint64_t packets = 0;
    std::uint64_t allocation_failures = 0;
    std::uint64_t sps_keeps = 0;
    std::uint64_t sps_reselections = 0;
    std::map<NodeId, NodeTally> nodes;
    std::map<std::pair<NodeId, NodeId>, LinkTally> links;

    std::uint64_t count(DeliveryStatus s) const {
        return status_counts[static_cast<std::size_t>(s)];
    }
    std::uint64_t total_outcomes() const;
    /// Decoded share over all outcomes; 1 when nothing was attempted.
    double overall_prr() const;
    double prr(std::int64_t bin) const;
    double cbr(NodeId node) const;

    void merge(const MetricsReport& other);

    /// CSV with header "metric,bin,value".
    void write_csv(std::ostream& out) const;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct RunResult {
    MetricsReport metrics;
    std::vector<DeliveryOutcome> events;
    AllocationMode mode;
    GuardPlan plan;
    std::int64_t slots = 0;
};

/// CSV with header "slot,tx,rx,status,sinr_db,distance_m".
void write_events_csv(std::ostream& out, std::span<const DeliveryOutcome> events);

/// Slot-driven run of a validated scenario. Fully determined by (scenario,
/// seed). Throws ConfigError if the scenario does not validate.
RunResult run(const ScenarioConfig& scenario, std::uint64_t seed);

/// Runs seeds seed0..seed0+count-1 on up to `workers` threads and merges the
/// reports in seed order.
MetricsReport run_sweep(const ScenarioConfig& scenario, std::uint64_t seed0, int count,
                        int workers);

}  // namespace a2asl

#endif
