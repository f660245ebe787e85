#ifndef A2ASL_MAC_MODE2_HPP
#define A2ASL_MAC_MODE2_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "a2asl/mobility.hpp"
#include "a2asl/phy_grid.hpp"

namespace a2asl {

using Rng = std::mt19937_64;

/// Decoded SCI as seen by one sensing node. rri_slots == 0 means the SCI
/// reserves nothing periodically.
struct SciReservation {
    NodeId sender = 0;
    ResourceId reserved;
    std::int64_t rri_slots = 0;
    double rsrp_dbm = 0.0;
    std::int64_t heard_at_slot = 0;
};

/// Sliding record of decoded SCIs and of the node's own transmit slots
/// (slots in which it could not sense).
class SensingHistory {
public:
    explicit SensingHistory(std::int64_t window_slots = 4400) : window_slots_(window_slots) {}

    void add(const SciReservation& sci) { entries_.push_back(sci); }
    void record_own_tx(std::int64_t slot) { own_tx_slots_.insert(slot); }

    /// Drops entries heard before now_slot - window_slots.
    void evict(std::int64_t now_slot);

    std::int64_t window_slots() const { return window_slots_; }
    const std::vector<SciReservation>& entries() const { return entries_; }
    const std::set<std::int64_t>& own_tx_slots() const { return own_tx_slots_; }

private:
    std::int64_t window_slots_;
    std::vector<SciReservation> entries_;
    std::set<std::int64_t> own_tx_slots_;
};

/// Candidate single-slot resources in [first_slot, last_slot]: every usable
/// slot times every contiguous placement of subchannel_count subchannels.
/// Slots listed in blocked_slots (the node's own committed transmissions)
/// are not candidates.
struct SelectionWindow {
    std::int64_t first_slot = 0;
    std::int64_t last_slot = 0;
    int subchannel_count = 1;
    int num_subchannels = 1;
    int inhibition_period = 1;
    std::vector<std::int64_t> blocked_slots;

    /// Window [gen + round(t1/slot), gen + round(t2/slot)]. Requires
    /// 0 < t1 < t2; throws ConfigError otherwise.
    static SelectionWindow from_generation(std::int64_t generation_slot, double t1_s, double t2_s,
                                           int subchannel_count, const GridConfig& grid);

    std::vector<ResourceId> candidates() const;
};

struct ExclusionConfig {
    double rsrp_threshold_init_dbm = -126.0;
    double threshold_step_db = 3.0;
    double min_available_ratio = 0.20;
    /// Reservation periods used to project the node's own transmit slots
    /// forward (half-duplex sensing gaps).
    std::vector<std::int64_t> half_duplex_periods_slots;

    void validate() const;
};

struct ProjectedReservation {
    ResourceId resource;
    double rsrp_dbm = 0.0;
};

/// Extends every heard reservation by whole multiples of its RRI and keeps
/// the hits that land inside the window. Non-periodic reservations project
/// only their own resource.
std::vector<ProjectedReservation> project_reservations(const SensingHistory& history,
                                                       const SelectionWindow& window);

struct ExclusionResult {
    std::vector<ResourceId> available;
    double final_threshold_dbm = 0.0;
    int escalations = 0;
};

/// Sensing-based exclusion with RSRP threshold escalation.
///
/// Candidates in half-duplex slots are always dropped: own tx slots m, and
/// m + q * P for P in half_duplex_periods_slots and 1 <= q <= Q, where
/// Q = ceil(W / P) when P is shorter than the window length W, else 1. A candidate
/// is also dropped when it overlaps a projected reservation whose RSRP is
/// strictly above the threshold. While the survivors number fewer than
/// min_available_ratio * |window| the threshold rises by threshold_step_db;
/// escalation stops once the threshold reaches the strongest projected
/// RSRP, since further steps cannot free anything.
///
/// Throws ConfigError on an empty window.
ExclusionResult exclude(const SelectionWindow& window,
                        std::span<const ProjectedReservation> projected,
                        const ExclusionConfig& cfg,
                        const std::set<std::int64_t>& own_tx_slots = {});

/// Uniform draw from the available set; nullopt when it is empty.
std::optional<ResourceId> select_resource(std::span<const ResourceId> available, Rng& rng);

struct SpsState {
    std::int64_t rri_slots = 400;
    /// Resource of the next periodic grant.
    std::optional<ResourceId> resource;
    int reselection_counter = 0;
    double keep_probability = 0.0;
    int counter_min = 5;
    int counter_max = 15;

    /// True when the next packet needs a keep-or-reselect decision, i.e.
    /// a fresh available set may be consumed.
    bool selection_due() const { return !resource || reselection_counter == 0; }
};

enum class SpsDecision { Reuse, Keep, Reselect, Initial };

struct SpsOutcome {
    std::optional<ResourceId> grant;  // nullopt: allocation failure
    SpsState state;
    SpsDecision decision = SpsDecision::Reuse;
    std::optional<int> counter_drawn;
};

/// One SPS packet.
///
/// counter > 0: reuse the reserved resource and decrement the counter.
/// counter == 0: keep the resource with probability keep_probability,
/// otherwise pick a fresh one from available; either way the counter is
/// redrawn uniformly in [counter_min, counter_max]. The first packet always
/// selects. The returned state reserves grant + rri for the next packet.
SpsOutcome sps_on_packet(const SpsState& state, std::span<const ResourceId> available, Rng& rng);

/// Dynamic scheduling: project, exclude and select for this packet alone.
std::optional<ResourceId> ds_on_packet(const SelectionWindow& window,
                                       const SensingHistory& history, const ExclusionConfig& cfg,
                                       Rng& rng);

}  // namespace a2asl

#endif
