#include "a2asl/mac_mode2.hpp"

#include <algorithm>
#include <cmath>

#include "a2asl/errors.hpp"

namespace a2asl {

void SensingHistory::evict(std::int64_t now_slot) {
    const std::int64_t oldest = now_slot - window_slots_;
    std::erase_if(entries_, [oldest](const SciReservation& e) { return e.heard_at_slot < oldest; });
    own_tx_slots_.erase(own_tx_slots_.begin(), own_tx_slots_.lower_bound(oldest));
}

SelectionWindow SelectionWindow::from_generation(std::int64_t generation_slot, double t1_s,
                                                 double t2_s, int subchannel_count,
                                                 const GridConfig& grid) {
    if (!(t1_s > 0.0 && t1_s < t2_s)) {
        throw ConfigError("selection window needs 0 < t1 < t2");
    }
    if (subchannel_count < 1 || subchannel_count > grid.num_subchannels) {
        throw ConfigError("packet needs 1.." + std::to_string(grid.num_subchannels) +
                          " subchannels");
    }
    const double slot = grid.numerology.slot_duration_s();
    SelectionWindow w;
    w.first_slot = generation_slot + std::llround(t1_s / slot);
    w.last_slot = generation_slot + std::llround(t2_s / slot);
    w.subchannel_count = subchannel_count;
    w.num_subchannels = grid.num_subchannels;
    w.inhibition_period = grid.inhibition_period;
    return w;
}

std::vector<ResourceId> SelectionWindow::candidates() const {
    std::vector<ResourceId> out;
    for (std::int64_t s = first_slot; s <= last_slot; ++s) {
        if (s % inhibition_period != 0 ||
            std::find(blocked_slots.begin(), blocked_slots.end(), s) != blocked_slots.end()) {
            continue;
        }
        for (int start = 0; start + subchannel_count <= num_subchannels; ++start) {
            out.push_back({s, start, subchannel_count});
        }
    }
    return out;
}

void ExclusionConfig::validate() const {
    if (!(threshold_step_db > 0.0)) {
        throw ConfigError("RSRP threshold step must be positive");
    }
    if (!(min_available_ratio > 0.0 && min_available_ratio <= 1.0)) {
        throw ConfigError("minimum available ratio must lie in (0, 1]");
    }
    if (!std::isfinite(rsrp_threshold_init_dbm)) {
        throw ConfigError("initial RSRP threshold must be finite");
    }
    for (auto p : half_duplex_periods_slots) {
        if (p <= 0) {
            throw ConfigError("half-duplex projection periods must be positive");
        }
    }
}

std::vector<ProjectedReservation> project_reservations(const SensingHistory& history,
                                                       const SelectionWindow& window) {
    std::vector<ProjectedReservation> out;
    for (const auto& sci : history.entries()) {
        if (sci.rri_slots <= 0) {
            if (sci.reserved.slot >= window.first_slot && sci.reserved.slot <= window.last_slot) {
                out.push_back({sci.reserved, sci.rsrp_dbm});
            }
            continue;
        }
        std::int64_t k = 0;
        if (sci.reserved.slot < window.first_slot) {
            k = (window.first_slot - sci.reserved.slot + sci.rri_slots - 1) / sci.rri_slots;
        }
        for (std::int64_t s = sci.reserved.slot + k * sci.rri_slots; s <= window.last_slot;
             s += sci.rri_slots) {
            ResourceId r = sci.reserved;
            r.slot = s;
            out.push_back({r, sci.rsrp_dbm});
        }
    }
    return out;
}

namespace {

bool half_duplex_blocked(std::int64_t slot, std::int64_t window_slots,
                         const std::set<std::int64_t>& own_tx,
                         std::span<const std::int64_t> periods) {
    if (own_tx.contains(slot)) {
        return true;
    }
    for (auto p : periods) {
        const std::int64_t repeats = p < window_slots ? (window_slots + p - 1) / p : 1;
        for (std::int64_t q = 1; q <= repeats; ++q) {
            if (own_tx.contains(slot - q * p)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

ExclusionResult exclude(const SelectionWindow& window,
                        std::span<const ProjectedReservation> projected,
                        const ExclusionConfig& cfg, const std::set<std::int64_t>& own_tx_slots) {
    cfg.validate();
    const auto all = window.candidates();
    if (all.empty()) {
        throw ConfigError("selection window contains no candidate resources");
    }

    const std::int64_t window_len = window.last_slot - window.first_slot + 1;
    std::vector<ResourceId> sensed;
    sensed.reserve(all.size());
    for (const auto& c : all) {
        if (!half_duplex_blocked(c.slot, window_len, own_tx_slots,
                                 cfg.half_duplex_periods_slots)) {
            sensed.push_back(c);
        }
    }

    double max_rsrp = -INFINITY;
    for (const auto& p : projected) {
        max_rsrp = std::max(max_rsrp, p.rsrp_dbm);
    }

    const double needed = cfg.min_available_ratio * static_cast<double>(all.size());
    ExclusionResult result;
    result.final_threshold_dbm = cfg.rsrp_threshold_init_dbm;
    for (;;) {
        const double threshold = result.final_threshold_dbm;
        result.available.clear();
        for (const auto& c : sensed) {
            const bool busy = std::any_of(projected.begin(), projected.end(), [&](const auto& p) {
                return p.rsrp_dbm > threshold && p.resource.overlaps(c);
            });
            if (!busy) {
                result.available.push_back(c);
            }
        }
        if (static_cast<double>(result.available.size()) >= needed || threshold >= max_rsrp) {
            return result;
        }
        result.final_threshold_dbm += cfg.threshold_step_db;
        ++result.escalations;
    }
}

std::optional<ResourceId> select_resource(std::span<const ResourceId> available, Rng& rng) {
    if (available.empty()) {
        return std::nullopt;
    }
    std::uniform_int_distribution<std::size_t> pick(0, available.size() - 1);
    return available[pick(rng)];
}

SpsOutcome sps_on_packet(const SpsState& state, std::span<const ResourceId> available, Rng& rng) {
    SpsOutcome out;
    out.state = state;
    auto& next = out.state;

    if (state.resource && state.reselection_counter > 0) {
        out.grant = state.resource;
        out.decision = SpsDecision::Reuse;
        --next.reselection_counter;
    } else {
        if (state.resource) {
            std::bernoulli_distribution keep(state.keep_probability);
            if (keep(rng)) {
                out.grant = state.resource;
                out.decision = SpsDecision::Keep;
            } else {
                out.grant = select_resource(available, rng);
                out.decision = SpsDecision::Reselect;
            }
        } else {
            out.grant = select_resource(available, rng);
            out.decision = SpsDecision::Initial;
        }
        std::uniform_int_distribution<int> counter(state.counter_min, state.counter_max);
        out.counter_drawn = counter(rng);
        next.reselection_counter = *out.counter_drawn;
    }

    if (out.grant) {
        ResourceId following = *out.grant;
        following.slot += state.rri_slots;
        next.resource = following;
    } else {
        next.resource.reset();
        next.reselection_counter = 0;
    }
    return out;
}

std::optional<ResourceId> ds_on_packet(const SelectionWindow& window,
                                       const SensingHistory& history, const ExclusionConfig& cfg,
                                       Rng& rng) {
    const auto projected = project_reservations(history, window);
    const auto result = exclude(window, projected, cfg, history.own_tx_slots());
    return select_resource(result.available, rng);
}

}  // namespace a2asl
