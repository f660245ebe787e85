#include "a2asl/sim_engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <thread>

#include "a2asl/errors.hpp"

namespace a2asl {

namespace {

constexpr double kSlotEps = 1e-9;

double db_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_db(double mw) { return 10.0 * std::log10(mw); }

}  // namespace

double TransmissionEvent::tx_power_per_subchannel_dbm() const {
    return tx_power_dbm - 10.0 * std::log10(static_cast<double>(resource.subchannel_count));
}

std::string_view to_string(DeliveryStatus s) {
    switch (s) {
        case DeliveryStatus::Decoded: return "decoded";
        case DeliveryStatus::Collision: return "collision";
        case DeliveryStatus::BelowSensitivity: return "below_sensitivity";
        case DeliveryStatus::SlotMismatch: return "slot_mismatch";
        case DeliveryStatus::HalfDuplexMiss: return "half_duplex_miss";
        case DeliveryStatus::DopplerFail: return "doppler_fail";
    }
    return "unknown";
}

bool decode(double sinr_db, const MCSEntry& mcs) { return sinr_db >= mcs.snr_min_db; }

// ---------------------------------------------------------------------------
// RadioEnvironment

RadioEnvironment::RadioEnvironment(std::vector<NodeKinematics> nodes, LinkParams link,
                                   GridConfig grid, double snr_min_db,
                                   double doppler_tolerable_fraction, bool doppler_enforce)
    : nodes_(std::move(nodes)),
      link_(link),
      grid_(grid),
      snr_min_db_(snr_min_db),
      noise_dbm_(noise_floor_dbm(link.bandwidth_hz, link.noise_figure_db)),
      doppler_fraction_(doppler_tolerable_fraction),
      doppler_enforce_(doppler_enforce) {
    link_.validate();
    grid_.validate();
}

ReceptionWindow RadioEnvironment::reception(const TransmissionEvent& tx, NodeId receiver) const {
    const auto& a = nodes_.at(tx.sender);
    const auto& b = nodes_.at(receiver);
    const double slot_s = slot_duration_s();
    const double t = static_cast<double>(tx.resource.slot) * slot_s;
    ReceptionWindow w;
    w.distance_m = distance_m(a, b, t);
    const double shift_s = a.clock_offset_s - b.clock_offset_s;
    w.start_slots = static_cast<double>(tx.resource.slot) +
                    (propagation_delay_s(w.distance_m) + shift_s) / slot_s;
    w.end_slots = w.start_slots + static_cast<double>(tx.slot_format.occupied_symbols()) /
                                      kSymbolsPerSlot;
    w.arrival = arrival_slot_and_offset(tx.resource.slot, w.distance_m, grid_.numerology, shift_s);
    // Power is evaluated at >= 1 m; co-located nodes are a degenerate geometry.
    w.rx_power_dbm = received_power_dbm(link_, std::max(w.distance_m, 1.0));
    return w;
}

double RadioEnvironment::sinr_db(const TransmissionEvent& intended,
                                 std::span<const TransmissionEvent> interferers,
                                 NodeId receiver) const {
    const auto own = reception(intended, receiver);
    const double span = own.end_slots - own.start_slots;
    double interference_mw = 0.0;
    for (const auto& other : interferers) {
        if (other.sender == receiver ||
            (other.sender == intended.sender && other.resource.slot == intended.resource.slot)) {
            continue;
        }
        const int sub_lo = std::max(other.resource.subchannel_start,
                                    intended.resource.subchannel_start);
        const int sub_hi = std::min(other.resource.subchannel_end(),
                                    intended.resource.subchannel_end());
        if (sub_hi <= sub_lo) {
            continue;
        }
        const auto rx = reception(other, receiver);
        const double overlap = std::min(own.end_slots, rx.end_slots) -
                               std::max(own.start_slots, rx.start_slots);
        if (overlap <= 0.0) {
            continue;
        }
        const double band_share = static_cast<double>(sub_hi - sub_lo) /
                                  static_cast<double>(other.resource.subchannel_count);
        interference_mw += db_to_mw(rx.rx_power_dbm) * band_share * (overlap / span);
    }
    return own.rx_power_dbm - mw_to_db(db_to_mw(noise_dbm_) + interference_mw);
}

bool RadioEnvironment::doppler_exceeded(NodeId a, NodeId b, double t) const {
    const double v = radial_speed_mps(nodes_.at(a), nodes_.at(b), t);
    const double shift = doppler_shift_hz(v, link_.carrier_freq_ghz * 1e9);
    return shift > doppler_fraction_ * grid_.numerology.scs_hz();
}

DeliveryOutcome RadioEnvironment::deliver(const TransmissionEvent& tx, NodeId receiver,
                                          std::span<const TransmissionEvent> interferers,
                                          const std::set<std::int64_t>& receiver_tx_slots) const {
    const auto rx = reception(tx, receiver);
    DeliveryOutcome out;
    out.tx_slot = tx.resource.slot;
    out.sender = tx.sender;
    out.receiver = receiver;
    out.rx_power_dbm = rx.rx_power_dbm;
    out.distance_m = rx.distance_m;
    out.rx_slot = rx.arrival.rx_slot;
    out.symbol_offset = rx.arrival.symbol_offset;
    out.perceived_slot = tx.resource.slot;
    out.sinr_db = sinr_db(tx, interferers, receiver);

    const auto first = static_cast<std::int64_t>(std::floor(rx.start_slots + kSlotEps));
    const auto last = static_cast<std::int64_t>(std::ceil(rx.end_slots - kSlotEps)) - 1;
    bool mismatch = false;
    for (auto q = first; q <= last; ++q) {
        if (q != tx.resource.slot && usable_slot(q, grid_)) {
            mismatch = true;
            break;
        }
    }

    if (receiver_tx_slots.contains(out.rx_slot)) {
        out.status = DeliveryStatus::HalfDuplexMiss;
    } else if (mismatch) {
        out.status = DeliveryStatus::SlotMismatch;
        out.perceived_slot = static_cast<std::int64_t>(std::floor(rx.end_slots - kSlotEps));
    } else if (doppler_enforce_ &&
               doppler_exceeded(tx.sender, receiver,
                                static_cast<double>(tx.resource.slot) * slot_duration_s())) {
        out.status = DeliveryStatus::DopplerFail;
    } else if (rx.rx_power_dbm - noise_dbm_ < snr_min_db_) {
        out.status = DeliveryStatus::BelowSensitivity;
    } else if (out.sinr_db < snr_min_db_) {
        out.status = DeliveryStatus::Collision;
    } else {
        out.status = DeliveryStatus::Decoded;
    }
    return out;
}

// ---------------------------------------------------------------------------
// MetricsReport

std::uint64_t MetricsReport::total_outcomes() const {
    std::uint64_t n = 0;
    for (auto c : status_counts) {
        n += c;
    }
    return n;
}

double MetricsReport::overall_prr() const {
    const auto total = total_outcomes();
    if (total == 0) {
        return 1.0;
    }
    return static_cast<double>(count(DeliveryStatus::Decoded)) / static_cast<double>(total);
}

double MetricsReport::prr(std::int64_t bin) const {
    const auto it = prr_bins.find(bin);
    if (it == prr_bins.end() || it->second.attempted == 0) {
        return 1.0;
    }
    return static_cast<double>(it->second.decoded) / static_cast<double>(it->second.attempted);
}

double MetricsReport::cbr(NodeId node) const {
    const auto it = nodes.find(node);
    if (it == nodes.end() || it->second.observed_subchannel_slots == 0) {
        return 0.0;
    }
    return static_cast<double>(it->second.busy_subchannel_slots) /
           static_cast<double>(it->second.observed_subchannel_slots);
}

void MetricsReport::merge(const MetricsReport& other) {
    for (const auto& [bin, t] : other.prr_bins) {
        prr_bins[bin].decoded += t.decoded;
        prr_bins[bin].attempted += t.attempted;
    }
    for (std::size_t i = 0; i < status_counts.size(); ++i) {
        status_counts[i] += other.status_counts[i];
    }
    transmissions += other.transmissions;
    packets += other.packets;
    allocation_failures += other.allocation_failures;
    sps_keeps += other.sps_keeps;
    sps_reselections += other.sps_reselections;
    for (const auto& [id, t] : other.nodes) {
        auto& mine = nodes[id];
        mine.transmissions += t.transmissions;
        mine.tx_opportunities += t.tx_opportunities;
        mine.busy_subchannel_slots += t.busy_subchannel_slots;
        mine.observed_subchannel_slots += t.observed_subchannel_slots;
    }
    for (const auto& [key, t] : other.links) {
        links[key].decoded += t.decoded;
        links[key].attempted += t.attempted;
    }
}

void MetricsReport::write_csv(std::ostream& out) const {
    out << "metric,bin,value\n";
    out << fmt::format("packets,all,{}\n", packets);
    out << fmt::format("transmissions,all,{}\n", transmissions);
    out << fmt::format("allocation_failures,all,{}\n", allocation_failures);
    out << fmt::format("sps_keeps,all,{}\n", sps_keeps);
    out << fmt::format("sps_reselections,all,{}\n", sps_reselections);
    for (std::size_t i = 0; i < kNumDeliveryStatuses; ++i) {
        out << fmt::format("outcome,{},{}\n", to_string(static_cast<DeliveryStatus>(i)),
                           status_counts[i]);
    }
    out << fmt::format("prr,all,{:.6f}\n", overall_prr());
    for (const auto& [bin, t] : prr_bins) {
        const double lo = static_cast<double>(bin) * prr_bin_m / 1e3;
        const double hi = static_cast<double>(bin + 1) * prr_bin_m / 1e3;
        out << fmt::format("prr,{}-{}km,{:.6f}\n", lo, hi, prr(bin));
    }
    for (const auto& [id, t] : nodes) {
        out << fmt::format("node_transmissions,{},{}\n", id, t.transmissions);
        out << fmt::format("tx_opportunities,{},{}\n", id, t.tx_opportunities);
        out << fmt::format("cbr,{},{:.6f}\n", id, cbr(id));
    }
    for (const auto& [key, t] : links) {
        out << fmt::format("link_decoded,{}->{},{}\n", key.first, key.second, t.decoded);
        out << fmt::format("link_attempted,{}->{},{}\n", key.first, key.second, t.attempted);
    }
}

void write_events_csv(std::ostream& out, std::span<const DeliveryOutcome> events) {
    out << "slot,tx,rx,status,sinr_db,distance_m\n";
    for (const auto& e : events) {
        out << fmt::format("{},{},{},{},{:.6f},{:.3f}\n", e.tx_slot, e.sender, e.receiver,
                           to_string(e.status), e.sinr_db, e.distance_m);
    }
}

// ---------------------------------------------------------------------------
// Slot loop

namespace {

enum StreamTag : std::uint32_t { kTrafficStream = 1, kMacStream = 2 };

Rng make_stream(std::uint64_t seed, NodeId node, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(node), static_cast<std::uint32_t>(tag)};
    return Rng(seq);
}

struct NodeRuntime {
    std::size_t class_index = 0;
    Rng traffic_rng;
    Rng mac_rng;
    SensingHistory history;
    SpsState sps;
    ExclusionConfig exclusion;
    std::int64_t next_generation = -1;  // -1: no traffic
    std::int64_t interval_slots = 0;
    std::vector<TransmissionEvent> pending;
    std::set<std::int64_t> tx_slots;
    std::set<std::pair<std::int64_t, int>> busy;
    std::vector<NodeId> receivers;
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
        : cfg_(cfg),
          seed_(seed),
          mode_(resolve_allocation_mode(cfg)),
          plan_(guard_plan(mode_)),
          env_(build_nodes(cfg), cfg.link,
               GridConfig{Numerology(cfg.numerology), cfg.num_subchannels,
                          cfg.subchannel_size_prb, plan_.inhibition_period},
               cfg.effective_snr_min_db(), cfg.doppler_tolerable_fraction, cfg.doppler_enforce) {
        const double slot_s = env_.slot_duration_s();
        total_slots_ = std::llround(cfg.duration_s / slot_s);
        lag_ = static_cast<std::int64_t>(
                   std::ceil(propagation_delay_s(max_effective_distance_m(cfg)) / slot_s)) +
               1;
        report_.prr_bin_m = cfg.prr_bin_m;
        setup_nodes();
    }

    RunResult execute() {
        for (std::int64_t s = 0; s < total_slots_; ++s) {
            for (auto& n : nodes_) {
                n.history.evict(s);
            }
            generate(s);
            transmit(s);
            if (s - lag_ >= 0) {
                resolve(s - lag_);
            }
            prune(s);
        }
        for (auto q = std::max<std::int64_t>(0, total_slots_ - lag_); q < total_slots_; ++q) {
            resolve(q);
        }
        finish();
        RunResult result;
        result.metrics = std::move(report_);
        result.events = std::move(events_);
        result.mode = mode_;
        result.plan = plan_;
        result.slots = total_slots_;
        return result;
    }

private:
    void setup_nodes() {
        const double slot_s = env_.slot_duration_s();
        std::vector<std::int64_t> periods;
        for (const auto& c : cfg_.classes) {
            if (c.traffic && c.mac.scheduler == SchedulerKind::Sps) {
                periods.push_back(std::llround(c.mac.rri_s / slot_s));
            }
        }
        std::sort(periods.begin(), periods.end());
        periods.erase(std::unique(periods.begin(), periods.end()), periods.end());

        std::vector<std::size_t> class_of;
        for (std::size_t ci = 0; ci < cfg_.classes.size(); ++ci) {
            for (int j = 0; j < cfg_.classes[ci].count; ++j) {
                class_of.push_back(ci);
            }
        }
        for (NodeId id = 0; id < class_of.size(); ++id) {
            const auto& c = cfg_.classes[class_of[id]];
            NodeRuntime n;
            n.class_index = class_of[id];
            n.traffic_rng = make_stream(seed_, id, kTrafficStream);
            n.mac_rng = make_stream(seed_, id, kMacStream);
            n.history = SensingHistory(std::llround(c.mac.sensing_window_s / slot_s));
            n.exclusion = {c.mac.rsrp_threshold_dbm, c.mac.threshold_step_db,
                           c.mac.min_available_ratio, periods};
            n.sps.rri_slots = std::llround(c.mac.rri_s / slot_s);
            n.sps.keep_probability = c.mac.keep_probability;
            n.sps.counter_min = c.mac.counter_min;
            n.sps.counter_max = c.mac.counter_max;
            for (NodeId r = 0; r < class_of.size(); ++r) {
                if (r != id && (c.destination == "broadcast" ||
                                cfg_.classes[class_of[r]].name == c.destination)) {
                    n.receivers.push_back(r);
                }
            }
            if (c.traffic) {
                const auto& t = *c.traffic;
                n.interval_slots = std::max<std::int64_t>(1, std::llround(t.interval_s / slot_s));
                if (t.kind == TrafficKind::Periodic) {
                    if (t.phase_s) {
                        n.next_generation = std::llround(*t.phase_s / slot_s);
                    } else {
                        std::uniform_int_distribution<std::int64_t> phase(0, n.interval_slots - 1);
                        n.next_generation = phase(n.traffic_rng);
                    }
                } else {
                    n.next_generation = aperiodic_gap(n, t);
                }
            }
            nodes_.push_back(std::move(n));
        }
    }

    std::int64_t aperiodic_gap(NodeRuntime& n, const TrafficSpec& t) {
        std::exponential_distribution<double> gap(1.0 / t.interval_s);
        return std::max<std::int64_t>(1, std::llround(gap(n.traffic_rng) / env_.slot_duration_s()));
    }

    void generate(std::int64_t s) {
        for (NodeId id = 0; id < nodes_.size(); ++id) {
            auto& n = nodes_[id];
            if (n.next_generation != s) {
                continue;
            }
            const auto& c = cfg_.classes[n.class_index];
            const auto& t = *c.traffic;
            Packet p;
            p.id = next_packet_id_++;
            p.source = id;
            p.destination = n.receivers.size() == 1 && c.destination != "broadcast"
                                ? n.receivers.front()
                                : kBroadcast;
            p.size_bytes = t.packet_size_bytes;
            p.generated_at_s = static_cast<double>(s) * env_.slot_duration_s();
            p.traffic = t.kind;
            ++report_.packets;
            schedule(id, n, c, p, s);
            n.next_generation = t.kind == TrafficKind::Periodic ? s + n.interval_slots
                                                                : s + aperiodic_gap(n, t);
        }
    }

    void schedule(NodeId id, NodeRuntime& n, const NodeClass& c, const Packet& p,
                  std::int64_t s) {
        auto window = SelectionWindow::from_generation(s, c.mac.t1_s, c.mac.t2_s,
                                                       c.traffic->subchannels, env_.grid());
        for (const auto& tx : n.pending) {
            window.blocked_slots.push_back(tx.resource.slot);
        }
        const bool has_candidates = !window.candidates().empty();

        TransmissionEvent tx;
        tx.sender = id;
        tx.slot_format = plan_.format;
        tx.packet = p;
        tx.tx_power_dbm = cfg_.link.tx_power_dbm;
        tx.sci.sender = id;

        if (c.mac.scheduler == SchedulerKind::Ds) {
            std::optional<ResourceId> grant;
            if (has_candidates) {
                grant = ds_on_packet(window, n.history, n.exclusion, n.mac_rng);
            }
            if (!grant) {
                ++report_.allocation_failures;
                return;
            }
            tx.resource = *grant;
            tx.sci.reserved = *grant;
            tx.sci.rri_slots = 0;
        } else {
            std::vector<ResourceId> available;
            if (n.sps.selection_due() && has_candidates) {
                const auto projected = project_reservations(n.history, window);
                available =
                    exclude(window, projected, n.exclusion, n.history.own_tx_slots()).available;
            }
            auto outcome = sps_on_packet(n.sps, available, n.mac_rng);
            if (outcome.decision == SpsDecision::Keep) {
                ++report_.sps_keeps;
            } else if (outcome.decision == SpsDecision::Reselect) {
                ++report_.sps_reselections;
            }
            const bool stale =
                outcome.grant &&
                (outcome.grant->slot <= s ||
                 std::find(window.blocked_slots.begin(), window.blocked_slots.end(),
                           outcome.grant->slot) != window.blocked_slots.end());
            if (!outcome.grant || stale) {
                ++report_.allocation_failures;
                n.sps.resource.reset();
                n.sps.reselection_counter = 0;
                return;
            }
            n.sps = outcome.state;
            tx.resource = *outcome.grant;
            if (n.sps.reselection_counter > 0) {
                tx.sci.reserved = *n.sps.resource;
                tx.sci.rri_slots = n.sps.rri_slots;
            } else {
                tx.sci.reserved = *outcome.grant;
                tx.sci.rri_slots = 0;
            }
        }
        n.pending.push_back(tx);
    }

    void transmit(std::int64_t s) {
        for (NodeId id = 0; id < nodes_.size(); ++id) {
            auto& n = nodes_[id];
            auto it = std::find_if(n.pending.begin(), n.pending.end(),
                                   [s](const TransmissionEvent& t) { return t.resource.slot == s; });
            if (it == n.pending.end()) {
                continue;
            }
            if (usable_slot(s, env_.grid())) {
                active_.push_back(*it);
                n.tx_slots.insert(s);
                n.history.record_own_tx(s);
                ++report_.transmissions;
                ++report_.nodes[id].transmissions;
            }
            n.pending.erase(it);
        }
    }

    void resolve(std::int64_t q) {
        std::vector<TransmissionEvent> interferers(active_.begin(), active_.end());
        for (const auto& tx : active_) {
            if (tx.resource.slot != q) {
                continue;
            }
            const auto& targets = nodes_[tx.sender].receivers;
            for (NodeId r = 0; r < nodes_.size(); ++r) {
                if (r == tx.sender) {
                    continue;
                }
                auto& rn = nodes_[r];
                const auto out = env_.deliver(tx, r, interferers, rn.tx_slots);
                sense(tx, out, rn);
                if (std::find(targets.begin(), targets.end(), r) != targets.end()) {
                    record(out);
                }
            }
        }
    }

    void record(const DeliveryOutcome& out) {
        const bool ok = out.status == DeliveryStatus::Decoded;
        ++report_.status_counts[static_cast<std::size_t>(out.status)];
        auto& bin = report_.prr_bins[static_cast<std::int64_t>(out.distance_m / cfg_.prr_bin_m)];
        ++bin.attempted;
        auto& link = report_.links[{out.sender, out.receiver}];
        ++link.attempted;
        if (ok) {
            ++bin.decoded;
            ++link.decoded;
        }
        events_.push_back(out);
    }

    // Every node hears the SCI and the energy, addressed to it or not.
    void sense(const TransmissionEvent& tx, const DeliveryOutcome& out, NodeRuntime& rn) {
        const bool ok = out.status == DeliveryStatus::Decoded;
        if (out.status != DeliveryStatus::HalfDuplexMiss &&
            out.rx_power_dbm >= cfg_.cbr_threshold_dbm) {
            for (int sc = tx.resource.subchannel_start; sc < tx.resource.subchannel_end(); ++sc) {
                rn.busy.insert({out.rx_slot, sc});
            }
        }

        const bool readable = ok || (out.status == DeliveryStatus::SlotMismatch &&
                                     out.sinr_db >= env_.snr_min_db());
        if (readable) {
            SciReservation sci = tx.sci;
            sci.reserved.slot += out.perceived_slot - out.tx_slot;
            sci.rsrp_dbm = out.rx_power_dbm;
            sci.heard_at_slot = out.rx_slot;
            rn.history.add(sci);
        }
    }

    void prune(std::int64_t s) {
        const auto oldest = s - 2 * lag_ - 1;
        while (!active_.empty() && active_.front().resource.slot < oldest) {
            active_.pop_front();
        }
        for (auto& n : nodes_) {
            n.tx_slots.erase(n.tx_slots.begin(), n.tx_slots.lower_bound(oldest));
        }
    }

    void finish() {
        std::uint64_t usable = 0;
        for (std::int64_t s = 0; s < total_slots_; ++s) {
            usable += usable_slot(s, env_.grid()) ? 1 : 0;
        }
        const auto observed =
            static_cast<std::uint64_t>(total_slots_) * static_cast<std::uint64_t>(cfg_.num_subchannels);
        for (NodeId id = 0; id < nodes_.size(); ++id) {
            auto& t = report_.nodes[id];
            t.tx_opportunities = usable;
            t.observed_subchannel_slots = observed;
            t.busy_subchannel_slots = static_cast<std::uint64_t>(std::count_if(
                nodes_[id].busy.begin(), nodes_[id].busy.end(),
                [&](const auto& b) { return b.first >= 0 && b.first < total_slots_; }));
        }
    }

    const ScenarioConfig& cfg_;
    std::uint64_t seed_;
    AllocationMode mode_;
    GuardPlan plan_;
    RadioEnvironment env_;
    std::int64_t total_slots_ = 0;
    std::int64_t lag_ = 1;
    std::vector<NodeRuntime> nodes_;
    std::deque<TransmissionEvent> active_;
    std::uint64_t next_packet_id_ = 0;
    MetricsReport report_;
    std::vector<DeliveryOutcome> events_;
};

}  // namespace

RunResult run(const ScenarioConfig& scenario, std::uint64_t seed) {
    (void)validate_scenario(scenario, false);
    Simulation sim(scenario, seed);
    return sim.execute();
}

MetricsReport run_sweep(const ScenarioConfig& scenario, std::uint64_t seed0, int count,
                        int workers) {
    (void)validate_scenario(scenario, false);
    std::vector<MetricsReport> reports(static_cast<std::size_t>(std::max(count, 0)));
    workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) {
                reports[static_cast<std::size_t>(i)] =
                    run(scenario, seed0 + static_cast<std::uint64_t>(i)).metrics;
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    MetricsReport merged;
    merged.prr_bin_m = scenario.prr_bin_m;
    for (const auto& r : reports) {
        merged.merge(r);
    }
    return merged;
}

}  // namespace a2asl
