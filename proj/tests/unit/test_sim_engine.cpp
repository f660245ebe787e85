#include <doctest.h>

#include <cmath>
#include <sstream>

#include "a2asl/errors.hpp"
#include "a2asl/sim_engine.hpp"
#include "csv_fixture.hpp"

using namespace a2asl;

namespace {

double oracle_snr_db(double d_m) {
    const double rx = 64.0 - 20.0 * std::log10(4.0 * 3.141592653589793 * d_m * 6e9 / 3.0e8);
    const double noise = 10.0 * std::log10(1.38e-23 * 290.0 * 100e6 * 1e3) + 8.0;
    return rx - noise;
}

NodeKinematics at(NodeId id, double x) { return {id, Trajectory::stationary({x, 0, 1000}), 0.0}; }

RadioEnvironment env(std::vector<NodeKinematics> nodes, int period = 1, double snr_min = 0.0) {
    GridConfig g;
    g.inhibition_period = period;
    return RadioEnvironment(std::move(nodes), LinkParams{}, g, snr_min, 0.1, true);
}

TransmissionEvent tx_from(NodeId sender, std::int64_t slot, int sub, int count, SlotFormat f) {
    TransmissionEvent t;
    t.sender = sender;
    t.resource = {slot, sub, count};
    t.slot_format = f;
    t.tx_power_dbm = 40.0;
    return t;
}

ScenarioConfig two_nodes(double distance_m, const std::string& guard) {
    std::string text = "name = t\nduration = 1 s\n[grid]\n" + guard +
                       "\n[link]\nsnr_min = 0 dB\n"
                       "[class.a]\nwaypoint = 0 s, 0 m, 0 m, 1 km\nscheduler = sps\n"
                       "[class.a.traffic]\nperiod = 100 ms\nphase = 0 ms\n"
                       "[class.b]\nwaypoint = 0 s, " +
                       std::to_string(distance_m) + " m, 0 m, 1 km\n";
    return parse_scenario(text);
}

}  // namespace

TEST_CASE("status names") {
    CHECK(to_string(DeliveryStatus::Decoded) == "decoded");
    CHECK(to_string(DeliveryStatus::HalfDuplexMiss) == "half_duplex_miss");
    CHECK(to_string(DeliveryStatus::SlotMismatch) == "slot_mismatch");
}

TEST_CASE("decode boundary") {
    const MCSEntry m{0, 10.0, 1.0};
    CHECK(decode(10.1, m));
    CHECK_FALSE(decode(9.9, m));
    CHECK(decode(10.0, m));
}

TEST_CASE("sinr examples") {
    const auto e = env({at(0, 0), at(1, 10e3), at(2, 20e3)});
    const auto f = compose_slot_format(1);
    const auto intended = tx_from(0, 10, 0, 2, f);
    CHECK(e.sinr_db(intended, {}, 1) == doctest::Approx(oracle_snr_db(10e3)).epsilon(1e-9));
    CHECK(e.sinr_db(intended, {}, 1) == doctest::Approx(21.97).epsilon(1e-3));

    const std::vector<TransmissionEvent> equal{tx_from(2, 10, 0, 2, f)};
    const double snr_lin = std::pow(10.0, oracle_snr_db(10e3) / 10.0);
    const double expected = -10.0 * std::log10(1.0 + 1.0 / snr_lin);
    CHECK(e.sinr_db(intended, equal, 1) == doctest::Approx(expected).epsilon(1e-9));

    const std::vector<TransmissionEvent> disjoint{tx_from(2, 10, 5, 2, f)};
    CHECK(e.sinr_db(intended, disjoint, 1) == doctest::Approx(oracle_snr_db(10e3)).epsilon(1e-12));

    const std::vector<TransmissionEvent> half_band{tx_from(2, 10, 1, 2, f)};
    const double half = -10.0 * std::log10(0.5 + 1.0 / snr_lin);
    CHECK(e.sinr_db(intended, half_band, 1) == doctest::Approx(half).epsilon(1e-9));

    const std::vector<TransmissionEvent> other_slot{tx_from(2, 30, 0, 2, f)};
    CHECK(e.sinr_db(intended, other_slot, 1) == doctest::Approx(oracle_snr_db(10e3)).epsilon(1e-12));
}

TEST_CASE("partial time overlap scales interference") {
    // Receiver co-located with the sender; the interferer sits half a slot
    // of delay away and leaks into the intended slot.
    const double d_int = 3.0e8 * 250e-6 * 0.5;
    const auto e = env({at(0, 0.0), at(1, 0.0), at(2, -d_int)}, 1, -200.0);
    const auto f = compose_slot_format(0);
    const auto intended = tx_from(0, 20, 0, 1, f);
    const std::vector<TransmissionEvent> early{tx_from(2, 19, 0, 1, f)};
    const double own = e.reception(intended, 1).rx_power_dbm;
    const double ipow = e.reception(early[0], 1).rx_power_dbm;
    // early occupies [19.5, 19.5 + 13/14]; intended occupies [20, 20 + 13/14].
    const double share = (19.5 + 13.0 / 14.0 - 20.0) / (13.0 / 14.0);
    const double noise = noise_floor_dbm(100e6, 8.0);
    const double expected =
        own - 10.0 * std::log10(std::pow(10.0, noise / 10.0) + share * std::pow(10.0, ipow / 10.0));
    CHECK(e.sinr_db(intended, early, 1) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("deliver examples") {
    const auto gap2 = guard_plan(SymbolGap{2});
    auto e = env({at(0, 0), at(1, 10e3)});
    auto out = e.deliver(tx_from(0, 8, 0, 1, gap2.format), 1, {}, {});
    CHECK(out.status == DeliveryStatus::Decoded);
    CHECK(out.rx_slot == 8);
    CHECK(out.symbol_offset == doctest::Approx(10e3 / guard_step_distance_m(Numerology(2))));

    const auto gap8 = guard_plan(SymbolGap{8});
    e = env({at(0, 0), at(1, 50e3)});
    out = e.deliver(tx_from(0, 8, 0, 1, gap8.format), 1, {}, {});
    CHECK(out.status == DeliveryStatus::SlotMismatch);
    CHECK(out.perceived_slot == 9);

    const auto inh = guard_plan(SlotInhibition{1});
    e = env({at(0, 0), at(1, 50e3)}, inh.inhibition_period);
    out = e.deliver(tx_from(0, 8, 0, 1, inh.format), 1, {}, {});
    CHECK(out.status == DeliveryStatus::Decoded);

    e = env({at(0, 0), at(1, 10e3)});
    out = e.deliver(tx_from(0, 8, 0, 1, gap2.format), 1, {}, {8});
    CHECK(out.status == DeliveryStatus::HalfDuplexMiss);

    e = env({at(0, 0), at(1, 200e3)});
    out = e.deliver(tx_from(0, 0, 0, 1, compose_slot_format(0)), 1, {}, {});
    CHECK(out.status == DeliveryStatus::SlotMismatch);
    e = env({at(0, 0), at(1, 130e3)}, 3);
    out = e.deliver(tx_from(0, 0, 0, 1, compose_slot_format(0)), 1, {}, {});
    CHECK(out.status == DeliveryStatus::BelowSensitivity);
}

TEST_CASE("guard edge is inclusive") {
    const auto num = Numerology(2);
    const auto gap2 = guard_plan(SymbolGap{2});
    auto e = env({at(0, 0), at(1, 2.0 * guard_step_distance_m(num))});
    CHECK(e.deliver(tx_from(0, 4, 0, 1, gap2.format), 1, {}, {}).status == DeliveryStatus::Decoded);
    e = env({at(0, 0), at(1, 2.0 * guard_step_distance_m(num) + 5.0)});
    CHECK(e.deliver(tx_from(0, 4, 0, 1, gap2.format), 1, {}, {}).status ==
          DeliveryStatus::SlotMismatch);
}

TEST_CASE("doppler gate") {
    const NodeKinematics fast{1, Trajectory({{0.0, {0, 0, 0}}, {10.0, {4000, 0, 0}}}), 0.0};
    const NodeKinematics slow{1, Trajectory({{0.0, {0, 0, 0}}, {10.0, {2000, 0, 0}}}), 0.0};
    const auto f = compose_slot_format(1);
    auto e = RadioEnvironment({at(0, -3000), fast}, LinkParams{}, GridConfig{}, 0.0, 0.1, true);
    CHECK(e.doppler_exceeded(0, 1, 1.0));
    CHECK(e.deliver(tx_from(0, 4000, 0, 1, f), 1, {}, {}).status == DeliveryStatus::DopplerFail);
    e = RadioEnvironment({at(0, -3000), fast}, LinkParams{}, GridConfig{}, 0.0, 0.1, false);
    CHECK(e.deliver(tx_from(0, 4000, 0, 1, f), 1, {}, {}).status != DeliveryStatus::DopplerFail);
    e = RadioEnvironment({at(0, -3000), slow}, LinkParams{}, GridConfig{}, 0.0, 0.1, true);
    CHECK_FALSE(e.doppler_exceeded(0, 1, 1.0));
}

TEST_CASE("collision on a shared sps resource") {
    // Two SPS states locked on one resource with keep probability 1.
    Rng rng(1);
    SpsState a;
    a.keep_probability = 1.0;
    a.rri_slots = 400;
    a.resource = ResourceId{10, 0, 1};
    SpsState b = a;
    const auto e = env({at(0, -5000), at(1, 5000), at(2, 0)}, 1, 0.0);
    const auto f = compose_slot_format(1);
    for (int k = 0; k < 60; ++k) {
        const auto oa = sps_on_packet(a, {}, rng);
        const auto ob = sps_on_packet(b, {}, rng);
        REQUIRE(oa.grant.has_value());
        REQUIRE(oa.grant == ob.grant);
        const std::vector<TransmissionEvent> both{tx_from(0, oa.grant->slot, 0, 1, f),
                                                  tx_from(1, ob.grant->slot, 0, 1, f)};
        CHECK(e.deliver(both[0], 2, both, {}).status == DeliveryStatus::Collision);
        CHECK(e.deliver(both[1], 2, both, {}).status == DeliveryStatus::Collision);
        a = oa.state;
        b = ob.state;
    }
}

TEST_CASE("zero nodes give an empty report") {
    auto cfg = parse_scenario("duration = 100 ms\n[link]\nsnr_min = 0 dB\n");
    const auto r = run(cfg, 1);
    CHECK(r.metrics.transmissions == 0);
    CHECK(r.metrics.total_outcomes() == 0);
    CHECK(r.events.empty());
    CHECK(r.metrics.overall_prr() == 1.0);
}

TEST_CASE("idle formation at 10 km") {
    const auto cfg = two_nodes(10e3, "guard_mode = symbol_gap\nguard_symbols = 2");
    const auto r = run(cfg, 3);
    CHECK(r.metrics.transmissions == 10);
    CHECK(r.metrics.count(DeliveryStatus::Decoded) == 10);
    CHECK(r.metrics.overall_prr() == 1.0);
    CHECK(r.metrics.count(DeliveryStatus::SlotMismatch) == 0);
    CHECK(r.metrics.allocation_failures == 0);
}

TEST_CASE("bystanders sense unicast traffic") {
    auto cfg = two_nodes(10e3, "guard_mode = symbol_gap\nguard_symbols = 2");
    cfg = parse_scenario(emit_scenario(cfg) + "[class.c]\nwaypoint = 0 s, 5 km, 0 m, 1 km\n",
                         {"class.a.destination=b"});
    const auto r = run(cfg, 3);
    CHECK(r.metrics.total_outcomes() == r.metrics.transmissions);
    for (const auto& e : r.events) {
        CHECK(e.receiver == 1);
    }
    CHECK(r.metrics.cbr(2) == doctest::Approx(r.metrics.cbr(1)));
    CHECK(r.metrics.cbr(2) > 0.0);
}

TEST_CASE("beyond the link budget") {
    LinkParams p;
    const double far = max_distance_m(p, 0.0) * 1.2;
    const auto cfg = two_nodes(far, "guard_mode = slot_inhibition\ninhibited_slots = 3");
    const auto r = run(cfg, 3);
    CHECK(r.metrics.transmissions > 0);
    CHECK(r.metrics.overall_prr() == 0.0);
    CHECK(r.metrics.count(DeliveryStatus::BelowSensitivity) == r.metrics.total_outcomes());
}

TEST_CASE("delay regimes in simulation") {
    auto r = run(two_nodes(50e3, "guard_mode = symbol_gap\nguard_symbols = 8"), 1);
    CHECK(r.metrics.count(DeliveryStatus::SlotMismatch) == r.metrics.transmissions);
    const auto gap_opportunities = r.metrics.nodes.at(0).tx_opportunities;

    r = run(two_nodes(50e3, "guard_mode = slot_inhibition\ninhibited_slots = 1"), 1);
    CHECK(r.metrics.overall_prr() == 1.0);
    CHECK(r.metrics.count(DeliveryStatus::SlotMismatch) == 0);
    CHECK(2 * r.metrics.nodes.at(0).tx_opportunities == gap_opportunities);

    r = run(two_nodes(50e3, "guard_mode = auto"), 1);
    CHECK(r.metrics.count(DeliveryStatus::SlotMismatch) == 0);
    CHECK(std::holds_alternative<SlotInhibition>(r.mode));
}

TEST_CASE("swarm run conserves outcomes") {
    const auto cfg = load_scenario(testing::scenario_path("octagon-swarm.scn"));
    const auto r = run(cfg, 11);
    // Count eligible receivers per sender from the class layout.
    std::map<NodeId, std::uint64_t> per_sender;
    for (const auto& ev : r.events) ++per_sender[ev.sender];
    std::map<NodeId, std::uint64_t> eligible{{0, 3}};
    for (NodeId v = 1; v <= 4; ++v) eligible[v] = 1;
    for (NodeId c = 5; c <= 7; ++c) eligible[c] = 7;
    for (const auto& [id, tally] : r.metrics.nodes) {
        CHECK(per_sender[id] == tally.transmissions * eligible[id]);
    }
    CHECK(r.metrics.total_outcomes() == r.events.size());
    for (const auto& [key, t] : r.metrics.links) {
        CHECK(t.decoded <= t.attempted);
    }
    for (const auto& [bin, t] : r.metrics.prr_bins) {
        CHECK(r.metrics.prr(bin) >= 0.0);
        CHECK(r.metrics.prr(bin) <= 1.0);
    }
    for (const auto& [id, t] : r.metrics.nodes) {
        CHECK(r.metrics.cbr(id) >= 0.0);
        CHECK(r.metrics.cbr(id) <= 1.0);
    }
    CHECK(r.metrics.count(DeliveryStatus::SlotMismatch) == 0);
}

TEST_CASE("runs are deterministic") {
    const auto cfg = load_scenario(testing::scenario_path("octagon-swarm.scn"));
    std::ostringstream m1, m2, e1, e2;
    const auto a = run(cfg, 5);
    const auto b = run(cfg, 5);
    a.metrics.write_csv(m1);
    b.metrics.write_csv(m2);
    write_events_csv(e1, a.events);
    write_events_csv(e2, b.events);
    CHECK(m1.str() == m2.str());
    CHECK(e1.str() == e2.str());
    const auto c = run(cfg, 6);
    std::ostringstream e3;
    write_events_csv(e3, c.events);
    CHECK(e3.str() != e1.str());
}

TEST_CASE("report merge is associative and sweep matches serial") {
    const auto cfg = load_scenario(testing::scenario_path("octagon-swarm.scn"));
    const auto a = run(cfg, 1).metrics;
    const auto b = run(cfg, 2).metrics;
    const auto c = run(cfg, 3).metrics;
    auto left = a;
    left.merge(b);
    left.merge(c);
    auto bc = b;
    bc.merge(c);
    auto right = a;
    right.merge(bc);
    CHECK(left == right);
    auto swapped = c;
    swapped.merge(a);
    swapped.merge(b);
    CHECK(swapped == left);

    const auto sweep = run_sweep(cfg, 1, 3, 2);
    CHECK(sweep == left);
}

TEST_CASE("csv schemas") {
    const auto r = run(two_nodes(10e3, "guard_mode = auto"), 2);
    std::ostringstream m, e;
    r.metrics.write_csv(m);
    write_events_csv(e, r.events);
    CHECK(m.str().starts_with("metric,bin,value\npackets,all,10\n"));
    CHECK(m.str().find("prr,0-10km,1.000000") == std::string::npos);
    CHECK(m.str().find("prr,10-20km,1.000000") != std::string::npos);
    CHECK(e.str().starts_with("slot,tx,rx,status,sinr_db,distance_m\n"));
    CHECK(e.str().find(",0,1,decoded,") != std::string::npos);
}

TEST_CASE("invalid scenarios are rejected before running") {
    auto cfg = two_nodes(10e3, "guard_mode = auto");
    cfg.classes[0].mac.keep_probability = 0.95;
    CHECK_THROWS_AS(run(cfg, 1), ConfigError);
}
