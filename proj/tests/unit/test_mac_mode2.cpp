#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "a2asl/errors.hpp"
#include "a2asl/mac_mode2.hpp"
#include "exclusion_oracle.hpp"

using namespace a2asl;

namespace {

SelectionWindow window(std::int64_t first, std::int64_t last, int subch, int total, int period = 1) {
    SelectionWindow w;
    w.first_slot = first;
    w.last_slot = last;
    w.subchannel_count = subch;
    w.num_subchannels = total;
    w.inhibition_period = period;
    return w;
}

SciReservation sci(std::int64_t slot, int sub, std::int64_t rri, double rsrp) {
    return {1, {slot, sub, 1}, rri, rsrp, 0};
}

}  // namespace

TEST_CASE("selection window") {
    GridConfig g;
    g.num_subchannels = 4;
    const auto w = SelectionWindow::from_generation(100, 1e-3, 4e-3, 2, g);
    CHECK(w.first_slot == 104);
    CHECK(w.last_slot == 116);
    CHECK(w.candidates().size() == 13 * 3);
    CHECK_THROWS_AS(SelectionWindow::from_generation(0, 0.0, 4e-3, 1, g), ConfigError);
    CHECK_THROWS_AS(SelectionWindow::from_generation(0, 4e-3, 1e-3, 1, g), ConfigError);
    CHECK_THROWS_AS(SelectionWindow::from_generation(0, 1e-3, 4e-3, 5, g), ConfigError);

    auto blocked = w;
    blocked.blocked_slots = {104, 110};
    CHECK(blocked.candidates().size() == 11 * 3);
    g.inhibition_period = 2;
    CHECK(SelectionWindow::from_generation(100, 1e-3, 4e-3, 2, g).candidates().size() == 7 * 3);
}

TEST_CASE("sensing history eviction") {
    SensingHistory h(100);
    auto a = sci(10, 0, 0, -90.0);
    a.heard_at_slot = 10;
    auto b = sci(60, 0, 0, -90.0);
    b.heard_at_slot = 60;
    h.add(a);
    h.add(b);
    h.record_own_tx(20);
    h.record_own_tx(80);
    h.evict(150);
    CHECK(h.entries().size() == 1);
    CHECK(h.entries().front().heard_at_slot == 60);
    CHECK(h.own_tx_slots() == std::set<std::int64_t>{80});
}

TEST_CASE("projection examples") {
    SensingHistory h;
    const auto w = window(1000, 1799, 1, 1);
    CHECK(project_reservations(h, w).empty());

    h.add(sci(900, 0, 400, -80.0));
    auto p = project_reservations(h, w);
    REQUIRE(p.size() == 2);
    CHECK(p[0].resource.slot == 1300);
    CHECK(p[1].resource.slot == 1700);
    CHECK(p[0].rsrp_dbm == -80.0);

    SensingHistory before;
    before.add(sci(500, 0, 0, -80.0));
    CHECK(project_reservations(before, w).empty());

    SensingHistory single;
    single.add(sci(1200, 0, 0, -80.0));
    CHECK(project_reservations(single, w).size() == 1);
}

TEST_CASE("projection matches enumeration") {
    Rng rng(11);
    std::uniform_int_distribution<std::int64_t> slot(0, 3000);
    std::uniform_int_distribution<std::int64_t> rri(0, 5);
    for (int i = 0; i < 300; ++i) {
        SensingHistory h;
        const auto w = window(slot(rng), 0, 1, 1);
        auto win = w;
        win.last_slot = win.first_slot + 400;
        const auto r = sci(slot(rng), 0, rri(rng) * 100, -70.0);
        h.add(r);
        std::size_t expected = 0;
        for (auto s = win.first_slot; s <= win.last_slot; ++s) {
            if (r.rri_slots == 0 ? s == r.reserved.slot
                                 : (s >= r.reserved.slot && (s - r.reserved.slot) % r.rri_slots == 0)) {
                ++expected;
            }
        }
        CHECK(project_reservations(h, win).size() == expected);
    }
}

TEST_CASE("exclusion examples") {
    ExclusionConfig cfg;
    const auto w = window(0, 9, 1, 1);
    auto r = exclude(w, {}, cfg);
    CHECK(r.available.size() == 10);
    CHECK(r.escalations == 0);

    std::vector<ProjectedReservation> all_busy;
    for (const auto& c : w.candidates()) all_busy.push_back({c, -60.0});
    r = exclude(w, all_busy, cfg);
    CHECK(r.escalations == 22);
    CHECK(r.final_threshold_dbm == doctest::Approx(-60.0));
    CHECK(r.available.size() == 10);

    r = exclude(w, std::vector<ProjectedReservation>{{{4, 0, 1}, -100.0}}, cfg);
    CHECK(r.available.size() == 9);
    CHECK(r.escalations == 0);

    auto empty = window(5, 4, 1, 1);
    CHECK_THROWS_AS(exclude(empty, {}, cfg), ConfigError);
    cfg.threshold_step_db = 0.0;
    CHECK_THROWS_AS(exclude(w, {}, cfg), ConfigError);
}

TEST_CASE("half duplex slots are never available") {
    ExclusionConfig cfg;
    cfg.half_duplex_periods_slots = {100};
    const auto w = window(1000, 1009, 1, 2);
    const std::set<std::int64_t> own{800, 900, 1003};
    const auto r = exclude(w, {}, cfg, own);
    for (const auto& c : r.available) {
        CHECK(c.slot != 1000);
        CHECK(c.slot != 1003);
    }
    CHECK(r.available.size() == 16);

    cfg.half_duplex_periods_slots = {3};
    const auto short_period = exclude(w, {}, cfg, {995});
    std::set<std::int64_t> slots;
    for (const auto& c : short_period.available) slots.insert(c.slot);
    CHECK(slots == std::set<std::int64_t>{1000, 1002, 1003, 1005, 1006, 1008, 1009});
}

TEST_CASE("exclusion oracle equivalence") {
    Rng rng(2024);
    std::uniform_int_distribution<int> subs(1, 4);
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<int> nres(0, 10);
    std::uniform_real_distribution<double> rsrp(-130.0, -50.0);
    std::uniform_real_distribution<double> ratio(0.05, 1.0);
    std::uniform_int_distribution<int> period(1, 2);
    for (int trial = 0; trial < 1000; ++trial) {
        const int total = subs(rng);
        std::uniform_int_distribution<int> width(1, total);
        auto w = window(100, 100 + len(rng) - 1, width(rng), total, period(rng));
        if (w.candidates().empty() || w.candidates().size() > 40) {
            continue;
        }
        ExclusionConfig cfg{rsrp(rng), 1.0 + 4.0 * ratio(rng), ratio(rng), {}};
        std::set<std::int64_t> own;
        if (trial % 3 == 0) {
            cfg.half_duplex_periods_slots = {3, 20};
            own = {91, 95, static_cast<std::int64_t>(100 + trial % 7)};
        }
        std::vector<ProjectedReservation> proj;
        const int n = nres(rng);
        const auto cands = w.candidates();
        std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
        for (int i = 0; i < n; ++i) {
            ResourceId r = cands[pick(rng)];
            r.subchannel_count = 1;
            proj.push_back({r, rsrp(rng)});
        }
        const auto got = exclude(w, proj, cfg, own).available;
        const auto want = testing::brute_force_exclude(w, proj, cfg, own);
        CHECK(std::set<ResourceId>(got.begin(), got.end()) ==
              std::set<ResourceId>(want.begin(), want.end()));
        CHECK(got.size() == want.size());
    }
}

TEST_CASE("escalation soundness and threshold monotonicity") {
    Rng rng(99);
    std::uniform_real_distribution<double> rsrp(-130.0, -40.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto w = window(0, 19, 1, 2);
        const auto cands = w.candidates();
        std::vector<ProjectedReservation> proj;
        for (const auto& c : cands) {
            if (rng() % 3 != 0) proj.push_back({c, rsrp(rng)});
        }
        ExclusionConfig cfg;
        cfg.rsrp_threshold_init_dbm = rsrp(rng);
        const auto r = exclude(w, proj, cfg);
        double top = -INFINITY;
        for (const auto& p : proj) top = std::max(top, p.rsrp_dbm);
        CHECK((r.available.size() >= cfg.min_available_ratio * cands.size() ||
               r.final_threshold_dbm >= top));
        auto higher = cfg;
        higher.rsrp_threshold_init_dbm += 5.0;
        CHECK(exclude(w, proj, higher).available.size() >= r.available.size());
    }
}

TEST_CASE("uniform selection") {
    Rng rng(5);
    std::vector<ResourceId> one{{7, 2, 1}};
    CHECK(select_resource(one, rng) == one.front());
    CHECK_FALSE(select_resource(std::vector<ResourceId>{}, rng).has_value());

    std::vector<ResourceId> set;
    for (int i = 0; i < 100; ++i) set.push_back({i, 0, 1});
    std::vector<int> counts(100, 0);
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        ++counts[static_cast<std::size_t>(select_resource(set, rng)->slot)];
    }
    const double sigma = std::sqrt(trials * 0.01 * 0.99);
    double chi2 = 0.0;
    for (int c : counts) {
        CHECK(std::abs(c - 1000.0) <= 5.0 * sigma);
        chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    }
    CHECK(chi2 < 134.642);  // chi-square 99th percentile, 99 dof

    Rng a(123), b(123);
    CHECK(select_resource(set, a) == select_resource(set, b));
}

TEST_CASE("sps examples") {
    Rng rng(3);
    const ResourceId r{40, 1, 1};
    SpsState s;
    s.rri_slots = 400;
    s.resource = r;
    s.reselection_counter = 3;
    auto out = sps_on_packet(s, {}, rng);
    CHECK(out.decision == SpsDecision::Reuse);
    CHECK(out.grant == r);
    CHECK(out.state.reselection_counter == 2);
    CHECK(out.state.resource->slot == 440);

    std::vector<ResourceId> fresh;
    for (int i = 0; i < 20; ++i) fresh.push_back({50 + i, 0, 1});
    s.reselection_counter = 0;
    s.keep_probability = 0.0;
    for (int i = 0; i < 200; ++i) {
        out = sps_on_packet(s, fresh, rng);
        CHECK(out.decision == SpsDecision::Reselect);
        CHECK(out.grant != r);
        CHECK(out.state.reselection_counter >= 5);
        CHECK(out.state.reselection_counter <= 15);
    }

    s.keep_probability = 1.0;
    out = sps_on_packet(s, fresh, rng);
    CHECK(out.decision == SpsDecision::Keep);
    CHECK(out.grant == r);
    CHECK(out.counter_drawn.has_value());

    SpsState initial;
    out = sps_on_packet(initial, fresh, rng);
    CHECK(out.decision == SpsDecision::Initial);
    CHECK(out.grant.has_value());

    out = sps_on_packet(initial, {}, rng);
    CHECK_FALSE(out.grant.has_value());
    CHECK_FALSE(out.state.resource.has_value());
}

TEST_CASE("sps keep fraction and counter distribution") {
    for (double p : {0.0, 0.4, 0.8}) {
        Rng rng(static_cast<std::uint64_t>(p * 1000) + 17);
        SpsState s;
        s.keep_probability = p;
        s.resource = ResourceId{0, 0, 1};
        const std::vector<ResourceId> fresh{{1, 0, 1}, {2, 0, 1}};
        const int n = 20000;
        int keeps = 0;
        std::map<int, int> counters;
        for (int i = 0; i < n; ++i) {
            const auto out = sps_on_packet(s, fresh, rng);
            keeps += out.decision == SpsDecision::Keep ? 1 : 0;
            ++counters[*out.counter_drawn];
        }
        const double phat = static_cast<double>(keeps) / n;
        const double half = 2.5758 * std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(phat - p) <= half);
        CHECK(counters.size() == 11);
        double chi2 = 0.0;
        for (int c = 5; c <= 15; ++c) {
            const double e = n / 11.0;
            chi2 += (counters[c] - e) * (counters[c] - e) / e;
        }
        CHECK(chi2 < 23.209);
    }
}

TEST_CASE("sps reuse periodicity") {
    Rng rng(8);
    SpsState s;
    s.rri_slots = 400;
    s.keep_probability = 0.5;
    std::int64_t gen = 0;
    std::optional<ResourceId> last;
    for (int i = 0; i < 500; ++i, gen += 400) {
        std::vector<ResourceId> fresh;
        for (int k = 4; k <= 16; ++k) fresh.push_back({gen + k, static_cast<int>(rng() % 3), 1});
        const auto out = sps_on_packet(s, fresh, rng);
        REQUIRE(out.grant.has_value());
        if (out.decision == SpsDecision::Reuse || out.decision == SpsDecision::Keep) {
            REQUIRE(last.has_value());
            CHECK(out.grant->slot - last->slot == 400);
            CHECK(out.grant->subchannel_start == last->subchannel_start);
        }
        last = out.grant;
        s = out.state;
    }
}

TEST_CASE("dynamic scheduling") {
    const auto w = window(10, 14, 1, 2);
    ExclusionConfig cfg;
    SensingHistory idle;
    std::set<ResourceId> seen;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        Rng rng(seed);
        const auto g = ds_on_packet(w, idle, cfg, rng);
        REQUIRE(g.has_value());
        seen.insert(*g);
    }
    CHECK(seen.size() == w.candidates().size());

    Rng rng(1);
    const auto first = ds_on_packet(w, idle, cfg, rng);
    const auto second = ds_on_packet(w, idle, cfg, rng);
    CHECK(first.has_value());
    CHECK(second.has_value());

    SensingHistory jammed(10000);
    for (std::int64_t s = 10; s <= 14; ++s) jammed.record_own_tx(s);
    CHECK_FALSE(ds_on_packet(w, jammed, cfg, rng).has_value());
}
