#include "a2asl/figures.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <variant>

#include "a2asl/mobility.hpp"

namespace a2asl {

std::optional<Figure> parse_figure(std::string_view name) {
    if (name == "rxpower") return Figure::RxPower;
    if (name == "maxdist") return Figure::MaxDist;
    if (name == "doppler") return Figure::Doppler;
    if (name == "guard") return Figure::Guard;
    return std::nullopt;
}

std::vector<double> Sweep::points() const {
    if (!at.empty()) {
        return at;
    }
    std::vector<double> xs;
    if (!(step > 0.0) || to < from) {
        return xs;
    }
    const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
        xs.push_back(from + static_cast<double>(i) * step);
    }
    return xs;
}

Sweep default_sweep(Figure fig) {
    switch (fig) {
        case Figure::RxPower: return {0.001, 150.0, 0.5, {}};   // km
        case Figure::MaxDist: return {0.0, 20.0, 0.1, {}};      // dB
        case Figure::Doppler: return {0.0, 800.0, 10.0, {}};    // m/s
        case Figure::Guard: return {0.0, 150.0, 0.1, {}};       // km
    }
    return {};
}

namespace {

void rxpower(const FigureOptions& o, std::ostream& out) {
    out << "curve,distance_km,power_dbm\n";
    const auto xs = o.sweep.points();
    for (double ghz : {6.0, 3.0, 2.0}) {
        LinkParams p = o.link;
        p.carrier_freq_ghz = ghz;
        for (double km : xs) {
            out << fmt::format("rx_{}GHz,{:.6f},{:.6f}\n", ghz, km, received_power_dbm(p, km * 1e3));
        }
    }
    for (double snr : {0.0, 5.0, 10.0}) {
        const double line =
            min_received_power_dbm(snr, o.link.bandwidth_hz, o.link.noise_figure_db);
        for (double km : xs) {
            out << fmt::format("prmin_{}dB,{:.6f},{:.6f}\n", snr, km, line);
        }
    }
}

void maxdist(const FigureOptions& o, std::ostream& out) {
    out << "bandwidth_mhz,snr_min_db,max_distance_km\n";
    for (double mhz : {100.0, 50.0, 10.0}) {
        LinkParams p = o.link;
        p.bandwidth_hz = mhz * 1e6;
        for (double snr : o.sweep.points()) {
            out << fmt::format("{},{:.6f},{:.6f}\n", mhz, snr, max_distance_m(p, snr) / 1e3);
        }
    }
}

void doppler(const FigureOptions& o, std::ostream& out) {
    out << "speed_mps,doppler_khz,threshold_khz,within_threshold\n";
    const double threshold = o.tolerable_fraction * o.scs_hz;
    for (double v : o.sweep.points()) {
        const double shift = doppler_shift_hz(v, o.link.carrier_freq_ghz * 1e9);
        out << fmt::format("{:.6f},{:.6f},{:.6f},{}\n", v, shift / 1e3, threshold / 1e3,
                           shift <= threshold ? 1 : 0);
    }
}

void guard(const FigureOptions& o, std::ostream& out) {
    out << "distance_km,delay_us,guard_symbols,mode,inhibited_slots\n";
    const Numerology num(o.numerology);
    for (double km : o.sweep.points()) {
        const double d = km * 1e3;
        const auto mode = allocation_mode(d, num, o.max_guard, o.switch_distance_m);
        const bool gap = std::holds_alternative<SymbolGap>(mode);
        out << fmt::format("{:.6f},{:.6f},{},{},{}\n", km, propagation_delay_s(d) * 1e6,
                           guard_symbols_needed(d, num), gap ? "symbol_gap" : "slot_inhibition",
                           gap ? 0 : std::get<SlotInhibition>(mode).inhibited_slots);
    }
}

}  // namespace

void write_figure(Figure fig, const FigureOptions& opts, std::ostream& out) {
    switch (fig) {
        case Figure::RxPower: rxpower(opts, out); break;
        case Figure::MaxDist: maxdist(opts, out); break;
        case Figure::Doppler: doppler(opts, out); break;
        case Figure::Guard: guard(opts, out); break;
    }
}

}  // namespace a2asl
