#ifndef A2ASL_FIGURES_HPP
#define A2ASL_FIGURES_HPP

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "a2asl/linkbudget.hpp"
#include "a2asl/phy_grid.hpp"

namespace a2asl {

enum class Figure { RxPower, MaxDist, Doppler, Guard };

std::optional<Figure> parse_figure(std::string_view name);

/// x-axis of a sweep: from, from + step, ... up to `to` inclusive, or the
/// explicit `at` list when it is non-empty.
struct Sweep {
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
    std::vector<double> at;

    std::vector<double> points() const;
};

Sweep default_sweep(Figure fig);

struct FigureOptions {
    Sweep sweep;
    LinkParams link;                  // base parameters (Table-style defaults)
    double scs_hz = 60e3;             // doppler threshold
    double tolerable_fraction = 0.10;
    int numerology = 2;               // guard
    int max_guard = kDefaultMaxGuardSymbols;
    std::optional<double> switch_distance_m;
};

/// rxpower: curve,distance_km,power_dbm
///   rx_6GHz / rx_3GHz / rx_2GHz received power, and prmin_0dB / prmin_5dB /
///   prmin_10dB minimum-power lines at the base bandwidth.
/// maxdist: bandwidth_mhz,snr_min_db,max_distance_km for B = 100, 50, 10 MHz.
/// doppler: speed_mps,doppler_khz,threshold_khz,within_threshold
/// guard:   distance_km,delay_us,guard_symbols,mode,inhibited_slots
void write_figure(Figure fig, const FigureOptions& opts, std::ostream& out);

}  // namespace a2asl

#endif
