#include "a2asl/phy_grid.hpp"

#include <algorithm>
#include <cmath>

#include "a2asl/errors.hpp"
#include "a2asl/linkbudget.hpp"

namespace a2asl {

namespace {

constexpr double kRatioEps = 1e-9;

int ceil_tolerant(double ratio) {
    return static_cast<int>(std::ceil(ratio - kRatioEps));
}

}  // namespace

Numerology::Numerology(int mu) : mu_(mu) {
    if (mu < 0 || mu > 3) {
        throw std::domain_error("numerology mu must be 0..3, got " + std::to_string(mu));
    }
}

SlotFormat compose_slot_format(int extra_guard) {
    if (extra_guard < 0) {
        throw std::domain_error("extra guard symbols cannot be negative");
    }
    if (extra_guard > kMaxPsschSymbols - kMinPsschSymbols) {
        throw SlotInhibitionRequired(extra_guard);
    }
    SlotFormat f;
    f.agc_symbols = 1;
    f.pssch_symbols = kMaxPsschSymbols - extra_guard;
    f.pscch_symbols = std::min(3, f.pssch_symbols);
    f.guard_symbols = 1 + extra_guard;
    return f;
}

void GridConfig::validate() const {
    if (num_subchannels < 1) {
        throw ConfigError("grid needs at least one subchannel");
    }
    if (inhibition_period < 1) {
        throw ConfigError("inhibition period must be at least 1 slot");
    }
}

bool usable_slot(std::int64_t slot_index, const GridConfig& grid) {
    return slot_index % grid.inhibition_period == 0;
}

double propagation_delay_s(double distance_m) { return distance_m / PhysConstants::c; }

int guard_symbols_needed(double distance_m, const Numerology& num) {
    if (distance_m <= 0.0) {
        return 0;
    }
    return ceil_tolerant(propagation_delay_s(distance_m) / num.symbol_duration_s());
}

double guard_step_distance_m(const Numerology& num) {
    return num.symbol_duration_s() * PhysConstants::c;
}

std::string to_string(const AllocationMode& mode) {
    if (const auto* gap = std::get_if<SymbolGap>(&mode)) {
        return "symbol_gap(" + std::to_string(gap->guard_symbols) + ")";
    }
    return "slot_inhibition(" + std::to_string(std::get<SlotInhibition>(mode).inhibited_slots) +
           ")";
}

double mode_switch_distance_m(const Numerology& num, int max_guard) {
    return max_guard * guard_step_distance_m(num);
}

AllocationMode allocation_mode(double distance_m, const Numerology& num, int max_guard,
                               std::optional<double> switch_distance_m) {
    if (max_guard < 1 || max_guard > kSymbolsPerSlot - 1 - kMinPsschSymbols + 1) {
        throw std::domain_error("max_guard must be 1..9");
    }
    const int needed = guard_symbols_needed(distance_m, num);
    const bool fits = switch_distance_m ? distance_m <= *switch_distance_m && needed <= max_guard
                                        : needed <= max_guard;
    if (fits) {
        return SymbolGap{needed};
    }
    const int slots =
        std::max(1, ceil_tolerant(propagation_delay_s(distance_m) / num.slot_duration_s()));
    return SlotInhibition{slots};
}

GuardPlan guard_plan(const AllocationMode& mode) {
    if (const auto* gap = std::get_if<SymbolGap>(&mode)) {
        return {compose_slot_format(std::max(gap->guard_symbols, 1) - 1), 1};
    }
    return {compose_slot_format(0), std::get<SlotInhibition>(mode).inhibited_slots + 1};
}

ArrivalTiming arrival_slot_and_offset(std::int64_t tx_slot, double distance_m,
                                      const Numerology& num, double clock_shift_s) {
    // Work in slot units relative to tx_slot to keep absolute-time rounding out.
    const double shift_slots =
        (propagation_delay_s(distance_m) + clock_shift_s) / num.slot_duration_s();
    const double whole = std::floor(shift_slots + kRatioEps);
    const double frac = std::max(0.0, shift_slots - whole);
    return {tx_slot + static_cast<std::int64_t>(whole), frac * kSymbolsPerSlot};
}

}  // namespace a2asl
