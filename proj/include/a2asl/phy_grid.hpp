#ifndef A2ASL_PHY_GRID_HPP
#define A2ASL_PHY_GRID_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace a2asl {

inline constexpr int kSymbolsPerSlot = 14;
inline constexpr int kMinPsschSymbols = 5;
inline constexpr int kMaxPsschSymbols = 12;
/// 14 - 1 AGC - 5 minimum PSSCH.
inline constexpr int kDefaultMaxGuardSymbols = 8;

/// NR numerology: SCS = 15 kHz * 2^mu, slot = 1 ms / 2^mu, 14 symbols per slot.
/// Symbols are a uniform 14-way split of the slot (cyclic prefixes folded in).
class Numerology {
public:
    /// Throws std::domain_error unless mu is 0..3.
    explicit Numerology(int mu = 2);

    int mu() const { return mu_; }
    double scs_hz() const { return 15e3 * static_cast<double>(1 << mu_); }
    double slot_duration_s() const { return 1e-3 / static_cast<double>(1 << mu_); }
    double symbol_duration_s() const { return slot_duration_s() / kSymbolsPerSlot; }
    int symbols_per_slot() const { return kSymbolsPerSlot; }

    friend bool operator==(const Numerology&, const Numerology&) = default;

private:
    int mu_;
};

/// Symbol budget of one sidelink slot. PSCCH is multiplexed inside the PSSCH
/// symbols, so agc + pssch + guard always equals 14.
struct SlotFormat {
    int agc_symbols = 1;
    int pscch_symbols = 3;
    int pssch_symbols = 12;
    int guard_symbols = 1;

    /// Symbols carrying energy (AGC + PSSCH), counted from the slot start.
    int occupied_symbols() const { return agc_symbols + pssch_symbols; }
    int extra_guard() const { return guard_symbols - 1; }

    friend bool operator==(const SlotFormat&, const SlotFormat&) = default;
};

/// Thrown by compose_slot_format when the requested guard does not fit in a
/// slot; the caller has to fall back to slot inhibition.
class SlotInhibitionRequired : public std::domain_error {
public:
    explicit SlotInhibitionRequired(int extra_guard)
        : std::domain_error("extra guard of " + std::to_string(extra_guard) +
                            " symbols exceeds one slot; slot inhibition required") {}
};

/// extra_guard in [0, 7]. Negative values throw std::domain_error, values
/// above 7 throw SlotInhibitionRequired.
SlotFormat compose_slot_format(int extra_guard);

struct GridConfig {
    Numerology numerology{2};
    int num_subchannels = 13;
    int subchannel_size_prb = 10;  // informational
    /// One usable slot every inhibition_period slots; 1 disables inhibition.
    int inhibition_period = 1;

    void validate() const;
};

struct ResourceId {
    std::int64_t slot = 0;
    int subchannel_start = 0;
    int subchannel_count = 1;

    int subchannel_end() const { return subchannel_start + subchannel_count; }
    bool overlaps(const ResourceId& other) const {
        return slot == other.slot && subchannel_start < other.subchannel_end() &&
               other.subchannel_start < subchannel_end();
    }

    friend auto operator<=>(const ResourceId&, const ResourceId&) = default;
};

/// True iff slot_index is the transmit slot of its inhibition period.
bool usable_slot(std::int64_t slot_index, const GridConfig& grid);

/// distance / c.
double propagation_delay_s(double distance_m);

/// ceil(propagation delay / symbol duration). Ratios within 1e-9 of an
/// integer are treated as that integer so exact multiples of the step
/// distance do not round up on floating-point noise.
int guard_symbols_needed(double distance_m, const Numerology& num);

/// Distance covered by light in one symbol (5.357 km at mu = 2).
double guard_step_distance_m(const Numerology& num);

struct SymbolGap {
    int guard_symbols = 0;
    friend bool operator==(const SymbolGap&, const SymbolGap&) = default;
};

struct SlotInhibition {
    int inhibited_slots = 1;
    friend bool operator==(const SlotInhibition&, const SlotInhibition&) = default;
};

using AllocationMode = std::variant<SymbolGap, SlotInhibition>;

std::string to_string(const AllocationMode& mode);

/// Distance at which the in-slot guard runs out: max_guard symbols of delay.
/// 42.857 km for mu = 2 and 8 guard symbols.
double mode_switch_distance_m(const Numerology& num, int max_guard = kDefaultMaxGuardSymbols);

/// SymbolGap(n) while n = guard_symbols_needed(d) fits in max_guard (or, when
/// switch_distance_m is given, while d <= switch_distance_m); otherwise
/// SlotInhibition(k) with k = ceil(delay / slot duration) listening slots.
AllocationMode allocation_mode(double distance_m, const Numerology& num,
                               int max_guard = kDefaultMaxGuardSymbols,
                               std::optional<double> switch_distance_m = std::nullopt);

/// Slot format and inhibition period that realise an allocation mode.
/// SymbolGap(n) keeps every slot and widens the trailing guard to max(n, 1)
/// symbols; SlotInhibition(k) keeps the baseline format and uses one slot in
/// k + 1.
struct GuardPlan {
    SlotFormat format;
    int inhibition_period = 1;
};

GuardPlan guard_plan(const AllocationMode& mode);

struct ArrivalTiming {
    std::int64_t rx_slot = 0;
    double symbol_offset = 0.0;  // fractional symbols into rx_slot
};

/// Arrival of a transmission that starts at the boundary of tx_slot.
/// clock_shift_s is (tx clock offset - rx clock offset): a positive value
/// means the transmitter's slots start later than the receiver's.
ArrivalTiming arrival_slot_and_offset(std::int64_t tx_slot, double distance_m,
                                      const Numerology& num, double clock_shift_s = 0.0);

}  // namespace a2asl

#endif
