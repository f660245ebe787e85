#ifndef A2ASL_LINKBUDGET_HPP
#define A2ASL_LINKBUDGET_HPP

#include <span>

namespace a2asl {

/// Physical constants used throughout the toolkit. The values are the ones
/// that reproduce the published link-budget curves (c is the rounded 3e8,
/// not 299792458).
struct PhysConstants {
    static constexpr double c = 3.0e8;     // m/s
    static constexpr double k = 1.38e-23;  // J/K
    static constexpr double t0 = 290.0;    // K
};

/// Transmitter/receiver chain parameters. Defaults are the reference A2A
/// link: 40 dBm, 12 dBi at both ends, 6 GHz, 100 MHz, 8 dB noise figure.
struct LinkParams {
    double tx_power_dbm = 40.0;
    double tx_gain_dbi = 12.0;
    double rx_gain_dbi = 12.0;
    double carrier_freq_ghz = 6.0;
    double bandwidth_hz = 100e6;
    double noise_figure_db = 8.0;

    /// Throws std::domain_error when a field is out of range.
    void validate() const;
};

struct MCSEntry {
    int index = 0;
    double snr_min_db = 0.0;
    double spectral_efficiency = 0.0;  // bits/s/Hz, informational
};

/// Default MCS -> minimum SNR table (indexes 0..28, 64QAM MCS table).
///
/// Spectral efficiencies are the standard table values. The SNR thresholds
/// are an AWGN approximation: Shannon bound for the spectral efficiency plus
/// a 2.5 dB implementation gap, rounded to 0.1 dB and made non-decreasing.
/// Scenario files may bypass the table with an explicit snr_min.
std::span<const MCSEntry> default_mcs_table();

/// Looks up an entry of the default table; throws std::out_of_range.
const MCSEntry& mcs_entry(int index);

/// Free-space path loss 20*log10(4*pi*d*f/c). The commonly quoted
/// "32.4 + 20log10(d_m) + 20log10(f_GHz)" form is this expression with the
/// constant rounded from 32.4418.
double path_loss_db(double distance_m, double carrier_freq_ghz);

double received_power_dbm(const LinkParams& params, double distance_m);

/// Thermal noise 10*log10(k*T0*B) in dBm plus the receiver noise figure.
double noise_floor_dbm(double bandwidth_hz, double noise_figure_db);

double min_received_power_dbm(double snr_min_db, double bandwidth_hz, double noise_figure_db);

/// Distance at which the received power falls to the minimum required power
/// for snr_min_db. Closed-form inversion of the free-space loss.
double max_distance_m(const LinkParams& params, double snr_min_db);

}  // namespace a2asl

#endif
