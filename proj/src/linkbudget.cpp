#include "a2asl/linkbudget.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace a2asl {

namespace {

constexpr std::array<MCSEntry, 29> kMcsTable{{
    {0, -5.0, 0.2344},  {1, -3.8, 0.3066},  {2, -2.7, 0.3770},  {3, -1.4, 0.4902},
    {4, -0.4, 0.6016},  {5, 0.8, 0.7402},   {6, 1.7, 0.8770},   {7, 2.7, 1.0273},
    {8, 3.5, 1.1758},   {9, 4.3, 1.3262},   {10, 4.3, 1.3281},  {11, 5.0, 1.4766},
    {12, 6.0, 1.6953},  {13, 6.9, 1.9141},  {14, 7.9, 2.1602},  {15, 8.8, 2.4063},
    {16, 9.4, 2.5703},  {17, 9.4, 2.5664},  {18, 10.0, 2.7305}, {19, 11.1, 3.0293},
    {20, 12.0, 3.3223}, {21, 13.0, 3.6094}, {22, 13.9, 3.9023}, {23, 14.9, 4.2129},
    {24, 15.9, 4.5234}, {25, 16.8, 4.8164}, {26, 17.8, 5.1152}, {27, 18.4, 5.3320},
    {28, 19.1, 5.5547},
}};

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::domain_error(std::string(what) + " must be finite");
    }
}

}  // namespace

void LinkParams::validate() const {
    require_finite(tx_power_dbm, "tx_power");
    require_finite(tx_gain_dbi, "tx_gain");
    require_finite(rx_gain_dbi, "rx_gain");
    require_finite(noise_figure_db, "noise_figure");
    if (!(carrier_freq_ghz > 0.0) || !std::isfinite(carrier_freq_ghz)) {
        throw std::domain_error("carrier frequency must be positive");
    }
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
        throw std::domain_error("bandwidth must be positive");
    }
}

std::span<const MCSEntry> default_mcs_table() { return kMcsTable; }

const MCSEntry& mcs_entry(int index) {
    if (index < 0 || index >= static_cast<int>(kMcsTable.size())) {
        throw std::out_of_range("MCS index " + std::to_string(index) + " outside 0..28");
    }
    return kMcsTable[static_cast<std::size_t>(index)];
}

double path_loss_db(double distance_m, double carrier_freq_ghz) {
    if (!(distance_m > 0.0)) {
        throw std::domain_error("path loss requires a positive distance");
    }
    if (!(carrier_freq_ghz > 0.0)) {
        throw std::domain_error("path loss requires a positive carrier frequency");
    }
    const double f_hz = carrier_freq_ghz * 1e9;
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * f_hz / PhysConstants::c);
}

double received_power_dbm(const LinkParams& params, double distance_m) {
    return params.tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi -
           path_loss_db(distance_m, params.carrier_freq_ghz);
}

double noise_floor_dbm(double bandwidth_hz, double noise_figure_db) {
    if (!(bandwidth_hz > 0.0)) {
        throw std::domain_error("noise floor requires a positive bandwidth");
    }
    // +30 converts dBW to dBm
    return 10.0 * std::log10(PhysConstants::k * PhysConstants::t0 * bandwidth_hz) + 30.0 +
           noise_figure_db;
}

double min_received_power_dbm(double snr_min_db, double bandwidth_hz, double noise_figure_db) {
    return snr_min_db + noise_floor_dbm(bandwidth_hz, noise_figure_db);
}

double max_distance_m(const LinkParams& params, double snr_min_db) {
    const double budget_db =
        params.tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi -
        min_received_power_dbm(snr_min_db, params.bandwidth_hz, params.noise_figure_db);
    const double f_hz = params.carrier_freq_ghz * 1e9;
    return PhysConstants::c / (4.0 * std::numbers::pi * f_hz) * std::pow(10.0, budget_db / 20.0);
}

}  // namespace a2asl
