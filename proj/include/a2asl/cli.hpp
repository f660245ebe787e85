#ifndef A2ASL_CLI_HPP
#define A2ASL_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "a2asl/figures.hpp"

namespace a2asl::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // invalid scenario, I/O error
inline constexpr int kUsage = 2;    // bad arguments

struct FiguresArgs {
    std::string which;
    std::optional<double> from, to, step;
    std::vector<double> at;
    std::optional<std::string> carrier, bandwidth;  // unit-suffixed text
    std::optional<std::string> switch_distance;
    int max_guard = 8;
};

int cmd_figures(const FiguresArgs& args, std::ostream& out, std::ostream& err);

struct LinkbudgetArgs {
    std::optional<std::string> distance;
    std::optional<std::string> snr_min;
    std::string tx_power = "40 dBm";
    std::string tx_gain = "12 dBi";
    std::string rx_gain = "12 dBi";
    std::string carrier = "6 GHz";
    std::string bandwidth = "100 MHz";
    std::string noise_figure = "8 dB";
    bool csv = false;
};

int cmd_linkbudget(const LinkbudgetArgs& args, std::ostream& out, std::ostream& err);

struct RunArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool strict = false;
    std::vector<std::string> overrides;
    int repeat = 1;
    int workers = 1;
};

/// Writes <out_dir>/metrics.csv and, for single runs, <out_dir>/events.csv.
/// Nothing is written unless the scenario parses and validates.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

struct ValidateArgs {
    std::string scenario;
    bool strict = false;
    bool emit = false;
    std::vector<std::string> overrides;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

/// Full command line entry point (CLI11 parsing plus dispatch).
int main(int argc, char** argv);

}  // namespace a2asl::cli

#endif
