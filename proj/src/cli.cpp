#include "a2asl/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <variant>

#include "a2asl/errors.hpp"
#include "a2asl/linkbudget.hpp"
#include "a2asl/scenario.hpp"
#include "a2asl/sim_engine.hpp"

namespace a2asl::cli {

int cmd_figures(const FiguresArgs& args, std::ostream& out, std::ostream& err) {
    const auto fig = parse_figure(args.which);
    if (!fig) {
        err << "unknown figure '" << args.which << "' (expected rxpower, maxdist, doppler, guard)\n";
        return kUsage;
    }
    FigureOptions opts;
    opts.sweep = default_sweep(*fig);
    if (args.from) opts.sweep.from = *args.from;
    if (args.to) opts.sweep.to = *args.to;
    if (args.step) opts.sweep.step = *args.step;
    opts.sweep.at = args.at;
    opts.max_guard = args.max_guard;
    try {
        if (args.carrier) {
            opts.link.carrier_freq_ghz = parse_quantity(*args.carrier, Quantity::Frequency) / 1e9;
        }
        if (args.bandwidth) {
            opts.link.bandwidth_hz = parse_quantity(*args.bandwidth, Quantity::Frequency);
        }
        if (args.switch_distance) {
            opts.switch_distance_m = parse_quantity(*args.switch_distance, Quantity::Distance);
        }
        opts.link.validate();
        if (opts.max_guard < 1 || opts.max_guard > 9) {
            throw ConfigError("--max-guard must be 1..9");
        }
    } catch (const std::exception& e) {
        err << "figures: " << e.what() << "\n";
        return kUsage;
    }
    if (!(opts.sweep.step > 0.0) && opts.sweep.at.empty()) {
        err << "figures: --step must be positive\n";
        return kUsage;
    }
    write_figure(*fig, opts, out);
    return kOk;
}

int cmd_linkbudget(const LinkbudgetArgs& args, std::ostream& out, std::ostream& err) {
    LinkParams p;
    std::optional<double> distance;
    double snr_min = 0.0;
    try {
        p.tx_power_dbm = parse_quantity(args.tx_power, Quantity::Power);
        p.tx_gain_dbi = parse_quantity(args.tx_gain, Quantity::Gain);
        p.rx_gain_dbi = parse_quantity(args.rx_gain, Quantity::Gain);
        p.carrier_freq_ghz = parse_quantity(args.carrier, Quantity::Frequency) / 1e9;
        p.bandwidth_hz = parse_quantity(args.bandwidth, Quantity::Frequency);
        p.noise_figure_db = parse_quantity(args.noise_figure, Quantity::Decibel);
        if (args.distance) {
            distance = parse_quantity(*args.distance, Quantity::Distance);
            if (!(*distance > 0.0)) {
                throw ConfigError("distance must be positive");
            }
        }
        if (args.snr_min) {
            snr_min = parse_quantity(*args.snr_min, Quantity::Decibel);
        }
        p.validate();
    } catch (const std::exception& e) {
        err << "linkbudget: " << e.what() << "\n";
        return kUsage;
    }

    std::vector<std::pair<std::string, double>> rows;
    const double noise = noise_floor_dbm(p.bandwidth_hz, p.noise_figure_db);
    const double prmin = min_received_power_dbm(snr_min, p.bandwidth_hz, p.noise_figure_db);
    if (distance) {
        const double rx = received_power_dbm(p, *distance);
        rows.emplace_back("distance_km", *distance / 1e3);
        rows.emplace_back("path_loss_db", path_loss_db(*distance, p.carrier_freq_ghz));
        rows.emplace_back("rx_power_dbm", rx);
        rows.emplace_back("noise_floor_dbm", noise);
        rows.emplace_back("snr_db", rx - noise);
        rows.emplace_back("snr_min_db", snr_min);
        rows.emplace_back("min_rx_power_dbm", prmin);
        rows.emplace_back("margin_db", rx - prmin);
    } else {
        rows.emplace_back("noise_floor_dbm", noise);
        rows.emplace_back("snr_min_db", snr_min);
        rows.emplace_back("min_rx_power_dbm", prmin);
    }
    rows.emplace_back("max_distance_km", max_distance_m(p, snr_min) / 1e3);

    if (args.csv) {
        out << "quantity,value\n";
        for (const auto& [k, v] : rows) {
            out << fmt::format("{},{:.6f}\n", k, v);
        }
    } else {
        for (const auto& [k, v] : rows) {
            out << fmt::format("{:<18}{:>14.3f}\n", k, v);
        }
    }
    return kOk;
}

namespace {

std::optional<ScenarioConfig> load_checked(const std::string& path,
                                           const std::vector<std::string>& overrides, bool strict,
                                           std::ostream& err) {
    try {
        auto cfg = load_scenario(path, overrides);
        for (const auto& w : validate_scenario(cfg, strict)) {
            err << "warning: " << w << "\n";
        }
        return cfg;
    } catch (const ConfigError& e) {
        err << path << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << path << ": " << e.what() << "\n";
    }
    return std::nullopt;
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    if (args.repeat < 1 || args.workers < 1) {
        err << "run: --repeat and --workers must be at least 1\n";
        return kUsage;
    }
    const auto cfg = load_checked(args.scenario, args.overrides, args.strict, err);
    if (!cfg) {
        return kFailure;
    }
    const std::uint64_t seed = args.seed.value_or(cfg->seed);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) {
        err << "run: cannot create '" << args.out_dir << "': " << ec.message() << "\n";
        return kFailure;
    }
    const fs::path dir(args.out_dir);

    MetricsReport metrics;
    if (args.repeat == 1) {
        const auto result = run(*cfg, seed);
        std::ofstream events(dir / "events.csv", std::ios::binary);
        write_events_csv(events, result.events);
        metrics = result.metrics;
        out << fmt::format("mode {} | slots {} | ", to_string(result.mode), result.slots);
    } else {
        metrics = run_sweep(*cfg, seed, args.repeat, args.workers);
        out << fmt::format("seeds {}..{} | ", seed, seed + static_cast<std::uint64_t>(args.repeat) - 1);
    }
    std::ofstream m(dir / "metrics.csv", std::ios::binary);
    metrics.write_csv(m);
    if (!m) {
        err << "run: failed writing metrics.csv\n";
        return kFailure;
    }
    out << fmt::format("transmissions {} | prr {:.4f} | slot_mismatch {} | allocation_failures {}\n",
                       metrics.transmissions, metrics.overall_prr(),
                       metrics.count(DeliveryStatus::SlotMismatch), metrics.allocation_failures);
    return kOk;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    const auto cfg = load_checked(args.scenario, args.overrides, args.strict, err);
    if (!cfg) {
        return kFailure;
    }
    if (args.emit) {
        out << emit_scenario(*cfg);
        return kOk;
    }
    out << fmt::format("{}: ok ({} nodes, max distance {:.3f} km, mode {})\n", cfg->name,
                       cfg->total_nodes(), max_effective_distance_m(*cfg) / 1e3,
                       to_string(resolve_allocation_mode(*cfg)));
    return kOk;
}

int main(int argc, char** argv) {
    CLI::App app{"Air-to-air NR sidelink Mode-2 analysis and simulation"};
    app.require_subcommand(1);

    FiguresArgs fa;
    std::string fig_out;
    auto* figures = app.add_subcommand("figures", "Write a figure sweep as CSV");
    figures->add_option("which", fa.which, "rxpower | maxdist | doppler | guard")->required();
    figures->add_option("--from", fa.from, "Sweep start (km, dB or m/s)");
    figures->add_option("--to", fa.to, "Sweep end");
    figures->add_option("--step", fa.step, "Sweep step");
    figures->add_option("--at", fa.at, "Explicit x values")->delimiter(',');
    figures->add_option("--carrier", fa.carrier, "Carrier, e.g. '6 GHz'");
    figures->add_option("--bandwidth", fa.bandwidth, "Bandwidth, e.g. '100 MHz'");
    figures->add_option("--max-guard", fa.max_guard, "Guard symbol limit (guard figure)");
    figures->add_option("--switch-distance", fa.switch_distance,
                        "Mode switch distance override, e.g. '42.4 km'");
    figures->add_option("--out", fig_out, "Output file (default stdout)");

    LinkbudgetArgs la;
    auto* lb = app.add_subcommand("linkbudget", "Link budget calculator");
    lb->add_option("--distance", la.distance, "Link distance, e.g. '42.4 km'");
    lb->add_option("--snr-min", la.snr_min, "Minimum SNR, e.g. '0 dB'");
    lb->add_option("--tx-power", la.tx_power, "Transmit power")->capture_default_str();
    lb->add_option("--tx-gain", la.tx_gain, "Transmit antenna gain")->capture_default_str();
    lb->add_option("--rx-gain", la.rx_gain, "Receive antenna gain")->capture_default_str();
    lb->add_option("--carrier", la.carrier, "Carrier frequency")->capture_default_str();
    lb->add_option("--bandwidth", la.bandwidth, "Bandwidth")->capture_default_str();
    lb->add_option("--noise-figure", la.noise_figure, "Receiver noise figure")->capture_default_str();
    lb->add_flag("--csv", la.csv, "CSV output");

    RunArgs ra;
    std::uint64_t seed = 0;
    auto* runc = app.add_subcommand("run", "Run a scenario");
    runc->add_option("scenario", ra.scenario, "Scenario file")->required();
    auto* seed_opt = runc->add_option("--seed", seed, "Run seed (default: scenario seed)");
    runc->add_option("--out", ra.out_dir, "Output directory")->capture_default_str();
    runc->add_flag("--strict", ra.strict, "Treat guard under-provisioning as an error");
    runc->add_option("--override", ra.overrides, "section.key=value");
    runc->add_option("--repeat", ra.repeat, "Number of consecutive seeds")->capture_default_str();
    runc->add_option("--workers", ra.workers, "Worker threads for --repeat")->capture_default_str();

    ValidateArgs va;
    auto* val = app.add_subcommand("validate", "Check a scenario file");
    val->add_option("scenario", va.scenario, "Scenario file")->required();
    val->add_flag("--strict", va.strict, "Treat guard under-provisioning as an error");
    val->add_option("--override", va.overrides, "section.key=value");
    val->add_flag("--emit", va.emit, "Print the canonical scenario text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (figures->parsed()) {
        if (fig_out.empty()) {
            return cmd_figures(fa, std::cout, std::cerr);
        }
        std::ofstream f(fig_out, std::ios::binary);
        if (!f) {
            std::cerr << "figures: cannot open '" << fig_out << "'\n";
            return kFailure;
        }
        return cmd_figures(fa, f, std::cerr);
    }
    if (lb->parsed()) {
        return cmd_linkbudget(la, std::cout, std::cerr);
    }
    if (runc->parsed()) {
        if (seed_opt->count() > 0) {
            ra.seed = seed;
        }
        return cmd_run(ra, std::cout, std::cerr);
    }
    return cmd_validate(va, std::cout, std::cerr);
}

}  // namespace a2asl::cli
