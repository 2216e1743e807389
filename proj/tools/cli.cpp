#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "zpsync/error.hpp"
#include "zpsync/harness.hpp"
#include "zpsync/report_io.hpp"
#include "zpsync/settings.hpp"

namespace zpsync::cli {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config;
    std::string preset;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
    std::string estimators;
    std::string noise;
    std::string snr;
    std::string blocks;
    std::string antennas;
    std::string delay_range;
    bool full_scale = false;
    bool no_timing = false;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
    cmd.add_option("--config", a.config, "Key/value config file (overrides the preset)");
    cmd.add_option("--preset", a.preset, "Named preset from the presets directory");
    cmd.add_option("--trials", a.trials, "Monte-Carlo trials per point");
    cmd.add_option("--seed", a.seed, "Master seed (random and recorded when omitted)");
    cmd.add_option("--workers", a.workers, "Worker threads");
    cmd.add_option("--out", a.out, "Output directory");
    cmd.add_option("--estimators", a.estimators, "Comma list of aml, wed, ed");
    cmd.add_option("--noise", a.noise, "gaussian or impulsive");
    cmd.add_option("--snr", a.snr, "SNR in dB; a comma list replaces an SNR sweep");
    cmd.add_option("--blocks", a.blocks, "Observed blocks N; a list replaces a block sweep");
    cmd.add_option("--antennas", a.antennas, "MxR antenna pair(s), e.g. 2x2 or 1x1,2x2");
    cmd.add_option("--delay-range", a.delay_range, "Delay range lo:hi, e.g. -30:30");
    cmd.add_flag("--full-scale", a.full_scale, "Use full-scale trial counts (1e4 per point, 1e6 for validate-pdf)");
    cmd.add_flag("--no-timing", a.no_timing, "Leave mean_ns at 0 so outputs are bit-identical per seed");
}

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Preset, then config file, then flags.
Settings resolve_settings(const CommonArgs& a, const std::string& default_preset,
                          std::size_t full_scale_trials) {
    Settings s;
    load_preset(s, a.preset.empty() ? default_preset : a.preset);
    if (!a.config.empty()) s.merge_file(a.config);

    const std::string sweep = s.get_string("sweep", "");
    auto set_axis_or_base = [&](const std::string& axis, const std::string& base_key,
                                const std::string& value, const std::string& flag) {
        if (sweep == axis) {
            s.set("sweep_values", value, flag);
        } else {
            if (value.find(',') != std::string::npos) {
                throw ConfigError(flag + ": a list is only allowed when sweeping " + axis);
            }
            s.set(base_key, value, flag);
        }
    };
    if (a.full_scale && !a.trials) s.set("trials", std::to_string(full_scale_trials), "--full-scale");
    if (a.trials) s.set("trials", std::to_string(*a.trials), "--trials");
    if (a.workers) s.set("workers", std::to_string(*a.workers), "--workers");
    if (a.no_timing) s.set("record_timing", "false", "--no-timing");
    if (!a.estimators.empty()) s.set("estimators", a.estimators, "--estimators");
    if (!a.noise.empty()) s.set("noise", a.noise, "--noise");
    if (!a.snr.empty()) set_axis_or_base("snr", "snr_db", a.snr, "--snr");
    if (!a.blocks.empty()) set_axis_or_base("blocks", "blocks", a.blocks, "--blocks");
    if (!a.antennas.empty()) {
        if (sweep == "antennas") {
            s.set("sweep_values", a.antennas, "--antennas");
        } else {
            const auto pair = parse_antenna_pair(a.antennas);
            s.set("tx_antennas", std::to_string(pair.m_t), "--antennas");
            s.set("rx_antennas", std::to_string(pair.m_r), "--antennas");
        }
    }
    if (!a.delay_range.empty()) {
        const auto range = parse_delay_range(a.delay_range);
        s.set("delay_min", std::to_string(range.d_min), "--delay-range");
        s.set("delay_max", std::to_string(range.d_max), "--delay-range");
    }
    if (a.seed) {
        s.set("seed", std::to_string(*a.seed), "--seed");
    } else if (!s.has("seed")) {
        s.set("seed", std::to_string(fresh_seed()), "random");
    }
    return s;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

fs::path prepare_output(const CommonArgs& a, const std::string& command, const Settings& s) {
    const fs::path dir = a.out.empty() ? fs::path("results") / command : fs::path(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string());
    }
    nlohmann::json manifest = {
        {"command", command},
        {"config", a.config},
        {"preset", a.preset},
        {"output_directory", dir.string()},
        {"master_seed", s.get_string("seed", "")},
        {"timestamp", timestamp()},
        {"tool_version", library_version()},
        {"settings", s.dump()},
    };
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text(dir / "settings.cfg", s.dump());
    return dir;
}

void print_sweep(std::ostream& out, const SweepReport& report) {
    out << std::left << std::setw(12) << to_string(report.axis) << std::setw(10) << "estimator"
        << std::setw(10) << "trials" << std::setw(10) << "p_hat" << "95% CI\n";
    for (const auto& r : report.rows) {
        out << std::left << std::setw(12) << r.axis_value << std::setw(10) << to_string(r.estimator)
            << std::setw(10) << r.trials << std::setw(10) << std::fixed << std::setprecision(4)
            << r.p_hat << "[" << r.ci.lo << ", " << r.ci.hi << "]\n";
        out.unsetf(std::ios::fixed);
    }
    out << "seed " << report.master_seed << ", config " << report.config_hash << "\n";
}

void write_sweep_outputs(const fs::path& dir, const std::string& stem, const ExperimentSpec& spec,
                         const SweepReport& report) {
    std::ofstream csv(dir / (stem + ".csv"));
    write_sweep_csv(csv, report);
    write_text(dir / (stem + ".json"),
               sidecar(to_json(spec), report.master_seed, report.config_hash, report.version).dump(2) +
                   "\n");
}

int cmd_simulate(const CommonArgs& a, const std::string& dump_prefix, std::ostream& out) {
    const auto settings = resolve_settings(a, "fig2", 10000);
    const auto spec = experiment_from_settings(settings);
    spec.validate();
    const auto dir = prepare_output(a, "simulate", settings);
    const auto report = run_sweep(spec);
    write_sweep_outputs(dir, "sweep", spec, report);
    if (!dump_prefix.empty()) {
        // Trial 0 of the first sweep point, with the same streams the sweep used.
        SystemConfig config = spec.base;
        if (spec.axis == SweepAxis::Snr) config.snr_db = spec.values.front();
        if (spec.axis == SweepAxis::Blocks) config.n_blocks = static_cast<std::size_t>(spec.values.front());
        if (spec.axis == SweepAxis::Antennas) {
            config.m_t = spec.antennas.front().m_t;
            config.m_r = spec.antennas.front().m_r;
        }
        const auto mixture =
            scale_mixture_to_snr(spec.noise, config.sigma_x2, config.snr_db, spec.snr_reference);
        const std::size_t pad = spec.delays.d_min < 0 ? static_cast<std::size_t>(-spec.delays.d_min) : 0;
        const auto window = assemble_window(config, spec.pdp, mixture, draw_delay(spec.master_seed, 0, spec.delays),
                                            StreamSeeds::for_trial(spec.master_seed, 0), pad);
        dump_window(dir / dump_prefix, window);
    }
    print_sweep(out, report);
    out << "wrote " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_validate_pdf(const CommonArgs& a, const std::string& k_list, std::ostream& out) {
    auto settings = resolve_settings(a, "table1", 1000000);
    if (!k_list.empty()) settings.set("moment_indices", k_list, "--k");
    const auto spec = moment_from_settings(settings);
    spec.validate();
    const auto dir = prepare_output(a, "validate-pdf", settings);
    const auto report = run_moment_validation(spec);
    {
        std::ofstream csv(dir / "moments.csv");
        write_moment_csv(csv, report);
    }
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        std::ofstream h(dir / ("histogram_k" + std::to_string(report.rows[i].k) + ".csv"));
        write_histogram_csv(h, report, i);
    }
    write_text(dir / "moments.json",
               sidecar(to_json(spec), report.master_seed, report.config_hash, report.version).dump(2) + "\n");

    out << std::left << std::setw(6) << "k" << std::setw(12) << "mean" << std::setw(12) << "variance"
        << std::setw(12) << "analytic" << std::setw(12) << "skewness" << "kurtosis\n";
    for (const auto& r : report.rows) {
        out << std::left << std::setw(6) << r.k << std::setw(12) << r.empirical.mean << std::setw(12)
            << r.empirical.variance << std::setw(12) << r.analytic_variance << std::setw(12)
            << r.empirical.skewness << r.empirical.kurtosis << "\n";
    }
    out << "wrote " << (dir / "moments.csv").string() << "\n";
    return 0;
}

int cmd_sensitivity(const CommonArgs& a, const std::string& alphas, std::ostream& out) {
    auto settings = resolve_settings(a, "fig7", 10000);
    settings.set("sweep", "pdp_error", "sensitivity");
    settings.set("estimators", "aml", "sensitivity");
    if (!alphas.empty()) settings.set("sweep_values", alphas, "--alphas");
    const auto spec = experiment_from_settings(settings);
    spec.validate();
    for (const double alpha : spec.values) {
        if (!(alpha >= 0.0 && alpha < 1.0)) {
            throw ConfigError("--alphas: error magnitude must lie in [0, 1), got " + std::to_string(alpha));
        }
    }
    const auto dir = prepare_output(a, "sensitivity", settings);
    const auto report = run_pdp_sensitivity(spec, spec.values);
    write_sweep_outputs(dir, "sensitivity", spec, report);
    print_sweep(out, report);
    out << "wrote " << (dir / "sensitivity.csv").string() << "\n";
    return 0;
}

int cmd_profile(const CommonArgs& a, const std::string& sizes, std::ostream& out) {
    auto settings = resolve_settings(a, "profile", 5);
    if (!sizes.empty()) settings.set("size_multipliers", sizes, "--sizes");
    const auto spec = scaling_from_settings(settings);
    spec.validate();
    const auto dir = prepare_output(a, "profile", settings);
    const auto report = run_runtime_scaling(spec);
    {
        std::ofstream csv(dir / "profile.csv");
        write_scaling_csv(csv, report);
    }
    nlohmann::json summary = sidecar(to_json(spec), spec.master_seed, config_hash(to_json(spec)),
                                     library_version());
    summary["slope"] = report.slope;
    summary["max_doubling_ratio"] = report.max_doubling_ratio;
    write_text(dir / "profile.json", summary.dump(2) + "\n");

    out << std::left << std::setw(12) << "samples" << std::setw(16) << "aml_ns" << "ed_ns\n";
    for (const auto& r : report.rows) {
        out << std::left << std::setw(12) << r.samples << std::setw(16) << std::fixed
            << std::setprecision(0) << r.aml_ns << r.ed_ns << "\n";
        out.unsetf(std::ios::fixed);
    }
    out << std::setprecision(4) << "log-log slope " << report.slope << ", max doubling ratio "
        << report.max_doubling_ratio << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Timing-offset estimation for zero-padded OFDM under impulsive noise", "zpsync"};
    app.require_subcommand(1);

    CommonArgs sim_args, pdf_args, sens_args, prof_args;
    std::string dump_prefix, k_list, alphas, sizes;

    auto* simulate = app.add_subcommand("simulate", "Lock-in probability sweep");
    add_common(*simulate, sim_args);
    simulate->add_option("--dump-iq", dump_prefix, "Dump trial 0 of the first point as <prefix>_rx<j>.iq");

    auto* validate = app.add_subcommand("validate-pdf", "Moments of received samples vs the approximation");
    add_common(*validate, pdf_args);
    validate->add_option("--k", k_list, "Comma list of sample indices");

    auto* sensitivity = app.add_subcommand("sensitivity", "A-ML lock-in versus delay-profile error");
    add_common(*sensitivity, sens_args);
    sensitivity->add_option("--alphas", alphas, "Comma list of error magnitudes in [0, 1)");

    auto* profile = app.add_subcommand("profile", "A-ML runtime versus window size");
    add_common(*profile, prof_args);
    profile->add_option("--sizes", sizes, "Comma list of n_s multipliers");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_args, dump_prefix, out);
        if (validate->parsed()) return cmd_validate_pdf(pdf_args, k_list, out);
        if (sensitivity->parsed()) return cmd_sensitivity(sens_args, alphas, out);
        if (profile->parsed()) return cmd_profile(prof_args, sizes, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace zpsync::cli
