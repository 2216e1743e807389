#include "zpsync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "zpsync/error.hpp"
#include "zpsync/likelihood.hpp"
#include "zpsync/report_io.hpp"

#ifndef ZPSYNC_VERSION
#define ZPSYNC_VERSION "0.0.0"
#endif

namespace zpsync {

std::string library_version() { return ZPSYNC_VERSION; }

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::Snr: return "snr";
        case SweepAxis::Blocks: return "blocks";
        case SweepAxis::Antennas: return "antennas";
        case SweepAxis::P0: return "p0";
        case SweepAxis::PdpError: return "pdp_error";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    for (auto axis : {SweepAxis::Snr, SweepAxis::Blocks, SweepAxis::Antennas, SweepAxis::P0,
                      SweepAxis::PdpError}) {
        if (name == to_string(axis)) return axis;
    }
    throw ConfigError("unknown sweep axis '" + std::string(name) +
                      "' (expected snr, blocks, antennas, p0 or pdp_error)");
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

struct PointSetup {
    std::string label;
    SystemConfig config;
    NoiseMixture mixture;
    std::optional<double> pdp_alpha;
};

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

PointSetup make_point(const ExperimentSpec& spec, std::size_t point) {
    SystemConfig config = spec.base;
    NoiseMixture shape = spec.noise;
    std::optional<double> alpha;
    std::string label;
    switch (spec.axis) {
        case SweepAxis::Snr:
            config.snr_db = spec.values.at(point);
            label = format_value(config.snr_db);
            break;
        case SweepAxis::Blocks: {
            const double n = spec.values.at(point);
            if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("block counts must be integers >= 1");
            config.n_blocks = static_cast<std::size_t>(n);
            label = format_value(n);
            break;
        }
        case SweepAxis::Antennas: {
            const auto& pair = spec.antennas.at(point);
            config.m_t = pair.m_t;
            config.m_r = pair.m_r;
            label = std::to_string(pair.m_t) + "x" + std::to_string(pair.m_r);
            break;
        }
        case SweepAxis::P0: {
            const double p0 = spec.values.at(point);
            if (!(p0 > 0.0 && p0 <= 1.0)) throw ConfigError("p0 must lie in (0, 1]");
            if (spec.noise.size() < 2) throw ConfigError("p0 sweep needs a two-component noise shape");
            const auto comps = spec.noise.components();
            std::vector<NoiseMixture::Component> mix{{p0, comps[0].variance}};
            if (p0 < 1.0) mix.push_back({1.0 - p0, comps[1].variance});
            shape = NoiseMixture(std::move(mix));
            label = format_value(p0);
            break;
        }
        case SweepAxis::PdpError: {
            const double a = spec.values.at(point);
            if (!(a >= 0.0 && a < 1.0)) {
                throw ConfigError("PDP error alpha must lie in [0, 1), got " + format_value(a));
            }
            alpha = a;
            label = format_value(a);
            break;
        }
    }
    config.validate();
    return {label, config,
            scale_mixture_to_snr(shape, config.sigma_x2, config.snr_db, spec.snr_reference), alpha};
}

void check_estimators(const ExperimentSpec& spec, const PointSetup& point) {
    const auto& config = point.config;
    spec.delays.validate(config.n_s());
    if (spec.pdp.size() != config.n_h) {
        throw ConfigError("delay profile has " + std::to_string(spec.pdp.size()) + " taps but n_h = " +
                          std::to_string(config.n_h));
    }
    for (auto id : spec.estimators) {
        const std::string where = "point " + point.label + ", estimator " + std::string(to_string(id));
        if (id == EstimatorId::Wed) {
            if (!point.mixture.is_gaussian()) throw ConfigError(where + ": WED requires Gaussian noise");
            if (spec.delays.d_min < 0) throw ConfigError(where + ": WED requires non-negative delays");
        }
        if (id == EstimatorId::Ed) {
            const auto last = static_cast<std::int64_t>(config.n_x + config.n_h) - 1;
            if (spec.delays.d_min < 0 || spec.delays.d_max > last) {
                throw ConfigError(where + ": ED requires delays in [0, " + std::to_string(last) + "]");
            }
        }
    }
}

}  // namespace

void ExperimentSpec::validate() const {
    if (trials == 0) throw ConfigError("trials must be >= 1");
    if (point_count() == 0) throw ConfigError("sweep axis has no values");
    if (estimators.empty()) throw ConfigError("no estimator selected");
    for (std::size_t p = 0; p < point_count(); ++p) check_estimators(*this, make_point(*this, p));
}

const SweepRow& SweepReport::row(std::size_t point, EstimatorId id) const {
    const std::size_t per_point = rows.size() / std::max<std::size_t>(outcomes.size(), 1);
    for (std::size_t i = point * per_point; i < (point + 1) * per_point && i < rows.size(); ++i) {
        if (rows[i].estimator == id) return rows[i];
    }
    throw std::out_of_range("no row for that point and estimator");
}

DelayProfile perturb_profile(const DelayProfile& profile, double alpha, Rng& rng) {
    std::vector<double> powers(profile.powers().begin(), profile.powers().end());
    for (double& p : powers) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        p *= 1.0 + sign * alpha;
    }
    return DelayProfile(std::move(powers));
}

std::int64_t draw_delay(std::uint64_t master_seed, std::size_t trial, const HypothesisSet& range) {
    Rng rng(derive_seed(master_seed, trial, "delay"));
    return rng.uniform_int(range.d_min, range.d_max);
}

SweepReport run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    SweepReport report;
    report.axis = spec.axis;
    report.master_seed = spec.master_seed;
    report.config_hash = config_hash(to_json(spec));
    report.version = library_version();

    const std::size_t pad = spec.delays.d_min < 0 ? static_cast<std::size_t>(-spec.delays.d_min) : 0;
    const std::size_t n_est = spec.estimators.size();

    for (std::size_t p = 0; p < spec.point_count(); ++p) {
        const auto point = make_point(spec, p);
        const auto vp = variance_profile_h0(point.config, spec.pdp);
        std::optional<LikelihoodKernel> kernel;
        if (!point.pdp_alpha) kernel.emplace(vp, point.mixture);

        std::vector<TrialOutcome> outcomes(spec.trials);
        parallel_for(spec.trials, spec.workers, [&](std::size_t t) {
            auto& out = outcomes[t];
            out.trial_index = t;
            out.d_true = draw_delay(spec.master_seed, t, spec.delays);
            const auto window = assemble_window(point.config, spec.pdp, point.mixture, out.d_true,
                                                StreamSeeds::for_trial(spec.master_seed, t), pad);
            out.d_hat.resize(n_est);
            out.elapsed.assign(n_est, 0);
            for (std::size_t e = 0; e < n_est; ++e) {
                const auto start = std::chrono::steady_clock::now();
                EstimateResult result;
                switch (spec.estimators[e]) {
                    case EstimatorId::Aml:
                        if (kernel) {
                            result = aml_estimate(window, *kernel, spec.delays);
                        } else {
                            Rng rng(derive_seed(spec.master_seed, t, "pdp-error"));
                            const auto assumed = perturb_profile(spec.pdp, *point.pdp_alpha, rng);
                            result = aml_estimate(window, variance_profile_h0(point.config, assumed),
                                                  point.mixture, spec.delays);
                        }
                        break;
                    case EstimatorId::Wed:
                        result = wed_estimate(window, vp, point.mixture, spec.delays);
                        break;
                    case EstimatorId::Ed:
                        result = ed_estimate(window, point.config, spec.delays);
                        break;
                }
                const auto stop = std::chrono::steady_clock::now();
                out.d_hat[e] = result.d_hat;
                if (spec.record_timing) {
                    out.elapsed[e] =
                        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
                }
            }
        });

        for (std::size_t e = 0; e < n_est; ++e) {
            SweepRow row;
            row.axis_value = point.label;
            row.estimator = spec.estimators[e];
            row.trials = spec.trials;
            double total_ns = 0.0;
            for (const auto& o : outcomes) {
                if (o.d_hat[e] == o.d_true) ++row.successes;
                total_ns += static_cast<double>(o.elapsed[e]);
            }
            row.p_hat = static_cast<double>(row.successes) / static_cast<double>(row.trials);
            row.ci = wilson_interval(row.successes, row.trials);
            row.mean_ns = total_ns / static_cast<double>(row.trials);
            report.rows.push_back(row);
        }
        report.outcomes.push_back(std::move(outcomes));
    }
    return report;
}

SweepReport run_pdp_sensitivity(ExperimentSpec spec, const std::vector<double>& alphas) {
    for (double a : alphas) {
        if (!(a >= 0.0 && a < 1.0)) {
            throw ConfigError("PDP error alpha must lie in [0, 1), got " + format_value(a));
        }
    }
    spec.axis = SweepAxis::PdpError;
    spec.values = alphas;
    spec.estimators = {EstimatorId::Aml};
    return run_sweep(spec);
}

void MomentSpec::validate() const {
    SystemConfig c = config;
    c.n_blocks = 1;
    c.validate();
    if (trials < 2) throw ConfigError("moment validation needs >= 2 trials");
    if (indices.empty()) throw ConfigError("no sample indices requested");
    for (auto k : indices) {
        if (k >= c.n_s()) {
            throw RangeError("sample index " + std::to_string(k) + " outside [0, " +
                             std::to_string(c.n_s() - 1) + "]");
        }
    }
    if (pdp.size() != c.n_h) throw ConfigError("delay profile length differs from n_h");
}

MomentReport run_moment_validation(const MomentSpec& spec) {
    spec.validate();
    SystemConfig config = spec.config;
    config.n_blocks = 1;

    const auto mixture =
        scale_mixture_to_snr(spec.noise, config.sigma_x2, config.snr_db, spec.snr_reference);
    const auto vp = variance_profile_h0(config, spec.pdp);
    const std::size_t n_idx = spec.indices.size();

    // values[i * trials + t]
    std::vector<double> values(n_idx * spec.trials);
    parallel_for(spec.trials, spec.workers, [&](std::size_t t) {
        const auto window = assemble_window(config, spec.pdp, mixture, 0,
                                            StreamSeeds::for_trial(spec.master_seed, t), 0);
        for (std::size_t i = 0; i < n_idx; ++i) {
            values[i * spec.trials + t] = window.samples[0][spec.indices[i]].real();
        }
    });

    MomentReport report;
    report.master_seed = spec.master_seed;
    report.config_hash = config_hash(to_json(spec));
    report.version = library_version();
    for (std::size_t i = 0; i < n_idx; ++i) {
        std::span<const double> sample(values.data() + i * spec.trials, spec.trials);
        MomentRow row;
        row.k = spec.indices[i];
        row.empirical = sample_moments(sample);
        const double kappa = vp.body()[row.k];
        double m2 = 0.0, m4 = 0.0;
        for (const auto& c : mixture.components()) {
            const double v = kappa + c.variance / 2.0;
            m2 += c.weight * v;
            m4 += c.weight * 3.0 * v * v;
        }
        row.analytic_variance = m2;
        row.analytic_kurtosis = m4 / (m2 * m2);
        row.histogram = freedman_diaconis(sample);
        const auto& edges = row.histogram.edges;
        row.analytic_density.reserve(row.histogram.counts.size());
        for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
            row.analytic_density.push_back(b_function(0.5 * (edges[b] + edges[b + 1]), kappa, mixture));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void ScalingSpec::validate() const {
    if (multipliers.size() < 3) throw ConfigError("runtime scaling needs at least 3 sizes");
    if (trials == 0) throw ConfigError("trials must be >= 1");
    for (auto mult : multipliers) {
        if (mult == 0) throw ConfigError("size multipliers must be >= 1");
    }
    base.validate();
}

ScalingReport run_runtime_scaling(const ScalingSpec& spec) {
    spec.validate();
    ScalingReport report;
    const std::size_t pad = spec.delays.d_min < 0 ? static_cast<std::size_t>(-spec.delays.d_min) : 0;
    const HypothesisSet ed_set{0, static_cast<std::int64_t>(spec.delays.size()) - 1};

    for (auto mult : spec.multipliers) {
        if (mult == 0) throw ConfigError("size multipliers must be >= 1");
        SystemConfig config = spec.base;
        config.n_x *= mult;
        config.n_z *= mult;
        config.validate();
        spec.delays.validate(config.n_s());
        const auto mixture = scale_mixture_to_snr(spec.noise, config.sigma_x2, config.snr_db);
        const auto vp = variance_profile_h0(config, spec.pdp);
        const LikelihoodKernel kernel(vp, mixture);

        double aml_total = 0.0, ed_total = 0.0;
        for (std::size_t t = 0; t < spec.trials; ++t) {
            const auto window = assemble_window(config, spec.pdp, mixture, 0,
                                                StreamSeeds::for_trial(spec.master_seed, t), pad);
            auto t0 = std::chrono::steady_clock::now();
            auto aml = aml_estimate(window, kernel, spec.delays);
            auto t1 = std::chrono::steady_clock::now();
            auto ed = ed_estimate(window, config, ed_set);
            auto t2 = std::chrono::steady_clock::now();
            aml_total += std::chrono::duration<double, std::nano>(t1 - t0).count();
            ed_total += std::chrono::duration<double, std::nano>(t2 - t1).count();
            (void)aml;
            (void)ed;
        }
        report.rows.push_back({mult, config.window_length(),
                               aml_total / static_cast<double>(spec.trials),
                               ed_total / static_cast<double>(spec.trials)});
    }

    std::vector<double> lx, ly;
    for (const auto& r : report.rows) {
        lx.push_back(std::log(static_cast<double>(r.samples)));
        ly.push_back(std::log(r.aml_ns));
    }
    report.slope = ols_slope(lx, ly);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        for (std::size_t j = 0; j < report.rows.size(); ++j) {
            if (report.rows[j].samples == 2 * report.rows[i].samples) {
                report.max_doubling_ratio =
                    std::max(report.max_doubling_ratio, report.rows[j].aml_ns / report.rows[i].aml_ns);
            }
        }
    }
    return report;
}

}  // namespace zpsync
