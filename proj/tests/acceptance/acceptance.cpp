// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zpsync/error.hpp"
#include "zpsync/harness.hpp"
#include "zpsync/likelihood.hpp"
#include "zpsync/report_io.hpp"
#include "zpsync/settings.hpp"

using namespace zpsync;

namespace {

// Tolerances.
constexpr double kTableVarianceRelTol = 0.02;
constexpr double kKurtosis150Lo = 3.1, kKurtosis150Hi = 3.5;
constexpr double kKurtosis1Lo = 4.0, kKurtosis1Hi = 4.9;
constexpr double kSkewnessAbsMax = 0.05;
constexpr double kTableRuntimeMaxS = 150.0;
constexpr double kHighSnrLockMin = 0.99;
constexpr double kTwentyDbLockMin = 0.9;
constexpr double kEdWedGapMax = 0.05;
constexpr double kPdpLossMax = 0.05 + 0.03;
constexpr double kSlopeLo = 0.8, kSlopeHi = 1.3;
constexpr double kDoublingMax = 2.5;
constexpr double kQuadratureRelTol = 1e-6;
constexpr double kLoglikRelTol = 1e-9;

// Operating points and sizes.
constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kSweepTrials = 500;
constexpr std::size_t kHighSnrTrials = 200;
constexpr std::size_t kEquivalenceTrials = 100;
constexpr std::size_t kPdpTrials = 1000;
constexpr double kEquivalenceSnrDb = 0.0;
constexpr double kMimoSnrDb = 5.0;
constexpr double kP0SnrDb = 5.0;
constexpr double kPdpSnrDb = 15.0;
constexpr double kPdpAlpha = 0.7;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string rate(const SweepRow& r) {
    return fmt("%.3f", r.p_hat) + " [" + fmt("%.3f", r.ci.lo) + ", " + fmt("%.3f", r.ci.hi) + "]";
}

ExperimentSpec preset_spec(const std::string& name) {
    Settings s;
    load_preset(s, name);
    s.set("seed", std::to_string(kSeed), "acceptance");
    s.set("trials", std::to_string(kSweepTrials), "acceptance");
    s.set("record_timing", "false", "acceptance");
    return experiment_from_settings(s);
}

/// Each step either rises or stays within interval overlap of its predecessor.
bool non_decreasing(const std::vector<SweepRow>& rows, std::string& detail) {
    bool ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail += (i ? ", " : "") + rows[i].axis_value + ": " + rate(rows[i]);
        if (i > 0 && rows[i].p_hat < rows[i - 1].p_hat && !overlaps(rows[i].ci, rows[i - 1].ci)) ok = false;
    }
    return ok;
}

double normal_pdf(double x, double var) {
    return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// Second moment of the density b_function(., t) by trapezoidal quadrature.
double b_second_moment(double t, const NoiseMixture& m) {
    double spread = t;
    for (auto c : m.components()) spread = std::max(spread, t + c.variance / 2.0);
    const double half = 14.0 * std::sqrt(spread);
    const int n = 40000;
    const double h = 2.0 * half / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double z = -half + i * h;
        acc += (i == 0 || i == n ? 0.5 : 1.0) * z * z * b_function(z, t, m);
    }
    return acc * h;
}

Verdict c1_table_moments() {
    Settings s;
    load_preset(s, "table1");
    s.set("seed", std::to_string(kSeed), "acceptance");
    const auto spec = moment_from_settings(s);
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_moment_validation(spec);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto vp = variance_profile_h0(spec.config, spec.pdp);
    const auto mixture =
        scale_mixture_to_snr(spec.noise, spec.config.sigma_x2, spec.config.snr_db, spec.snr_reference);
    Verdict v{true, "trials " + std::to_string(spec.trials)};
    for (const auto& row : report.rows) {
        const double analytic = b_second_moment(vp.body()[row.k], mixture);
        const auto& e = row.empirical;
        const double rel = std::abs(e.variance - analytic) / analytic;
        v.detail += "; k=" + std::to_string(row.k) + " var " + fmt("%.4f", e.variance) + " vs " +
                    fmt("%.4f", analytic) + " (" + fmt("%.2f", 100.0 * rel) + "%), kurt " +
                    fmt("%.3f", e.kurtosis) + ", skew " + fmt("%+.4f", e.skewness);
        if (std::abs(e.skewness) >= kSkewnessAbsMax) v.pass = false;
        if (row.k == 150) {
            if (rel > kTableVarianceRelTol) v.pass = false;
            if (e.kurtosis < kKurtosis150Lo || e.kurtosis > kKurtosis150Hi) v.pass = false;
        }
        if (row.k == 1 && (e.kurtosis < kKurtosis1Lo || e.kurtosis > kKurtosis1Hi)) v.pass = false;
    }
    v.detail += "; " + fmt("%.1f", seconds) + " s";
    if (seconds > kTableRuntimeMaxS) v.pass = false;
    return v;
}

Verdict c2_high_snr() {
    auto spec = preset_spec("fig2");
    spec.values = {40.0};
    spec.trials = kHighSnrTrials;
    const auto r = run_sweep(spec).rows.front();
    return {r.p_hat >= kHighSnrLockMin, "40 dB: " + rate(r)};
}

Verdict c3_snr_monotone() {
    const auto r = run_sweep(preset_spec("fig2"));
    Verdict v;
    v.pass = non_decreasing(r.rows, v.detail) && r.rows.back().p_hat >= kTwentyDbLockMin;
    return v;
}

Verdict c4_blocks_monotone() {
    const auto r = run_sweep(preset_spec("fig3"));
    Verdict v;
    v.pass = non_decreasing(r.rows, v.detail);
    return v;
}

Verdict c5_wed_aml_equivalence() {
    auto spec = preset_spec("fig4");
    spec.values = {kEquivalenceSnrDb};
    spec.trials = kEquivalenceTrials;
    spec.estimators = {EstimatorId::Aml, EstimatorId::Wed};
    spec.delays = {0, static_cast<std::int64_t>(spec.base.n_s()) - 1};
    const auto r = run_sweep(spec);
    std::size_t agree = 0;
    for (const auto& o : r.outcomes.front()) agree += o.d_hat[0] == o.d_hat[1] ? 1 : 0;
    return {agree == spec.trials, std::to_string(agree) + "/" + std::to_string(spec.trials) +
                                      " identical estimates over d in [0, " +
                                      std::to_string(spec.delays.d_max) + "], A-ML " +
                                      rate(r.rows[0])};
}

Verdict c6_ed_vs_wed() {
    auto spec = preset_spec("fig4");
    spec.values = {0.0, 20.0};
    const auto r = run_sweep(spec);
    const auto& wed0 = r.row(0, EstimatorId::Wed);
    const auto& ed0 = r.row(0, EstimatorId::Ed);
    const auto& wed20 = r.row(1, EstimatorId::Wed);
    const auto& ed20 = r.row(1, EstimatorId::Ed);
    const bool ok = std::abs(ed20.p_hat - wed20.p_hat) <= kEdWedGapMax && wed0.p_hat >= ed0.p_hat;
    return {ok, "0 dB WED " + rate(wed0) + " ED " + rate(ed0) + "; 20 dB WED " + rate(wed20) + " ED " +
                    rate(ed20)};
}

Verdict c7_mimo_gain() {
    auto spec = preset_spec("fig5");
    spec.base.snr_db = kMimoSnrDb;
    spec.antennas = {{1, 1}, {2, 2}};
    const auto r = run_sweep(spec);
    const auto& siso = r.rows[0];
    const auto& mimo = r.rows[1];
    return {mimo.ci.lo > siso.ci.hi, "1x1 " + rate(siso) + ", 2x2 " + rate(mimo)};
}

Verdict c8_impulsiveness() {
    auto spec = preset_spec("fig6");
    spec.base.snr_db = kP0SnrDb;
    const auto r = run_sweep(spec);
    Verdict v;
    v.pass = non_decreasing(r.rows, v.detail);
    return v;
}

Verdict c9_pdp_error() {
    auto spec = preset_spec("fig7");
    spec.base.snr_db = kPdpSnrDb;
    spec.trials = kPdpTrials;
    const auto r = run_pdp_sensitivity(spec, {0.0, kPdpAlpha});
    const double loss = r.rows[0].p_hat - r.rows[1].p_hat;
    return {std::abs(loss) <= kPdpLossMax, "alpha 0: " + rate(r.rows[0]) + ", alpha " + fmt("%.1f", kPdpAlpha) +
                                               ": " + rate(r.rows[1]) + ", loss " + fmt("%.3f", loss)};
}

Verdict c10_complexity() {
    Settings s;
    load_preset(s, "profile");
    s.set("seed", std::to_string(kSeed), "acceptance");
    const auto report = run_runtime_scaling(scaling_from_settings(s));
    Verdict v;
    for (const auto& row : report.rows) {
        v.detail += std::to_string(row.samples) + " samples " + fmt("%.2f", row.aml_ns / 1e6) + " ms; ";
    }
    v.detail += "slope " + fmt("%.3f", report.slope) + ", max doubling ratio " + fmt("%.2f", report.max_doubling_ratio);
    v.pass = report.rows.size() >= 3 && report.slope >= kSlopeLo && report.slope <= kSlopeHi &&
             report.max_doubling_ratio <= kDoublingMax;
    return v;
}

Verdict c11_unit_oracles() {
    Verdict v{true, ""};

    // B-function against a quadrature convolution of signal and noise densities.
    const NoiseMixture m({{0.7, 0.4}, {0.25, 3.0}, {0.05, 60.0}});
    double worst_quad = 0.0;
    for (double t : {0.0, 0.2, 0.9}) {
        for (double z : {0.0, 0.4, -1.3, 3.0}) {
            const double ref = b_function(z, t, m);
            double integral = 0.0;
            if (t == 0.0) {
                for (auto c : m.components()) integral += c.weight * normal_pdf(z, c.variance / 2.0);
            } else {
                const double h = 5e-4;
                for (double u = -10.0; u <= 10.0; u += h) {
                    double noise = 0.0;
                    for (auto c : m.components()) noise += c.weight * normal_pdf(z - u, c.variance / 2.0);
                    integral += normal_pdf(u, t) * noise * h;
                }
            }
            worst_quad = std::max(worst_quad, std::abs(integral - ref) / ref);
            const double pc = p_function({z, -z / 2}, t, m);
            worst_quad = std::max(worst_quad, std::abs(pc - ref * b_function(-z / 2, t, m)) / pc);
        }
    }
    if (worst_quad > kQuadratureRelTol) v.pass = false;
    v.detail += "quadrature rel err " + fmt("%.2e", worst_quad);

    // Window log-likelihood against the brute-force product on 20 samples.
    SystemConfig c;
    c.n_x = 7;
    c.n_z = 3;
    c.n_h = 3;
    c.n_blocks = 2;
    const auto vp = variance_profile_h0(c, DelayProfile({0.6, 0.3, 0.1}));
    Rng rng(kSeed);
    std::vector<Samples> y(2, Samples(20));
    for (auto& a : y) for (auto& s : a) s = rng.complex_normal(0.7);
    double worst_ll = 0.0;
    for (std::int64_t d = -9; d <= 9; ++d) {
        double prod = 1.0;
        for (const auto& a : y) {
            for (std::size_t k = 0; k < a.size(); ++k) prod *= p_function(a[k], vp.at(d + std::int64_t(k)), m);
        }
        const double ref = std::log(prod);
        worst_ll = std::max(worst_ll, std::abs(window_loglik(y, d, vp, m).loglik - ref) / std::abs(ref));
        const LikelihoodKernel kernel(vp, m);
        worst_ll = std::max(worst_ll, std::abs(kernel.score(y, d) - ref) / std::abs(ref));
    }
    if (worst_ll > kLoglikRelTol) v.pass = false;
    v.detail += "; loglik rel err " + fmt("%.2e", worst_ll);

    // Profile windows against slices of a materialized sequence.
    SystemConfig big;
    const auto vpb = variance_profile_h0(big, DelayProfile::exponential(1.0, 0.05, 10));
    const std::int64_t lead = 600;
    std::vector<double> seq(static_cast<std::size_t>(lead), 0.0);
    for (std::size_t i = 0; i < 12 * big.n_s(); ++i) seq.push_back(vpb.body()[i % big.n_s()]);
    bool exact = true;
    for (std::int64_t d = -531; d <= 531; d += 7) {
        const auto w = profile_window(vpb, d, big.window_length());
        for (std::size_t k = 0; k < w.size(); ++k) exact = exact && w[k] == seq[std::size_t(d + lead) + k];
    }
    if (!exact) v.pass = false;
    v.detail += exact ? "; profile windows bit-exact" : "; profile window mismatch";

    // Determinism: same seed, same results and serialized output.
    auto spec = preset_spec("fig2");
    spec.values = {0.0, 10.0};
    spec.trials = 40;
    const auto a = run_sweep(spec);
    spec.workers = 2;
    const auto b = run_sweep(spec);
    std::ostringstream sa, sb;
    write_sweep_csv(sa, a);
    write_sweep_csv(sb, b);
    bool same = sa.str() == sb.str();
    for (std::size_t p = 0; p < a.outcomes.size(); ++p) {
        for (std::size_t t = 0; t < a.outcomes[p].size(); ++t) {
            same = same && a.outcomes[p][t].d_hat == b.outcomes[p][t].d_hat &&
                   a.outcomes[p][t].d_true == b.outcomes[p][t].d_true;
        }
    }
    const auto wa = assemble_window(spec.base, spec.pdp, spec.noise, -5, StreamSeeds::for_trial(kSeed, 3), 30);
    const auto wb = assemble_window(spec.base, spec.pdp, spec.noise, -5, StreamSeeds::for_trial(kSeed, 3), 30);
    same = same && wa.samples == wb.samples;
    if (!same) v.pass = false;
    v.detail += same ? "; fixed-seed runs bit-exact" : "; fixed-seed runs differ";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"1 moment validation at 15 dB", c1_table_moments},
        {"2 high-SNR consistency", c2_high_snr},
        {"3 lock-in versus SNR", c3_snr_monotone},
        {"4 lock-in versus observed blocks", c4_blocks_monotone},
        {"5 WED and A-ML agree under Gaussian noise", c5_wed_aml_equivalence},
        {"6 ED versus WED", c6_ed_vs_wed},
        {"7 MIMO gain", c7_mimo_gain},
        {"8 lock-in versus p0", c8_impulsiveness},
        {"9 delay-profile error sensitivity", c9_pdp_error},
        {"10 runtime scaling", c10_complexity},
        {"11 unit-level oracles", c11_unit_oracles},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), s);
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
