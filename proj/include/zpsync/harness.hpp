#ifndef ZPSYNC_HARNESS_HPP
#define ZPSYNC_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zpsync/channel.hpp"
#include "zpsync/config.hpp"
#include "zpsync/estimators.hpp"
#include "zpsync/stats.hpp"

namespace zpsync {

enum class SweepAxis { Snr, Blocks, Antennas, P0, PdpError };

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_sweep_axis(std::string_view name);

struct AntennaPair {
    std::size_t m_t = 1;
    std::size_t m_r = 1;
};

/**
 * One Monte-Carlo experiment: a base link, a sweep axis with its values, and
 * the estimators to run on every window.
 *
 * `noise` gives the mixture shape; each point rescales it to its SNR. For the
 * P0 axis the first two components' variances are kept and the weights are
 * replaced by (p0, 1 - p0). `delays` is both the range d_true is drawn from
 * and the search set of every estimator.
 */
struct ExperimentSpec {
    SystemConfig base;
    DelayProfile pdp = DelayProfile::exponential(1.0, 0.05, 10);
    NoiseMixture noise = NoiseMixture({{0.99, 1.0}, {0.01, 100.0}});
    SnrReference snr_reference = SnrReference::AveragePower;
    SweepAxis axis = SweepAxis::Snr;
    std::vector<double> values;         ///< all axes except Antennas
    std::vector<AntennaPair> antennas;  ///< Antennas axis
    std::size_t trials = 500;
    std::uint64_t master_seed = 1;
    std::vector<EstimatorId> estimators = {EstimatorId::Aml};
    HypothesisSet delays{-30, 30};
    std::size_t workers = 1;
    /// Record wall-clock time per estimate; the only non-reproducible output.
    bool record_timing = true;

    [[nodiscard]] std::size_t point_count() const noexcept {
        return axis == SweepAxis::Antennas ? antennas.size() : values.size();
    }
    /// Throws ConfigError naming the offending point or estimator.
    void validate() const;
};

struct TrialOutcome {
    std::size_t trial_index = 0;
    std::int64_t d_true = 0;
    std::vector<std::int64_t> d_hat;    ///< one per selected estimator
    std::vector<std::int64_t> elapsed;  ///< ns, one per selected estimator
};

struct SweepRow {
    std::string axis_value;
    EstimatorId estimator = EstimatorId::Aml;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double p_hat = 0.0;
    Interval ci{0.0, 0.0};
    double mean_ns = 0.0;
};

struct SweepReport {
    SweepAxis axis = SweepAxis::Snr;
    std::vector<SweepRow> rows;  ///< point-major, estimator-minor
    std::vector<std::vector<TrialOutcome>> outcomes;  ///< per point
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::string version;

    /// Row for (point index, estimator); throws std::out_of_range if absent.
    [[nodiscard]] const SweepRow& row(std::size_t point, EstimatorId id) const;
};

SweepReport run_sweep(const ExperimentSpec& spec);

/// run_sweep over the PdpError axis; rejects any alpha outside [0, 1).
SweepReport run_pdp_sensitivity(ExperimentSpec spec, const std::vector<double>& alphas);

/// (1 + A_k alpha) sigma^2_h,k with A_k uniform on {-1, 1} per tap.
DelayProfile perturb_profile(const DelayProfile& profile, double alpha, Rng& rng);

/// Draws the true delay of a trial; shared by every sweep point.
std::int64_t draw_delay(std::uint64_t master_seed, std::size_t trial, const HypothesisSet& range);

struct MomentSpec {
    SystemConfig config;  ///< snr_db is the operating point; n_blocks is ignored
    DelayProfile pdp = DelayProfile::exponential(1.0, 0.05, 10, true);
    NoiseMixture noise = NoiseMixture::gaussian(1.0);
    SnrReference snr_reference = SnrReference::AveragePower;
    std::vector<std::size_t> indices = {1, 150};
    std::size_t trials = 100000;
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;

    void validate() const;
};

struct MomentRow {
    std::size_t k = 0;
    Moments empirical;
    double analytic_mean = 0.0;
    double analytic_variance = 0.0;
    /// Kurtosis of the approximating Gaussian mixture (3 for Gaussian noise).
    double analytic_kurtosis = 3.0;
    Histogram histogram;
    std::vector<double> analytic_density;  ///< B-function at each bin centre
};

struct MomentReport {
    std::vector<MomentRow> rows;
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::string version;
};

/**
 * Empirical moments of the in-phase received sample Y_I[k] at zero delay,
 * next to the moments of the approximate density used by the estimators.
 * Throws RangeError for an index outside [0, n_s - 1].
 */
MomentReport run_moment_validation(const MomentSpec& spec);

struct ScalingSpec {
    SystemConfig base;
    DelayProfile pdp = DelayProfile::exponential(1.0, 0.05, 10);
    NoiseMixture noise = NoiseMixture({{0.99, 1.0}, {0.01, 100.0}});
    std::vector<std::size_t> multipliers = {1, 2, 4};
    std::size_t trials = 5;
    std::uint64_t master_seed = 1;
    HypothesisSet delays{-30, 30};

    void validate() const;
};

struct ScalingRow {
    std::size_t multiplier = 1;
    std::size_t samples = 0;  ///< N * n_s
    double aml_ns = 0.0;
    double ed_ns = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0.0;               ///< log-log slope of A-ML time vs N * n_s
    double max_doubling_ratio = 0.0;  ///< largest time ratio across a 2x size step
};

/**
 * Times aml_estimate (and ed_estimate on a same-sized non-negative set) as n_x
 * and n_z are scaled by each multiplier with |D| fixed. Needs >= 3 sizes.
 */
ScalingReport run_runtime_scaling(const ScalingSpec& spec);

/// Runs body(i) for i in [0, count) on `workers` threads; rethrows the first exception.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

std::string library_version();

}  // namespace zpsync

#endif  // ZPSYNC_HARNESS_HPP
