#ifndef ZPSYNC_ESTIMATORS_HPP
#define ZPSYNC_ESTIMATORS_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "zpsync/channel.hpp"
#include "zpsync/config.hpp"
#include "zpsync/likelihood.hpp"

namespace zpsync {

/// Contiguous delay search set [d_min, d_max].
struct HypothesisSet {
    std::int64_t d_min = 0;
    std::int64_t d_max = 0;

    [[nodiscard]] std::size_t size() const noexcept {
        return d_max < d_min ? 0 : static_cast<std::size_t>(d_max - d_min + 1);
    }
    /// Throws ConfigError unless -n_s + 1 <= d_min <= d_max <= n_s - 1.
    void validate(std::size_t n_s) const;
};

enum class EstimatorId { Aml, Wed, Ed };

std::string_view to_string(EstimatorId id) noexcept;
/// Parses "aml", "wed" or "ed"; throws ConfigError otherwise.
EstimatorId parse_estimator(std::string_view name);

struct EstimateResult {
    std::int64_t d_hat = 0;
    std::vector<double> scores;  ///< scores[i] belongs to d = d_min + i
    EstimatorId estimator = EstimatorId::Aml;
};

/**
 * Approximate ML timing-offset estimate: the d maximizing the summed
 * log P-function over all receive antennas. Ties go to the smallest d.
 */
EstimateResult aml_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            const NoiseMixture& mixture, const HypothesisSet& hyp);

/// Same estimate with a kernel built once and reused across windows.
EstimateResult aml_estimate(const ReceivedWindow& window, const LikelihoodKernel& kernel,
                            const HypothesisSet& hyp);

/**
 * Weighted energy detector: argmin over d >= 0 of
 * sum |y[k]|^2 / (kappa_d[k] + noise_var / 2). Only defined for Gaussian
 * noise; the mixture overload throws PreconditionError for L > 1, and both
 * throw PreconditionError for negative hypotheses.
 */
EstimateResult wed_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            double noise_var, const HypothesisSet& hyp);
EstimateResult wed_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            const NoiseMixture& mixture, const HypothesisSet& hyp);

/**
 * Energy detector: argmin over d of the energy in the hypothesized zero
 * tails, sum_{r=0}^{N-1} sum_{k=phi1(d)}^{phi2(d)} |y[k]|^2 with
 * phi1(d) = n_x + n_h - 1 + r n_s - d and phi2(d) = (r + 1) n_s - 1 - d.
 * Requires 0 <= d_min and d_max <= n_x + n_h - 1 so every region lies in the
 * window; throws PreconditionError otherwise.
 */
EstimateResult ed_estimate(const ReceivedWindow& window, const SystemConfig& config,
                           const HypothesisSet& hyp);

/// First index of the zero-tail region of block r under hypothesis d.
constexpr std::int64_t ed_region_begin(const SystemConfig& c, std::int64_t r, std::int64_t d) {
    return static_cast<std::int64_t>(c.n_x + c.n_h) - 1 + r * static_cast<std::int64_t>(c.n_s()) - d;
}
/// Last index (inclusive) of the zero-tail region of block r under hypothesis d.
constexpr std::int64_t ed_region_end(const SystemConfig& c, std::int64_t r, std::int64_t d) {
    return (r + 1) * static_cast<std::int64_t>(c.n_s()) - 1 - d;
}

}  // namespace zpsync

#endif  // ZPSYNC_ESTIMATORS_HPP
