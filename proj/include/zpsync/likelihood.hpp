#ifndef ZPSYNC_LIKELIHOOD_HPP
#define ZPSYNC_LIKELIHOOD_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zpsync/channel.hpp"
#include "zpsync/config.hpp"

namespace zpsync {

/**
 * Per-sample variance of the in-phase part of the noiseless received signal
 * under zero delay, as a two-sided sequence: 0 at negative indices and
 * periodic with period n_s at non-negative ones. Only the period (`body`) is
 * stored; windows for any delay hypothesis index into it.
 */
class VarianceProfile {
public:
    explicit VarianceProfile(std::vector<double> body);

    [[nodiscard]] std::span<const double> body() const noexcept { return body_; }
    [[nodiscard]] std::size_t period() const noexcept { return body_.size(); }

    /// Sequence value at stream index idx.
    [[nodiscard]] double at(std::int64_t idx) const noexcept {
        if (idx < 0) return 0.0;
        return body_[static_cast<std::size_t>(idx) % body_.size()];
    }

private:
    std::vector<double> body_;
};

/**
 * body[k] = (sigma_x2 / 2) * sum_{r=a}^{b} sigma^2_h,r with
 *   (a, b) = (0, k)                 for 0 <= k <= n_h - 2
 *            (0, n_h - 1)           for n_h - 1 <= k <= n_x - 1
 *            (k - n_x + 1, n_h - 1) for n_x <= k <= n_x + n_h - 2
 * and 0 on the rest of the zero pad. With m_t > 1 each antenna contributes
 * with power sigma_x2 / m_t through an identically distributed channel.
 */
VarianceProfile variance_profile_h0(const SystemConfig& config, const DelayProfile& profile);

/// Sequence values at indices d..d+m-1.
std::vector<double> profile_window(const VarianceProfile& vp, std::int64_t d, std::size_t m);

/// sum_l p_l N(z; 0, t + sigma^2_l / 2). Throws DomainError for t < 0.
double b_function(double z, double t, const NoiseMixture& mixture);
/// log of b_function, evaluated with a max-shifted log-sum-exp.
double log_b_function(double z, double t, const NoiseMixture& mixture);

/// b_function(Re c, kappa) * b_function(Im c, kappa). Throws DomainError for kappa < 0.
double p_function(cplx c, double kappa, const NoiseMixture& mixture);
double log_p_function(cplx c, double kappa, const NoiseMixture& mixture);

struct HypothesisScore {
    std::int64_t d;
    double loglik;
};

/**
 * Approximate log-likelihood of the observation under delay hypothesis d:
 * sum over antennas and samples of log P(y_j[k], profile_window(vp, d, m)[k]).
 * Reference implementation; LikelihoodKernel computes the same sums faster.
 */
HypothesisScore window_loglik(std::span<const Samples> y, std::int64_t d,
                              const VarianceProfile& vp, const NoiseMixture& mixture);

/**
 * Precomputed per-(profile, mixture) coefficients for fast hypothesis scoring.
 *
 * For each of the n_s body positions plus one noise-only slot and each
 * mixture component l it stores log p_l - log(2 pi v) / 2 and 1 / (2 v) with
 * v = kappa + sigma^2_l / 2. Scoring one hypothesis is one pass over the
 * window.
 */
class LikelihoodKernel {
public:
    LikelihoodKernel(const VarianceProfile& vp, const NoiseMixture& mixture);

    /// Log-likelihood for every d in [d_min, d_max].
    [[nodiscard]] std::vector<double> scores(std::span<const Samples> y, std::int64_t d_min,
                                             std::int64_t d_max) const;

    [[nodiscard]] double score(std::span<const Samples> y, std::int64_t d) const {
        return scores(y, d, d).front();
    }

private:
    template <std::size_t L>
    double accumulate(std::span<const double> z2, std::int64_t d) const;
    double accumulate_any(std::span<const double> z2, std::int64_t d) const;

    std::size_t period_;
    std::size_t components_;
    // Slot-major: [slot][component]; slot n_s is the noise-only slot.
    std::vector<double> log_coef_;
    std::vector<double> inv_two_var_;
};

}  // namespace zpsync

#endif  // ZPSYNC_LIKELIHOOD_HPP
