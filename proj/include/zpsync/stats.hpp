#ifndef ZPSYNC_STATS_HPP
#define ZPSYNC_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace zpsync {

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// True when the two intervals share at least one point.
constexpr bool overlaps(const Interval& a, const Interval& b) noexcept {
    return a.lo <= b.hi && b.lo <= a.hi;
}

/**
 * Sample moments. Skewness and kurtosis follow the ratios
 *   skewness = E{(Y - mu)^3} / E{(Y - mu)^2}
 *   kurtosis = E{(Y - mu)^4} / E{(Y - mu)^2}^2
 * with plain (1/n) central moments.
 */
struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    /// Standard error of `skewness` from the delta method on the third moment.
    double skewness_stderr = 0.0;
};

Moments sample_moments(std::span<const double> values);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1 edges
    std::vector<std::size_t> counts;
};

/// Freedman-Diaconis bin width 2 IQR n^(-1/3), bins clamped to [1, max_bins].
Histogram freedman_diaconis(std::span<const double> values, std::size_t max_bins = 400);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace zpsync

#endif  // ZPSYNC_STATS_HPP
