#include "zpsync/stats.hpp"

#include <algorithm>
#include <cmath>

#include "zpsync/error.hpp"

namespace zpsync {

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw ConfigError("Wilson interval needs at least one trial");
    if (successes > trials) throw ConfigError("more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // Clamp so the interval always contains p despite rounding at p = 0 or 1.
    return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

Moments sample_moments(std::span<const double> values) {
    Moments m;
    m.count = values.size();
    if (values.empty()) return m;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / n;
    double c2 = 0.0, c3 = 0.0, c4 = 0.0, c6 = 0.0;
    for (double v : values) {
        const double e = v - m.mean;
        const double e2 = e * e;
        c2 += e2;
        c3 += e2 * e;
        c4 += e2 * e2;
        c6 += e2 * e2 * e2;
    }
    c2 /= n;
    c3 /= n;
    c4 /= n;
    c6 /= n;
    m.variance = c2;
    if (c2 > 0.0) {
        m.skewness = c3 / c2;
        m.kurtosis = c4 / (c2 * c2);
        // Var of the third central moment, including the mean-estimation term.
        const double var_c3 = (c6 - c3 * c3 - 6.0 * c4 * c2 + 9.0 * c2 * c2 * c2) / n;
        m.skewness_stderr = std::sqrt(std::max(var_c3, 0.0)) / c2;
    }
    return m;
}

Histogram freedman_diaconis(std::span<const double> values, std::size_t max_bins) {
    if (values.empty()) throw ConfigError("histogram of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double lo = sorted.front(), hi = sorted.back();
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
    std::size_t bins = 1;
    if (width > 0.0 && hi > lo) {
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        bins = std::clamp<std::size_t>(bins, 1, max_bins);
    }
    Histogram h;
    const double span = hi > lo ? hi - lo : 1.0;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.edges[b] = lo + span * static_cast<double>(b) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    for (double v : sorted) {
        auto b = static_cast<std::size_t>((v - lo) / span * static_cast<double>(bins));
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("regression needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw ConfigError("regression abscissae are all equal");
    return sxy / sxx;
}

}  // namespace zpsync
