#include "zpsync/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zpsync/error.hpp"

namespace zpsync {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2 pi)

}  // namespace

VarianceProfile::VarianceProfile(std::vector<double> body) : body_(std::move(body)) {
    if (body_.empty()) throw ConfigError("variance profile needs a non-empty period");
    for (double v : body_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("variance profile entries must be >= 0");
    }
}

VarianceProfile variance_profile_h0(const SystemConfig& config, const DelayProfile& profile) {
    config.validate();
    const std::size_t n_x = config.n_x, n_h = profile.size();
    if (n_h > config.n_z) throw ConfigError("delay profile longer than the zero pad");
    if (n_h > n_x) throw ConfigError("delay profile longer than the data part");

    // prefix[b + 1] = sum_{r <= b} sigma^2_h,r
    std::vector<double> prefix(n_h + 1, 0.0);
    for (std::size_t r = 0; r < n_h; ++r) prefix[r + 1] = prefix[r] + profile[r];

    const double half_power =
        static_cast<double>(config.m_t) * config.per_antenna_power() / 2.0;
    std::vector<double> body(config.n_s(), 0.0);
    for (std::size_t k = 0; k + 1 < n_x + n_h; ++k) {
        const std::size_t a = k < n_x ? 0 : k - n_x + 1;
        const std::size_t b = std::min(k, n_h - 1);
        body[k] = half_power * (prefix[b + 1] - prefix[a]);
    }
    return VarianceProfile(std::move(body));
}

std::vector<double> profile_window(const VarianceProfile& vp, std::int64_t d, std::size_t m) {
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = vp.at(d + static_cast<std::int64_t>(k));
    return out;
}

double log_b_function(double z, double t, const NoiseMixture& mixture) {
    if (!(t >= 0.0)) throw DomainError("B-function shape t must be >= 0, got " + std::to_string(t));
    const auto comps = mixture.components();
    double terms[8];
    std::vector<double> spill;
    double* x = terms;
    if (comps.size() > 8) {
        spill.resize(comps.size());
        x = spill.data();
    }
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < comps.size(); ++l) {
        const double v = t + comps[l].variance / 2.0;
        x[l] = std::log(comps[l].weight) - 0.5 * (kLogTwoPi + std::log(v)) - z * z / (2.0 * v);
        hi = std::max(hi, x[l]);
    }
    double acc = 0.0;
    for (std::size_t l = 0; l < comps.size(); ++l) acc += std::exp(x[l] - hi);
    return hi + std::log(acc);
}

double b_function(double z, double t, const NoiseMixture& mixture) {
    return std::exp(log_b_function(z, t, mixture));
}

double log_p_function(cplx c, double kappa, const NoiseMixture& mixture) {
    if (!(kappa >= 0.0)) {
        throw DomainError("P-function shape kappa must be >= 0, got " + std::to_string(kappa));
    }
    return log_b_function(c.real(), kappa, mixture) + log_b_function(c.imag(), kappa, mixture);
}

double p_function(cplx c, double kappa, const NoiseMixture& mixture) {
    return std::exp(log_p_function(c, kappa, mixture));
}

HypothesisScore window_loglik(std::span<const Samples> y, std::int64_t d,
                              const VarianceProfile& vp, const NoiseMixture& mixture) {
    if (y.empty()) throw ConfigError("window has no antennas");
    const std::size_t m = y.front().size();
    for (const auto& a : y) {
        if (a.size() != m) throw ConfigError("antenna windows differ in length");
    }
    const auto kappa = profile_window(vp, d, m);
    double total = 0.0;
    for (const auto& a : y) {
        for (std::size_t k = 0; k < m; ++k) total += log_p_function(a[k], kappa[k], mixture);
    }
    return {d, total};
}

LikelihoodKernel::LikelihoodKernel(const VarianceProfile& vp, const NoiseMixture& mixture)
    : period_(vp.period()), components_(mixture.size()) {
    const auto comps = mixture.components();
    log_coef_.resize((period_ + 1) * components_);
    inv_two_var_.resize((period_ + 1) * components_);
    for (std::size_t slot = 0; slot <= period_; ++slot) {
        const double kappa = slot < period_ ? vp.body()[slot] : 0.0;
        for (std::size_t l = 0; l < components_; ++l) {
            const double v = kappa + comps[l].variance / 2.0;
            log_coef_[slot * components_ + l] =
                std::log(comps[l].weight) - 0.5 * (kLogTwoPi + std::log(v));
            inv_two_var_[slot * components_ + l] = 1.0 / (2.0 * v);
        }
    }
}

template <std::size_t L>
double LikelihoodKernel::accumulate(std::span<const double> z2, std::int64_t d) const {
    const auto m = static_cast<std::int64_t>(z2.size() / 2);
    const double* c = log_coef_.data();
    const double* a = inv_two_var_.data();

    auto log_b = [&](std::size_t slot, double zz) {
        const double* cs = c + slot * L;
        const double* as = a + slot * L;
        if constexpr (L == 1) {
            return cs[0] - as[0] * zz;
        } else {
            const double x0 = cs[0] - as[0] * zz;
            const double x1 = cs[1] - as[1] * zz;
            const double hi = std::max(x0, x1);
            return hi + std::log1p(std::exp(std::min(x0, x1) - hi));
        }
    };

    double total = 0.0;
    std::int64_t k = 0;
    if (d < 0) {
        const std::int64_t noise_only = std::min(m, -d);
        for (; k < noise_only; ++k) total += log_b(period_, z2[2 * k]) + log_b(period_, z2[2 * k + 1]);
    }
    if (k < m) {
        std::size_t slot = static_cast<std::size_t>(d + k) % period_;
        for (; k < m; ++k) {
            total += log_b(slot, z2[2 * k]) + log_b(slot, z2[2 * k + 1]);
            if (++slot == period_) slot = 0;
        }
    }
    return total;
}

double LikelihoodKernel::accumulate_any(std::span<const double> z2, std::int64_t d) const {
    const auto m = static_cast<std::int64_t>(z2.size() / 2);
    std::vector<double> x(components_);
    auto log_b = [&](std::size_t slot, double zz) {
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < components_; ++l) {
            x[l] = log_coef_[slot * components_ + l] - inv_two_var_[slot * components_ + l] * zz;
            hi = std::max(hi, x[l]);
        }
        double acc = 0.0;
        for (double v : x) acc += std::exp(v - hi);
        return hi + std::log(acc);
    };
    double total = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
        const std::int64_t idx = d + k;
        const std::size_t slot = idx < 0 ? period_ : static_cast<std::size_t>(idx) % period_;
        total += log_b(slot, z2[2 * k]) + log_b(slot, z2[2 * k + 1]);
    }
    return total;
}

std::vector<double> LikelihoodKernel::scores(std::span<const Samples> y, std::int64_t d_min,
                                             std::int64_t d_max) const {
    if (y.empty()) throw ConfigError("window has no antennas");
    if (d_min > d_max) throw ConfigError("empty hypothesis range");
    const std::size_t m = y.front().size();

    std::vector<std::vector<double>> squares;
    squares.reserve(y.size());
    for (const auto& a : y) {
        if (a.size() != m) throw ConfigError("antenna windows differ in length");
        std::vector<double> z2(2 * m);
        for (std::size_t k = 0; k < m; ++k) {
            z2[2 * k] = a[k].real() * a[k].real();
            z2[2 * k + 1] = a[k].imag() * a[k].imag();
        }
        squares.push_back(std::move(z2));
    }

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(d_max - d_min + 1));
    for (std::int64_t d = d_min; d <= d_max; ++d) {
        double total = 0.0;
        for (const auto& z2 : squares) {
            switch (components_) {
                case 1: total += accumulate<1>(z2, d); break;
                case 2: total += accumulate<2>(z2, d); break;
                default: total += accumulate_any(z2, d); break;
            }
        }
        out.push_back(total);
    }
    return out;
}

}  // namespace zpsync
