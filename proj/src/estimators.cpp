#include "zpsync/estimators.hpp"

#include <string>

#include "zpsync/error.hpp"

namespace zpsync {

namespace {

template <typename Better>
std::int64_t pick(const std::vector<double>& scores, std::int64_t d_min, Better better) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (better(scores[i], scores[best])) best = i;
    }
    return d_min + static_cast<std::int64_t>(best);
}

void require_antennas(const ReceivedWindow& window) {
    if (window.samples.empty() || window.length() == 0) throw ConfigError("empty observation window");
    for (const auto& a : window.samples) {
        if (a.size() != window.length()) throw ConfigError("antenna windows differ in length");
    }
}

}  // namespace

void HypothesisSet::validate(std::size_t n_s) const {
    const auto limit = static_cast<std::int64_t>(n_s) - 1;
    if (d_min > d_max) throw ConfigError("empty hypothesis set");
    if (d_min < -limit || d_max > limit) {
        throw ConfigError("hypothesis set [" + std::to_string(d_min) + ", " + std::to_string(d_max) +
                          "] outside [-" + std::to_string(limit) + ", " + std::to_string(limit) + "]");
    }
}

std::string_view to_string(EstimatorId id) noexcept {
    switch (id) {
        case EstimatorId::Aml: return "aml";
        case EstimatorId::Wed: return "wed";
        case EstimatorId::Ed: return "ed";
    }
    return "?";
}

EstimatorId parse_estimator(std::string_view name) {
    if (name == "aml") return EstimatorId::Aml;
    if (name == "wed") return EstimatorId::Wed;
    if (name == "ed") return EstimatorId::Ed;
    throw ConfigError("unknown estimator '" + std::string(name) + "' (expected aml, wed or ed)");
}

EstimateResult aml_estimate(const ReceivedWindow& window, const LikelihoodKernel& kernel,
                            const HypothesisSet& hyp) {
    if (hyp.size() == 0) throw ConfigError("empty hypothesis set");
    require_antennas(window);
    EstimateResult result;
    result.estimator = EstimatorId::Aml;
    result.scores = kernel.scores(window.samples, hyp.d_min, hyp.d_max);
    result.d_hat = pick(result.scores, hyp.d_min, [](double a, double b) { return a > b; });
    return result;
}

EstimateResult aml_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            const NoiseMixture& mixture, const HypothesisSet& hyp) {
    return aml_estimate(window, LikelihoodKernel(vp, mixture), hyp);
}

EstimateResult wed_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            double noise_var, const HypothesisSet& hyp) {
    if (hyp.size() == 0) throw ConfigError("empty hypothesis set");
    if (hyp.d_min < 0) throw PreconditionError("WED is only defined for non-negative delays");
    if (!(noise_var > 0.0)) throw PreconditionError("WED needs a positive noise variance");
    require_antennas(window);

    const std::size_t n_s = vp.period();
    std::vector<double> weight(n_s);
    for (std::size_t s = 0; s < n_s; ++s) weight[s] = 1.0 / (vp.body()[s] + noise_var / 2.0);

    const std::size_t m = window.length();
    std::vector<double> energy(m, 0.0);
    for (const auto& a : window.samples) {
        for (std::size_t k = 0; k < m; ++k) energy[k] += std::norm(a[k]);
    }

    EstimateResult result;
    result.estimator = EstimatorId::Wed;
    result.scores.reserve(hyp.size());
    for (std::int64_t d = hyp.d_min; d <= hyp.d_max; ++d) {
        std::size_t slot = static_cast<std::size_t>(d) % n_s;
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            total += energy[k] * weight[slot];
            if (++slot == n_s) slot = 0;
        }
        result.scores.push_back(total);
    }
    result.d_hat = pick(result.scores, hyp.d_min, [](double a, double b) { return a < b; });
    return result;
}

EstimateResult wed_estimate(const ReceivedWindow& window, const VarianceProfile& vp,
                            const NoiseMixture& mixture, const HypothesisSet& hyp) {
    if (!mixture.is_gaussian()) {
        throw PreconditionError("WED requires Gaussian noise, got a " +
                                std::to_string(mixture.size()) + "-component mixture");
    }
    return wed_estimate(window, vp, mixture.components().front().variance, hyp);
}

EstimateResult ed_estimate(const ReceivedWindow& window, const SystemConfig& config,
                           const HypothesisSet& hyp) {
    if (hyp.size() == 0) throw ConfigError("empty hypothesis set");
    const auto last_valid = static_cast<std::int64_t>(config.n_x + config.n_h) - 1;
    if (hyp.d_min < 0 || hyp.d_max > last_valid) {
        throw PreconditionError("ED hypotheses must lie in [0, " + std::to_string(last_valid) + "]");
    }
    require_antennas(window);
    if (window.length() < config.window_length()) {
        throw PreconditionError("ED needs a window of at least n_blocks * n_s samples");
    }

    EstimateResult result;
    result.estimator = EstimatorId::Ed;
    result.scores.reserve(hyp.size());
    const auto blocks = static_cast<std::int64_t>(config.n_blocks);
    for (std::int64_t d = hyp.d_min; d <= hyp.d_max; ++d) {
        double total = 0.0;
        for (const auto& a : window.samples) {
            for (std::int64_t r = 0; r < blocks; ++r) {
                const auto end = ed_region_end(config, r, d);
                for (auto k = ed_region_begin(config, r, d); k <= end; ++k) {
                    total += std::norm(a[static_cast<std::size_t>(k)]);
                }
            }
        }
        result.scores.push_back(total);
    }
    result.d_hat = pick(result.scores, hyp.d_min, [](double a, double b) { return a < b; });
    return result;
}

}  // namespace zpsync
