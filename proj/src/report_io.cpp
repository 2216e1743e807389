#include "zpsync/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "zpsync/harness.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

namespace {

nlohmann::json to_json(const SystemConfig& c) {
    return {{"n_x", c.n_x},           {"n_z", c.n_z},
            {"n_h", c.n_h},           {"n_blocks", c.n_blocks},
            {"m_t", c.m_t},           {"m_r", c.m_r},
            {"mod_order", c.mod_order}, {"sigma_x2", c.sigma_x2},
            {"sample_rate", c.sample_rate}, {"snr_db", c.snr_db},
            {"gaussian_source", c.gaussian_source}};
}

nlohmann::json to_json(const DelayProfile& p) {
    return nlohmann::json(std::vector<double>(p.powers().begin(), p.powers().end()));
}

nlohmann::json to_json(const NoiseMixture& m) {
    auto arr = nlohmann::json::array();
    for (const auto& c : m.components()) arr.push_back({{"weight", c.weight}, {"variance", c.variance}});
    return arr;
}

std::string_view to_string(SnrReference r) {
    return r == SnrReference::AveragePower ? "average" : "background";
}

// Round-trip precision so CSVs reproduce the in-memory values exactly.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["system"] = to_json(spec.base);
    j["pdp"] = to_json(spec.pdp);
    j["noise"] = to_json(spec.noise);
    j["snr_reference"] = to_string(spec.snr_reference);
    j["sweep"] = to_string(spec.axis);
    if (spec.axis == SweepAxis::Antennas) {
        auto arr = nlohmann::json::array();
        for (const auto& a : spec.antennas) arr.push_back(std::to_string(a.m_t) + "x" + std::to_string(a.m_r));
        j["sweep_values"] = arr;
    } else {
        j["sweep_values"] = spec.values;
    }
    j["trials"] = spec.trials;
    j["seed"] = spec.master_seed;
    auto est = nlohmann::json::array();
    for (auto e : spec.estimators) est.push_back(to_string(e));
    j["estimators"] = est;
    j["delay_range"] = {spec.delays.d_min, spec.delays.d_max};
    return j;
}

nlohmann::json to_json(const MomentSpec& spec) {
    return {{"system", to_json(spec.config)},
            {"pdp", to_json(spec.pdp)},
            {"noise", to_json(spec.noise)},
            {"snr_reference", to_string(spec.snr_reference)},
            {"indices", spec.indices},
            {"trials", spec.trials},
            {"seed", spec.master_seed}};
}

nlohmann::json to_json(const ScalingSpec& spec) {
    return {{"system", to_json(spec.base)},
            {"pdp", to_json(spec.pdp)},
            {"noise", to_json(spec.noise)},
            {"multipliers", spec.multipliers},
            {"trials", spec.trials},
            {"seed", spec.master_seed},
            {"delay_range", {spec.delays.d_min, spec.delays.d_max}}};
}

std::string config_hash(const nlohmann::json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(tag_hash(j.dump())));
    return buf;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "axis_value,estimator,trials,successes,p_hat,ci_lo,ci_hi,mean_ns\n";
    for (const auto& r : report.rows) {
        out << r.axis_value << ',' << to_string(r.estimator) << ',' << r.trials << ',' << r.successes
            << ',' << num(r.p_hat) << ',' << num(r.ci.lo) << ',' << num(r.ci.hi) << ','
            << num(r.mean_ns) << '\n';
    }
}

void write_moment_csv(std::ostream& out, const MomentReport& report) {
    out << "k,mean,variance,skewness,kurtosis,skewness_stderr,analytic_mean,analytic_variance,"
           "analytic_kurtosis,trials\n";
    for (const auto& r : report.rows) {
        const auto& e = r.empirical;
        out << r.k << ',' << num(e.mean) << ',' << num(e.variance) << ',' << num(e.skewness) << ','
            << num(e.kurtosis) << ',' << num(e.skewness_stderr) << ',' << num(r.analytic_mean) << ','
            << num(r.analytic_variance) << ',' << num(r.analytic_kurtosis) << ',' << e.count << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const MomentReport& report, std::size_t row) {
    const auto& r = report.rows.at(row);
    const auto& h = r.histogram;
    out << "bin_lo,bin_hi,count,empirical_density,analytic_density\n";
    const double n = static_cast<double>(r.empirical.count);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double width = h.edges[b + 1] - h.edges[b];
        const double density = width > 0.0 ? static_cast<double>(h.counts[b]) / (n * width) : 0.0;
        out << num(h.edges[b]) << ',' << num(h.edges[b + 1]) << ',' << h.counts[b] << ','
            << num(density) << ',' << num(r.analytic_density[b]) << '\n';
    }
}

void write_scaling_csv(std::ostream& out, const ScalingReport& report) {
    out << "multiplier,samples,aml_ns,ed_ns\n";
    for (const auto& r : report.rows) {
        out << r.multiplier << ',' << r.samples << ',' << num(r.aml_ns) << ',' << num(r.ed_ns) << '\n';
    }
}

nlohmann::json sidecar(const nlohmann::json& spec, std::uint64_t seed, const std::string& hash,
                       const std::string& version) {
    return {{"spec", spec}, {"seed", seed}, {"config_hash", hash}, {"version", version}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace zpsync
