#include "zpsync/settings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "zpsync/error.hpp"

#ifndef ZPSYNC_PRESET_DIR
#define ZPSYNC_PRESET_DIR "presets"
#endif

namespace zpsync {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& text, std::int64_t& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

const std::vector<std::string>& Settings::known_keys() {
    static const std::vector<std::string> keys = {
        "description", "n_x", "n_z", "n_h", "blocks", "tx_antennas", "rx_antennas", "mod_order",
        "sigma_x2", "sample_rate", "snr_db", "gaussian_source", "pdp", "pdp_alpha", "pdp_beta",
        "pdp_normalized", "pdp_powers", "noise", "noise_weights", "noise_variances",
        "snr_reference", "delay_min", "delay_max", "trials", "seed", "estimators", "sweep",
        "sweep_values", "workers", "moment_indices", "size_multipliers", "record_timing"};
    return keys;
}

void Settings::merge_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        set(key, value, where);
    }
}

void Settings::merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    merge_text(buf.str(), path.string());
}

void Settings::set(const std::string& key, const std::string& value, const std::string& origin) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    entries_[key] = {value, origin};
}

void Settings::fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string origin = it == entries_.end() ? "default" : it->second.origin;
    throw ConfigError(origin + ": field '" + key + "': " + what);
}

std::string Settings::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double Settings::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    double v = 0.0;
    if (!parse_double(it->second.value, v)) fail(key, "expected a number, got '" + it->second.value + "'");
    return v;
}

std::int64_t Settings::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::int64_t v = 0;
    if (!parse_int(it->second.value, v)) fail(key, "expected an integer, got '" + it->second.value + "'");
    return v;
}

std::size_t Settings::get_size(const std::string& key, std::size_t fallback) const {
    const auto v = get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) fail(key, "must be non-negative");
    return static_cast<std::size_t>(v);
}

std::uint64_t Settings::get_seed(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto& text = it->second.value;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(key, "expected an unsigned 64-bit integer, got '" + text + "'");
    }
    return v;
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto& v = it->second.value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false, got '" + v + "'");
}

std::vector<double> Settings::get_doubles(const std::string& key,
                                          const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(it->second.value)) {
        double v = 0.0;
        if (!parse_double(item, v)) fail(key, "expected a number list, bad item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> Settings::get_strings(const std::string& key,
                                               const std::vector<std::string>& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : split_list(it->second.value);
}

std::string Settings::dump() const {
    std::string out;
    for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
    return out;
}

std::filesystem::path preset_directory() {
    if (const char* env = std::getenv("ZPSYNC_PRESET_DIR"); env != nullptr && *env != '\0') return env;
    return ZPSYNC_PRESET_DIR;
}

void load_preset(Settings& settings, const std::string& name) {
    const auto path = preset_directory() / (name + ".cfg");
    if (!std::filesystem::exists(path)) {
        throw ConfigError("unknown preset '" + name + "' (no " + path.string() + ")");
    }
    settings.merge_file(path);
}

SystemConfig system_from_settings(const Settings& s) {
    SystemConfig c;
    c.n_x = s.get_size("n_x", c.n_x);
    c.n_z = s.get_size("n_z", c.n_z);
    c.n_h = s.get_size("n_h", c.n_h);
    c.n_blocks = s.get_size("blocks", c.n_blocks);
    c.m_t = s.get_size("tx_antennas", c.m_t);
    c.m_r = s.get_size("rx_antennas", c.m_r);
    c.mod_order = s.get_size("mod_order", c.mod_order);
    c.sigma_x2 = s.get_double("sigma_x2", c.sigma_x2);
    c.sample_rate = s.get_double("sample_rate", c.sample_rate);
    c.snr_db = s.get_double("snr_db", c.snr_db);
    c.gaussian_source = s.get_bool("gaussian_source", c.gaussian_source);
    c.validate();
    return c;
}

DelayProfile pdp_from_settings(const Settings& s, std::size_t n_h) {
    const auto kind = s.get_string("pdp", "exponential");
    const bool normalized = s.get_bool("pdp_normalized", false);
    if (kind == "exponential") {
        return DelayProfile::exponential(s.get_double("pdp_alpha", 1.0), s.get_double("pdp_beta", 0.05),
                                         n_h, normalized);
    }
    if (kind == "explicit") {
        auto powers = s.get_doubles("pdp_powers", {});
        if (powers.size() != n_h) {
            throw ConfigError("field 'pdp_powers': expected " + std::to_string(n_h) + " taps, got " +
                              std::to_string(powers.size()));
        }
        return DelayProfile(std::move(powers), normalized);
    }
    throw ConfigError("field 'pdp': expected exponential or explicit, got '" + kind + "'");
}

NoiseMixture noise_from_settings(const Settings& s) {
    const auto kind = s.get_string("noise", "impulsive");
    if (kind == "gaussian") return NoiseMixture::gaussian(1.0);
    if (kind != "impulsive") {
        throw ConfigError("field 'noise': expected gaussian or impulsive, got '" + kind + "'");
    }
    const auto w = s.get_doubles("noise_weights", {0.99, 0.01});
    const auto v = s.get_doubles("noise_variances", {1.0, 100.0});
    if (w.size() != v.size() || w.empty()) {
        throw ConfigError("fields 'noise_weights' and 'noise_variances' must have equal, non-zero length");
    }
    std::vector<NoiseMixture::Component> comps;
    for (std::size_t i = 0; i < w.size(); ++i) comps.push_back({w[i], v[i]});
    return NoiseMixture(std::move(comps));
}

SnrReference snr_reference_from_settings(const Settings& s) {
    const auto ref = s.get_string("snr_reference", "average");
    if (ref == "average") return SnrReference::AveragePower;
    if (ref == "background") return SnrReference::BackgroundComponent;
    throw ConfigError("field 'snr_reference': expected average or background, got '" + ref + "'");
}

AntennaPair parse_antenna_pair(const std::string& text) {
    const auto x = text.find('x');
    std::int64_t t = 0, r = 0;
    if (x == std::string::npos || !parse_int(trim(text.substr(0, x)), t) ||
        !parse_int(trim(text.substr(x + 1)), r) || t < 1 || r < 1) {
        throw ConfigError("antenna configuration must look like '2x2', got '" + text + "'");
    }
    return {static_cast<std::size_t>(t), static_cast<std::size_t>(r)};
}

HypothesisSet parse_delay_range(const std::string& text) {
    auto sep = text.find(':', 1);
    if (sep == std::string::npos) sep = text.find(',', 1);
    std::int64_t lo = 0, hi = 0;
    if (sep == std::string::npos || !parse_int(trim(text.substr(0, sep)), lo) ||
        !parse_int(trim(text.substr(sep + 1)), hi) || lo > hi) {
        throw ConfigError("delay range must look like '-30:30', got '" + text + "'");
    }
    return {lo, hi};
}

ExperimentSpec experiment_from_settings(const Settings& s) {
    ExperimentSpec spec;
    spec.base = system_from_settings(s);
    spec.pdp = pdp_from_settings(s, spec.base.n_h);
    spec.noise = noise_from_settings(s);
    spec.snr_reference = snr_reference_from_settings(s);
    spec.axis = parse_sweep_axis(s.get_string("sweep", "snr"));
    if (spec.axis == SweepAxis::Antennas) {
        for (const auto& item : s.get_strings("sweep_values", {"1x1"})) {
            spec.antennas.push_back(parse_antenna_pair(item));
        }
    } else {
        spec.values = s.get_doubles("sweep_values", {spec.base.snr_db});
    }
    spec.trials = s.get_size("trials", spec.trials);
    spec.master_seed = s.get_seed("seed", 1);
    spec.estimators.clear();
    for (const auto& name : s.get_strings("estimators", {"aml"})) {
        spec.estimators.push_back(parse_estimator(name));
    }
    spec.delays = {s.get_int("delay_min", -30), s.get_int("delay_max", 30)};
    spec.workers = s.get_size("workers", 1);
    spec.record_timing = s.get_bool("record_timing", true);
    spec.validate();
    return spec;
}

MomentSpec moment_from_settings(const Settings& s) {
    MomentSpec spec;
    spec.config = system_from_settings(s);
    spec.pdp = pdp_from_settings(s, spec.config.n_h);
    spec.noise = noise_from_settings(s);
    spec.snr_reference = snr_reference_from_settings(s);
    spec.indices.clear();
    for (double k : s.get_doubles("moment_indices", {1, 150})) {
        if (k < 0 || k != static_cast<double>(static_cast<std::size_t>(k))) {
            throw ConfigError("field 'moment_indices': indices must be non-negative integers");
        }
        if (static_cast<std::size_t>(k) >= spec.config.n_s()) {
            throw ConfigError("field 'moment_indices': index " + std::to_string(static_cast<std::size_t>(k)) +
                              " out of range [0, " + std::to_string(spec.config.n_s() - 1) + "]");
        }
        spec.indices.push_back(static_cast<std::size_t>(k));
    }
    spec.trials = s.get_size("trials", spec.trials);
    spec.master_seed = s.get_seed("seed", 1);
    spec.workers = s.get_size("workers", 1);
    return spec;
}

ScalingSpec scaling_from_settings(const Settings& s) {
    ScalingSpec spec;
    spec.base = system_from_settings(s);
    spec.pdp = pdp_from_settings(s, spec.base.n_h);
    spec.noise = noise_from_settings(s);
    spec.multipliers.clear();
    for (double m : s.get_doubles("size_multipliers", {1, 2, 4})) {
        if (m < 1 || m != static_cast<double>(static_cast<std::size_t>(m))) {
            throw ConfigError("field 'size_multipliers': multipliers must be integers >= 1");
        }
        spec.multipliers.push_back(static_cast<std::size_t>(m));
    }
    spec.trials = s.get_size("trials", spec.trials);
    spec.master_seed = s.get_seed("seed", 1);
    spec.delays = {s.get_int("delay_min", -30), s.get_int("delay_max", 30)};
    return spec;
}

}  // namespace zpsync
