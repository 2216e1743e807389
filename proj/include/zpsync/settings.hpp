#ifndef ZPSYNC_SETTINGS_HPP
#define ZPSYNC_SETTINGS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zpsync/harness.hpp"

namespace zpsync {

/**
 * Flat key/value experiment settings.
 *
 * Text format: one `key = value` per line, `#` starts a comment, lists are
 * comma separated. Later assignments override earlier ones, so a preset can
 * be loaded first, then a config file, then command-line flags. Every value
 * remembers where it came from for diagnostics.
 */
class Settings {
public:
    struct Entry {
        std::string value;
        std::string origin;  ///< "file:line" or "--flag"
    };

    /// Parses text; throws ConfigError with "<origin>:<line>" on malformed lines or unknown keys.
    void merge_text(const std::string& text, const std::string& origin);
    /// Throws ConfigError naming the path when it cannot be read.
    void merge_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value, const std::string& origin);

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
    [[nodiscard]] const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] std::size_t get_size(const std::string& key, std::size_t fallback) const;
    [[nodiscard]] std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    [[nodiscard]] std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    [[nodiscard]] std::vector<double> get_doubles(const std::string& key,
                                                  const std::vector<double>& fallback) const;
    [[nodiscard]] std::vector<std::string> get_strings(const std::string& key,
                                                       const std::vector<std::string>& fallback) const;

    /// Canonical text form; merge_text of it reproduces the same settings.
    [[nodiscard]] std::string dump() const;

    static const std::vector<std::string>& known_keys();

private:
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    std::map<std::string, Entry> entries_;
};

/// Directory holding the bundled preset files.
std::filesystem::path preset_directory();
/// Loads `<preset_directory>/<name>.cfg` into settings.
void load_preset(Settings& settings, const std::string& name);

SystemConfig system_from_settings(const Settings& s);
DelayProfile pdp_from_settings(const Settings& s, std::size_t n_h);
NoiseMixture noise_from_settings(const Settings& s);
SnrReference snr_reference_from_settings(const Settings& s);

ExperimentSpec experiment_from_settings(const Settings& s);
MomentSpec moment_from_settings(const Settings& s);
ScalingSpec scaling_from_settings(const Settings& s);

/// Parses "2x2" into an antenna pair.
AntennaPair parse_antenna_pair(const std::string& text);
/// Parses "-30:30" (or "-30,30") into a hypothesis set.
HypothesisSet parse_delay_range(const std::string& text);

}  // namespace zpsync

#endif  // ZPSYNC_SETTINGS_HPP
