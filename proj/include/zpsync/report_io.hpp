#ifndef ZPSYNC_REPORT_IO_HPP
#define ZPSYNC_REPORT_IO_HPP

#include <filesystem>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace zpsync {

struct ExperimentSpec;
struct MomentSpec;
struct ScalingSpec;
struct SweepReport;
struct MomentReport;
struct ScalingReport;

nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const MomentSpec& spec);
nlohmann::json to_json(const ScalingSpec& spec);

/// 16 hex digits of FNV-1a over the compact JSON dump.
std::string config_hash(const nlohmann::json& j);

/// axis_value,estimator,trials,successes,p_hat,ci_lo,ci_hi,mean_ns
void write_sweep_csv(std::ostream& out, const SweepReport& report);
/// k,mean,variance,skewness,kurtosis,skewness_stderr,analytic_mean,analytic_variance,analytic_kurtosis,trials
void write_moment_csv(std::ostream& out, const MomentReport& report);
/// bin_lo,bin_hi,count,empirical_density,analytic_density for one row of the report
void write_histogram_csv(std::ostream& out, const MomentReport& report, std::size_t row);
/// multiplier,samples,aml_ns,ed_ns
void write_scaling_csv(std::ostream& out, const ScalingReport& report);

/// Spec, seed, config hash and version next to a result file.
nlohmann::json sidecar(const nlohmann::json& spec, std::uint64_t seed, const std::string& hash,
                       const std::string& version);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace zpsync

#endif  // ZPSYNC_REPORT_IO_HPP
