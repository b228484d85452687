#pragma once

// Experiment configuration and its JSON form (snake_case keys).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tvrls/estimators.hpp"
#include "tvrls/regularizers.hpp"

namespace tvrls {

enum class DataMode { pe, non_pe };

const char* to_string(DataMode mode);
std::optional<DataMode> data_mode_from_string(std::string_view name);

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::fading;
  double mu = 0.99;
  std::optional<std::size_t> k_cut = 201;
  std::optional<std::size_t> j_cut = 1;
  double r0_scale = 1.0;
};

struct DataConfig {
  DataMode mode = DataMode::pe;
  double noise_std = 0.0;
  std::size_t steps = 400;
  /// Last step with nonzero regressors in non_pe mode.
  std::size_t non_pe_stop = 100;
};

struct ExperimentConfig {
  std::size_t n = 100;
  std::size_t p = 2;
  std::uint64_t seed = 1;
  ScheduleConfig schedule;
  DataConfig data;
  std::size_t trials = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::classical, EstimatorKind::fr,
                                        EstimatorKind::r1fr};
  /// 0 selects ExcitationMonitor::default_cadence(n).
  std::size_t monitor_cadence = 0;

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Parses and validates. Unknown keys are rejected; a meta.json record is
/// accepted through its "config" member.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies "dotted.key=value" to a JSON document. The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

}  // namespace tvrls
