#pragma once

#include "coarse/actions.hpp"
#include "coarse/io.hpp"
#include "coarse/pipeline.hpp"
#include "coarse/property_a.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coarse {

struct PropertyAConfig {
  /// "ball:N", "singleton" or "file:PATH"; empty when only a kernel is given.
  std::string witness;
  /// Kernel descriptor ("triangular:N", "gaussian:sigma"); empty for none.
  std::string kernel;
  std::optional<Ladder> ladder;
  DistanceBound bound = DistanceBound::inclusive;
  std::int64_t margin = 0;
};

struct OutputPaths {
  std::string json = "report.json";
  std::string text = "report.txt";
  std::string csv;  // kernel CSV, optional
};

/// Scenario configuration (JSON). Unknown keys are rejected. Exact thresholds
/// are strings ("1/8"); relative paths resolve against the config directory.
struct ScenarioConfig {
  std::string id;
  ScenarioSpec scenario;
  std::optional<std::int64_t> window;
  SectionPolicy policy = SectionPolicy::min_length_then_lex;
  std::vector<ScheduleEntry> schedule;
  std::optional<ThetaSpec> theta;
  PipelineOptions pipeline;
  /// R_max for the fitted control functions of check-action.
  std::int64_t control_radius = 20;
  std::optional<PropertyAConfig> property_a;
  /// Metric document checked by check-metric.
  std::string metric_file;
  OutputPaths outputs;
  std::string base_dir;
};

ScenarioConfig parse_config(const Json& doc, const std::string& base_dir);
/// Rejects extensions other than .json.
ScenarioConfig load_config(const std::string& path);

/// Space descriptor after the window override.
std::string effective_space(const ScenarioConfig& config);
ScenarioSpec effective_scenario(const ScenarioConfig& config);

/// Resolves a path relative to the config directory.
std::string resolve_path(const ScenarioConfig& config, const std::string& path);

}  // namespace coarse
