#pragma once

#include "coarse/config.hpp"
#include "coarse/reports.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coarse {

/// Properness, cocompactness, section and coarse-equivalence data for an action.
struct ActionCertificate {
  ProperCheck proper;
  CocompactCheck cocompact;
  std::optional<std::string> axiom_violation;
  std::size_t orbit_size = 0;
  std::string section_policy;
  std::int64_t psi_ball_radius = 0;
  std::vector<std::int64_t> psi_control_up;
  std::vector<std::int64_t> psi_properness;
  std::int64_t phi_ball_radius = 0;
  std::vector<std::int64_t> phi_control_up;
  ClosenessCertificate phi_psi;  // phi o psi against the identity of the group ball
  ClosenessCertificate psi_phi;  // psi o phi against the identity of the orbit
  bool pass = false;
};

/// The group ball for psi has radius min(2 r_max, depth(x0)).
ActionCertificate certify_action(const ScenarioPtr& scenario, SectionPolicy policy, std::int64_t r_max,
                                 const ProperOptions& options = {});

struct CommandOptions {
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> window;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_ball;
  std::optional<double> tol;
};

void apply_overrides(ScenarioConfig& config, const CommandOptions& options);

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  int exit_code = 0;
  Json report;
  std::string text;
  std::vector<OutputFile> extra;  // CSV and similar
};

CommandResult cmd_check_action(const ScenarioConfig& config);
CommandResult cmd_property_a(const ScenarioConfig& config, std::uint64_t seed);
CommandResult cmd_run_pipeline(const ScenarioConfig& config);
CommandResult cmd_verify_operators(const ScenarioConfig& config);
CommandResult cmd_export_kernel(const ScenarioConfig& config);
CommandResult cmd_check_metric(const ScenarioConfig& config);

/// Writes the JSON and text reports (and extras) under `dir`.
void write_outputs(const ScenarioConfig& config, const CommandResult& result, const std::string& dir);

}  // namespace coarse
