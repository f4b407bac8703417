// coarsekit: scenario runner for the coarse-geometry checks.
//
// Exit codes: 0 certified, 1 a verdict failed, 2 configuration or resource
// error, 3 internal invariant violation.

#include "coarse/commands.hpp"
#include "coarse/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run(const std::string& command, const std::string& config_path, const coarse::CommandOptions& opts) {
  auto config = coarse::load_config(config_path);
  coarse::apply_overrides(config, opts);
  coarse::CommandResult res;
  if (command == "check-action") {
    res = coarse::cmd_check_action(config);
  } else if (command == "property-a") {
    res = coarse::cmd_property_a(config, opts.seed.value_or(0));
  } else if (command == "run-pipeline") {
    res = coarse::cmd_run_pipeline(config);
  } else if (command == "verify-operators") {
    res = coarse::cmd_verify_operators(config);
  } else if (command == "export-kernel") {
    res = coarse::cmd_export_kernel(config);
  } else {
    res = coarse::cmd_check_metric(config);
  }
  if (opts.out_dir) {
    coarse::write_outputs(config, res, *opts.out_dir);
    if (command != "export-kernel") std::cout << res.text;
  } else {
    std::cout << res.text;
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarsekit - property A kernels, proper actions and Roe-algebra operators on finite windows"};
  app.require_subcommand(1);

  std::string config_path;
  coarse::CommandOptions opts;
  std::string out;
  std::int64_t window = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_ball = 0;
  double tol = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check-action", "properness, cocompactness, section and closeness certificate"},
      {"property-a", "witness, kernel and ladder checks"},
      {"run-pipeline", "build and certify the kernel u from a cp approximant"},
      {"verify-operators", "s_x^* s_y sweep over interior pairs"},
      {"export-kernel", "write a kernel as CSV"},
      {"check-metric", "validate a metric window file"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "scenario config (.json)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory for reports");
    sub->add_option("--window", window, "window radius override")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized witnesses");
    sub->add_option("--max-ball", max_ball, "group ball size cap")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "PSD tolerance")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  auto* sub = app.get_subcommand(command);
  if (sub->count("--out")) opts.out_dir = out;
  if (sub->count("--window")) opts.window = window;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--max-ball")) opts.max_ball = max_ball;
  if (sub->count("--tol")) opts.tol = tol;

  try {
    return run(command, config_path, opts);
  } catch (const coarse::InvariantViolation& e) {
    std::cerr << "coarsekit: " << e.what() << "\n";
    return 3;
  } catch (const coarse::Error& e) {
    std::cerr << "coarsekit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "coarsekit: " << e.what() << "\n";
    return 3;
  }
}
