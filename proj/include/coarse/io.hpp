#pragma once

#include "coarse/metric.hpp"
#include "coarse/operators.hpp"
#include "coarse/pipeline.hpp"
#include "coarse/property_a.hpp"

#include <json.hpp>

#include <string>

namespace coarse {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; missing files and syntax errors are ConfigErrors.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Window document:
//   {"label": "...", "points": ["p", ...], "dist": [[0, 1, ...], ...], "depth": [..]}
// "depth" is optional; without it the window is a closed space.

struct LoadedWindow {
  MetricWindow window;
  MetricVerdict verdict;
};

/// Shape errors throw; metric violations are reported in the verdict.
LoadedWindow window_from_json(const Json& doc, const std::string& where);
LoadedWindow load_window_json(const std::string& path);
/// Throws ConfigError naming the violated axiom.
MetricWindow load_valid_window(const std::string& path);

std::string describe_violation(const MetricWindow& window, const MetricVerdict& verdict);

// Witness document: {"sets": {"p": [["q", tag], ...], ...}, "support_bound": S}
// Every window point needs a set. "support_bound" defaults to the tightest value.
WitnessFamily witness_from_json(const Json& doc, WindowPtr space);
WitnessFamily load_witness_json(const std::string& path, WindowPtr space);

// Operator triplets: [["row id", "col id", "p/q"], ...]
BandedOperator operator_from_triplets(const Json& triplets, WindowPtr window);
Json operator_to_triplets(const BandedOperator& op);
std::string matrix_market(const BandedOperator& op);

// Theta document: {"terms": [{"a": "id", "b": "id", "T": [triplets]}, ...]}
CpApproximant theta_from_json(const Json& doc, WindowPtr y_window);
CpApproximant load_theta_json(const std::string& path, WindowPtr y_window);

/// "x,y,d,u" rows in window order; exact values where available.
std::string kernel_csv(const Kernel& u);

}  // namespace coarse
