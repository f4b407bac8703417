#pragma once

#include "coarse/metric.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace coarse {

// Built-in space windows. Point ids:
//   Z-window:N    "-N".."N"                 d = |m - n|,     depth N - |n|
//   Z2-window:N   "(x,y)", max(|x|,|y|)<=N   l1 word metric,  depth N - max(|x|,|y|)
//   ZZ-window:N   "a:n" and "b:n"           |m - n| within a copy, 2N+1 across
//   points:n      "1".."n"                  discrete metric, closed
//   cycle:n       "0".."n-1"                cycle-graph metric, closed
//   file:PATH     JSON window document (see io.hpp)

MetricWindow z_window(std::int64_t radius);
MetricWindow z2_window(std::int64_t radius);
MetricWindow zz_window(std::int64_t radius);
MetricWindow discrete_points(std::int64_t n);
MetricWindow cycle_window(std::int64_t n);

/// Parses a space descriptor. File windows are validated on ingest and
/// rejected with a ConfigError when a metric invariant fails.
WindowPtr make_space(std::string_view descriptor);

/// Window radius encoded by a built-in descriptor (0 for closed spaces and files).
std::int64_t descriptor_radius(std::string_view descriptor);

/// Integer value of a Z-window point id; throws DomainError otherwise.
std::int64_t integer_point(std::string_view id);

}  // namespace coarse
