#include "coarse/spaces.hpp"

#include "coarse/error.hpp"
#include "coarse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace coarse {

namespace {

std::int64_t parse_size(std::string_view descriptor, std::string_view prefix) {
  const auto body = descriptor.substr(prefix.size());
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || v < 0) {
    throw ConfigError("bad size in space descriptor '" + std::string(descriptor) + "'");
  }
  return v;
}

}  // namespace

std::int64_t integer_point(std::string_view id) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
  if (ec != std::errc() || ptr != id.data() + id.size() || id.empty()) {
    throw DomainError("point '" + std::string(id) + "' is not an integer");
  }
  return v;
}

MetricWindow z_window(std::int64_t radius) {
  std::vector<std::string> pts;
  std::vector<std::int64_t> depth;
  for (std::int64_t n = -radius; n <= radius; ++n) {
    pts.push_back(std::to_string(n));
    depth.push_back(radius - std::llabs(n));
  }
  return MetricWindow::from_function(
      "Z-window:" + std::to_string(radius), std::move(pts),
      [](std::size_t i, std::size_t j) {
        return static_cast<std::int64_t>(i > j ? i - j : j - i);
      },
      std::move(depth));
}

MetricWindow z2_window(std::int64_t radius) {
  std::vector<std::string> pts;
  std::vector<std::int64_t> depth;
  std::vector<std::pair<std::int64_t, std::int64_t>> coords;
  for (std::int64_t x = -radius; x <= radius; ++x) {
    for (std::int64_t y = -radius; y <= radius; ++y) {
      pts.push_back("(" + std::to_string(x) + "," + std::to_string(y) + ")");
      depth.push_back(radius - std::max(std::llabs(x), std::llabs(y)));
      coords.emplace_back(x, y);
    }
  }
  return MetricWindow::from_function(
      "Z2-window:" + std::to_string(radius), std::move(pts),
      [&](std::size_t i, std::size_t j) {
        return std::llabs(coords[i].first - coords[j].first) +
               std::llabs(coords[i].second - coords[j].second);
      },
      std::move(depth));
}

MetricWindow zz_window(std::int64_t radius) {
  std::vector<std::string> pts;
  std::vector<std::int64_t> depth;
  const std::int64_t per_copy = 2 * radius + 1;
  for (const char* copy : {"a:", "b:"}) {
    for (std::int64_t n = -radius; n <= radius; ++n) {
      pts.push_back(copy + std::to_string(n));
      depth.push_back(radius - std::llabs(n));
    }
  }
  return MetricWindow::from_function(
      "ZZ-window:" + std::to_string(radius), std::move(pts),
      [&](std::size_t i, std::size_t j) -> std::int64_t {
        const auto ci = static_cast<std::int64_t>(i) / per_copy;
        const auto cj = static_cast<std::int64_t>(j) / per_copy;
        if (ci != cj) return per_copy;
        return std::llabs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
      },
      std::move(depth));
}

MetricWindow discrete_points(std::int64_t n) {
  std::vector<std::string> pts;
  for (std::int64_t i = 1; i <= n; ++i) pts.push_back(std::to_string(i));
  return MetricWindow::from_function("points:" + std::to_string(n), std::move(pts),
                                     [](std::size_t i, std::size_t j) -> std::int64_t {
                                       return i == j ? 0 : 1;
                                     });
}

MetricWindow cycle_window(std::int64_t n) {
  std::vector<std::string> pts;
  for (std::int64_t i = 0; i < n; ++i) pts.push_back(std::to_string(i));
  return MetricWindow::from_function(
      "cycle:" + std::to_string(n), std::move(pts),
      [n](std::size_t i, std::size_t j) -> std::int64_t {
        const auto d = std::llabs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
        return std::min(d, n - d);
      });
}

WindowPtr make_space(std::string_view descriptor) {
  if (descriptor.starts_with("Z-window:")) {
    return std::make_shared<const MetricWindow>(z_window(parse_size(descriptor, "Z-window:")));
  }
  if (descriptor.starts_with("Z2-window:")) {
    return std::make_shared<const MetricWindow>(z2_window(parse_size(descriptor, "Z2-window:")));
  }
  if (descriptor.starts_with("ZZ-window:")) {
    return std::make_shared<const MetricWindow>(zz_window(parse_size(descriptor, "ZZ-window:")));
  }
  if (descriptor.starts_with("points:")) {
    const auto n = parse_size(descriptor, "points:");
    if (n == 0) throw ConfigError("points:0 is empty");
    return std::make_shared<const MetricWindow>(discrete_points(n));
  }
  if (descriptor.starts_with("cycle:")) {
    const auto n = parse_size(descriptor, "cycle:");
    if (n == 0) throw ConfigError("cycle:0 is empty");
    return std::make_shared<const MetricWindow>(cycle_window(n));
  }
  if (descriptor.starts_with("file:")) {
    return std::make_shared<const MetricWindow>(load_valid_window(std::string(descriptor.substr(5))));
  }
  throw ConfigError("unknown space descriptor '" + std::string(descriptor) + "'");
}

std::int64_t descriptor_radius(std::string_view descriptor) {
  for (std::string_view prefix : {"Z-window:", "Z2-window:", "ZZ-window:"}) {
    if (descriptor.starts_with(prefix)) return parse_size(descriptor, prefix);
  }
  return 0;
}

}  // namespace coarse
