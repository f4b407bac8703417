#include "coarse/metric.hpp"

#include "coarse/error.hpp"

#include <algorithm>

namespace coarse {

MetricWindow::MetricWindow(std::string label, std::vector<std::string> points,
                           std::vector<std::int64_t> dist, std::vector<std::int64_t> depth)
    : label_(std::move(label)),
      points_(std::move(points)),
      dist_(std::move(dist)),
      depth_(std::move(depth)) {
  const std::size_t n = points_.size();
  if (dist_.size() != n * n) {
    throw ConfigError("window '" + label_ + "': distance matrix is not " + std::to_string(n) +
                      "x" + std::to_string(n));
  }
  if (depth_.empty()) depth_.assign(n, kUnboundedDepth);
  if (depth_.size() != n) throw ConfigError("window '" + label_ + "': depth table size mismatch");
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(points_[i], i).second) {
      throw ConfigError("window '" + label_ + "': duplicate point id '" + points_[i] + "'");
    }
  }
}

MetricWindow MetricWindow::from_function(
    std::string label, std::vector<std::string> points,
    const std::function<std::int64_t(std::size_t, std::size_t)>& dist,
    std::vector<std::int64_t> depth) {
  const std::size_t n = points.size();
  std::vector<std::int64_t> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = dist(i, j);
  }
  return MetricWindow(std::move(label), std::move(points), std::move(d), std::move(depth));
}

bool MetricWindow::has_boundary() const noexcept {
  return std::any_of(depth_.begin(), depth_.end(),
                     [](std::int64_t d) { return d < kUnboundedDepth; });
}

std::optional<std::size_t> MetricWindow::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MetricWindow::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw DomainError("point '" + std::string(id) + "' is not in window '" + label_ + "'");
}

MetricWindow MetricWindow::restrict(std::span<const std::size_t> indices, std::string label) const {
  const std::size_t m = indices.size();
  std::vector<std::string> pts;
  std::vector<std::int64_t> dep;
  pts.reserve(m);
  dep.reserve(m);
  for (std::size_t i : indices) {
    pts.push_back(points_.at(i));
    dep.push_back(depth_[i]);
  }
  std::vector<std::int64_t> d(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) d[a * m + b] = dist(indices[a], indices[b]);
  }
  return MetricWindow(std::move(label), std::move(pts), std::move(d), std::move(dep));
}

std::vector<std::size_t> MetricWindow::interior(std::int64_t margin) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (depth_[i] >= margin) out.push_back(i);
  }
  return out;
}

MetricVerdict verify_metric(const MetricWindow& w) {
  if (w.empty()) throw ConfigError("verify_metric: empty window");
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (w.dist(i, i) != 0) return {false, "identity", {i}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto d = w.dist(i, j);
      if (d < 0) return {false, "negative", {i, j}};
      if (d != w.dist(j, i)) return {false, "symmetry", {i, j}};
      // Integer distances: d >= 1 is both separation and uniform discreteness.
      if (d == 0) return {false, "separation", {i, j}};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const auto dik = w.dist(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        if (w.dist(i, j) + w.dist(j, k) < dik) return {false, "triangle", {i, j, k}};
      }
    }
  }
  return {};
}

std::vector<std::size_t> ball(const MetricWindow& w, std::size_t center, std::int64_t radius) {
  if (center >= w.size()) throw DomainError("ball: center index out of range");
  if (radius < 0) throw DomainError("ball: negative radius");
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < w.size(); ++q) {
    if (w.dist(center, q) <= radius) out.push_back(q);
  }
  return out;
}

std::vector<std::size_t> ball(const MetricWindow& w, std::string_view center, std::int64_t radius) {
  return ball(w, w.index_of(center), radius);
}

BoundedGeometryCertificate check_bounded_geometry(const MetricWindow& w, std::int64_t radius) {
  if (radius < 0) throw DomainError("check_bounded_geometry: negative radius");
  BoundedGeometryCertificate cert{radius, 0, 0, w.label()};
  for (std::size_t c = 0; c < w.size(); ++c) {
    std::size_t count = 0;
    for (std::size_t q = 0; q < w.size(); ++q) count += w.dist(c, q) <= radius ? 1 : 0;
    if (count > cert.max_ball_size) {
      cert.max_ball_size = count;
      cert.worst_center = c;
    }
  }
  return cert;
}

PointMap make_point_map(const MetricWindow& source, const MetricWindow& target,
                        const std::function<std::string(const std::string&)>& fn) {
  PointMap map(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::string image = fn(source.point(i));
    const auto j = target.find(image);
    if (!j) {
      throw DomainError("map image '" + image + "' of '" + source.point(i) +
                        "' is outside window '" + target.label() + "'");
    }
    map[i] = *j;
  }
  return map;
}

CoarseMapCheck fit_control_function(const PointMap& map, WindowPtr source, WindowPtr target,
                                    std::int64_t r_max) {
  if (r_max < 0) throw DomainError("fit_control_function: negative R_max");
  if (map.size() != source->size()) throw DomainError("fit_control_function: map is not total");
  const std::size_t n = source->size();
  const auto slots = static_cast<std::size_t>(r_max) + 1;

  std::vector<std::int64_t> best(slots, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p; q < n; ++q) {
      const auto d = source->dist(p, q);
      if (d > r_max) continue;
      auto& slot = best[static_cast<std::size_t>(d)];
      slot = std::max(slot, target->dist(map[p], map[q]));
    }
  }
  for (std::size_t r = 1; r < slots; ++r) best[r] = std::max(best[r], best[r - 1]);

  // properness_table(S): max source-diameter of f^{-1}(ball(c, S)) over target centers c.
  std::vector<std::int64_t> proper(slots, 0);
  std::vector<std::size_t> pre;
  for (std::size_t c = 0; c < target->size(); ++c) {
    for (std::size_t s = 0; s < slots; ++s) {
      pre.clear();
      for (std::size_t p = 0; p < n; ++p) {
        if (target->dist(map[p], c) <= static_cast<std::int64_t>(s)) pre.push_back(p);
      }
      std::int64_t diam = 0;
      for (std::size_t a = 0; a < pre.size(); ++a) {
        for (std::size_t b = a + 1; b < pre.size(); ++b) {
          diam = std::max(diam, source->dist(pre[a], pre[b]));
        }
      }
      proper[s] = std::max(proper[s], diam);
    }
  }
  return {std::move(source), std::move(target), map, std::move(best), std::move(proper)};
}

std::vector<std::optional<std::int64_t>> compose_controls(const std::vector<std::int64_t>& inner,
                                                          const std::vector<std::int64_t>& outer) {
  std::vector<std::optional<std::int64_t>> out(inner.size());
  for (std::size_t r = 0; r < inner.size(); ++r) {
    const auto s = inner[r];
    if (s >= 0 && static_cast<std::size_t>(s) < outer.size()) out[r] = outer[static_cast<std::size_t>(s)];
  }
  return out;
}

ClosenessCertificate check_closeness(const PointMap& f, const PointMap& g,
                                     const MetricWindow& target, std::optional<std::int64_t> cap) {
  if (f.size() != g.size()) throw DomainError("check_closeness: maps have different sources");
  ClosenessCertificate cert;
  for (std::size_t p = 0; p < f.size(); ++p) {
    const auto d = target.dist(f[p], g[p]);
    if (d > cert.bound) {
      cert.bound = d;
      cert.worst_point = p;
    }
  }
  cert.within_cap = !cap || cert.bound <= *cap;
  return cert;
}

DensityVerdict check_r_density(std::span<const std::size_t> subset, const MetricWindow& w,
                               std::int64_t radius) {
  for (std::size_t p = 0; p < w.size(); ++p) {
    const bool covered = std::any_of(subset.begin(), subset.end(),
                                     [&](std::size_t s) { return w.dist(p, s) <= radius; });
    if (!covered) return {false, p};
  }
  return {};
}

}  // namespace coarse
