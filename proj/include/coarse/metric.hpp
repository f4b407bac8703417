#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coarse {

/// Depth value for points whose ambient space is the window itself.
inline constexpr std::int64_t kUnboundedDepth = std::numeric_limits<std::int64_t>::max() / 4;

/// A finite window of a discrete metric space. Points are opaque string ids
/// whose listed order fixes all downstream matrix indexing.
///
/// `depth(i)` is the largest r such that the ambient closed r-ball about
/// point i lies inside the window; it drives every interior restriction.
class MetricWindow {
 public:
  MetricWindow(std::string label, std::vector<std::string> points,
               std::vector<std::int64_t> dist, std::vector<std::int64_t> depth = {});

  static MetricWindow from_function(
      std::string label, std::vector<std::string> points,
      const std::function<std::int64_t(std::size_t, std::size_t)>& dist,
      std::vector<std::int64_t> depth = {});

  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<std::string>& points() const noexcept { return points_; }
  const std::string& point(std::size_t i) const { return points_.at(i); }

  std::int64_t dist(std::size_t i, std::size_t j) const noexcept {
    return dist_[i * points_.size() + j];
  }
  std::int64_t depth(std::size_t i) const noexcept { return depth_[i]; }
  bool has_boundary() const noexcept;

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws DomainError when the id is not a window point.
  std::size_t index_of(std::string_view id) const;

  /// Sub-window on the listed indices, in the listed order.
  MetricWindow restrict(std::span<const std::size_t> indices, std::string label) const;

  /// Indices with depth(i) >= margin, in window order.
  std::vector<std::size_t> interior(std::int64_t margin) const;

  const std::vector<std::int64_t>& dist_matrix() const noexcept { return dist_; }
  const std::vector<std::int64_t>& depths() const noexcept { return depth_; }

 private:
  std::string label_;
  std::vector<std::string> points_;
  std::vector<std::int64_t> dist_;
  std::vector<std::int64_t> depth_;
  std::unordered_map<std::string, std::size_t> index_;
};

using WindowPtr = std::shared_ptr<const MetricWindow>;

// ---------------------------------------------------------------------------
// Certificates and verdicts

struct MetricVerdict {
  bool valid = true;
  std::string violation;             // "negative", "identity", "symmetry", "separation", "triangle"
  std::vector<std::size_t> witness;  // offending pair or triple
};

struct BoundedGeometryCertificate {
  std::int64_t radius = 0;
  std::size_t max_ball_size = 0;
  std::size_t worst_center = 0;
  std::string witnessed_on;
};

/// Source index -> target index.
using PointMap = std::vector<std::size_t>;

struct CoarseMapCheck {
  WindowPtr source;
  WindowPtr target;
  PointMap map;
  std::vector<std::int64_t> control_up;       // indexed by R = 0..R_max
  std::vector<std::int64_t> properness_table; // indexed by S = 0..R_max
};

struct ClosenessCertificate {
  std::int64_t bound = 0;
  std::size_t worst_point = 0;
  bool within_cap = true;
};

struct DensityVerdict {
  bool dense = true;
  std::optional<std::size_t> uncovered;
};

// ---------------------------------------------------------------------------
// Operations

MetricVerdict verify_metric(const MetricWindow& window);

std::vector<std::size_t> ball(const MetricWindow& window, std::size_t center, std::int64_t radius);
std::vector<std::size_t> ball(const MetricWindow& window, std::string_view center,
                              std::int64_t radius);

BoundedGeometryCertificate check_bounded_geometry(const MetricWindow& window, std::int64_t radius);

/// Builds a PointMap from an id-level function; throws DomainError when an
/// image is not a target point.
PointMap make_point_map(const MetricWindow& source, const MetricWindow& target,
                        const std::function<std::string(const std::string&)>& fn);

CoarseMapCheck fit_control_function(const PointMap& map, WindowPtr source, WindowPtr target,
                                    std::int64_t r_max);

/// Composition of two control tables: outer(inner(R)), saturating at the
/// last entry of `outer` (returns nullopt past it).
std::vector<std::optional<std::int64_t>> compose_controls(const std::vector<std::int64_t>& inner,
                                                          const std::vector<std::int64_t>& outer);

ClosenessCertificate check_closeness(const PointMap& f, const PointMap& g,
                                     const MetricWindow& target,
                                     std::optional<std::int64_t> cap = std::nullopt);

DensityVerdict check_r_density(std::span<const std::size_t> subset, const MetricWindow& window,
                               std::int64_t radius);

}  // namespace coarse
