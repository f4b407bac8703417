#pragma once

#include "coarse/linalg.hpp"
#include "coarse/metric.hpp"
#include "coarse/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coarse {

/// For each point x, a finite nonempty subset A_x of X x N, stored as sorted
/// unique (point index, tag) pairs; tags are positive.
struct WitnessFamily {
  WindowPtr space;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> sets;
  std::int64_t support_bound = 0;
};

/// Checks nonemptiness, tag positivity, sortedness and the support bound.
void validate_witness(const WitnessFamily& w);

/// A_x = (B_N(x) intersected with the window) x {1}.
WitnessFamily ball_witness(WindowPtr space, std::int64_t radius);
/// A_x = {(x, 1)}.
WitnessFamily singleton_witness(WindowPtr space);

/// u = D^{-1/2} C D^{-1/2} with C and D exact rationals, D diagonal positive.
/// Rational kernels use D = 1.
struct ExactKernel {
  RationalMatrix core;
  std::vector<Rational> scale;
};

class Kernel {
 public:
  /// Exact rational kernel u = C.
  static Kernel rational(WindowPtr space, RationalMatrix values, std::optional<std::int64_t> support_width,
                         std::string descriptor);
  /// Exact normalized Gram kernel u(x,y) = C(x,y) / sqrt(D_x D_y).
  static Kernel normalized(WindowPtr space, RationalMatrix core, std::vector<Rational> scale,
                           std::optional<std::int64_t> support_width, std::string descriptor);
  /// Floating-point kernel (row-major values).
  static Kernel floating(WindowPtr space, std::vector<double> values,
                         std::optional<std::int64_t> support_width, std::string descriptor);

  const WindowPtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return space_->size(); }
  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::optional<ExactKernel>& exact() const noexcept { return exact_; }
  std::optional<std::int64_t> support_width() const noexcept { return support_width_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  /// Exact value when u(i,j) is rational.
  std::optional<Rational> rational_value(std::size_t i, std::size_t j) const;
  /// Exact test u(i,j) == 0 (|u| <= 1e-12 for floating kernels).
  bool vanishes(std::size_t i, std::size_t j) const;

 private:
  Kernel(WindowPtr space, std::optional<ExactKernel> exact, std::vector<double> values,
         std::optional<std::int64_t> support_width, std::string descriptor);

  WindowPtr space_;
  std::optional<ExactKernel> exact_;
  std::vector<double> values_;
  std::optional<std::int64_t> support_width_;
  std::string descriptor_;
};

/// "triangular:N" -> (2N+1-d)_+/(2N+1); "gaussian:sigma" -> exp(-d^2/(2 sigma^2)).
Kernel kernel_from_descriptor(WindowPtr space, std::string_view descriptor);

/// Pair quantifier for the distance condition. Definition-style checks on
/// property A come in both forms; see check_witness.
enum class DistanceBound { strict, inclusive };

struct WitnessVerdict {
  bool pass = true;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  /// |A_x delta A_y| / |A_x cap A_y|; nullopt means infinite (empty intersection).
  std::optional<Rational> worst_ratio = Rational(0);
  std::size_t pairs_checked = 0;
  std::int64_t margin = 0;
};

/// Ratio test over interior pairs (depth >= margin) at distance within R.
/// `bound` chooses d < R (strict) or d <= R (inclusive, the default).
WitnessVerdict check_witness(const WitnessFamily& w, std::int64_t radius, const Rational& eps,
                             std::int64_t margin = 0, DistanceBound bound = DistanceBound::inclusive);

/// u(x,y) = |A_x cap A_y| / sqrt(|A_x| |A_y|); support width 2S.
Kernel witness_to_kernel(const WitnessFamily& w);

struct VariationVerdict {
  bool pass = true;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  double worst = 0.0;
  /// Exact worst |u - 1| when the worst value is rational.
  std::optional<Rational> worst_exact = Rational(0);
  std::size_t pairs_checked = 0;
};

/// d(x,y) <= R implies |u(x,y) - 1| < eps, over interior pairs. Exact for exact kernels.
VariationVerdict check_variation(const Kernel& u, std::int64_t radius, const Rational& eps,
                                 std::int64_t margin = 0);

inline constexpr double kDefaultPsdTolerance = 1e-9;
inline constexpr std::size_t kDensePsdCap = 2000;

struct PsdVerdict {
  bool pass = false;
  double lambda_min = 0.0;
  double tolerance = kDefaultPsdTolerance;
  bool exact_attempted = false;
  std::optional<bool> exact_psd;
  std::size_t sample_size = 0;
};

/// lambda_min of the sampled Gram matrix; for exact kernels the verdict is the
/// exact LDL^T verdict on the core (congruent to u), else lambda_min >= -tol.
PsdVerdict check_psd(const Kernel& u, std::span<const std::size_t> sample,
                     double tol = kDefaultPsdTolerance, std::size_t cap = kDensePsdCap);
PsdVerdict check_psd(const Kernel& u, double tol = kDefaultPsdTolerance);

struct SupportVerdict {
  bool pass = true;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  /// Largest distance carrying a nonzero value (-1 for the zero kernel).
  std::int64_t max_nonzero_distance = -1;
};

/// d(x,y) > S implies u(x,y) = 0, exhaustive over interior pairs.
SupportVerdict check_support(const Kernel& u, std::int64_t s, std::int64_t margin = 0);

// ---------------------------------------------------------------------------
// Ladder scan

enum class LadderFamily { ball_witness, triangular_kernel, singleton_witness };

struct Ladder {
  LadderFamily family = LadderFamily::triangular_kernel;
  std::int64_t start = 1;
  std::int64_t step = 5;
  std::int64_t max = 200;
};

struct ScheduleEntry {
  std::int64_t radius = 0;
  Rational eps;
};

struct LadderResult {
  ScheduleEntry target;
  bool satisfied = false;
  std::optional<std::int64_t> parameter;  // N
  std::optional<std::int64_t> support;    // S
  std::string detail;
};

struct PropertyAReport {
  std::string space;
  std::string family;
  std::vector<LadderResult> entries;
  std::string scope_note;
};

PropertyAReport property_a_report(const WindowPtr& space, const std::vector<ScheduleEntry>& schedule,
                                  const Ladder& ladder);

}  // namespace coarse
