#pragma once

#include "coarse/actions.hpp"
#include "coarse/operators.hpp"
#include "coarse/property_a.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace coarse {

// ---------------------------------------------------------------------------
// Finite-form approximants  theta(T) = sum_i <delta_{a_i}, T delta_{b_i}> T_i

struct ThetaTerm {
  std::size_t a = 0;  // orbit-window indices
  std::size_t b = 0;
  BandedOperator t;
};

enum class ThetaProvenance { identity, folner, signed_schur, user_supplied };

std::string to_string(ThetaProvenance p);
/// Built-in constructors are completely positive by construction.
bool cp_by_construction(ThetaProvenance p);

class CpApproximant {
 public:
  CpApproximant(WindowPtr y_window, std::vector<ThetaTerm> terms, ThetaProvenance provenance,
                std::string description);

  const WindowPtr& window() const noexcept { return window_; }
  const std::vector<ThetaTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  ThetaProvenance provenance() const noexcept { return provenance_; }
  const std::string& description() const noexcept { return description_; }

  /// Term indices with (a_i, b_i) = (a, b).
  const std::vector<std::size_t>* terms_at(std::size_t a, std::size_t b) const;
  /// Terms with T_i(x, y) != 0, as (term index, T_i(x, y)).
  const std::vector<std::pair<std::size_t, Rational>>* contributions(std::size_t x, std::size_t y) const;
  /// F_R = {a_i, b_i}, sorted.
  std::vector<std::size_t> index_points() const;
  /// max_i propagation(T_i).
  std::int64_t max_term_propagation() const;

 private:
  WindowPtr window_;
  std::vector<ThetaTerm> terms_;
  ThetaProvenance provenance_;
  std::string description_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_pair_;
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, Rational>>> by_entry_;
};

BandedOperator evaluate_theta(const CpApproximant& theta, const BandedOperator& t);
/// <delta_x, theta(T) delta_y> without materializing theta(T).
Rational theta_entry(const CpApproximant& theta, const BandedOperator& t, std::size_t x, std::size_t y);

inline constexpr std::size_t kDefaultTermCap = 250'000;

/// Terms (a, b, e_ab) over all orbit pairs; theta is the identity.
CpApproximant make_identity_approximant(const WindowPtr& y_window, std::size_t term_cap = kDefaultTermCap);

/// Schur multiplication by m(a,b) = |F_a cap F_b| / (L+1), F_a = [a, a+L],
/// compressed to W. The orbit must carry integer point ids with the metric of Z.
CpApproximant make_folner_approximant(const WindowPtr& y_window, std::int64_t lo, std::int64_t hi,
                                      std::int64_t length, std::size_t term_cap = kDefaultTermCap);

/// Schur multiplication by m(a,b) = 1 - 2[a != b] on W: symmetric, not a Gram
/// matrix, so not completely positive.
CpApproximant make_signed_schur_approximant(const WindowPtr& y_window, std::int64_t lo,
                                            std::int64_t hi);

// ---------------------------------------------------------------------------
// Pipeline stages

/// Operator of the partial translation g<> on the orbit window.
BandedOperator partial_action_operator(const OrbitSection& section, const Element& g);

struct ApproxRow {
  ElementWitness element;
  NormReport norm;
  bool pass = false;
};

struct ApproximationTable {
  std::vector<ApproxRow> rows;
  bool pass = true;
  std::optional<std::size_t> worst;  // row index
  std::string note;
};

/// ||theta(g) - g|| after compressing both operators to the interior.
ApproximationTable check_approximation(const CpApproximant& theta, const OrbitSection& section,
                                       const ERSet& er, const Rational& eps,
                                       std::span<const std::size_t> interior);

struct BuiltKernel {
  Kernel kernel;                          // on the interior window
  std::vector<std::size_t> interior;      // orbit positions
  Rational max_asymmetry;                 // max |u(x,y) - u(y,x)|
};

/// u(x,y) = <delta_x, theta(phi(x)^{-1} phi(y)) delta_y> on interior pairs.
BuiltKernel build_u(const CpApproximant& theta, const OrbitSection& section,
                    std::span<const std::size_t> interior);

struct PsdViaS {
  PsdVerdict direct;             // check_psd on the u-Gram sample
  PsdVerdict via_s;              // PSD of [<delta_x, theta(s_x^* s_y) delta_y>]
  bool s_identity_ok = true;     // op(phi(x)^{-1}phi(y)) == s_x^* s_y on the sample
  std::size_t s_identity_failures = 0;
  bool routes_agree = true;      // entrywise equal and same verdict
  bool pass = false;
  std::string violated_hypothesis;  // empty on pass
};

PsdViaS verify_psd_via_s(const CpApproximant& theta, const OrbitSection& section, const BuiltKernel& u,
                         std::span<const std::size_t> sample, double tol = kDefaultPsdTolerance);

struct SupportBound {
  std::vector<std::size_t> f_r;      // orbit positions
  std::int64_t r_prime = 0;
  std::int64_t s_prime = 0;
  std::int64_t propagation_bound = 0;  // max propagation of T_i
  std::int64_t sharper = 0;
  std::vector<std::string> trace;
};

SupportBound compute_support_bound(const CpApproximant& theta, const OrbitSection& section);

// ---------------------------------------------------------------------------

struct ThetaSpec {
  std::string kind = "identity";  // identity | folner | signed | file
  std::int64_t length = 100;      // L
  std::int64_t lo = 0;            // W = [lo, hi]
  std::int64_t hi = 0;
  std::string path;
};

CpApproximant make_approximant(const ThetaSpec& spec, const OrbitSection& section);

struct PipelineOptions {
  std::optional<std::int64_t> interior_margin;
  std::int64_t psd_sample_radius = 50;
  double psd_tolerance = kDefaultPsdTolerance;
  ProperOptions proper;
  std::size_t term_cap = kDefaultTermCap;
};

struct StageVerdict {
  std::string stage;
  bool pass = false;
  std::string detail;
};

struct PipelineReport {
  std::string scenario;
  std::string group;
  std::vector<std::string> generators;
  std::string space;
  std::string basepoint;
  std::string section_policy;
  std::int64_t radius = 0;
  Rational eps;
  std::string theta;
  std::string theta_provenance;
  std::size_t theta_terms = 0;
  std::int64_t interior_margin = 0;
  std::vector<std::size_t> interior;  // orbit positions
  ERSet er;
  ApproximationTable approximation;
  std::optional<BuiltKernel> kernel;
  PsdViaS psd;
  VariationVerdict variation;
  SupportBound support_bound;
  SupportVerdict support_at_s_prime;
  SupportVerdict support_at_sharper;
  /// |1 - u(x,y)| <= ||theta(g) - g|| + tolerance over interior pairs with d <= R.
  std::size_t chain_violations = 0;
  std::size_t chain_pairs = 0;
  std::vector<StageVerdict> stages;
  bool certified = false;
  std::string verdict;
  std::string violated_hypothesis;

  /// Kept for callers that need the intermediate objects.
  std::shared_ptr<const OrbitSection> section;
};

PipelineReport run_pipeline(const ScenarioPtr& scenario, SectionPolicy policy, std::int64_t radius,
                            const Rational& eps, const ThetaSpec& theta,
                            const PipelineOptions& options = {}, std::string scenario_id = {});

}  // namespace coarse
