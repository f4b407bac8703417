#pragma once

#include "coarse/groups.hpp"
#include "coarse/metric.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace coarse {

/// (g, window index) -> window index of g.x, or nullopt when g.x leaves the window.
using ActionFn = std::function<std::optional<std::size_t>(const Element&, std::size_t)>;

/// A group acting isometrically on a window of a discrete space.
struct ActionScenario {
  std::string action;  // registry name
  GroupPtr group;
  WindowPtr space;
  ActionFn act;
  std::size_t basepoint = 0;
  std::int64_t window_radius = 0;
};

using ScenarioPtr = std::shared_ptr<const ActionScenario>;

struct ScenarioSpec {
  std::string group;
  std::string space;
  std::string action;
  std::string basepoint = "0";
  /// For "permutation-table": images (point ids) of each window point under the
  /// generator [1] of a cyclic group.
  std::vector<std::string> permutation_table;
};

/// Registry: "dihedral-on-Z", "translation", "translation-by-2",
/// "translation-one-copy", "natural", "rotation", "permutation-table".
ScenarioPtr make_scenario(const ScenarioSpec& spec);

/// Isometry and compatibility of the action on sampled elements; returns a
/// description of the first violation, or nullopt.
std::optional<std::string> check_action_axioms(const ActionScenario& scenario,
                                               const std::vector<Element>& sample);

// ---------------------------------------------------------------------------
// Properness

struct ProperCheck {
  bool certified = false;
  std::int64_t radius = 0;          // R
  std::int64_t search_radius = 0;   // M
  std::vector<std::uint64_t> counts;  // N(r), r = 0..R
  std::vector<Element> stabilizer;    // shortlex
  bool free_action = false;
  std::string note;
};

struct ProperOptions {
  std::uint64_t max_ball = kDefaultBallCap;
  /// N(R) must stay unchanged over this many consecutive shells.
  std::int64_t confirm_shells = 3;
};

/// Requires R <= depth(x0) so that out-of-window images are provably farther
/// than R; throws ResourceError otherwise.
ProperCheck check_properness(const ActionScenario& scenario, std::int64_t radius,
                             const ProperOptions& options = {});

// ---------------------------------------------------------------------------
// Orbit and cocompactness

struct Orbit {
  std::vector<std::size_t> points;                  // window order
  std::vector<Element> representatives;             // h_y with h_y.x0 = y
};

/// Orbit of x0 inside the window, found by breadth-first search over
/// generator moves that stay in the window.
Orbit compute_orbit(const ActionScenario& scenario);

struct CocompactCheck {
  bool cocompact = false;
  std::int64_t radius = 0;
  std::vector<std::size_t> excluded;   // near-edge points left out of the quantifier
  std::vector<std::size_t> uncovered;  // interior points not covered (on failure)
};

/// Smallest R <= r_cap with the orbit R-dense in the window. An uncovered
/// point whose depth is below R may be covered from outside the window; such
/// points are excluded from the quantifier and listed.
CocompactCheck check_cocompactness(const ActionScenario& scenario,
                                   std::optional<std::int64_t> r_cap = std::nullopt);

// ---------------------------------------------------------------------------
// Sections and the partial action

enum class SectionPolicy { min_length_then_lex, max_length_then_lex };

SectionPolicy parse_section_policy(std::string_view name);
std::string to_string(SectionPolicy policy);

/// A section phi of the orbit map g -> g.x0. Orbit positions index the
/// orbit window, which is the restriction of the space to Y.
class OrbitSection {
 public:
  OrbitSection(ScenarioPtr scenario, std::vector<std::size_t> orbit, std::vector<Element> phi,
               SectionPolicy policy);

  const ActionScenario& scenario() const noexcept { return *scenario_; }
  const ScenarioPtr& scenario_ptr() const noexcept { return scenario_; }
  const GroupModel& group() const noexcept { return *scenario_->group; }
  SectionPolicy policy() const noexcept { return policy_; }

  std::size_t size() const noexcept { return orbit_.size(); }
  /// Space index of the orbit point at position k.
  std::size_t space_index(std::size_t k) const { return orbit_.at(k); }
  const std::vector<std::size_t>& orbit() const noexcept { return orbit_; }
  const Element& phi(std::size_t k) const { return phi_.at(k); }
  const std::vector<Element>& phis() const noexcept { return phi_; }
  /// Orbit position y with phi(y) = g.
  std::optional<std::size_t> preimage(const Element& g) const;
  /// Orbit position of the basepoint.
  std::size_t basepoint_position() const noexcept { return base_pos_; }

  const WindowPtr& orbit_window() const noexcept { return y_window_; }

 private:
  ScenarioPtr scenario_;
  std::vector<std::size_t> orbit_;
  std::vector<Element> phi_;
  SectionPolicy policy_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
  WindowPtr y_window_;
  std::size_t base_pos_ = 0;
};

/// Preimages of y are the coset h_y.Stab(x0); the policy picks one of them.
/// Throws ResourceError when the stabilizer cannot be certified.
OrbitSection build_section(const ScenarioPtr& scenario, SectionPolicy policy,
                           const ProperOptions& options = {});

/// Both coordinate projections injective; pairs are (target, source).
struct PartialTranslation {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::int64_t displacement_bound = 0;
};

struct PartialActionElement {
  Element g;
  /// (g<>y, y) as orbit positions.
  PartialTranslation translation;
  /// d_G(e, g^{-1}).
  std::int64_t displacement = 0;
  /// d_G(phi(y), phi(g<>y)) equals `displacement` for every pair.
  bool displacement_constant = true;
};

/// g<>y = x iff phi(y) g^{-1} = phi(x).
PartialActionElement partial_action(const OrbitSection& section, const Element& g);

struct ElementWitness {
  Element g;
  std::size_t x = 0;  // orbit positions with g = phi(x)^{-1} phi(y)
  std::size_t y = 0;
};

struct ERSet {
  std::int64_t radius = 0;
  std::vector<ElementWitness> elements;  // shortlex by g
  /// max word length over the set; equals control_up(R) of phi.
  std::int64_t ball_radius = 0;
};

/// { phi(x)^{-1} phi(y) : x, y in Y, d_X(x, y) <= R }.
ERSet compute_E_R(const OrbitSection& section, std::int64_t radius);

/// Fitted control of phi on the whole orbit: for each R' <= r_max, the largest
/// d_X(x, y) over orbit pairs with d_G(phi(x), phi(y)) <= R'.
std::vector<std::int64_t> inverse_control(const OrbitSection& section, std::int64_t r_max);

}  // namespace coarse
