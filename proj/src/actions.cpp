#include "coarse/actions.hpp"

#include "coarse/error.hpp"
#include "coarse/spaces.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace coarse {

namespace {

/// Window index lookup keyed by integer coordinates.
struct CoordIndex {
  std::map<std::vector<std::int64_t>, std::size_t> index;
  std::vector<std::vector<std::int64_t>> coords;

  std::optional<std::size_t> find(const std::vector<std::int64_t>& c) const {
    const auto it = index.find(c);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

std::vector<std::int64_t> parse_coords(std::string_view id) {
  if (id.size() >= 2 && id.front() == '(' && id.back() == ')') {
    std::vector<std::int64_t> out;
    auto body = id.substr(1, id.size() - 2);
    std::size_t start = 0;
    while (start <= body.size()) {
      const auto comma = body.find(',', start);
      const auto token = body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - start);
      out.push_back(integer_point(token));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }
  return {integer_point(id)};
}

std::shared_ptr<CoordIndex> index_coordinates(const MetricWindow& w, std::string_view prefix = {}) {
  auto idx = std::make_shared<CoordIndex>();
  idx->coords.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::string_view id = w.point(i);
    if (!prefix.empty()) {
      if (!id.starts_with(prefix)) continue;
      id.remove_prefix(prefix.size());
    }
    try {
      idx->coords[i] = parse_coords(id);
    } catch (const DomainError&) {
      throw ConfigError("space '" + w.label() + "' point '" + w.point(i) +
                        "' has no integer coordinates for this action");
    }
    idx->index.emplace(idx->coords[i], i);
  }
  return idx;
}

void require_group(const GroupModel& g, std::string_view expected_prefix, std::string_view action) {
  if (!g.spec().starts_with(expected_prefix)) {
    throw ConfigError("action '" + std::string(action) + "' needs a " + std::string(expected_prefix) +
                      " group, got " + g.spec());
  }
}

}  // namespace

ScenarioPtr make_scenario(const ScenarioSpec& spec) {
  auto scenario = std::make_shared<ActionScenario>();
  scenario->action = spec.action;
  scenario->group = make_group(spec.group);
  scenario->space = make_space(spec.space);
  scenario->window_radius = descriptor_radius(spec.space);
  const auto basepoint = scenario->space->find(spec.basepoint);
  if (!basepoint) throw ConfigError("basepoint '" + spec.basepoint + "' is not a space point");
  scenario->basepoint = *basepoint;

  const auto& group = *scenario->group;
  const auto& space = *scenario->space;

  if (spec.action == "dihedral-on-Z") {
    require_group(group, "DInfinity", spec.action);
    auto idx = index_coordinates(space);
    scenario->act = [idx](const Element& g, std::size_t i) {
      const auto n = idx->coords[i][0];
      const auto m = g.word[0] + (g.word[1] ? -n : n);
      return idx->find({m});
    };
  } else if (spec.action == "translation" || spec.action == "translation-by-2") {
    require_group(group, "Zd:", spec.action);
    const std::int64_t stride = spec.action == "translation" ? 1 : 2;
    auto idx = index_coordinates(space);
    const auto dim = group.identity().word.size();
    for (const auto& c : idx->coords) {
      if (c.size() != dim) throw ConfigError("translation: space dimension does not match " + group.spec());
    }
    scenario->act = [idx, stride](const Element& g, std::size_t i) {
      auto c = idx->coords[i];
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += stride * g.word[k];
      return idx->find(c);
    };
  } else if (spec.action == "translation-one-copy") {
    require_group(group, "Zd:1", spec.action);
    auto idx = index_coordinates(space, "a:");
    scenario->act = [idx](const Element& g, std::size_t i) -> std::optional<std::size_t> {
      if (idx->coords[i].empty()) return i;  // the second copy is fixed
      return idx->find({idx->coords[i][0] + g.word[0]});
    };
  } else if (spec.action == "natural") {
    require_group(group, "Symmetric:", spec.action);
    if (group.identity().word.size() != space.size()) {
      throw ConfigError("natural action: degree does not match the number of points");
    }
    auto idx = index_coordinates(space);
    scenario->act = [idx](const Element& g, std::size_t i) {
      const auto v = idx->coords[i][0];  // 1-based
      return idx->find({g.word[static_cast<std::size_t>(v - 1)] + 1});
    };
  } else if (spec.action == "rotation") {
    require_group(group, "Cyclic:", spec.action);
    const auto n = static_cast<std::int64_t>(space.size());
    if (group.spec() != "Cyclic:" + std::to_string(n)) {
      throw ConfigError("rotation: cyclic order must equal the cycle length");
    }
    scenario->act = [n](const Element& g, std::size_t i) -> std::optional<std::size_t> {
      return static_cast<std::size_t>((static_cast<std::int64_t>(i) + g.word[0]) % n);
    };
  } else if (spec.action == "permutation-table") {
    require_group(group, "Cyclic:", spec.action);
    if (spec.permutation_table.size() != space.size()) {
      throw ConfigError("permutation-table: need one image per space point");
    }
    std::vector<std::size_t> perm;
    std::vector<bool> hit(space.size(), false);
    for (const auto& id : spec.permutation_table) {
      const auto j = space.find(id);
      if (!j || hit[*j]) throw ConfigError("permutation-table is not a permutation of the points");
      hit[*j] = true;
      perm.push_back(*j);
    }
    // Powers P^k for k = 0..n-1; P^n must be the identity.
    const auto order = static_cast<std::size_t>(group.predicted_ball_size(1'000'000));
    auto powers = std::make_shared<std::vector<std::vector<std::size_t>>>();
    std::vector<std::size_t> cur(space.size());
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = i;
    for (std::size_t k = 0; k <= order; ++k) {
      powers->push_back(cur);
      for (auto& v : cur) v = perm[v];
    }
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (powers->back()[i] != i) throw ConfigError("permutation-table: generator order does not divide " + group.spec());
    }
    scenario->act = [powers](const Element& g, std::size_t i) -> std::optional<std::size_t> {
      return (*powers)[static_cast<std::size_t>(g.word[0])][i];
    };
  } else {
    throw ConfigError("unknown action '" + spec.action + "'");
  }
  return scenario;
}

std::optional<std::string> check_action_axioms(const ActionScenario& s,
                                               const std::vector<Element>& sample) {
  const auto& space = *s.space;
  const auto& group = *s.group;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto ex = s.act(group.identity(), x);
    if (!ex || *ex != x) return "identity moves " + space.point(x);
  }
  for (const auto& g : sample) {
    std::vector<std::optional<std::size_t>> img(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) img[x] = s.act(g, x);
    for (std::size_t x = 0; x < space.size(); ++x) {
      if (!img[x]) continue;
      for (std::size_t y = x + 1; y < space.size(); ++y) {
        if (!img[y]) continue;
        if (space.dist(*img[x], *img[y]) != space.dist(x, y)) {
          return group.format(g) + " is not isometric on (" + space.point(x) + "," + space.point(y) + ")";
        }
      }
    }
    for (const auto& h : sample) {
      const auto gh = group.multiply(g, h);
      for (std::size_t x = 0; x < space.size(); ++x) {
        const auto hx = s.act(h, x);
        if (!hx) continue;
        const auto ghx = s.act(g, *hx);
        if (!ghx) continue;
        const auto direct = s.act(gh, x);
        if (!direct || *direct != *ghx) {
          return "(gh).x != g.(h.x) for g=" + group.format(g) + ", h=" + group.format(h) +
                 ", x=" + space.point(x);
        }
      }
    }
  }
  return std::nullopt;
}

ProperCheck check_properness(const ActionScenario& s, std::int64_t radius,
                             const ProperOptions& options) {
  if (radius < 0) throw DomainError("check_properness: negative radius");
  const auto x0 = s.basepoint;
  if (radius > s.space->depth(x0)) {
    throw ResourceError("properness radius " + std::to_string(radius) +
                        " exceeds the window depth at the basepoint (" +
                        std::to_string(s.space->depth(x0)) + "); enlarge the window");
  }
  ProperCheck out;
  out.radius = radius;
  const auto slots = static_cast<std::size_t>(radius) + 1;
  std::vector<std::uint64_t> history;

  for (std::int64_t m = 0;; ++m) {
    if (s.group->predicted_ball_size(m) > options.max_ball) {
      out.note = "properness not certified at this window: N(" + std::to_string(radius) +
                 ") still growing when the group ball reached the cap of " +
                 std::to_string(options.max_ball) + " elements";
      return out;
    }
    const auto b = enumerate_ball(s.group, m, options.max_ball);
    std::vector<std::uint64_t> counts(slots, 0);
    std::vector<Element> stab;
    for (const auto& g : b.elements) {
      const auto gx = s.act(g, x0);
      if (!gx) continue;  // farther than depth(x0) >= R
      const auto d = s.space->dist(x0, *gx);
      if (d <= radius) counts[static_cast<std::size_t>(d)] += 1;
      if (*gx == x0) stab.push_back(g);
    }
    for (std::size_t r = 1; r < slots; ++r) counts[r] += counts[r - 1];
    history.push_back(counts.back());

    const auto k = static_cast<std::size_t>(options.confirm_shells);
    if (history.size() > k) {
      const auto tail = history.end() - static_cast<std::ptrdiff_t>(k) - 1;
      if (std::all_of(tail, history.end(), [&](std::uint64_t v) { return v == history.back(); })) {
        out.certified = true;
        out.search_radius = m - options.confirm_shells;
        out.counts = std::move(counts);
        out.stabilizer = std::move(stab);
        out.free_action = out.stabilizer.size() == 1;
        out.note = "N(r) stable for " + std::to_string(options.confirm_shells) +
                   " shells beyond M=" + std::to_string(out.search_radius);
        return out;
      }
    }
  }
}

Orbit compute_orbit(const ActionScenario& s) {
  const auto& space = *s.space;
  std::vector<std::optional<Element>> rep(space.size());
  rep[s.basepoint] = s.group->identity();
  std::deque<std::size_t> queue{s.basepoint};
  const auto gens = s.group->generators();
  while (!queue.empty()) {
    const auto y = queue.front();
    queue.pop_front();
    for (const auto& gen : gens) {
      const auto z = s.act(gen, y);
      if (!z || rep[*z]) continue;
      rep[*z] = s.group->multiply(gen, *rep[y]);
      queue.push_back(*z);
    }
  }
  Orbit orbit;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (rep[i]) {
      orbit.points.push_back(i);
      orbit.representatives.push_back(std::move(*rep[i]));
    }
  }
  return orbit;
}

CocompactCheck check_cocompactness(const ActionScenario& s, std::optional<std::int64_t> r_cap) {
  const auto& space = *s.space;
  const auto orbit = compute_orbit(s);
  std::vector<std::int64_t> nearest(space.size(), kUnboundedDepth);
  for (std::size_t p = 0; p < space.size(); ++p) {
    for (auto y : orbit.points) nearest[p] = std::min(nearest[p], space.dist(p, y));
  }
  std::int64_t cap = 0;
  if (r_cap) {
    cap = *r_cap;
  } else if (space.has_boundary()) {
    cap = s.window_radius;
    for (std::size_t p = 0; p < space.size(); ++p) {
      if (space.depth(p) < kUnboundedDepth) cap = std::max(cap, space.depth(p));
    }
  } else {
    for (auto d : space.dist_matrix()) cap = std::max(cap, d);
  }

  CocompactCheck out;
  for (std::int64_t r = 0; r <= cap; ++r) {
    out.radius = r;
    out.excluded.clear();
    out.uncovered.clear();
    for (std::size_t p = 0; p < space.size(); ++p) {
      if (nearest[p] <= r) continue;
      (space.depth(p) < r ? out.excluded : out.uncovered).push_back(p);
    }
    if (out.uncovered.empty()) {
      out.cocompact = true;
      return out;
    }
  }
  return out;
}

SectionPolicy parse_section_policy(std::string_view name) {
  if (name == "min-length-then-lex" || name == "default") return SectionPolicy::min_length_then_lex;
  if (name == "max-length" || name == "max-length-then-lex") return SectionPolicy::max_length_then_lex;
  throw ConfigError("unknown section policy '" + std::string(name) + "'");
}

std::string to_string(SectionPolicy policy) {
  switch (policy) {
    case SectionPolicy::min_length_then_lex: return "min-length-then-lex";
    case SectionPolicy::max_length_then_lex: return "max-length-then-lex";
  }
  return "?";
}

OrbitSection::OrbitSection(ScenarioPtr scenario, std::vector<std::size_t> orbit,
                           std::vector<Element> phi, SectionPolicy policy)
    : scenario_(std::move(scenario)), orbit_(std::move(orbit)), phi_(std::move(phi)), policy_(policy) {
  if (orbit_.size() != phi_.size()) throw InvariantViolation("section: orbit/phi size mismatch");
  index_.reserve(phi_.size());
  bool found_base = false;
  for (std::size_t k = 0; k < orbit_.size(); ++k) {
    const auto image = scenario_->act(phi_[k], scenario_->basepoint);
    if (!image || *image != orbit_[k]) {
      throw InvariantViolation("section: phi(y).x0 != y at " + scenario_->space->point(orbit_[k]));
    }
    if (!index_.emplace(phi_[k], k).second) {
      throw InvariantViolation("section is not injective at " + scenario_->space->point(orbit_[k]));
    }
    if (orbit_[k] == scenario_->basepoint) {
      base_pos_ = k;
      found_base = true;
    }
  }
  if (!found_base) throw InvariantViolation("section: basepoint missing from orbit");
  y_window_ = std::make_shared<const MetricWindow>(
      scenario_->space->restrict(orbit_, scenario_->space->label() + "/orbit"));
}

std::optional<std::size_t> OrbitSection::preimage(const Element& g) const {
  const auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

OrbitSection build_section(const ScenarioPtr& scenario, SectionPolicy policy,
                           const ProperOptions& options) {
  const auto proper = check_properness(*scenario, 0, options);
  if (!proper.certified) {
    throw ResourceError("cannot build a section: stabilizer of the basepoint not certified (" +
                        proper.note + ")");
  }
  const auto& group = *scenario->group;
  auto orbit = compute_orbit(*scenario);
  std::vector<Element> phi;
  phi.reserve(orbit.points.size());
  for (const auto& h : orbit.representatives) {
    std::vector<Element> coset;
    for (const auto& s : proper.stabilizer) coset.push_back(group.multiply(h, s));
    auto best = coset.front();
    for (const auto& c : coset) {
      const auto lc = group.word_length(c);
      const auto lb = group.word_length(best);
      const bool better = policy == SectionPolicy::min_length_then_lex
                              ? (lc < lb || (lc == lb && c < best))
                              : (lc > lb || (lc == lb && c < best));
      if (better) best = c;
    }
    phi.push_back(std::move(best));
  }
  return OrbitSection(scenario, std::move(orbit.points), std::move(phi), policy);
}

PartialActionElement partial_action(const OrbitSection& section, const Element& g) {
  const auto& group = section.group();
  const auto& yw = *section.orbit_window();
  PartialActionElement out;
  out.g = g;
  const auto g_inv = group.invert(g);
  out.displacement = group.word_length(g_inv);
  for (std::size_t y = 0; y < section.size(); ++y) {
    const auto x = section.preimage(group.multiply(section.phi(y), g_inv));
    if (!x) continue;
    out.translation.pairs.emplace_back(*x, y);
    out.translation.displacement_bound = std::max(out.translation.displacement_bound, yw.dist(*x, y));
    if (group.distance(section.phi(y), section.phi(*x)) != out.displacement) {
      out.displacement_constant = false;
    }
  }
  return out;
}

ERSet compute_E_R(const OrbitSection& section, std::int64_t radius) {
  if (radius < 0) throw DomainError("compute_E_R: negative radius");
  const auto& group = section.group();
  const auto& yw = *section.orbit_window();
  std::map<Element, ElementWitness> found;
  std::vector<Element> inverses;
  inverses.reserve(section.size());
  for (const auto& p : section.phis()) inverses.push_back(group.invert(p));
  for (std::size_t x = 0; x < section.size(); ++x) {
    for (std::size_t y = 0; y < section.size(); ++y) {
      if (yw.dist(x, y) > radius) continue;
      auto g = group.multiply(inverses[x], section.phi(y));
      found.try_emplace(g, ElementWitness{g, x, y});
    }
  }
  ERSet out;
  out.radius = radius;
  for (auto& [g, w] : found) {
    out.ball_radius = std::max(out.ball_radius, group.word_length(g));
    out.elements.push_back(std::move(w));
  }
  std::sort(out.elements.begin(), out.elements.end(), [&](const auto& a, const auto& b) {
    return shortlex_less(group, a.g, b.g);
  });
  return out;
}

std::vector<std::int64_t> inverse_control(const OrbitSection& section, std::int64_t r_max) {
  const auto& group = section.group();
  const auto& yw = *section.orbit_window();
  std::vector<std::int64_t> table(static_cast<std::size_t>(std::max<std::int64_t>(r_max, 0)) + 1, 0);
  for (std::size_t x = 0; x < section.size(); ++x) {
    const auto inv = group.invert(section.phi(x));
    for (std::size_t y = x + 1; y < section.size(); ++y) {
      const auto dg = group.word_length(group.multiply(inv, section.phi(y)));
      if (dg > r_max) continue;
      auto& slot = table[static_cast<std::size_t>(dg)];
      slot = std::max(slot, yw.dist(x, y));
    }
  }
  for (std::size_t r = 1; r < table.size(); ++r) table[r] = std::max(table[r], table[r - 1]);
  return table;
}

}  // namespace coarse
