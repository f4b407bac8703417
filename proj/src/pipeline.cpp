#include "coarse/pipeline.hpp"

#include "coarse/error.hpp"
#include "coarse/io.hpp"
#include "coarse/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace coarse {

namespace {

std::size_t pair_key(std::size_t a, std::size_t b, std::size_t n) { return a * n + b; }

// Reraises a library error with the stage name in front, keeping its kind.
[[noreturn]] void rethrow_with_stage(const Error& e, const std::string& stage) {
  const std::string msg = "stage " + stage + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::config: throw ConfigError(msg);
    case ErrorKind::domain: throw DomainError(msg);
    case ErrorKind::resource: throw ResourceError(msg);
    case ErrorKind::invariant: throw InvariantViolation(msg);
  }
  throw InvariantViolation(msg);
}

template <class F>
auto run_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow_with_stage(e, stage);
  }
}

double chain_tolerance(double norm) { return 1e-12 * std::max(1.0, norm); }

}  // namespace

std::string to_string(ThetaProvenance p) {
  switch (p) {
    case ThetaProvenance::identity: return "identity";
    case ThetaProvenance::folner: return "folner";
    case ThetaProvenance::signed_schur: return "signed";
    case ThetaProvenance::user_supplied: return "user-supplied";
  }
  return "unknown";
}

bool cp_by_construction(ThetaProvenance p) {
  return p == ThetaProvenance::identity || p == ThetaProvenance::folner;
}

CpApproximant::CpApproximant(WindowPtr y_window, std::vector<ThetaTerm> terms, ThetaProvenance provenance,
                             std::string description)
    : window_(std::move(y_window)),
      terms_(std::move(terms)),
      provenance_(provenance),
      description_(std::move(description)) {
  if (terms_.empty()) throw DomainError("theta needs at least one term");
  const auto n = window_->size();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (t.a >= n || t.b >= n) throw DomainError("theta term index point outside the orbit window");
    if (t.t.window()->size() != n) throw DomainError("theta term operator lives on a different window");
    by_pair_[pair_key(t.a, t.b, n)].push_back(i);
    for (const auto& [xy, v] : t.t.matrix().entries()) {
      by_entry_[pair_key(xy.first, xy.second, n)].emplace_back(i, v);
    }
  }
}

const std::vector<std::size_t>* CpApproximant::terms_at(std::size_t a, std::size_t b) const {
  const auto it = by_pair_.find(pair_key(a, b, window_->size()));
  return it == by_pair_.end() ? nullptr : &it->second;
}

const std::vector<std::pair<std::size_t, Rational>>* CpApproximant::contributions(std::size_t x,
                                                                                  std::size_t y) const {
  const auto it = by_entry_.find(pair_key(x, y, window_->size()));
  return it == by_entry_.end() ? nullptr : &it->second;
}

std::vector<std::size_t> CpApproximant::index_points() const {
  std::set<std::size_t> pts;
  for (const auto& t : terms_) {
    pts.insert(t.a);
    pts.insert(t.b);
  }
  return {pts.begin(), pts.end()};
}

std::int64_t CpApproximant::max_term_propagation() const {
  std::int64_t p = 0;
  for (const auto& t : terms_) p = std::max(p, t.t.propagation());
  return p;
}

BandedOperator evaluate_theta(const CpApproximant& theta, const BandedOperator& t) {
  if (t.window()->size() != theta.window()->size()) {
    throw DomainError("evaluate_theta: operator is not over the orbit window");
  }
  const auto n = theta.window()->size();
  SparseMatrix out(n, n);
  for (const auto& [ab, v] : t.matrix().entries()) {
    const auto* idx = theta.terms_at(ab.first, ab.second);
    if (!idx) continue;
    for (auto i : *idx) {
      for (const auto& [xy, w] : theta.terms()[i].t.matrix().entries()) out.add(xy.first, xy.second, v * w);
    }
  }
  return BandedOperator(theta.window(), std::move(out));
}

Rational theta_entry(const CpApproximant& theta, const BandedOperator& t, std::size_t x, std::size_t y) {
  Rational sum = 0;
  const auto* c = theta.contributions(x, y);
  if (!c) return sum;
  for (const auto& [i, v] : *c) {
    const auto& term = theta.terms()[i];
    sum += t.entry(term.a, term.b) * v;
  }
  return sum;
}

CpApproximant make_identity_approximant(const WindowPtr& y_window, std::size_t term_cap) {
  const auto n = y_window->size();
  if (n * n > term_cap) {
    throw ResourceError("identity approximant needs " + std::to_string(n * n) + " terms; term cap is " +
                        std::to_string(term_cap));
  }
  std::vector<ThetaTerm> terms;
  terms.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      SparseMatrix e(n, n);
      e.set(a, b, 1);
      terms.push_back({a, b, BandedOperator(y_window, std::move(e))});
    }
  }
  return CpApproximant(y_window, std::move(terms), ThetaProvenance::identity, "identity");
}

namespace {

// Positions of the orbit window whose ids are integers in [lo, hi]; checks the
// metric of Z on them.
std::vector<std::pair<std::size_t, std::int64_t>> integer_range(const MetricWindow& yw, std::int64_t lo,
                                                                 std::int64_t hi) {
  std::vector<std::pair<std::size_t, std::int64_t>> w;
  for (std::int64_t v = lo; v <= hi; ++v) {
    const auto i = yw.find(std::to_string(v));
    if (!i) throw DomainError("Schur window point " + std::to_string(v) + " is not in the orbit window");
    w.emplace_back(*i, v);
  }
  for (const auto& [i, a] : w) {
    for (const auto& [j, b] : w) {
      if (yw.dist(i, j) != std::abs(a - b)) {
        throw DomainError("Schur window points do not carry the metric of Z");
      }
    }
  }
  return w;
}

CpApproximant schur_approximant(const WindowPtr& y_window, std::int64_t lo, std::int64_t hi,
                                std::size_t term_cap, ThetaProvenance provenance, std::string description,
                                const std::function<Rational(std::int64_t, std::int64_t)>& m) {
  if (lo > hi) throw DomainError("empty Schur window");
  const auto w = integer_range(*y_window, lo, hi);
  const auto n = y_window->size();
  std::vector<ThetaTerm> terms;
  for (const auto& [i, a] : w) {
    for (const auto& [j, b] : w) {
      const Rational c = m(a, b);
      if (c == 0) continue;
      if (terms.size() >= term_cap) {
        throw ResourceError("Schur approximant exceeds the term cap of " + std::to_string(term_cap));
      }
      SparseMatrix e(n, n);
      e.set(i, j, c);
      terms.push_back({i, j, BandedOperator(y_window, std::move(e))});
    }
  }
  return CpApproximant(y_window, std::move(terms), provenance, std::move(description));
}

}  // namespace

CpApproximant make_folner_approximant(const WindowPtr& y_window, std::int64_t lo, std::int64_t hi,
                                      std::int64_t length, std::size_t term_cap) {
  if (length < 1) throw DomainError("Folner length must be >= 1");
  const std::string desc = "folner L=" + std::to_string(length) + " W=[" + std::to_string(lo) + "," +
                           std::to_string(hi) + "]";
  return schur_approximant(y_window, lo, hi, term_cap, ThetaProvenance::folner, desc,
                           [length](std::int64_t a, std::int64_t b) {
                             const auto overlap = std::max<std::int64_t>(0, length + 1 - std::abs(a - b));
                             return make_rational(overlap, length + 1);
                           });
}

CpApproximant make_signed_schur_approximant(const WindowPtr& y_window, std::int64_t lo, std::int64_t hi) {
  const std::string desc = "signed W=[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  return schur_approximant(y_window, lo, hi, kDefaultTermCap, ThetaProvenance::signed_schur, desc,
                           [](std::int64_t a, std::int64_t b) { return Rational(a == b ? 1 : -1); });
}

BandedOperator partial_action_operator(const OrbitSection& section, const Element& g) {
  return translation_operator(partial_action(section, g).translation, section.orbit_window());
}

ApproximationTable check_approximation(const CpApproximant& theta, const OrbitSection& section,
                                       const ERSet& er, const Rational& eps,
                                       std::span<const std::size_t> interior) {
  ApproximationTable table;
  table.note = "windowed surrogate: norms of interior compressions";
  const double bound = to_double(eps);
  for (const auto& w : er.elements) {
    const auto g = partial_action_operator(section, w.g);
    const auto diff = compress(subtract(evaluate_theta(theta, g), g), interior);
    ApproxRow row{w, operator_norm(diff), false};
    row.pass = row.norm.value < bound;
    if (!row.pass) table.pass = false;
    if (!table.worst || row.norm.value > table.rows[*table.worst].norm.value) table.worst = table.rows.size();
    table.rows.push_back(std::move(row));
  }
  return table;
}

BuiltKernel build_u(const CpApproximant& theta, const OrbitSection& section,
                    std::span<const std::size_t> interior) {
  const auto& group = section.group();
  const auto& phis = section.phis();
  std::vector<Element> inv;
  inv.reserve(phis.size());
  for (const auto& p : phis) inv.push_back(group.invert(p));

  const auto k = interior.size();
  RationalMatrix values(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = interior[i];
    for (std::size_t j = 0; j < k; ++j) {
      const auto y = interior[j];
      const auto* c = theta.contributions(x, y);
      if (!c) continue;
      // g(a, b) = 1 iff phi(b) g^{-1} = phi(a), with g^{-1} = phi(y)^{-1} phi(x).
      const auto g_inv = group.multiply(inv[y], phis[x]);
      Rational sum = 0;
      for (const auto& [t, v] : *c) {
        const auto& term = theta.terms()[t];
        if (group.multiply(phis[term.b], g_inv) == phis[term.a]) sum += v;
      }
      values(i, j) = sum;
    }
  }
  Rational asym = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const Rational d = abs(values(i, j) - values(j, i));
      if (d > asym) asym = d;
    }
  }
  auto window = std::make_shared<const MetricWindow>(
      section.orbit_window()->restrict(interior, section.orbit_window()->label() + " interior"));
  BuiltKernel out{Kernel::rational(std::move(window), std::move(values), std::nullopt,
                                   "theta kernel (" + theta.description() + ")"),
                  {interior.begin(), interior.end()}, asym};
  return out;
}

PsdViaS verify_psd_via_s(const CpApproximant& theta, const OrbitSection& section, const BuiltKernel& u,
                         std::span<const std::size_t> sample, double tol) {
  PsdViaS out;
  out.direct = check_psd(u.kernel, sample, tol);

  std::vector<std::size_t> ys;
  ys.reserve(sample.size());
  for (auto s : sample) ys.push_back(u.interior.at(s));
  const IndexedBall ball(enumerate_ball(section.scenario().group, required_s_radius(section, ys)));
  std::vector<RectangularIsometryBlock> blocks;
  blocks.reserve(ys.size());
  for (auto y : ys) blocks.push_back(build_s(section, y, ball));

  std::vector<std::size_t> all_columns(section.size());
  for (std::size_t c = 0; c < all_columns.size(); ++c) all_columns[c] = c;

  const auto k = ys.size();
  RationalMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = verify_s_identity(section, blocks[i], blocks[j], ys[i], ys[j], all_columns);
      if (!v.equal) {
        out.s_identity_ok = false;
        ++out.s_identity_failures;
      }
      // <delta_x, theta(s_x^* s_y) delta_y>, with (s_x^* s_y)(a, b) = [s_x delta_a = s_y delta_b].
      const auto* c = theta.contributions(ys[i], ys[j]);
      if (!c) continue;
      Rational sum = 0;
      for (const auto& [t, w] : *c) {
        const auto& term = theta.terms()[t];
        if (blocks[i].column_target[term.a] == blocks[j].column_target[term.b]) sum += w;
      }
      m(i, j) = sum;
    }
  }

  for (std::size_t i = 0; i < k && out.routes_agree; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (u.kernel.exact()->core(sample[i], sample[j]) != m(i, j)) {
        out.routes_agree = false;
        break;
      }
    }
  }

  out.via_s.tolerance = tol;
  out.via_s.sample_size = k;
  out.via_s.lambda_min = k == 0 ? 0.0 : min_eigenvalue(to_dense(m));
  out.via_s.exact_attempted = true;
  out.via_s.exact_psd = exact_psd(m).psd;
  out.via_s.pass = *out.via_s.exact_psd;
  if (out.direct.pass != out.via_s.pass) out.routes_agree = false;

  out.pass = out.direct.pass && out.via_s.pass && out.s_identity_ok && out.routes_agree;
  if (!out.s_identity_ok) {
    out.violated_hypothesis = "implementation fault: s_x^* s_y differs from the partial translation";
  } else if (!out.routes_agree) {
    out.violated_hypothesis = "implementation fault: PSD routes disagree";
  } else if (!out.pass) {
    out.violated_hypothesis = "theta completely positive";
  }
  return out;
}

SupportBound compute_support_bound(const CpApproximant& theta, const OrbitSection& section) {
  SupportBound out;
  out.f_r = theta.index_points();
  const auto& group = section.group();
  for (auto x : out.f_r) {
    const auto inv = group.invert(section.phi(x));
    for (auto y : out.f_r) {
      out.r_prime = std::max(out.r_prime, group.word_length(group.multiply(inv, section.phi(y))));
    }
  }
  const auto table = inverse_control(section, out.r_prime);
  if (table.size() <= static_cast<std::size_t>(out.r_prime)) {
    throw ResourceError("inverse control table does not reach R' = " + std::to_string(out.r_prime));
  }
  out.s_prime = table[static_cast<std::size_t>(out.r_prime)];
  out.propagation_bound = theta.max_term_propagation();
  out.sharper = std::min(out.s_prime, out.propagation_bound);
  out.trace.push_back("F_R has " + std::to_string(out.f_r.size()) + " points");
  out.trace.push_back("R' = max d_G(phi(a), phi(b)) over F_R = " + std::to_string(out.r_prime));
  out.trace.push_back("u(x,y) != 0 forces d_G(phi(x), phi(y)) <= R'");
  out.trace.push_back("inverse control of phi on the orbit: d_G <= " + std::to_string(out.r_prime) +
                      " implies d_X <= " + std::to_string(out.s_prime) + " = S'");
  out.trace.push_back("u(x,y) != 0 forces T_i(x,y) != 0 for some i; max propagation of T_i = " +
                      std::to_string(out.propagation_bound));
  out.trace.push_back("sharper bound = " + std::to_string(out.sharper));
  return out;
}

CpApproximant make_approximant(const ThetaSpec& spec, const OrbitSection& section) {
  const auto& yw = section.orbit_window();
  if (spec.kind == "identity") return make_identity_approximant(yw);
  if (spec.kind == "folner") return make_folner_approximant(yw, spec.lo, spec.hi, spec.length);
  if (spec.kind == "signed") return make_signed_schur_approximant(yw, spec.lo, spec.hi);
  if (spec.kind == "file") return load_theta_json(spec.path, yw);
  throw ConfigError("unknown theta kind '" + spec.kind + "'");
}

PipelineReport run_pipeline(const ScenarioPtr& scenario, SectionPolicy policy, std::int64_t radius,
                            const Rational& eps, const ThetaSpec& theta_spec, const PipelineOptions& options,
                            std::string scenario_id) {
  if (radius < 0) throw ConfigError("R must be >= 0");
  if (eps <= 0) throw ConfigError("eps must be > 0");
  PipelineReport rep;
  rep.scenario = std::move(scenario_id);
  rep.group = scenario->group->spec();
  rep.generators = scenario->group->generator_names();
  rep.space = scenario->space->label();
  rep.basepoint = scenario->space->point(scenario->basepoint);
  rep.section_policy = to_string(policy);
  rep.radius = radius;
  rep.eps = eps;

  auto section = run_stage("build_section", [&] {
    return std::make_shared<const OrbitSection>(build_section(scenario, policy, options.proper));
  });
  rep.section = section;
  rep.stages.push_back({"build_section", true, std::to_string(section->size()) + " orbit points"});

  rep.er = run_stage("compute_E_R", [&] { return compute_E_R(*section, radius); });
  rep.stages.push_back({"compute_E_R", true, std::to_string(rep.er.elements.size()) + " elements"});

  const auto theta = run_stage("approximant", [&] { return make_approximant(theta_spec, *section); });
  rep.theta = theta.description();
  rep.theta_provenance = to_string(theta.provenance());
  rep.theta_terms = theta.size();
  rep.stages.push_back({"approximant", true,
                        std::to_string(theta.size()) + " terms, " +
                            (cp_by_construction(theta.provenance()) ? "cp by construction"
                                                                    : "cp not established")});

  // Interior: depth >= margin, restricted to the index points of theta.
  rep.interior_margin = options.interior_margin.value_or(radius);
  {
    const auto& yw = *section->orbit_window();
    const auto pts = theta.index_points();
    std::vector<bool> in_f(yw.size(), false);
    for (auto p : pts) in_f[p] = true;
    for (auto i : yw.interior(rep.interior_margin)) {
      if (in_f[i]) rep.interior.push_back(i);
    }
  }
  if (rep.interior.empty()) throw ConfigError("empty interior at margin " + std::to_string(rep.interior_margin));

  rep.approximation = run_stage("check_approximation", [&] {
    return check_approximation(theta, *section, rep.er, eps, rep.interior);
  });
  rep.stages.push_back({"check_approximation", rep.approximation.pass,
                        rep.approximation.worst
                            ? "worst norm " + std::to_string(rep.approximation.rows[*rep.approximation.worst].norm.value)
                            : "E_R empty"});

  rep.kernel = run_stage("build_u", [&] { return build_u(theta, *section, rep.interior); });
  const bool symmetric = rep.kernel->max_asymmetry == 0;
  rep.stages.push_back({"build_u", symmetric, "max asymmetry " + to_string(rep.kernel->max_asymmetry)});

  // PSD sample: interior points within the sample radius of the deepest one.
  std::vector<std::size_t> sample;
  {
    const auto& kw = *rep.kernel->kernel.space();
    std::size_t center = 0;
    for (std::size_t i = 1; i < kw.size(); ++i) {
      if (kw.depth(i) > kw.depth(center)) center = i;
    }
    for (std::size_t i = 0; i < kw.size() && sample.size() < kDensePsdCap; ++i) {
      if (kw.dist(center, i) <= options.psd_sample_radius) sample.push_back(i);
    }
  }
  rep.psd = run_stage("verify_psd_via_s", [&] {
    return verify_psd_via_s(theta, *section, *rep.kernel, sample, options.psd_tolerance);
  });
  rep.stages.push_back({"verify_psd_via_s", rep.psd.pass,
                        "lambda_min " + std::to_string(rep.psd.direct.lambda_min) + " on " +
                            std::to_string(sample.size()) + " points"});

  rep.variation = run_stage("check_variation", [&] { return check_variation(rep.kernel->kernel, radius, eps); });
  rep.stages.push_back({"check_variation", rep.variation.pass,
                        rep.variation.worst_exact ? "worst " + to_string(*rep.variation.worst_exact)
                                                  : "worst " + std::to_string(rep.variation.worst)});

  // |1 - u(x,y)| against the approximation norm of g = phi(x)^{-1} phi(y).
  {
    const auto& group = section->group();
    std::map<Element, double> norms;
    for (const auto& row : rep.approximation.rows) norms.emplace(row.element.g, row.norm.value);
    const auto& kw = *rep.kernel->kernel.space();
    for (std::size_t i = 0; i < kw.size(); ++i) {
      const auto x = rep.interior[i];
      const auto inv = group.invert(section->phi(x));
      for (std::size_t j = 0; j < kw.size(); ++j) {
        if (kw.dist(i, j) > radius) continue;
        const auto g = group.multiply(inv, section->phi(rep.interior[j]));
        const auto it = norms.find(g);
        if (it == norms.end()) throw InvariantViolation("pair element missing from E_R");
        ++rep.chain_pairs;
        const double dev = to_double(abs(Rational(1 - rep.kernel->kernel.exact()->core(i, j))));
        if (dev > it->second + chain_tolerance(it->second)) ++rep.chain_violations;
      }
    }
  }
  rep.stages.push_back({"variation_chain", rep.chain_violations == 0,
                        std::to_string(rep.chain_violations) + " violations over " +
                            std::to_string(rep.chain_pairs) + " pairs"});

  rep.support_bound = run_stage("compute_support_bound", [&] { return compute_support_bound(theta, *section); });
  rep.support_at_s_prime = check_support(rep.kernel->kernel, rep.support_bound.s_prime);
  rep.support_at_sharper = check_support(rep.kernel->kernel, rep.support_bound.sharper);
  rep.stages.push_back({"check_support", rep.support_at_s_prime.pass && rep.support_at_sharper.pass,
                        "S' = " + std::to_string(rep.support_bound.s_prime) + ", sharper bound " +
                            std::to_string(rep.support_bound.sharper)});

  rep.certified = std::all_of(rep.stages.begin(), rep.stages.end(), [](const auto& s) { return s.pass; });
  if (rep.certified) {
    rep.verdict = "property A kernel certified at window scale";
  } else {
    rep.verdict = "not certified";
    if (!rep.psd.pass) {
      rep.violated_hypothesis = rep.psd.violated_hypothesis;
    } else if (!rep.approximation.pass) {
      rep.violated_hypothesis = "||theta(g) - g|| < eps for all g in E_R";
    } else if (!rep.variation.pass) {
      rep.violated_hypothesis = "(R, eps)-variation of u";
    } else if (!symmetric) {
      rep.violated_hypothesis = "implementation fault: u is not symmetric";
    } else if (rep.chain_violations > 0) {
      rep.violated_hypothesis = "implementation fault: |1 - u| exceeds ||theta(g) - g||";
    } else {
      rep.violated_hypothesis = "implementation fault: u nonzero beyond the support bound";
    }
  }
  return rep;
}

}  // namespace coarse
