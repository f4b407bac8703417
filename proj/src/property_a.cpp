#include "coarse/property_a.hpp"

#include "coarse/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace coarse {

namespace {

std::size_t intersection_size(const std::vector<std::pair<std::size_t, std::int64_t>>& a,
                              const std::vector<std::pair<std::size_t, std::int64_t>>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

bool in_range(std::int64_t d, std::int64_t radius, DistanceBound bound) {
  return bound == DistanceBound::strict ? d < radius : d <= radius;
}

}  // namespace

void validate_witness(const WitnessFamily& w) {
  if (!w.space) throw DomainError("witness without a space");
  if (w.sets.size() != w.space->size()) throw DomainError("witness: one set per point required");
  for (std::size_t x = 0; x < w.sets.size(); ++x) {
    const auto& a = w.sets[x];
    if (a.empty()) throw DomainError("witness: A_" + w.space->point(x) + " is empty");
    if (!std::is_sorted(a.begin(), a.end()) ||
        std::adjacent_find(a.begin(), a.end()) != a.end()) {
      throw DomainError("witness: A_" + w.space->point(x) + " is not a sorted set");
    }
    for (const auto& [y, tag] : a) {
      if (y >= w.space->size()) throw DomainError("witness: point index out of range");
      if (tag < 1) throw DomainError("witness: tags must be positive integers");
      if (w.space->dist(x, y) > w.support_bound) {
        throw DomainError("witness: (" + w.space->point(y) + "," + std::to_string(tag) +
                                 ") in A_" + w.space->point(x) + " exceeds the support bound " +
                                 std::to_string(w.support_bound));
      }
    }
  }
}

WitnessFamily ball_witness(WindowPtr space, std::int64_t radius) {
  WitnessFamily w{space, {}, radius};
  w.sets.resize(space->size());
  for (std::size_t x = 0; x < space->size(); ++x) {
    for (auto y : ball(*space, x, radius)) w.sets[x].emplace_back(y, 1);
  }
  return w;
}

WitnessFamily singleton_witness(WindowPtr space) {
  WitnessFamily w{space, {}, 0};
  w.sets.resize(space->size());
  for (std::size_t x = 0; x < space->size(); ++x) w.sets[x] = {{x, 1}};
  return w;
}

Kernel::Kernel(WindowPtr space, std::optional<ExactKernel> exact, std::vector<double> values,
               std::optional<std::int64_t> support_width, std::string descriptor)
    : space_(std::move(space)),
      exact_(std::move(exact)),
      values_(std::move(values)),
      support_width_(support_width),
      descriptor_(std::move(descriptor)) {}

Kernel Kernel::rational(WindowPtr space, RationalMatrix values, std::optional<std::int64_t> support_width,
                        std::string descriptor) {
  const auto n = space->size();
  if (values.n != n) throw DomainError("kernel size does not match window");
  std::vector<double> approx(n * n);
  for (std::size_t k = 0; k < n * n; ++k) approx[k] = values.a[k].get_d();
  ExactKernel ex{std::move(values), std::vector<Rational>(n, Rational(1))};
  return Kernel(std::move(space), std::move(ex), std::move(approx), support_width, std::move(descriptor));
}

Kernel Kernel::normalized(WindowPtr space, RationalMatrix core, std::vector<Rational> scale,
                          std::optional<std::int64_t> support_width, std::string descriptor) {
  const auto n = space->size();
  if (core.n != n || scale.size() != n) throw DomainError("kernel size does not match window");
  for (const auto& s : scale) {
    if (s <= 0) throw InvariantViolation("kernel normalization weights must be positive");
  }
  std::vector<double> approx(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      approx[i * n + j] = core(i, j).get_d() / std::sqrt(scale[i].get_d() * scale[j].get_d());
    }
  }
  ExactKernel ex{std::move(core), std::move(scale)};
  return Kernel(std::move(space), std::move(ex), std::move(approx), support_width, std::move(descriptor));
}

Kernel Kernel::floating(WindowPtr space, std::vector<double> values,
                        std::optional<std::int64_t> support_width, std::string descriptor) {
  const auto n = space->size();
  if (values.size() != n * n) throw DomainError("kernel size does not match window");
  return Kernel(std::move(space), std::nullopt, std::move(values), support_width, std::move(descriptor));
}

std::optional<Rational> Kernel::rational_value(std::size_t i, std::size_t j) const {
  if (!exact_) return std::nullopt;
  const auto& c = exact_->core(i, j);
  if (c == 0) return Rational(0);
  const Rational s = exact_->scale[i] * exact_->scale[j];
  if (s == 1) return c;
  if (!is_rational_square(s)) return std::nullopt;
  return Rational(c / rational_sqrt(s));
}

bool Kernel::vanishes(std::size_t i, std::size_t j) const {
  if (exact_) return exact_->core(i, j) == 0;
  return std::abs(value(i, j)) <= 1e-12;
}

Kernel kernel_from_descriptor(WindowPtr space, std::string_view descriptor) {
  const auto colon = descriptor.find(':');
  const auto kind = descriptor.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : descriptor.substr(colon + 1);
  const auto n = space->size();
  if (kind == "triangular") {
    std::int64_t radius = 0;
    const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), radius);
    if (ec != std::errc() || p != arg.data() + arg.size() || radius < 0) {
      throw ConfigError("bad kernel descriptor '" + std::string(descriptor) + "'");
    }
    const std::int64_t width = 2 * radius + 1;
    RationalMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto d = space->dist(i, j);
        if (d < width) m(i, j) = make_rational(width - d, width);
      }
    }
    return Kernel::rational(std::move(space), std::move(m), 2 * radius, std::string(descriptor));
  }
  if (kind == "gaussian") {
    double sigma = 0.0;
    try {
      sigma = std::stod(std::string(arg));
    } catch (const std::exception&) {
      throw ConfigError("bad kernel descriptor '" + std::string(descriptor) + "'");
    }
    if (!(sigma > 0.0)) throw ConfigError("gaussian kernel needs sigma > 0");
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = static_cast<double>(space->dist(i, j));
        v[i * n + j] = std::exp(-d * d / (2.0 * sigma * sigma));
      }
    }
    return Kernel::floating(std::move(space), std::move(v), std::nullopt, std::string(descriptor));
  }
  throw ConfigError("unknown kernel descriptor '" + std::string(descriptor) + "'");
}

WitnessVerdict check_witness(const WitnessFamily& w, std::int64_t radius, const Rational& eps,
                             std::int64_t margin, DistanceBound bound) {
  if (radius < 0) throw DomainError("check_witness: negative R");
  if (eps <= 0) throw DomainError("check_witness: eps must be positive");
  validate_witness(w);
  const auto& space = *w.space;
  const auto interior = space.interior(margin);
  WitnessVerdict out;
  out.margin = margin;
  bool have_worst = false;
  for (std::size_t a = 0; a < interior.size(); ++a) {
    const auto x = interior[a];
    for (std::size_t b = a + 1; b < interior.size(); ++b) {
      const auto y = interior[b];
      if (!in_range(space.dist(x, y), radius, bound)) continue;
      ++out.pairs_checked;
      const auto common = intersection_size(w.sets[x], w.sets[y]);
      const auto sym = w.sets[x].size() + w.sets[y].size() - 2 * common;
      std::optional<Rational> ratio;
      if (common > 0) ratio = make_rational(static_cast<std::int64_t>(sym), static_cast<std::int64_t>(common));
      const bool worse = !have_worst || (!ratio && out.worst_ratio) ||
                         (ratio && out.worst_ratio && *ratio > *out.worst_ratio);
      if (worse) {
        have_worst = true;
        out.worst_ratio = ratio;
        out.worst_pair = {x, y};
      }
    }
  }
  // Pairs x = y have ratio 0 and never fail.
  out.pass = !out.worst_ratio ? false : *out.worst_ratio < eps;
  return out;
}

Kernel witness_to_kernel(const WitnessFamily& w) {
  validate_witness(w);
  const auto n = w.space->size();
  RationalMatrix core(n);
  std::vector<Rational> scale(n);
  for (std::size_t x = 0; x < n; ++x) {
    scale[x] = static_cast<long>(w.sets[x].size());
    for (std::size_t y = x; y < n; ++y) {
      if (w.space->dist(x, y) > 2 * w.support_bound) continue;
      const auto c = static_cast<long>(intersection_size(w.sets[x], w.sets[y]));
      core(x, y) = c;
      core(y, x) = c;
    }
  }
  return Kernel::normalized(w.space, std::move(core), std::move(scale), 2 * w.support_bound,
                            "witness(S=" + std::to_string(w.support_bound) + ")");
}

VariationVerdict check_variation(const Kernel& u, std::int64_t radius, const Rational& eps,
                                 std::int64_t margin) {
  if (eps <= 0) throw DomainError("check_variation: eps must be positive");
  const auto& space = *u.space();
  const auto interior = space.interior(margin);
  VariationVerdict out;
  out.worst_exact.reset();
  bool have = false;
  std::optional<Rational> worst_q;
  const Rational hi = 1 + eps;
  const Rational lo = 1 - eps;
  for (std::size_t a = 0; a < interior.size(); ++a) {
    const auto x = interior[a];
    for (std::size_t b = a; b < interior.size(); ++b) {
      const auto y = interior[b];
      if (space.dist(x, y) > radius) continue;
      ++out.pairs_checked;
      const double dev = std::abs(u.value(x, y) - 1.0);
      bool ok = false;
      std::optional<Rational> q;
      if (u.is_exact()) {
        if (auto r = u.rational_value(x, y)) {
          q = abs(*r - 1);
          ok = *q < eps;
        } else {
          const auto& ex = *u.exact();
          const Rational s = ex.scale[x] * ex.scale[y];
          ok = compare_scaled_sqrt(ex.core(x, y), s, hi) < 0 &&
               compare_scaled_sqrt(ex.core(x, y), s, lo) > 0;
        }
      } else {
        ok = dev < eps.get_d();
      }
      bool worse = !have;
      if (have) {
        if (q && worst_q) {
          worse = *q > *worst_q;
        } else {
          worse = dev > out.worst;
        }
      }
      if (worse) {
        have = true;
        out.worst = dev;
        out.worst_pair = {x, y};
        worst_q = q;
      }
      if (!ok) out.pass = false;
    }
  }
  out.worst_exact = have ? worst_q : std::optional<Rational>(Rational(0));
  return out;
}

PsdVerdict check_psd(const Kernel& u, std::span<const std::size_t> sample, double tol, std::size_t cap) {
  if (sample.size() > cap) {
    throw ResourceError("PSD sample of " + std::to_string(sample.size()) +
                        " points exceeds the dense cap of " + std::to_string(cap));
  }
  PsdVerdict out;
  out.tolerance = tol;
  out.sample_size = sample.size();
  if (sample.empty()) {
    out.pass = true;
    return out;
  }
  const auto m = static_cast<Eigen::Index>(sample.size());
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      g(i, j) = u.value(sample[static_cast<std::size_t>(i)], sample[static_cast<std::size_t>(j)]);
    }
  }
  out.lambda_min = min_eigenvalue(g);
  if (u.is_exact()) {
    out.exact_attempted = true;
    RationalMatrix core(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      for (std::size_t j = 0; j < sample.size(); ++j) core(i, j) = u.exact()->core(sample[i], sample[j]);
    }
    out.exact_psd = exact_psd(std::move(core)).psd;
    out.pass = *out.exact_psd;
  } else {
    out.pass = out.lambda_min >= -tol;
  }
  return out;
}

PsdVerdict check_psd(const Kernel& u, double tol) {
  std::vector<std::size_t> all(u.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return check_psd(u, all, tol);
}

SupportVerdict check_support(const Kernel& u, std::int64_t s, std::int64_t margin) {
  const auto& space = *u.space();
  const auto interior = space.interior(margin);
  SupportVerdict out;
  for (std::size_t a = 0; a < interior.size(); ++a) {
    for (std::size_t b = a; b < interior.size(); ++b) {
      const auto x = interior[a];
      const auto y = interior[b];
      if (u.vanishes(x, y) && u.vanishes(y, x)) continue;
      const auto d = space.dist(x, y);
      if (d > out.max_nonzero_distance) {
        out.max_nonzero_distance = d;
        if (d > s) out.worst_pair = {x, y};
      }
      if (d > s) out.pass = false;
    }
  }
  return out;
}

PropertyAReport property_a_report(const WindowPtr& space, const std::vector<ScheduleEntry>& schedule,
                                  const Ladder& ladder) {
  if (schedule.empty()) throw ConfigError("property A schedule is empty");
  if (ladder.step < 1 || ladder.start < 0) throw ConfigError("ladder needs start >= 0 and step >= 1");
  PropertyAReport report;
  report.space = space->label();
  report.scope_note =
      "certifies each (R, eps) on this window only (property A up to window scale), "
      "not the statement for all R and eps";
  switch (ladder.family) {
    case LadderFamily::ball_witness: report.family = "ball-witness"; break;
    case LadderFamily::triangular_kernel: report.family = "triangular-kernel"; break;
    case LadderFamily::singleton_witness: report.family = "singleton-witness"; break;
  }

  // PSD sample: up to 101 consecutive points around the deepest point.
  std::size_t centre = 0;
  for (std::size_t i = 0; i < space->size(); ++i) {
    if (space->depth(i) > space->depth(centre)) centre = i;
  }
  std::vector<std::size_t> sample = ball(*space, centre, 50);
  if (sample.size() > 101) sample.resize(101);

  for (const auto& entry : schedule) {
    LadderResult res{entry, false, std::nullopt, std::nullopt, {}};
    if (ladder.family == LadderFamily::singleton_witness) {
      const auto w = singleton_witness(space);
      const auto v = check_witness(w, entry.radius, entry.eps, 0);
      res.satisfied = v.pass;
      res.support = 0;
      res.detail = v.worst_ratio ? "worst ratio " + to_string(*v.worst_ratio) : "worst ratio infinite";
    } else {
      for (std::int64_t n = ladder.start; n <= ladder.max; n += ladder.step) {
        if (ladder.family == LadderFamily::ball_witness) {
          const auto w = ball_witness(space, n);
          const auto v = check_witness(w, entry.radius, entry.eps, n);
          if (v.pairs_checked == 0) break;  // window too small for this N
          if (v.pass) {
            res.satisfied = true;
            res.parameter = n;
            res.support = n;
            res.detail = "worst ratio " + (v.worst_ratio ? to_string(*v.worst_ratio) : std::string("0"));
            break;
          }
        } else {
          const auto u = kernel_from_descriptor(space, "triangular:" + std::to_string(n));
          const auto v = check_variation(u, entry.radius, entry.eps);
          if (!v.pass) continue;
          const auto psd = check_psd(u, sample);
          const auto sup = check_support(u, 2 * n);
          if (psd.pass && sup.pass) {
            res.satisfied = true;
            res.parameter = n;
            res.support = 2 * n;
            res.detail = "worst |u-1| " +
                         (v.worst_exact ? to_string(*v.worst_exact) : std::to_string(v.worst));
            break;
          }
        }
      }
      if (!res.satisfied) res.detail = "not certified at this scale (ladder exhausted)";
    }
    report.entries.push_back(std::move(res));
  }
  return report;
}

}  // namespace coarse
