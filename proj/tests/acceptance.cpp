// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "coarse/commands.hpp"
#include "coarse/error.hpp"
#include "coarse/io.hpp"
#include "coarse/linalg.hpp"
#include "coarse/pipeline.hpp"
#include "coarse/spaces.hpp"
#include "oracles/oracles.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using coarse::Rational;
using coarse::SectionPolicy;

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fixture(const std::string& rel) { return std::string(FIXTURE_DIR) + "/" + rel; }

coarse::ScenarioPtr scenario(const std::string& group, const std::string& action, std::int64_t window) {
  return coarse::make_scenario({group, "Z-window:" + std::to_string(window), action, "0", {}});
}

std::string fmt(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------------------

void ac1(Check& c) {
  const auto s = scenario("DInfinity", "dihedral-on-Z", 200);
  const auto cert = coarse::certify_action(s, SectionPolicy::min_length_then_lex, 20);
  c.expect(cert.proper.certified, "properness not certified");
  std::vector<std::string> stab;
  for (const auto& g : cert.proper.stabilizer) stab.push_back(s->group->format(g));
  c.expect(stab == std::vector<std::string>{"e", "r"}, "stabilizer of 0 is not {e, r}");
  c.expect(cert.cocompact.cocompact && cert.cocompact.radius == 0, "cocompactness radius is not 0");
  c.expect(cert.phi_psi.within_cap && cert.phi_psi.bound == 1, "phi o psi closeness bound is not exactly 1");
  c.expect(cert.psi_phi.within_cap && cert.psi_phi.bound == 0, "psi o phi is not the identity on the orbit");
  c.expect(cert.psi_control_up.size() >= 21, "psi control function shorter than 21 entries");
  for (std::size_t r = 0; r < cert.psi_control_up.size() && r <= 20; ++r)
    c.expect(cert.psi_control_up[r] <= static_cast<std::int64_t>(r),
             "psi control_up(" + std::to_string(r) + ") = " + std::to_string(cert.psi_control_up[r]));
  c.expect(cert.pass, "certificate not passed");
}

void ac2(Check& c) {
  struct Case {
    std::string group, action;
  };
  for (const auto& k : {Case{"Z", "translation"}, Case{"DInfinity", "dihedral-on-Z"}}) {
    for (auto policy : {SectionPolicy::min_length_then_lex, SectionPolicy::max_length_then_lex}) {
      const auto s = scenario(k.group, k.action, 60);
      const auto sec = coarse::build_section(s, policy);
      const auto& yw = *sec.orbit_window();
      std::vector<std::size_t> ys;
      for (std::int64_t v = -50; v <= 50; ++v) ys.push_back(yw.index_of(std::to_string(v)));
      const coarse::IndexedBall ball(coarse::enumerate_ball(s->group, coarse::required_s_radius(sec, ys)));
      std::vector<coarse::RectangularIsometryBlock> blocks;
      for (auto y : ys) blocks.push_back(coarse::build_s(sec, y, ball));
      std::vector<std::size_t> columns(sec.size());
      for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
      std::size_t failures = 0, pairs = 0;
      for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
          ++pairs;
          if (!coarse::verify_s_identity(sec, blocks[i], blocks[j], ys[i], ys[j], columns).equal) ++failures;
        }
      const auto name = k.group + "/" + coarse::to_string(policy);
      c.expect(pairs == 101u * 101u, name + ": wrong pair count");
      c.expect(failures == 0, name + ": " + std::to_string(failures) + " s-identity failures");
    }
  }
}

void ac3(Check& c) {
  const auto s = scenario("DInfinity", "dihedral-on-Z", 100);
  coarse::PipelineOptions opt;
  opt.interior_margin = 20;
  coarse::ThetaSpec th;
  th.kind = "identity";
  const auto rep = coarse::run_pipeline(s, SectionPolicy::min_length_then_lex, 20, coarse::make_rational(1, 8), th, opt);
  c.expect(rep.kernel.has_value(), "no kernel built");
  if (!rep.kernel) return;
  const auto& u = rep.kernel->kernel;
  bool ones = true;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) ones = ones && u.rational_value(i, j) == Rational(1);
  c.expect(ones, "u is not identically 1");
  c.expect(rep.psd.pass && rep.psd.direct.lambda_min >= -1e-9, "PSD check failed");
  for (std::int64_t r = 0; r <= 20; ++r) {
    const auto v = coarse::check_variation(u, r, coarse::make_rational(1, 8));
    c.expect(v.pass && v.worst_exact && *v.worst_exact == 0, "variation at R = " + std::to_string(r) + " not exactly 0");
  }
  c.expect(rep.certified, "pipeline not certified: " + rep.violated_hypothesis);
}

struct FolnerRun {
  std::string name;
  coarse::PipelineReport report;
};

std::vector<FolnerRun>& folner_runs() {
  static std::vector<FolnerRun> runs = [] {
    std::vector<FolnerRun> out;
    coarse::ThetaSpec th;
    th.kind = "folner";
    th.length = 100;
    th.lo = -150;
    th.hi = 150;
    for (const auto& [g, a] : {std::pair<std::string, std::string>{"Z", "translation"},
                               std::pair<std::string, std::string>{"DInfinity", "dihedral-on-Z"}}) {
      out.push_back({g, coarse::run_pipeline(scenario(g, a, 200), SectionPolicy::min_length_then_lex, 10,
                                             coarse::make_rational(1, 8), th)});
    }
    return out;
  }();
  return runs;
}

void ac4(Check& c) {
  auto& runs = folner_runs();
  for (const auto& [name, rep] : runs) {
    c.expect(rep.kernel.has_value(), name + ": no kernel");
    if (!rep.kernel) continue;
    const auto& u = rep.kernel->kernel;
    const auto& w = *u.space();
    std::size_t off = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j) {
        const std::int64_t d = w.dist(i, j);
        const auto want = coarse::make_rational(std::max<std::int64_t>(101 - d, 0), 101);
        if (u.rational_value(i, j) != want) ++off;
      }
    c.expect(off == 0, name + ": " + std::to_string(off) + " entries differ from (101-d)_+/101");
    c.expect(rep.psd.pass && rep.psd.direct.lambda_min >= -1e-9, name + ": PSD failed");
    c.expect(rep.psd.direct.sample_size == 101, name + ": PSD sample size " + std::to_string(rep.psd.direct.sample_size));
    c.expect(rep.variation.worst_exact && *rep.variation.worst_exact == coarse::make_rational(10, 101),
             name + ": worst variation " + (rep.variation.worst_exact ? fmt(*rep.variation.worst_exact) : "?"));
    c.expect(rep.certified, name + ": not certified at eps 1/8: " + rep.violated_hypothesis);
    c.expect(!coarse::check_variation(u, 10, coarse::make_rational(1, 11)).pass, name + ": passes eps 1/11");
    const auto sup = coarse::check_support(u, 100);
    c.expect(sup.pass && sup.max_nonzero_distance == 100, name + ": support is not exactly 100");
  }
  if (runs.size() == 2 && runs[0].report.kernel && runs[1].report.kernel) {
    const auto& a = runs[0].report.kernel->kernel;
    const auto& b = runs[1].report.kernel->kernel;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      const auto bi = b.space()->index_of(a.space()->point(i));
      for (std::size_t j = 0; same && j < a.size(); ++j)
        same = a.rational_value(i, j) == b.rational_value(bi, b.space()->index_of(a.space()->point(j)));
    }
    c.expect(same, "free and non-free kernels differ");
  }
}

void ac5(Check& c) {
  for (const auto& [name, rep] : folner_runs()) {
    c.expect(rep.chain_pairs > 0, name + ": no chain pairs checked");
    c.expect(rep.chain_violations == 0, name + ": " + std::to_string(rep.chain_violations) + " chain violations");
  }
}

coarse::WitnessFamily random_witness(const coarse::WindowPtr& w, std::int64_t s, oracle::Rng& rng) {
  coarse::WitnessFamily f;
  f.space = w;
  f.support_bound = s;
  f.sets.resize(w->size());
  for (std::size_t x = 0; x < w->size(); ++x) {
    for (std::size_t y = 0; y < w->size(); ++y) {
      if (w->dist(x, y) > s) continue;
      const auto tags = rng.uniform(y == x ? 1 : 0, 2);
      for (std::int64_t t = 1; t <= tags; ++t) f.sets[x].push_back({y, t});
    }
  }
  return f;
}

void ac6(Check& c) {
  const auto w = std::make_shared<const coarse::MetricWindow>(coarse::z_window(400));
  const auto b = coarse::ball_witness(w, 50);
  const auto pass = coarse::check_witness(b, 5, coarse::make_rational(1, 8), 50);
  c.expect(pass.pass, "B_50 fails (5, 1/8)");
  const auto fail = coarse::check_witness(b, 5, coarse::make_rational(1, 10), 50);
  c.expect(!fail.pass, "B_50 passes (5, 1/10)");
  c.expect(fail.worst_ratio && *fail.worst_ratio == coarse::make_rational(10, 96),
           "worst ratio " + (fail.worst_ratio ? fmt(*fail.worst_ratio) : std::string("infinite")) + ", want 10/96");

  auto kernel_ok = [&](const coarse::WitnessFamily& f, const std::string& name) {
    const auto k = coarse::witness_to_kernel(f);
    const auto psd = coarse::check_psd(k);
    c.expect(psd.pass && psd.exact_psd.value_or(false), name + ": kernel not exactly PSD");
    c.expect(coarse::check_support(k, 2 * f.support_bound).pass, name + ": kernel support exceeds 2S");
  };
  const auto small = std::make_shared<const coarse::MetricWindow>(coarse::z_window(120));
  const auto bk = coarse::witness_to_kernel(coarse::ball_witness(small, 50));
  c.expect(coarse::check_support(bk, 100).pass && !coarse::check_support(bk, 99).pass,
           "B_50 kernel support is not exactly 100");
  kernel_ok(coarse::ball_witness(small, 50), "ball 50");
  kernel_ok(coarse::singleton_witness(small), "singleton");
  const auto d3 = std::make_shared<const coarse::MetricWindow>(coarse::discrete_points(3));
  kernel_ok(coarse::load_witness_json(fixture("property_a/witness-small.json"), d3), "witness-small");
  oracle::Rng rng(20260601);
  for (int t = 0; t < 100; ++t) {
    const auto n = rng.uniform(2, 12);
    const auto w2 = std::make_shared<const coarse::MetricWindow>(
        t % 2 ? coarse::z_window(n) : coarse::z2_window(std::max<std::int64_t>(1, n / 4)));
    const auto f = random_witness(w2, rng.uniform(0, 3), rng);
    kernel_ok(f, "random witness " + std::to_string(t));
  }
}

oracle::Dense dense(const coarse::BandedOperator& op) {
  const auto n = op.window()->size();
  auto d = oracle::zeros(n, n);
  for (const auto& [ij, v] : op.matrix().entries()) d[ij.first][ij.second] = v;
  return d;
}

coarse::BandedOperator random_op(const coarse::WindowPtr& w, std::int64_t band, oracle::Rng& rng) {
  coarse::SparseMatrix m(w->size(), w->size());
  for (std::size_t i = 0; i < w->size(); ++i)
    for (std::size_t j = 0; j < w->size(); ++j)
      if (w->dist(i, j) <= band && rng.uniform(0, 3) == 0) m.set(i, j, coarse::make_rational(rng.uniform(-5, 5), rng.uniform(1, 4)));
  return coarse::BandedOperator(w, std::move(m));
}

void ac7(Check& c) {
  oracle::Rng rng(777);
  const std::vector<coarse::WindowPtr> windows = {
      std::make_shared<const coarse::MetricWindow>(coarse::z_window(150)),
      std::make_shared<const coarse::MetricWindow>(coarse::z2_window(8)),
      std::make_shared<const coarse::MetricWindow>(coarse::cycle_window(40))};
  for (const auto& w : windows) {
    c.expect(w->size() <= 301, w->label() + ": fixture larger than 301 points");
    for (int t = 0; t < 3; ++t) {
      const auto a = random_op(w, 2, rng);
      const auto b = random_op(w, 3, rng);
      const auto da = dense(a), db = dense(b);
      c.expect(dense(coarse::compose(a, b)) == oracle::multiply(da, db), w->label() + ": product differs");
      c.expect(dense(coarse::add(a, b)) == oracle::add(da, db), w->label() + ": sum differs");
      c.expect(dense(coarse::adjoint(a)) == oracle::transpose(da), w->label() + ": adjoint differs");
    }
  }

  for (const std::string spec : {"Z", "Zd:2", "Zd:3", "Free:2", "DInfinity", "Cyclic:7", "Symmetric:3", "Symmetric:4"}) {
    const auto g = coarse::make_group(spec);
    for (std::int64_t r = 0; r <= 6; ++r) {
      const auto oracle_ball = oracle::bfs_ball(*g, r);
      const auto ball = coarse::enumerate_ball(g, r);
      bool same = ball.elements.size() == oracle_ball.size();
      for (const auto& e : ball.elements) {
        const auto it = oracle_ball.find(e);
        same = same && it != oracle_ball.end() && it->second == g->word_length(e);
      }
      c.expect(same, spec + ": ball of radius " + std::to_string(r) + " differs from BFS");
    }
  }
  c.expect(oracle::bfs_ball(*coarse::make_group("Zd:2"), 2).size() == 13, "|B_2(Z^2)| != 13");
  c.expect(oracle::bfs_ball(*coarse::make_group("Free:2"), 2).size() == 17, "|B_2(F_2)| != 17");

  std::size_t disagreements = 0, negatives = 0;
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform(1, 200));
    const auto k = static_cast<std::size_t>(rng.uniform(1, 12));
    std::vector<std::vector<std::int64_t>> v(n, std::vector<std::int64_t>(k));
    for (auto& row : v)
      for (auto& x : row) x = rng.uniform(-3, 3);
    coarse::RationalMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::int64_t s = 0;
        for (std::size_t l = 0; l < k; ++l) s += v[i][l] * v[j][l];
        m(i, j) = s;
      }
    if (t % 2) {
      const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n) - 1));
      m(i, i) -= m(i, i) + 1;
      ++negatives;
    }
    const bool exact = coarse::exact_psd(m).psd;
    const bool eig = coarse::min_eigenvalue(coarse::to_dense(m)) >= -1e-8;
    if (exact != eig || exact != (t % 2 == 0)) ++disagreements;
  }
  c.expect(negatives == 100, "control split is not 100/100");
  c.expect(disagreements == 0, std::to_string(disagreements) + " Gram kernels where the solvers disagree");
}

struct Run {
  int code = -1;
  std::string out;
};

Run coarsekit(const std::string& args) {
  Run r;
  FILE* p = popen((std::string(COARSEKIT_PATH) + " " + args + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void ac8(Check& c) {
  const auto dir = std::filesystem::temp_directory_path() / "coarsekit_acceptance";
  std::filesystem::remove_all(dir);
  const auto adv = coarsekit("run-pipeline --config " + fixture("pipelines/adversarial-signed.json") + " --out " + dir.string());
  c.expect(adv.code == 1, "adversarial fixture exit " + std::to_string(adv.code));
  c.expect(adv.out.find("theta completely positive") != std::string::npos, "adversarial fixture does not name the CP hypothesis");
  try {
    const auto j = coarse::read_json_file((dir / "adversarial-signed.json").string());
    const double lmin = j.at("runs").at(0).at("psd").at("direct").at("lambda_min").get<double>();
    c.expect(lmin <= -0.5, "adversarial lambda_min " + std::to_string(lmin));
  } catch (const std::exception& e) {
    c.expect(false, std::string("adversarial report unreadable: ") + e.what());
  }
  const auto single = coarsekit("property-a --config " + fixture("property_a/singleton.json"));
  c.expect(single.code == 1, "singleton fixture exit " + std::to_string(single.code));
  c.expect(single.out.find("property A witness") != std::string::npos, "singleton fixture does not name the witness hypothesis");
  const auto tri = coarsekit("check-metric --config " + fixture("metrics/check-triangle.json"));
  c.expect(tri.code == 1, "triangle fixture exit " + std::to_string(tri.code));
  c.expect(tri.out.find("triangle inequality") != std::string::npos, "triangle fixture does not name the triangle inequality");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1 dihedral action: proper, cocompact, section closeness 1", ac1},
      {"AC2 s_x^* s_y equals the partial translation on [-50,50]^2", ac2},
      {"AC3 identity approximant gives u = 1, PSD, zero variation", ac3},
      {"AC4 Folner approximant gives the triangular kernel", ac4},
      {"AC5 variation chain inequality holds", ac5},
      {"AC6 ball witness thresholds and witness kernels", ac6},
      {"AC7 sparse, ball and PSD oracles agree", ac7},
      {"AC8 CLI reports failing hypotheses", ac8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << (c.failures.empty() ? "[PASS] " : "[FAIL] ") << name << " (" << static_cast<int>(secs * 10) / 10.0 << " s)";
    std::cout << line.str() << "\n";
    for (const auto& f : c.failures) std::cout << "       " << f << "\n";
    std::cout.flush();
    if (!c.failures.empty()) ++failed;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
