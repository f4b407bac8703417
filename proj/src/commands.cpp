#include "coarse/commands.hpp"

#include "coarse/error.hpp"
#include "coarse/spaces.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

namespace coarse {

namespace {

const char* const kWitnessHypothesis =
    "property A witness: |A_x delta A_y| / |A_x cap A_y| < eps whenever d(x,y) <= R";
const char* const kKernelHypothesis = "positive kernel with (R, eps)-variation and bounded support";

std::size_t element_index(const MetricWindow& gw, const GroupModel& g, const Element& e) {
  const auto i = gw.find(g.format(e));
  if (!i) throw InvariantViolation("element " + g.format(e) + " missing from its group ball");
  return *i;
}

std::vector<std::size_t> psd_sample(const MetricWindow& w, std::size_t full_cap) {
  std::vector<std::size_t> s;
  if (w.size() <= full_cap) {
    for (std::size_t i = 0; i < w.size(); ++i) s.push_back(i);
    return s;
  }
  std::size_t centre = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.depth(i) > w.depth(centre)) centre = i;
  }
  s = ball(w, centre, 50);
  if (s.size() > 101) s.resize(101);
  return s;
}

// A_x: a random nonempty subset of B_S(x) x {1..3}.
WitnessFamily random_witness(WindowPtr space, std::int64_t support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WitnessFamily w{space, {}, support};
  w.sets.resize(space->size());
  for (std::size_t x = 0; x < space->size(); ++x) {
    auto& a = w.sets[x];
    for (auto p : ball(*space, x, support)) {
      for (std::int64_t tag = 1; tag <= 3; ++tag) {
        if (rng() % 2 == 0) a.emplace_back(p, tag);
      }
    }
    if (a.empty()) a.emplace_back(x, 1);
    std::sort(a.begin(), a.end());
  }
  validate_witness(w);
  return w;
}

WitnessFamily witness_from_spec(const std::string& spec, const WindowPtr& space, std::uint64_t seed) {
  if (spec == "singleton") return singleton_witness(space);
  auto number = [&](std::string_view prefix) {
    try {
      std::size_t used = 0;
      const auto text = spec.substr(prefix.size());
      const auto v = std::stoll(text, &used);
      if (used != text.size() || v < 0) throw std::invalid_argument("bad");
      return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
      throw ConfigError("bad witness spec '" + spec + "'");
    }
  };
  if (spec.starts_with("ball:")) return ball_witness(space, number("ball:"));
  if (spec.starts_with("random:")) return random_witness(space, number("random:"), seed);
  if (spec.starts_with("file:")) return load_witness_json(spec.substr(5), space);
  throw ConfigError("witness must be ball:N, singleton, random:S or file:PATH");
}

Json closeness_json(const ClosenessCertificate& c, const MetricWindow& source) {
  Json j;
  j["bound"] = c.bound;
  j["worst_point"] = source.point(c.worst_point);
  return j;
}

ScenarioPtr load_scenario(const ScenarioConfig& config) {
  if (config.scenario.group.empty() || config.scenario.space.empty() || config.scenario.action.empty()) {
    throw ConfigError("config needs group, space and action");
  }
  return make_scenario(effective_scenario(config));
}

Json scenario_provenance(const ScenarioConfig& config, const ActionScenario& s) {
  Json p;
  p["config"] = config.id;
  p["group"] = s.group->spec();
  p["generators"] = s.group->generator_names();
  p["space"] = s.space->label();
  p["action"] = s.action;
  p["basepoint"] = s.space->point(s.basepoint);
  p["section_policy"] = to_string(config.policy);
  return p;
}

}  // namespace

ActionCertificate certify_action(const ScenarioPtr& scenario, SectionPolicy policy, std::int64_t r_max,
                                 const ProperOptions& options) {
  const auto& s = *scenario;
  const auto& group = *s.group;
  const auto& space = *s.space;
  ActionCertificate cert;
  cert.proper = check_properness(s, r_max, options);
  cert.cocompact = check_cocompactness(s);
  cert.axiom_violation = check_action_axioms(s, enumerate_ball(s.group, 2, options.max_ball).elements);

  const auto section = build_section(scenario, policy, options);
  cert.orbit_size = section.size();
  cert.section_policy = to_string(policy);
  std::vector<std::optional<std::size_t>> orbit_pos(space.size());
  for (std::size_t k = 0; k < section.size(); ++k) orbit_pos[section.space_index(k)] = k;

  // psi: g -> g.x0 on a group ball that stays inside the window.
  cert.psi_ball_radius = std::min<std::int64_t>(2 * r_max, space.depth(s.basepoint));
  auto gball = std::make_shared<const MetricWindow>(group_window(s.group, cert.psi_ball_radius, options.max_ball));
  std::vector<Element> gelems;
  PointMap psi(gball->size());
  for (std::size_t i = 0; i < gball->size(); ++i) {
    gelems.push_back(group.parse(gball->point(i)));
    const auto img = s.act(gelems.back(), s.basepoint);
    if (!img) throw InvariantViolation("psi leaves the window inside the depth of the basepoint");
    psi[i] = *img;
  }
  const auto psi_fit = fit_control_function(psi, gball, s.space, r_max);
  cert.psi_control_up = psi_fit.control_up;
  cert.psi_properness = psi_fit.properness_table;

  // phi on the orbit points within psi's reach of x0.
  std::vector<std::size_t> near;
  for (std::size_t k = 0; k < section.size(); ++k) {
    if (space.dist(s.basepoint, section.space_index(k)) <= cert.psi_ball_radius) near.push_back(k);
  }
  std::int64_t reach = cert.psi_ball_radius;
  for (auto k : near) reach = std::max(reach, group.word_length(section.phi(k)));
  cert.phi_ball_radius = reach;
  auto tball = std::make_shared<const MetricWindow>(group_window(s.group, reach, options.max_ball));
  auto ysub = std::make_shared<const MetricWindow>(section.orbit_window()->restrict(near, "orbit near x0"));
  PointMap phi(near.size());
  for (std::size_t i = 0; i < near.size(); ++i) phi[i] = element_index(*tball, group, section.phi(near[i]));
  cert.phi_control_up = fit_control_function(phi, ysub, tball, r_max).control_up;

  PointMap phipsi(gball->size()), id_g(gball->size());
  for (std::size_t i = 0; i < gball->size(); ++i) {
    const auto k = orbit_pos[psi[i]];
    if (!k) throw InvariantViolation("psi image outside the orbit");
    phipsi[i] = element_index(*tball, group, section.phi(*k));
    id_g[i] = element_index(*tball, group, gelems[i]);
  }
  cert.phi_psi = check_closeness(phipsi, id_g, *tball);

  PointMap psiphi(near.size()), id_y(near.size());
  for (std::size_t i = 0; i < near.size(); ++i) {
    const auto img = s.act(section.phi(near[i]), s.basepoint);
    if (!img) throw InvariantViolation("phi(y).x0 leaves the window");
    psiphi[i] = *img;
    id_y[i] = section.space_index(near[i]);
  }
  cert.psi_phi = check_closeness(psiphi, id_y, space);

  cert.pass = cert.proper.certified && cert.cocompact.cocompact && !cert.axiom_violation;
  return cert;
}

void apply_overrides(ScenarioConfig& config, const CommandOptions& options) {
  if (options.window) config.window = *options.window;
  if (options.max_ball) config.pipeline.proper.max_ball = *options.max_ball;
  if (options.tol) config.pipeline.psd_tolerance = *options.tol;
}

CommandResult cmd_check_action(const ScenarioConfig& config) {
  const auto scenario = load_scenario(config);
  const auto cert = certify_action(scenario, config.policy, config.control_radius, config.pipeline.proper);
  const auto& group = *scenario->group;
  CommandResult res;
  Json j;
  j["command"] = "check-action";
  j["provenance"] = scenario_provenance(config, *scenario);
  j["proper"] = to_json(cert.proper, group);
  j["cocompact"] = to_json(cert.cocompact, *scenario->space);
  j["action_axioms"] = cert.axiom_violation ? Json(*cert.axiom_violation) : Json("ok");
  j["orbit_size"] = cert.orbit_size;
  Json psi;
  psi["ball_radius"] = cert.psi_ball_radius;
  psi["control_up"] = cert.psi_control_up;
  psi["properness"] = cert.psi_properness;
  j["psi"] = psi;
  Json phi;
  phi["ball_radius"] = cert.phi_ball_radius;
  phi["control_up"] = cert.phi_control_up;
  j["phi"] = phi;
  Json close;
  close["phi_psi_vs_id"] = cert.phi_psi.bound;
  close["psi_phi_vs_id"] = cert.psi_phi.bound;
  j["closeness"] = close;
  j["pass"] = cert.pass;
  j["verdict"] = cert.pass ? "uniform embedding certified at window scale" : "not certified";
  std::string hyp;
  if (!cert.proper.certified) {
    hyp = "proper action";
  } else if (!cert.cocompact.cocompact) {
    hyp = "cocompact action";
  } else if (cert.axiom_violation) {
    hyp = "isometric action";
  }
  j["violated_hypothesis"] = hyp.empty() ? Json(nullptr) : Json(hyp);
  res.report = j;

  std::ostringstream os;
  os << "check-action " << config.id << ": " << group.spec() << " on " << scenario->space->label() << " ("
     << scenario->action << ")\n";
  os << "  proper: " << (cert.proper.certified ? "yes" : "not certified") << ", stabilizer size "
     << cert.proper.stabilizer.size() << (cert.proper.free_action ? " (free)" : " (not free)") << "\n";
  os << "  cocompact: " << (cert.cocompact.cocompact ? "yes" : "no") << ", R = " << cert.cocompact.radius << "\n";
  os << "  phi o psi closeness bound " << cert.phi_psi.bound << ", psi o phi closeness bound "
     << cert.psi_phi.bound << "\n";
  os << "verdict: " << j["verdict"].get<std::string>() << "\n";
  if (!hyp.empty()) os << "violated hypothesis: " << hyp << "\n";
  res.text = os.str();
  res.exit_code = cert.pass ? 0 : 1;
  return res;
}

CommandResult cmd_property_a(const ScenarioConfig& config, std::uint64_t seed) {
  if (!config.property_a) throw ConfigError("property-a needs a 'property_a' block");
  if (config.scenario.space.empty()) throw ConfigError("property-a needs a space");
  if (config.schedule.empty()) throw ConfigError("property-a needs a schedule");
  const auto& pa = *config.property_a;
  const auto space = make_space(effective_space(config));
  CommandResult res;
  Json j;
  j["command"] = "property-a";
  Json prov;
  prov["config"] = config.id;
  prov["space"] = space->label();
  prov["quantifier"] = pa.bound == DistanceBound::inclusive ? "d <= R" : "d < R";
  prov["seed"] = seed;
  j["provenance"] = prov;
  std::ostringstream os;
  os << "property-a " << config.id << " on " << space->label() << "\n";
  bool pass = true;
  std::string hyp;

  if (!pa.witness.empty()) {
    const auto w = witness_from_spec(pa.witness, space, seed);
    const auto margin = pa.margin > 0 ? pa.margin : w.support_bound;
    Json wj;
    wj["spec"] = pa.witness.starts_with("file:") ? "file" : pa.witness;
    wj["support_bound"] = w.support_bound;
    wj["margin"] = margin;
    Json checks = Json::array();
    for (const auto& e : config.schedule) {
      const auto v = check_witness(w, e.radius, e.eps, margin, pa.bound);
      Json x = to_json(v, *space);
      x["R"] = e.radius;
      x["eps"] = to_string(e.eps);
      checks.push_back(x);
      os << "  [" << (v.pass ? "pass" : "FAIL") << "] witness R=" << e.radius << " eps=" << to_string(e.eps)
         << ": worst ratio " << (v.worst_ratio ? to_string(*v.worst_ratio) : std::string("infinite")) << "\n";
      if (!v.pass) {
        pass = false;
        hyp = kWitnessHypothesis;
      }
    }
    wj["checks"] = checks;
    const auto u = witness_to_kernel(w);
    const auto sample = psd_sample(*space, 201);
    const auto psd = check_psd(u, sample);
    const auto sup = check_support(u, 2 * w.support_bound, margin);
    wj["kernel_psd"] = to_json(psd);
    wj["kernel_support"] = to_json(sup, *space);
    wj["kernel_support_bound"] = 2 * w.support_bound;
    os << "  [" << (psd.pass ? "pass" : "FAIL") << "] witness kernel PSD on " << sample.size() << " points\n";
    os << "  [" << (sup.pass ? "pass" : "FAIL") << "] witness kernel support " << 2 * w.support_bound << "\n";
    if (!psd.pass || !sup.pass) {
      pass = false;
      if (hyp.empty()) hyp = "implementation fault: witness kernel is not a positive kernel of bounded support";
    }
    j["witness"] = wj;
  }

  if (!pa.kernel.empty()) {
    const auto u = kernel_from_descriptor(space, pa.kernel);
    Json kj;
    kj["descriptor"] = pa.kernel;
    const auto sample = psd_sample(*space, 201);
    const auto psd = check_psd(u, sample, config.pipeline.psd_tolerance);
    kj["psd"] = to_json(psd);
    Json checks = Json::array();
    bool kpass = psd.pass;
    for (const auto& e : config.schedule) {
      const auto v = check_variation(u, e.radius, e.eps, pa.margin);
      Json x = to_json(v, *space);
      x["R"] = e.radius;
      x["eps"] = to_string(e.eps);
      checks.push_back(x);
      os << "  [" << (v.pass ? "pass" : "FAIL") << "] kernel variation R=" << e.radius
         << " eps=" << to_string(e.eps) << ": worst "
         << (v.worst_exact ? to_string(*v.worst_exact) : std::to_string(v.worst)) << "\n";
      kpass = kpass && v.pass;
    }
    kj["variation"] = checks;
    if (u.support_width()) {
      const auto sup = check_support(u, *u.support_width(), pa.margin);
      kj["support"] = to_json(sup, *space);
      kpass = kpass && sup.pass;
    }
    os << "  [" << (psd.pass ? "pass" : "FAIL") << "] kernel PSD, lambda_min " << psd.lambda_min << "\n";
    if (!kpass) {
      pass = false;
      if (hyp.empty()) hyp = kKernelHypothesis;
    }
    j["kernel"] = kj;
  }

  if (pa.ladder) {
    const auto rep = property_a_report(space, config.schedule, *pa.ladder);
    j["ladder"] = to_json(rep);
    for (const auto& e : rep.entries) {
      os << "  [" << (e.satisfied ? "pass" : "FAIL") << "] ladder R=" << e.target.radius
         << " eps=" << to_string(e.target.eps);
      if (e.parameter) os << ": N=" << *e.parameter << " S=" << *e.support;
      os << "\n";
      if (!e.satisfied) {
        pass = false;
        if (hyp.empty()) hyp = kKernelHypothesis;
      }
    }
    os << "  " << rep.scope_note << "\n";
  }
  if (pa.witness.empty() && pa.kernel.empty() && !pa.ladder) {
    throw ConfigError("property_a block needs a witness, a kernel or a ladder");
  }

  j["pass"] = pass;
  j["verdict"] = pass ? "certified at window scale" : "not certified";
  j["violated_hypothesis"] = hyp.empty() ? Json(nullptr) : Json(hyp);
  os << "verdict: " << j["verdict"].get<std::string>() << "\n";
  if (!hyp.empty()) os << "violated hypothesis: " << hyp << "\n";
  res.report = j;
  res.text = os.str();
  res.exit_code = pass ? 0 : 1;
  return res;
}

CommandResult cmd_run_pipeline(const ScenarioConfig& config) {
  if (!config.theta) throw ConfigError("run-pipeline needs a 'theta' block");
  if (config.schedule.empty()) throw ConfigError("run-pipeline needs a schedule");
  const auto scenario = load_scenario(config);
  CommandResult res;
  Json runs = Json::array();
  bool all = true;
  for (const auto& e : config.schedule) {
    const auto rep = run_pipeline(scenario, config.policy, e.radius, e.eps, *config.theta, config.pipeline, config.id);
    runs.push_back(to_json(rep));
    res.text += to_text(rep);
    all = all && rep.certified;
    if (!config.outputs.csv.empty() && res.extra.empty() && rep.kernel) {
      res.extra.push_back({config.outputs.csv, kernel_csv(rep.kernel->kernel)});
    }
  }
  Json j;
  j["command"] = "run-pipeline";
  j["runs"] = runs;
  j["certified"] = all;
  res.report = j;
  res.exit_code = all ? 0 : 1;
  return res;
}

CommandResult cmd_verify_operators(const ScenarioConfig& config) {
  const auto scenario = load_scenario(config);
  const auto section = build_section(scenario, config.policy, config.pipeline.proper);
  const auto& yw = *section.orbit_window();
  const auto interior = yw.interior(config.pipeline.interior_margin.value_or(0));
  if (interior.empty()) throw ConfigError("verify-operators: empty interior");
  const IndexedBall ball(enumerate_ball(scenario->group, required_s_radius(section, interior),
                                        config.pipeline.proper.max_ball));
  std::vector<RectangularIsometryBlock> blocks;
  blocks.reserve(interior.size());
  bool orthonormal = true;
  for (auto y : interior) {
    blocks.push_back(build_s(section, y, ball));
    orthonormal = orthonormal && blocks.back().columns_orthonormal();
  }
  std::vector<std::size_t> columns(section.size());
  for (std::size_t c = 0; c < columns.size(); ++c) columns[c] = c;
  std::size_t pairs = 0, failures = 0;
  Json first = nullptr;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const auto v = verify_s_identity(section, blocks[i], blocks[k], interior[i], interior[k], columns);
      ++pairs;
      if (!v.equal) {
        ++failures;
        if (first.is_null()) first = Json::array({yw.point(interior[i]), yw.point(interior[k])});
      }
    }
  }
  CommandResult res;
  Json j;
  j["command"] = "verify-operators";
  j["provenance"] = scenario_provenance(config, *scenario);
  j["interior_margin"] = config.pipeline.interior_margin.value_or(0);
  j["interior_size"] = interior.size();
  j["group_ball_radius"] = ball.ball().radius;
  j["s_columns_orthonormal"] = orthonormal;
  j["pairs"] = pairs;
  j["failures"] = failures;
  j["first_failure"] = first;
  const bool pass = failures == 0 && orthonormal;
  j["pass"] = pass;
  j["violated_hypothesis"] = pass ? Json(nullptr) : Json("implementation fault: s_x^* s_y differs from the partial translation");
  res.report = j;
  std::ostringstream os;
  os << "verify-operators " << config.id << ": " << pairs << " pairs, " << failures << " failures\n";
  os << "verdict: " << (pass ? "s-identity holds on the interior" : "s-identity violated") << "\n";
  res.text = os.str();
  res.exit_code = pass ? 0 : 1;
  return res;
}

CommandResult cmd_export_kernel(const ScenarioConfig& config) {
  CommandResult res;
  Json j;
  j["command"] = "export-kernel";
  std::string csv;
  if (config.theta) {
    if (config.schedule.empty()) throw ConfigError("export-kernel with theta needs a schedule");
    const auto scenario = load_scenario(config);
    const auto& e = config.schedule.front();
    const auto rep = run_pipeline(scenario, config.policy, e.radius, e.eps, *config.theta, config.pipeline, config.id);
    csv = kernel_csv(rep.kernel->kernel);
    j["source"] = "pipeline";
    j["points"] = rep.kernel->kernel.size();
  } else if (config.property_a && (!config.property_a->kernel.empty() || !config.property_a->witness.empty())) {
    const auto space = make_space(effective_space(config));
    const auto& pa = *config.property_a;
    const auto u = !pa.kernel.empty() ? kernel_from_descriptor(space, pa.kernel)
                                      : witness_to_kernel(witness_from_spec(pa.witness, space, 0));
    csv = kernel_csv(u);
    j["source"] = !pa.kernel.empty() ? pa.kernel : std::string("witness");
    j["points"] = u.size();
  } else {
    throw ConfigError("export-kernel needs a theta block or a property_a kernel or witness");
  }
  const std::string name = config.outputs.csv.empty() ? "kernel.csv" : config.outputs.csv;
  j["csv"] = name;
  res.report = j;
  res.text = csv;
  res.extra.push_back({name, std::move(csv)});
  return res;
}

CommandResult cmd_check_metric(const ScenarioConfig& config) {
  std::string path = config.metric_file;
  if (path.empty() && config.scenario.space.starts_with("file:")) path = config.scenario.space.substr(5);
  if (path.empty()) throw ConfigError("check-metric needs 'metric_file' or a file: space");
  const auto lw = load_window_json(path);
  CommandResult res;
  Json j;
  j["command"] = "check-metric";
  j["window"] = lw.window.label();
  j["points"] = lw.window.size();
  j["metric"] = to_json(lw.verdict, lw.window);
  j["pass"] = lw.verdict.valid;
  j["violated_hypothesis"] =
      lw.verdict.valid ? Json(nullptr) : Json(describe_violation(lw.window, lw.verdict));
  res.report = j;
  res.text = "check-metric " + lw.window.label() + ": " +
             (lw.verdict.valid ? std::string("metric axioms hold\n")
                               : "violated hypothesis: " + describe_violation(lw.window, lw.verdict) + "\n");
  res.exit_code = lw.verdict.valid ? 0 : 1;
  return res;
}

void write_outputs(const ScenarioConfig& config, const CommandResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  write_text_file((d / config.outputs.json).string(), dump(result.report));
  write_text_file((d / config.outputs.text).string(), result.text);
  for (const auto& f : result.extra) write_text_file((d / f.name).string(), f.content);
}

}  // namespace coarse
