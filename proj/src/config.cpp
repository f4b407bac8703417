#include "coarse/config.hpp"

#include "coarse/error.hpp"

#include <algorithm>
#include <filesystem>

namespace coarse {

namespace {

void reject_unknown(const Json& doc, std::initializer_list<const char*> keys, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : doc.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

std::string get_string(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::int64_t get_int(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

Rational get_rational(const Json& doc, const char* key, const std::string& where) {
  const auto& v = doc.at(key);
  if (v.is_number_integer()) return make_rational(v.get<std::int64_t>());
  if (!v.is_string()) throw ConfigError(where + "." + key + ": exact thresholds are strings such as \"1/8\"");
  return parse_rational(v.get<std::string>());
}

ThetaSpec parse_theta(const Json& doc, const std::string& base_dir) {
  reject_unknown(doc, {"kind", "L", "window", "path"}, "theta");
  if (!doc.contains("kind")) throw ConfigError("theta: missing key 'kind'");
  ThetaSpec t;
  t.kind = get_string(doc, "kind", "theta");
  if (t.kind == "identity") return t;
  if (t.kind == "folner" || t.kind == "signed") {
    if (t.kind == "folner") {
      if (!doc.contains("L")) throw ConfigError("theta: folner needs 'L'");
      t.length = get_int(doc, "L", "theta");
      if (t.length < 1) throw ConfigError("theta.L must be >= 1");
    }
    if (!doc.contains("window")) throw ConfigError("theta: " + t.kind + " needs 'window': [lo, hi]");
    const auto& w = doc.at("window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer()) {
      throw ConfigError("theta.window: expected [lo, hi]");
    }
    t.lo = w[0].get<std::int64_t>();
    t.hi = w[1].get<std::int64_t>();
    if (t.lo > t.hi) throw ConfigError("theta.window: lo > hi");
    return t;
  }
  if (t.kind == "file") {
    if (!doc.contains("path")) throw ConfigError("theta: file needs 'path'");
    const std::filesystem::path p = get_string(doc, "path", "theta");
    t.path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
    return t;
  }
  throw ConfigError("theta.kind must be identity, folner, signed or file");
}

Ladder parse_ladder(const Json& doc) {
  reject_unknown(doc, {"family", "start", "step", "max"}, "property_a.ladder");
  Ladder l;
  if (doc.contains("family")) {
    const auto f = get_string(doc, "family", "property_a.ladder");
    if (f == "ball") {
      l.family = LadderFamily::ball_witness;
    } else if (f == "triangular") {
      l.family = LadderFamily::triangular_kernel;
    } else if (f == "singleton") {
      l.family = LadderFamily::singleton_witness;
    } else {
      throw ConfigError("property_a.ladder.family must be ball, triangular or singleton");
    }
  }
  if (doc.contains("start")) l.start = get_int(doc, "start", "property_a.ladder");
  if (doc.contains("step")) l.step = get_int(doc, "step", "property_a.ladder");
  if (doc.contains("max")) l.max = get_int(doc, "max", "property_a.ladder");
  if (l.start < 0 || l.step < 1 || l.max < l.start) throw ConfigError("property_a.ladder: bad start/step/max");
  return l;
}

PropertyAConfig parse_property_a(const Json& doc) {
  reject_unknown(doc, {"witness", "kernel", "ladder", "quantifier", "margin"}, "property_a");
  PropertyAConfig p;
  if (doc.contains("witness")) p.witness = get_string(doc, "witness", "property_a");
  if (doc.contains("kernel")) p.kernel = get_string(doc, "kernel", "property_a");
  if (doc.contains("ladder")) p.ladder = parse_ladder(doc.at("ladder"));
  if (doc.contains("quantifier")) {
    const auto q = get_string(doc, "quantifier", "property_a");
    if (q == "inclusive") {
      p.bound = DistanceBound::inclusive;
    } else if (q == "strict") {
      p.bound = DistanceBound::strict;
    } else {
      throw ConfigError("property_a.quantifier must be inclusive or strict");
    }
  }
  if (doc.contains("margin")) p.margin = get_int(doc, "margin", "property_a");
  return p;
}

}  // namespace

ScenarioConfig parse_config(const Json& doc, const std::string& base_dir) {
  reject_unknown(doc,
                 {"id", "group", "space", "action", "basepoint", "window", "section_policy", "schedule",
                  "theta", "tolerances", "interior_margin", "psd_sample_radius", "max_ball", "term_cap",
                  "control_radius", "property_a", "metric_file", "permutation_table", "outputs"},
                 "config");
  ScenarioConfig c;
  c.base_dir = base_dir;
  if (doc.contains("id")) c.id = get_string(doc, "id", "config");
  if (doc.contains("group")) c.scenario.group = get_string(doc, "group", "config");
  if (doc.contains("space")) c.scenario.space = get_string(doc, "space", "config");
  if (doc.contains("action")) c.scenario.action = get_string(doc, "action", "config");
  if (doc.contains("basepoint")) c.scenario.basepoint = get_string(doc, "basepoint", "config");
  if (doc.contains("permutation_table")) {
    const auto& t = doc.at("permutation_table");
    if (!t.is_array()) throw ConfigError("config.permutation_table: expected an array of point ids");
    for (const auto& v : t) {
      if (!v.is_string()) throw ConfigError("config.permutation_table: expected point ids");
      c.scenario.permutation_table.push_back(v.get<std::string>());
    }
  }
  if (doc.contains("window")) {
    c.window = get_int(doc, "window", "config");
    if (*c.window < 1) throw ConfigError("config.window must be >= 1");
  }
  if (doc.contains("section_policy")) c.policy = parse_section_policy(get_string(doc, "section_policy", "config"));
  if (doc.contains("schedule")) {
    const auto& s = doc.at("schedule");
    if (!s.is_array()) throw ConfigError("config.schedule: expected an array of {R, eps}");
    for (const auto& e : s) {
      reject_unknown(e, {"R", "eps"}, "config.schedule");
      if (!e.contains("R") || !e.contains("eps")) throw ConfigError("config.schedule entries need R and eps");
      ScheduleEntry entry{get_int(e, "R", "schedule"), get_rational(e, "eps", "schedule")};
      if (entry.radius < 0) throw ConfigError("schedule: R must be >= 0");
      if (entry.eps <= 0) throw ConfigError("schedule: eps must be > 0");
      c.schedule.push_back(entry);
    }
  }
  if (doc.contains("theta")) c.theta = parse_theta(doc.at("theta"), base_dir);
  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    reject_unknown(t, {"psd"}, "config.tolerances");
    if (t.contains("psd")) {
      const auto tol = get_rational(t, "psd", "config.tolerances");
      if (tol < 0) throw ConfigError("config.tolerances.psd must be >= 0");
      c.pipeline.psd_tolerance = to_double(tol);
    }
  }
  if (doc.contains("interior_margin")) c.pipeline.interior_margin = get_int(doc, "interior_margin", "config");
  if (doc.contains("psd_sample_radius")) c.pipeline.psd_sample_radius = get_int(doc, "psd_sample_radius", "config");
  if (doc.contains("max_ball")) {
    const auto m = get_int(doc, "max_ball", "config");
    if (m < 1) throw ConfigError("config.max_ball must be >= 1");
    c.pipeline.proper.max_ball = static_cast<std::uint64_t>(m);
  }
  if (doc.contains("term_cap")) {
    const auto m = get_int(doc, "term_cap", "config");
    if (m < 1) throw ConfigError("config.term_cap must be >= 1");
    c.pipeline.term_cap = static_cast<std::size_t>(m);
  }
  if (doc.contains("control_radius")) c.control_radius = get_int(doc, "control_radius", "config");
  if (doc.contains("property_a")) c.property_a = parse_property_a(doc.at("property_a"));
  if (doc.contains("metric_file")) c.metric_file = resolve_path(c, get_string(doc, "metric_file", "config"));
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    reject_unknown(o, {"json", "text", "csv"}, "config.outputs");
    if (o.contains("json")) c.outputs.json = get_string(o, "json", "config.outputs");
    if (o.contains("text")) c.outputs.text = get_string(o, "text", "config.outputs");
    if (o.contains("csv")) c.outputs.csv = get_string(o, "csv", "config.outputs");
  }
  if (c.scenario.space.starts_with("file:")) {
    c.scenario.space = "file:" + resolve_path(c, c.scenario.space.substr(5));
  }
  if (c.property_a && c.property_a->witness.starts_with("file:")) {
    c.property_a->witness = "file:" + resolve_path(c, c.property_a->witness.substr(5));
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  const std::filesystem::path p(path);
  const auto ext = p.extension().string();
  if (ext == ".toml") throw ConfigError("TOML configs are not supported; use JSON (" + path + ")");
  if (ext != ".json") throw ConfigError("config must be a .json file: " + path);
  auto dir = p.parent_path().string();
  if (dir.empty()) dir = ".";
  auto c = parse_config(read_json_file(path), dir);
  if (c.id.empty()) c.id = p.stem().string();
  return c;
}

std::string effective_space(const ScenarioConfig& config) {
  const auto& s = config.scenario.space;
  if (!config.window) return s;
  for (std::string prefix : {"Z-window:", "Z2-window:", "ZZ-window:"}) {
    if (s.starts_with(prefix)) return prefix + std::to_string(*config.window);
  }
  throw ConfigError("window override applies only to Z-window, Z2-window and ZZ-window spaces");
}

ScenarioSpec effective_scenario(const ScenarioConfig& config) {
  ScenarioSpec s = config.scenario;
  s.space = effective_space(config);
  return s;
}

std::string resolve_path(const ScenarioConfig& config, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || config.base_dir.empty()) return p.string();
  return (std::filesystem::path(config.base_dir) / p).string();
}

}  // namespace coarse
