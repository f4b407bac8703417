#include "coarse/io.hpp"

#include "coarse/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coarse {

namespace {

const Json& require(const Json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  return doc.at(key);
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : doc.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

std::int64_t as_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

Rational as_rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return make_rational(v.get<std::int64_t>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw ConfigError(where + ": expected an exact rational (string \"p/q\" or integer)");
}

std::size_t point_index(const MetricWindow& w, const Json& v, const std::string& where) {
  const auto id = as_string(v, where);
  const auto i = w.find(id);
  if (!i) throw ConfigError(where + ": '" + id + "' is not a window point");
  return *i;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
}

LoadedWindow window_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": window document must be an object");
  reject_unknown(doc, {"label", "points", "dist", "depth"}, where);
  const std::string label = doc.contains("label") ? as_string(doc.at("label"), where + ".label") : where;
  const auto& pts = require(doc, "points", where);
  if (!pts.is_array()) throw ConfigError(where + ".points: expected an array");
  std::vector<std::string> points;
  for (const auto& p : pts) points.push_back(as_string(p, where + ".points"));
  const auto n = points.size();
  if (n == 0) throw ConfigError(where + ": empty window");
  const auto& rows = require(doc, "dist", where);
  if (!rows.is_array() || rows.size() != n) throw ConfigError(where + ".dist: expected " + std::to_string(n) + " rows");
  std::vector<std::int64_t> dist;
  dist.reserve(n * n);
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != n) throw ConfigError(where + ".dist: every row needs " + std::to_string(n) + " entries");
    for (const auto& v : r) dist.push_back(as_int(v, where + ".dist"));
  }
  std::vector<std::int64_t> depth;
  if (doc.contains("depth")) {
    const auto& d = doc.at("depth");
    if (!d.is_array() || d.size() != n) throw ConfigError(where + ".depth: expected " + std::to_string(n) + " entries");
    for (const auto& v : d) depth.push_back(as_int(v, where + ".depth"));
  }
  std::vector<std::string> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError(where + ": duplicate point ids");
  }
  MetricWindow w(label, std::move(points), std::move(dist), std::move(depth));
  auto verdict = verify_metric(w);
  return {std::move(w), std::move(verdict)};
}

LoadedWindow load_window_json(const std::string& path) { return window_from_json(read_json_file(path), path); }

std::string describe_violation(const MetricWindow& window, const MetricVerdict& verdict) {
  std::string pts;
  for (std::size_t k = 0; k < verdict.witness.size(); ++k) {
    if (k) pts += ", ";
    pts += window.point(verdict.witness[k]);
  }
  std::string axiom = verdict.violation;
  if (axiom == "triangle") axiom = "triangle inequality";
  if (axiom == "negative") axiom = "nonnegativity";
  if (axiom == "identity") axiom = "d(x,x) = 0";
  return "metric axiom violated: " + axiom + " at (" + pts + ")";
}

MetricWindow load_valid_window(const std::string& path) {
  auto lw = load_window_json(path);
  if (!lw.verdict.valid) throw ConfigError(path + ": " + describe_violation(lw.window, lw.verdict));
  return std::move(lw.window);
}

WitnessFamily witness_from_json(const Json& doc, WindowPtr space) {
  const std::string where = "witness";
  if (!doc.is_object()) throw ConfigError("witness document must be an object");
  reject_unknown(doc, {"sets", "support_bound"}, where);
  const auto& sets = require(doc, "sets", where);
  if (!sets.is_object()) throw ConfigError("witness.sets: expected an object keyed by point id");
  const auto& w = *space;
  WitnessFamily out{space, std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>(w.size()), 0};
  std::vector<bool> seen(w.size(), false);
  std::int64_t tight = 0;
  for (const auto& [id, list] : sets.items()) {
    const auto x = w.find(id);
    if (!x) throw ConfigError("witness: '" + id + "' is not a window point");
    if (seen[*x]) throw ConfigError("witness: duplicate set for '" + id + "'");
    seen[*x] = true;
    if (!list.is_array()) throw ConfigError("witness set for '" + id + "' must be an array");
    auto& a = out.sets[*x];
    for (const auto& e : list) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("witness entries are [point, tag] pairs");
      const auto p = point_index(w, e.at(0), "witness set for '" + id + "'");
      a.emplace_back(p, as_int(e.at(1), "witness tag"));
      tight = std::max(tight, w.dist(*x, p));
    }
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (!seen[x]) throw ConfigError("witness: no set for '" + w.point(x) + "'");
  }
  out.support_bound = doc.contains("support_bound") ? as_int(doc.at("support_bound"), "witness.support_bound") : tight;
  try {
    validate_witness(out);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("witness: ") + e.what());
  }
  return out;
}

WitnessFamily load_witness_json(const std::string& path, WindowPtr space) {
  return witness_from_json(read_json_file(path), std::move(space));
}

BandedOperator operator_from_triplets(const Json& triplets, WindowPtr window) {
  if (!triplets.is_array()) throw ConfigError("operator: expected a triplet array");
  const auto n = window->size();
  SparseMatrix m(n, n);
  for (const auto& t : triplets) {
    if (!t.is_array() || t.size() != 3) throw ConfigError("operator: entries are [row, col, value] triplets");
    const auto r = point_index(*window, t.at(0), "operator row");
    const auto c = point_index(*window, t.at(1), "operator column");
    m.add(r, c, as_rational(t.at(2), "operator value"));
  }
  return BandedOperator(std::move(window), std::move(m));
}

Json operator_to_triplets(const BandedOperator& op) {
  Json out = Json::array();
  const auto& w = *op.window();
  for (const auto& [ij, v] : op.matrix().entries()) {
    out.push_back(Json::array({w.point(ij.first), w.point(ij.second), to_string(v)}));
  }
  return out;
}

std::string matrix_market(const BandedOperator& op) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << "% window " << op.window()->label() << "\n";
  os << op.matrix().rows() << ' ' << op.matrix().cols() << ' ' << op.nnz() << '\n';
  os.precision(17);
  for (const auto& [ij, v] : op.matrix().entries()) {
    os << ij.first + 1 << ' ' << ij.second + 1 << ' ' << to_double(v) << '\n';
  }
  return os.str();
}

CpApproximant theta_from_json(const Json& doc, WindowPtr y_window) {
  if (!doc.is_object()) throw ConfigError("theta document must be an object");
  reject_unknown(doc, {"terms", "description"}, "theta");
  const auto& terms = require(doc, "terms", "theta");
  if (!terms.is_array() || terms.empty()) throw ConfigError("theta.terms: expected a nonempty array");
  std::vector<ThetaTerm> out;
  for (const auto& t : terms) {
    if (!t.is_object()) throw ConfigError("theta term must be an object");
    reject_unknown(t, {"a", "b", "T"}, "theta term");
    const auto a = point_index(*y_window, require(t, "a", "theta term"), "theta term a");
    const auto b = point_index(*y_window, require(t, "b", "theta term"), "theta term b");
    out.push_back({a, b, operator_from_triplets(require(t, "T", "theta term"), y_window)});
  }
  const std::string desc =
      doc.contains("description") ? as_string(doc.at("description"), "theta.description") : "user-supplied";
  return CpApproximant(std::move(y_window), std::move(out), ThetaProvenance::user_supplied, desc);
}

CpApproximant load_theta_json(const std::string& path, WindowPtr y_window) {
  return theta_from_json(read_json_file(path), std::move(y_window));
}

std::string kernel_csv(const Kernel& u) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,d,u\n";
  const auto& w = *u.space();
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      os << csv_field(w.point(i)) << ',' << csv_field(w.point(j)) << ',' << w.dist(i, j) << ',';
      if (auto q = u.rational_value(i, j)) {
        os << to_string(*q);
      } else {
        os << u.value(i, j);
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace coarse
