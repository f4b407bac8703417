#include "coarse/reports.hpp"

#include <sstream>

namespace coarse {

namespace {

Json rational_or_infinite(const std::optional<Rational>& q) {
  return q ? Json(to_string(*q)) : Json("infinite");
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json pair_json(const MetricWindow& w, const std::optional<std::pair<std::size_t, std::size_t>>& p) {
  if (!p) return nullptr;
  return Json::array({w.point(p->first), w.point(p->second)});
}

Json to_json(const MetricVerdict& v, const MetricWindow& w) {
  Json j;
  j["valid"] = v.valid;
  j["violation"] = v.violation;
  Json pts = Json::array();
  for (auto i : v.witness) pts.push_back(w.point(i));
  j["witness"] = pts;
  return j;
}

Json to_json(const ProperCheck& v, const GroupModel& g) {
  Json j;
  j["certified"] = v.certified;
  j["radius"] = v.radius;
  j["search_radius"] = v.search_radius;
  j["counts"] = v.counts;
  Json stab = Json::array();
  for (const auto& s : v.stabilizer) stab.push_back(g.format(s));
  j["stabilizer"] = stab;
  j["free"] = v.free_action;
  j["note"] = v.note;
  return j;
}

Json to_json(const CocompactCheck& v, const MetricWindow& w) {
  Json j;
  j["cocompact"] = v.cocompact;
  j["radius"] = v.radius;
  j["excluded_near_edge"] = v.excluded.size();
  Json un = Json::array();
  for (auto i : v.uncovered) un.push_back(w.point(i));
  j["uncovered"] = un;
  return j;
}

Json to_json(const WitnessVerdict& v, const MetricWindow& w) {
  Json j;
  j["pass"] = v.pass;
  j["worst_ratio"] = rational_or_infinite(v.worst_ratio);
  j["worst_pair"] = pair_json(w, v.worst_pair);
  j["pairs_checked"] = v.pairs_checked;
  j["margin"] = v.margin;
  return j;
}

Json to_json(const VariationVerdict& v, const MetricWindow& w) {
  Json j;
  j["pass"] = v.pass;
  j["worst"] = v.worst_exact ? Json(to_string(*v.worst_exact)) : Json(v.worst);
  j["worst_value"] = v.worst;
  j["worst_pair"] = pair_json(w, v.worst_pair);
  j["pairs_checked"] = v.pairs_checked;
  return j;
}

Json to_json(const PsdVerdict& v) {
  Json j;
  j["pass"] = v.pass;
  j["lambda_min"] = v.lambda_min;
  j["tolerance"] = v.tolerance;
  j["sample_size"] = v.sample_size;
  j["exact"] = v.exact_psd ? Json(*v.exact_psd) : Json(nullptr);
  j["solver"] = v.exact_psd ? "exact LDL^T, eigensolver for lambda_min" : "eigensolver";
  return j;
}

Json to_json(const SupportVerdict& v, const MetricWindow& w) {
  Json j;
  j["pass"] = v.pass;
  j["max_nonzero_distance"] = v.max_nonzero_distance;
  j["worst_pair"] = pair_json(w, v.worst_pair);
  return j;
}

Json to_json(const PropertyAReport& r) {
  Json j;
  j["space"] = r.space;
  j["family"] = r.family;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json x;
    x["R"] = e.target.radius;
    x["eps"] = to_string(e.target.eps);
    x["satisfied"] = e.satisfied;
    x["N"] = e.parameter ? Json(*e.parameter) : Json(nullptr);
    x["S"] = e.support ? Json(*e.support) : Json(nullptr);
    x["detail"] = e.detail;
    entries.push_back(x);
  }
  j["entries"] = entries;
  j["scope"] = r.scope_note;
  return j;
}

Json to_json(const PipelineReport& r) {
  const auto& yw = *r.section->orbit_window();
  const auto& group = r.section->group();
  Json j;
  j["scenario"] = r.scenario;

  Json prov;
  prov["group"] = r.group;
  prov["generators"] = r.generators;
  prov["space"] = r.space;
  prov["basepoint"] = r.basepoint;
  prov["section_policy"] = r.section_policy;
  prov["theta"] = r.theta;
  prov["theta_provenance"] = r.theta_provenance;
  prov["theta_terms"] = r.theta_terms;
  prov["interior_margin"] = r.interior_margin;
  prov["interior_size"] = r.interior.size();
  prov["interior_first"] = r.interior.empty() ? Json(nullptr) : Json(yw.point(r.interior.front()));
  prov["interior_last"] = r.interior.empty() ? Json(nullptr) : Json(yw.point(r.interior.back()));
  prov["norm_solver"] = "Eigen BDCSVD on interior compressions (power iteration above 2000 points)";
  prov["psd_solver"] = "exact LDL^T on rationals; Eigen SelfAdjointEigenSolver for lambda_min";
  j["provenance"] = prov;

  j["R"] = r.radius;
  j["eps"] = to_string(r.eps);

  Json er;
  er["size"] = r.er.elements.size();
  er["ball_radius"] = r.er.ball_radius;
  j["E_R"] = er;

  Json approx;
  approx["label"] = "windowed surrogate";
  approx["note"] = r.approximation.note;
  approx["pass"] = r.approximation.pass;
  Json rows = Json::array();
  for (const auto& row : r.approximation.rows) {
    Json x;
    x["g"] = group.format(row.element.g);
    x["witness"] = Json::array({yw.point(row.element.x), yw.point(row.element.y)});
    x["norm"] = row.norm.value;
    x["method"] = row.norm.method;
    x["pass"] = row.pass;
    rows.push_back(x);
  }
  approx["rows"] = rows;
  j["approximation"] = approx;

  if (r.kernel) {
    const auto& kw = *r.kernel->kernel.space();
    Json k;
    k["points"] = kw.size();
    k["max_asymmetry"] = to_string(r.kernel->max_asymmetry);
    k["descriptor"] = r.kernel->kernel.descriptor();
    j["kernel"] = k;
    j["variation"] = to_json(r.variation, kw);
    j["support_at_S_prime"] = to_json(r.support_at_s_prime, kw);
    j["support_at_sharper_bound"] = to_json(r.support_at_sharper, kw);
  }

  Json psd;
  psd["direct"] = to_json(r.psd.direct);
  psd["via_s"] = to_json(r.psd.via_s);
  psd["s_identity_ok"] = r.psd.s_identity_ok;
  psd["s_identity_failures"] = r.psd.s_identity_failures;
  psd["routes_agree"] = r.psd.routes_agree;
  psd["pass"] = r.psd.pass;
  j["psd"] = psd;

  Json sb;
  sb["F_R_size"] = r.support_bound.f_r.size();
  sb["R_prime"] = r.support_bound.r_prime;
  sb["S_prime"] = r.support_bound.s_prime;
  sb["propagation_bound"] = r.support_bound.propagation_bound;
  sb["reported"] = r.support_bound.sharper;
  sb["trace"] = r.support_bound.trace;
  j["support_bound"] = sb;

  Json chain;
  chain["pairs"] = r.chain_pairs;
  chain["violations"] = r.chain_violations;
  j["variation_chain"] = chain;

  Json stages = Json::array();
  for (const auto& s : r.stages) {
    Json x;
    x["stage"] = s.stage;
    x["pass"] = s.pass;
    x["detail"] = s.detail;
    stages.push_back(x);
  }
  j["stages"] = stages;
  j["certified"] = r.certified;
  j["verdict"] = r.verdict;
  j["violated_hypothesis"] = r.violated_hypothesis.empty() ? Json(nullptr) : Json(r.violated_hypothesis);
  return j;
}

std::string to_text(const PipelineReport& r) {
  std::ostringstream os;
  os << "pipeline " << r.scenario << ": " << r.group << " on " << r.space << ", basepoint " << r.basepoint
     << "\n";
  os << "  section " << r.section_policy << ", theta " << r.theta << " (" << r.theta_provenance << ", "
     << r.theta_terms << " terms)\n";
  os << "  R = " << r.radius << ", eps = " << to_string(r.eps) << ", interior margin " << r.interior_margin
     << " (" << r.interior.size() << " points)\n";
  for (const auto& s : r.stages) {
    os << "  [" << (s.pass ? "pass" : "FAIL") << "] " << s.stage << ": " << s.detail << "\n";
  }
  os << "  approximation norms are a windowed surrogate\n";
  os << "verdict: " << r.verdict << "\n";
  if (!r.violated_hypothesis.empty()) os << "violated hypothesis: " << r.violated_hypothesis << "\n";
  return os.str();
}

}  // namespace coarse
