#include "dcp/report.hpp"

#include <cmath>

namespace dcp {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? num(*v) : Json(nullptr);
}

Json vec(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

Json betas_json(const Betas& b) { return {{"beta_m", num(b.beta_m)}, {"beta_M", num(b.beta_M)}}; }

Json entrywise_json(const EntrywiseCheck& e) {
  return {{"scale", num(e.scale)},
          {"max_offdiagonal", num(e.max_offdiag)},
          {"max_offdiagonal_at", {e.offdiag_row, e.offdiag_col}},
          {"min_diagonal", num(e.min_diag)},
          {"min_diagonal_at", e.diag_row},
          {"z_matrix", e.z_matrix},
          {"positive_diagonal", e.positive_diagonal}};
}

Json z_json(const Mesh& mesh, const ZCondition& z) {
  Json patches = Json::array();
  for (const auto& p : z.patches) {
    patches.push_back({{"i", p.i}, {"j", p.j}, {"delta", num(p.delta)}, {"margin", num(p.margin)}});
  }
  return {{"passed", z.passed},
          {"min_margin", num(z.min_margin)},
          {"max_area", num(mesh.max_area())},
          {"patches", std::move(patches)}};
}

Json l_json(const LCondition& l) {
  Json edges = Json::array();
  for (const auto& e : l.edges) {
    edges.push_back({{"i", e.i}, {"j", e.j}, {"delta", num(e.delta)}, {"margin", num(e.margin)}});
  }
  return {{"passed", l.passed},
          {"unbounded", l.unbounded},
          {"min_margin", num(l.min_margin)},
          {"edges", std::move(edges)}};
}

Json j_json(const JValues& J) {
  Json entries = Json::array();
  for (const auto& e : J.entries) entries.push_back({e.i, e.j, num(e.value)});
  return {{"J_L", num(J.J_L)},
          {"J_U", num(J.J_U)},
          {"all_negative", J.all_negative},
          {"max", {{"i", J.worst.i}, {"j", J.worst.j}, {"value", num(J.worst.value)}}},
          {"entries", std::move(entries)}};
}

Json scaling_json(const ScalingParams& s) {
  return {{"eps_bar", num(s.eps_bar)}, {"eps0", num(s.eps0)},   {"delta0", num(s.delta0)},
          {"r", num(s.r)},             {"J_L", num(s.J_L)},     {"J_U", num(s.J_U)},
          {"beta_m", num(s.beta_m)},   {"m", s.m},              {"eps_limit", num(s.eps_limit())},
          {"sequence_positive", s.sequence_positive()}};
}

Json dominance_json(const Dominance& d) {
  Json margins = Json::array();
  for (double m : d.margins) margins.push_back(num(m));
  return {{"passed", d.passed},
          {"min_margin", num(d.min_margin)},
          {"worst_row", d.worst_row},
          {"margins", std::move(margins)}};
}

Json witness_json(const Witness& w) {
  Json out = {{"kind", w.kind}};
  if (w.row >= 0) out["row"] = w.row;
  if (w.col >= 0) out["col"] = w.col;
  if (w.i >= 0) out["i"] = w.i;
  if (w.j >= 0) out["j"] = w.j;
  out["value"] = num(w.value);
  return out;
}

}  // namespace

Json mesh_report(const Mesh& mesh, const MeshAdmissibility& adm) {
  Json edges = Json::array();
  for (int e : adm.violating_edges) {
    edges.push_back({{"edge", e},
                     {"a", mesh.edge(e).a},
                     {"b", mesh.edge(e).b},
                     {"cot_sum", num(edge_patch(mesh, e).opposite_cot_sum())}});
  }
  Json obtuse = Json::array();
  for (int t : adm.obtuse_triangles) obtuse.push_back(t);
  return {{"schema", kReportSchema},
          {"vertices", mesh.num_vertices()},
          {"triangles", mesh.num_triangles()},
          {"dofs", mesh.num_dofs()},
          {"admissible", adm.admissible},
          {"max_interior_angle", num(adm.max_interior_angle)},
          {"min_opposite_cot_sum", opt(adm.min_opposite_cot_sum)},
          {"max_patch_cot_sum", opt(adm.max_patch_cot_sum)},
          {"max_degree", adm.max_degree},
          {"max_area", num(mesh.max_area())},
          {"violating_edges", std::move(edges)},
          {"obtuse_triangles", std::move(obtuse)}};
}

Json oracle_report(const OracleResult& o) {
  return {{"monotone", o.monotone},
          {"singular", o.singular},
          {"min_entry", num(o.min_entry)},
          {"max_abs", num(o.max_abs)},
          {"witness", {o.witness_row, o.witness_col}}};
}

Json certificate_report(const Mesh& mesh, const Certificate& c) {
  Json out = {{"schema", kReportSchema}, {"verdict", to_string(c.verdict)}, {"n", c.n}};
  Json m = mesh_report(mesh, c.mesh);
  m.erase("schema");
  out["mesh"] = std::move(m);
  out["betas"] = c.betas ? betas_json(*c.betas) : Json(nullptr);
  out["entrywise"] = entrywise_json(c.entrywise);
  out["z_condition"] = c.z_condition ? z_json(mesh, *c.z_condition) : Json(nullptr);
  out["l_condition"] = c.l_condition ? l_json(*c.l_condition) : Json(nullptr);
  out["J"] = c.J ? j_json(*c.J) : Json(nullptr);
  out["scaling"] = c.scaling ? scaling_json(*c.scaling) : Json(nullptr);
  out["attempts"] = c.attempts;
  Json p = Json::array();
  for (int v : c.p) p.push_back(v);
  out["p"] = std::move(p);
  out["d"] = vec(c.d);
  out["dominance"] = c.dominance ? dominance_json(*c.dominance) : Json(nullptr);
  out["oracle"] = c.oracle ? oracle_report(*c.oracle) : Json(nullptr);
  Json w = Json::array();
  for (const auto& x : c.witnesses) w.push_back(witness_json(x));
  out["witnesses"] = std::move(w);
  out["notes"] = c.notes;
  return out;
}

Json solve_report(const SolveTrace& t) {
  Json inc = Json::array();
  for (double v : t.increments) inc.push_back(num(v));
  return {{"converged", t.converged},
          {"iterations", t.iterations},
          {"residual", num(t.residual)},
          {"increments", std::move(inc)}};
}

Json bounds_report(const BoundsReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"quantity", x.quantity},
                 {"x", {x.x[0], x.x[1]}},
                 {"eta", num(x.eta)},
                 {"value", num(x.value)}});
  }
  return {{"samples", r.samples},
          {"kappa_min", num(r.kappa_min)},
          {"kappa_max", num(r.kappa_max)},
          {"dkappa_abs_max", num(r.dkappa_abs_max)},
          {"dg_min", num(r.dg_min)},
          {"dg_max", num(r.dg_max)},
          {"ok", r.ok()},
          {"note", BoundsReport::note},
          {"violations", std::move(v)}};
}

Json comparison_report(const Mesh& mesh, const ComparisonReport& rep) {
  Json out = certificate_report(mesh, rep.certificate);
  out["comparison"] = {{"f_ordered", rep.f_ordered},
                       {"f_equal", rep.f_equal},
                       {"max_u1_minus_u2", num(rep.max_u1_minus_u2)},
                       {"ordered", rep.ordered},
                       {"predicted", rep.predicted},
                       {"linear_gap", num(rep.linear_gap)},
                       {"uniqueness_gap", opt(rep.uniqueness_gap)},
                       {"solve1", solve_report(rep.solve1.trace)},
                       {"solve2", solve_report(rep.solve2.trace)}};
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dcp
