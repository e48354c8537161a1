#include "dcp/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace dcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool touches_interior(const Mesh& mesh, const Edge& e) {
  return !mesh.is_boundary(e.a) || !mesh.is_boundary(e.b);
}

// eps_bar candidate of one patch: k_alpha - K_eta beta_M delta / (3 beta_m).
double strengthened_margin(const DataBounds& b, const Betas& betas, double delta) {
  return b.k_alpha - b.K_eta * betas.beta_M * delta / (3.0 * betas.beta_m);
}

Witness oracle_witness(const Mesh& mesh, const OracleResult& o) {
  if (o.singular) return {"singular", -1, -1, -1, -1, 0.0};
  return {"negative_inverse_entry", o.witness_row, o.witness_col,
          mesh.dof_vertex(o.witness_row), mesh.dof_vertex(o.witness_col), o.min_entry};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_monotone: return "certified_monotone";
    case Verdict::oracle_monotone_only: return "oracle_monotone_only";
    case Verdict::not_certified: return "not_certified";
    case Verdict::refuted: return "refuted";
  }
  return "unknown";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::certified_monotone: return 0;
    case Verdict::oracle_monotone_only: return 3;
    case Verdict::not_certified: return 4;
    case Verdict::refuted: return 5;
  }
  return 1;
}

Betas tight_betas(const MeshAdmissibility& adm) {
  if (!adm.min_opposite_cot_sum || !adm.max_patch_cot_sum) {
    throw InadmissibleMeshError("mesh has no interior edge");
  }
  if (!adm.admissible) {
    throw InadmissibleMeshError("mesh violates the angle conditions (" +
                                std::to_string(adm.violating_edges.size()) + " edges, " +
                                std::to_string(adm.obtuse_triangles.size()) +
                                " obtuse triangles)");
  }
  return {*adm.min_opposite_cot_sum - kCotSumTol, *adm.max_patch_cot_sum};
}

double z_condition_margin(const DataBounds& b, const Betas& betas, double delta, double max_area) {
  return b.k_alpha - (b.K_eta * betas.beta_M * delta + b.G_eta * max_area) / (3.0 * betas.beta_m);
}

double z_condition_threshold(const DataBounds& b, const Betas& betas, double max_area) {
  if (b.K_eta == 0.0) return kInf;
  return (3.0 * betas.beta_m * b.k_alpha - b.G_eta * max_area) / (b.K_eta * betas.beta_M);
}

ZCondition check_z_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2,
                             const Betas& betas) {
  if (!(betas.beta_m > 0.0) || !(betas.beta_M > 0.0)) {
    throw InadmissibleMeshError("beta_m and beta_M must be positive");
  }
  const auto nd = nodal_differences(mesh, u2);
  const double area = mesh.max_area();
  ZCondition out;
  out.betas = betas;
  out.min_margin = kInf;
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    const Edge& edge = mesh.edge(static_cast<int>(e));
    if (!touches_interior(mesh, edge)) continue;
    const double delta = nd.patch[e];
    const double margin = z_condition_margin(bounds, betas, delta, area);
    out.patches.push_back({static_cast<int>(e), edge.a, edge.b, delta, margin});
    out.min_margin = std::min(out.min_margin, margin);
  }
  out.passed = out.min_margin >= 0.0;
  return out;
}

ZCondition check_z_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2) {
  return check_z_condition(mesh, bounds, u2, tight_betas(analyze(mesh)));
}

LCondition check_l_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2) {
  LCondition out;
  out.unbounded = bounds.K_eta == 0.0;
  out.min_margin = kInf;
  const double limit = out.unbounded ? kInf : 3.0 * bounds.k_alpha / bounds.K_eta;
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    const Edge& edge = mesh.edge(static_cast<int>(e));
    if (!touches_interior(mesh, edge)) continue;
    const double delta = std::abs(u2[edge.a] - u2[edge.b]);
    const double margin = limit - delta;
    out.edges.push_back({static_cast<int>(e), edge.a, edge.b, delta, margin});
    out.min_margin = std::min(out.min_margin, margin);
  }
  out.passed = out.min_margin > 0.0;
  return out;
}

JValues compute_J(const Mesh& mesh, const ProblemSpec& spec, const NodalField& u1,
                  const NodalField& u2, const AssemblyOptions& opts) {
  const TriangleRule& rule = opts.rule;
  const std::size_t nt = mesh.num_triangles();
  // Per triangle: ∫ kappa(x, u1) and ∫ b φ_k.
  std::vector<double> kappa_int(nt, 0.0);
  std::vector<Eigen::Vector3d> b_int(nt, Eigen::Vector3d::Zero());
  for (std::size_t tt = 0; tt < nt; ++tt) {
    const int t = static_cast<int>(tt);
    const auto& tri = mesh.triangle(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const double w = rule.weights[q] * mesh.area(t);
      const Point x = lam[0] * mesh.vertex(tri[0]) + lam[1] * mesh.vertex(tri[1]) +
                      lam[2] * mesh.vertex(tri[2]);
      const double v1 = lam[0] * u1[tri[0]] + lam[1] * u1[tri[1]] + lam[2] * u1[tri[2]];
      const double v2 = lam[0] * u2[tri[0]] + lam[1] * u2[tri[1]] + lam[2] * u2[tri[2]];
      kappa_int[tt] += w * spec.kappa.value(x, v1);
      const double b = averaged_b(spec, x, v1, v2, opts.t_order);
      for (int k = 0; k < 3; ++k) b_int[tt][k] += w * b * lam[k];
    }
  }

  auto pair_value = [&](const Edge& edge, int i, int j) {
    double J = 0.0;
    for (const EdgeSide& side : edge.adjacent()) {
      const int t = side.triangle;
      const int k = side.opposite;
      const auto grad = basis_gradients(mesh, t);
      const int ci = mesh.corner(t, i), cj = mesh.corner(t, j), ck = mesh.corner(t, k);
      const double Bi = b_int[t][ci];
      J += (kappa_int[t] + (u2[i] - u2[j]) * Bi) * grad[ci].dot(grad[cj]) +
           (u2[k] - u2[j]) * grad[ck].dot(grad[cj]) * Bi;
    }
    return J;
  };

  JValues out;
  out.J_L = kInf;
  out.J_U = 0.0;
  out.all_negative = true;
  out.worst.value = -kInf;
  for (const Edge& edge : mesh.edges()) {
    if (mesh.is_boundary(edge.a) || mesh.is_boundary(edge.b)) continue;
    for (const auto& [i, j] : {std::pair{edge.a, edge.b}, std::pair{edge.b, edge.a}}) {
      const double J = pair_value(edge, i, j);
      out.entries.push_back({i, j, J});
      out.J_L = std::min(out.J_L, std::abs(J));
      out.J_U = std::max(out.J_U, std::abs(J));
      if (!(J < 0.0)) out.all_negative = false;
      if (J > out.worst.value) out.worst = {i, j, J};
    }
  }
  if (out.entries.empty()) out.J_L = 0.0;
  return out;
}

ScalingParams ScalingParams::compute(double eps_bar, double eps0, double beta_m, int m, double J_L,
                                     double J_U) {
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw std::invalid_argument("eps0 must lie in (0, 1)");
  if (m < 1) throw std::invalid_argument("max degree must be positive");
  if (!(J_U > 0.0)) throw std::invalid_argument("J_U must be positive");
  ScalingParams s;
  s.eps_bar = eps_bar;
  s.eps0 = eps0;
  s.beta_m = beta_m;
  s.m = m;
  s.J_L = J_L;
  s.J_U = J_U;
  s.delta0 = eps_bar * beta_m * (1.0 - eps0) / (2.0 * m * J_U);
  s.r = J_L / (m * J_U);
  return s;
}

std::vector<double> epsilon_sequence(const ScalingParams& params, int max_p) {
  std::vector<double> eps(static_cast<std::size_t>(std::max(max_p, 0)) + 1);
  eps[0] = params.eps0;
  double step = params.delta0;
  for (std::size_t p = 1; p < eps.size(); ++p) {
    eps[p] = eps[p - 1] - step;
    step *= params.r;
  }
  return eps;
}

Eigen::VectorXd build_D_eps(const ScalingParams& params, std::span<const int> p) {
  if (!(params.r >= 0.0 && params.r < 1.0)) throw ScalingError("r must lie in [0, 1)");
  if (!params.sequence_positive()) {
    throw ScalingError("epsilon sequence is not positive: eps0 <= delta0 / (1 - r)");
  }
  int max_p = 0;
  for (int v : p) {
    if (v < 0) throw std::invalid_argument("negative boundary distance");
    max_p = std::max(max_p, v);
  }
  const auto eps = epsilon_sequence(params, max_p);
  Eigen::VectorXd d(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) d[static_cast<Eigen::Index>(i)] = 1.0 - eps[p[i]];
  return d;
}

Eigen::VectorXd warmup_scaling(const Mesh& mesh, double d_eps) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(mesh.num_dofs()));
  for (std::size_t k = 0; k < mesh.num_dofs(); ++k) {
    const int v = mesh.dof_vertex(static_cast<int>(k));
    const auto nb = mesh.neighbors(v);
    const bool near = std::any_of(nb.begin(), nb.end(), [&](int w) { return mesh.is_boundary(w); });
    d[static_cast<Eigen::Index>(k)] = near ? d_eps : 1.0;
  }
  return d;
}

Dominance check_strict_dominance(const SparseMatrix& A, const Eigen::VectorXd& d, double rel_tol) {
  if (A.rows() != A.cols() || A.rows() != d.size()) {
    throw std::invalid_argument("dominance check: dimension mismatch");
  }
  if (d.size() && !(d.minCoeff() > 0.0)) throw std::invalid_argument("scaling must be positive");
  // Row i of A^T D holds a_ji d_j, i.e. column i of A.
  const SparseMatrix At = A.transpose();
  Dominance out;
  out.margins.resize(static_cast<std::size_t>(A.rows()));
  out.min_margin = kInf;
  out.passed = true;
  for (Eigen::Index i = 0; i < At.outerSize(); ++i) {
    double diag = 0.0, off = 0.0;
    for (SparseMatrix::InnerIterator it(At, i); it; ++it) {
      const double v = std::abs(it.value() * d[it.col()]);
      (it.col() == i ? diag : off) += v;
    }
    const double margin = diag - off;
    out.margins[static_cast<std::size_t>(i)] = margin;
    if (!(margin > rel_tol * (diag + off))) out.passed = false;
    if (margin < out.min_margin) {
      out.min_margin = margin;
      out.worst_row = static_cast<int>(i);
    }
  }
  if (A.rows() == 0) out.min_margin = 0.0;
  return out;
}

OracleResult monotone_oracle(const Eigen::MatrixXd& A, double rel_tol) {
  if (A.rows() != A.cols()) throw std::invalid_argument("oracle: matrix must be square");
  OracleResult out;
  if (A.rows() == 0) {
    out.monotone = true;
    return out;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    out.singular = true;
    return out;
  }
  const Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) {
    out.singular = true;
    return out;
  }
  Eigen::Index r = 0, c = 0;
  out.min_entry = inv.minCoeff(&r, &c);
  out.max_abs = inv.cwiseAbs().maxCoeff();
  out.witness_row = static_cast<int>(r);
  out.witness_col = static_cast<int>(c);
  out.monotone = out.min_entry >= -rel_tol * out.max_abs;
  return out;
}

EntrywiseCheck check_entrywise(const SparseMatrix& A, double sign_tol) {
  EntrywiseCheck out;
  out.max_offdiag = -kInf;
  out.min_diag = kInf;
  for (Eigen::Index i = 0; i < A.outerSize(); ++i) {
    bool has_diag = false;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      out.scale = std::max(out.scale, std::abs(it.value()));
      if (it.col() == i) {
        has_diag = true;
        if (it.value() < out.min_diag) {
          out.min_diag = it.value();
          out.diag_row = static_cast<int>(i);
        }
      } else if (it.value() > out.max_offdiag) {
        out.max_offdiag = it.value();
        out.offdiag_row = static_cast<int>(i);
        out.offdiag_col = static_cast<int>(it.col());
      }
    }
    if (!has_diag && 0.0 < out.min_diag) {
      out.min_diag = 0.0;
      out.diag_row = static_cast<int>(i);
    }
  }
  if (out.max_offdiag == -kInf) out.max_offdiag = 0.0;
  if (out.min_diag == kInf) out.min_diag = 0.0;
  out.z_matrix = out.max_offdiag <= sign_tol * out.scale;
  out.positive_diagonal = A.rows() == 0 || out.min_diag > sign_tol * out.scale;
  return out;
}

Certificate fiedler_ptak_certify(const SparseMatrix& A, const Mesh& mesh, const ProblemSpec& spec,
                                 const NodalField& u1, const NodalField& u2,
                                 const CertifyOptions& opts) {
  if (static_cast<std::size_t>(A.rows()) != mesh.num_dofs() || A.rows() != A.cols()) {
    throw std::invalid_argument("matrix does not match the mesh dofs");
  }
  Certificate cert;
  cert.n = mesh.num_dofs();
  cert.mesh = analyze(mesh);
  cert.entrywise = check_entrywise(A, opts.sign_tol);
  const auto& ew = cert.entrywise;

  if (cert.n == 0) {
    cert.verdict = Verdict::certified_monotone;
    cert.notes.push_back("no interior unknowns");
    return cert;
  }

  bool chain = true;
  if (!ew.z_matrix) {
    chain = false;
    cert.notes.push_back("A has a positive off-diagonal entry");
    cert.witnesses.push_back({"positive_offdiagonal", ew.offdiag_row, ew.offdiag_col,
                              mesh.dof_vertex(ew.offdiag_row), mesh.dof_vertex(ew.offdiag_col),
                              ew.max_offdiag});
  }
  if (!ew.positive_diagonal) {
    chain = false;
    cert.notes.push_back("A has a nonpositive diagonal entry");
    cert.witnesses.push_back({"nonpositive_diagonal", ew.diag_row, ew.diag_row,
                              mesh.dof_vertex(ew.diag_row), mesh.dof_vertex(ew.diag_row),
                              ew.min_diag});
  }

  if (!cert.mesh.admissible) {
    chain = false;
    cert.notes.push_back("mesh violates the angle conditions");
    for (int e : cert.mesh.violating_edges) {
      cert.witnesses.push_back({"inadmissible_edge", -1, -1, mesh.edge(e).a, mesh.edge(e).b,
                                edge_patch(mesh, e).opposite_cot_sum()});
    }
  } else if (opts.betas) {
    cert.betas = opts.betas;
  } else if (cert.mesh.min_opposite_cot_sum) {
    cert.betas = tight_betas(cert.mesh);
  } else {
    chain = false;
    cert.notes.push_back("mesh has no interior edge");
  }

  double eps_bar = 0.0;
  if (cert.betas) {
    const Betas& betas = *cert.betas;
    cert.z_condition = check_z_condition(mesh, spec.bounds, u2, betas);
    cert.l_condition = check_l_condition(mesh, spec.bounds, u2);
    const auto& z = *cert.z_condition;
    const auto& l = *cert.l_condition;
    eps_bar = kInf;
    for (const auto& pm : z.patches) {
      eps_bar = std::min(eps_bar, strengthened_margin(spec.bounds, betas, pm.delta));
      if (!(pm.margin > 0.0)) {
        cert.witnesses.push_back({"z_condition_patch", -1, -1, pm.i, pm.j, pm.margin});
      }
    }
    if (!(z.min_margin > 0.0)) {
      chain = false;
      cert.notes.push_back("Z-condition margin is not positive on some patch");
    }
    for (const auto& em : l.edges) {
      if (!(em.margin > 0.0)) {
        cert.witnesses.push_back({"l_condition_edge", -1, -1, em.i, em.j, em.margin});
      }
    }
    if (!l.passed) {
      chain = false;
      cert.notes.push_back("L-condition margin is not positive on some edge");
    }
    if (!(eps_bar > 0.0)) {
      chain = false;
      cert.notes.push_back("strengthened condition leaves no positive eps_bar");
    }

    cert.J = compute_J(mesh, spec, u1, u2, opts.assembly);
    if (!cert.J->entries.empty() && !cert.J->all_negative) {
      chain = false;
      cert.notes.push_back("some J_ij is nonnegative");
      const auto& w = cert.J->worst;
      cert.witnesses.push_back({"nonnegative_J", -1, -1, w.i, w.j, w.value});
    }
    if (cert.J->entries.empty()) {
      chain = false;
      cert.notes.push_back("no pair of neighboring interior vertices");
    }
  }

  bool certified = false;
  if (chain) {
    cert.p = boundary_distance(mesh);
    const int m = cert.mesh.max_degree;
    double eps = eps_bar;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt, eps *= 0.5) {
      ++cert.attempts;
      cert.scaling = ScalingParams::compute(eps, opts.eps0, cert.betas->beta_m, m, cert.J->J_L,
                                            cert.J->J_U);
      if (!cert.scaling->sequence_positive()) continue;
      cert.d = build_D_eps(*cert.scaling, cert.p);
      cert.dominance = check_strict_dominance(A, cert.d, opts.dominance_tol);
      if (cert.dominance->passed) {
        certified = true;
        break;
      }
    }
    if (!certified) {
      cert.notes.push_back("A^T D_eps is not strictly diagonally dominant after " +
                           std::to_string(cert.attempts) + " attempts");
      if (cert.dominance) {
        const int row = cert.dominance->worst_row;
        cert.witnesses.push_back({"dominance_row", row, row, mesh.dof_vertex(row),
                                  mesh.dof_vertex(row), cert.dominance->min_margin});
      }
    }
  }

  if (cert.n <= opts.oracle_max_n) {
    cert.oracle = monotone_oracle(Eigen::MatrixXd(A), opts.oracle_tol);
  }

  if (certified) {
    cert.verdict = Verdict::certified_monotone;
    if (cert.oracle && !cert.oracle->monotone) {
      cert.verdict = Verdict::refuted;
      cert.notes.push_back("oracle contradicts the scaling certificate");
      cert.witnesses.push_back(oracle_witness(mesh, *cert.oracle));
    }
  } else if (cert.oracle) {
    if (cert.oracle->monotone) {
      cert.verdict = Verdict::oracle_monotone_only;
    } else {
      cert.verdict = Verdict::refuted;
      cert.witnesses.push_back(oracle_witness(mesh, *cert.oracle));
    }
  } else {
    cert.verdict = Verdict::not_certified;
  }
  return cert;
}

ComparisonReport comparison_experiment(const Mesh& mesh, const ProblemSpec& spec,
                                       const SourceField& f1, const SourceField& f2,
                                       const SolveOptions& solve, const CertifyOptions& certify) {
  ComparisonReport rep;
  const TriangleRule& rule = certify.assembly.rule;
  rep.f_ordered = true;
  rep.f_equal = true;
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const auto& tri = mesh.triangle(static_cast<int>(tt));
    for (const auto& lam : rule.points) {
      const Point x = lam[0] * mesh.vertex(tri[0]) + lam[1] * mesh.vertex(tri[1]) +
                      lam[2] * mesh.vertex(tri[2]);
      const double a = f1(x), b = f2(x);
      if (a > b) rep.f_ordered = false;
      if (a != b) rep.f_equal = false;
    }
  }
  const bool same = f1.same_as(f2) || rep.f_equal;

  rep.solve1 = solve_picard(mesh, spec, f1, solve);
  SolveOptions second = solve;
  if (same) {
    // A distinct starting point: the first solution shifted up by one.
    second.initial_guess = NodalField{rep.solve1.u.values.array() + 1.0};
  }
  rep.solve2 = solve_picard(mesh, spec, f2, second);
  const NodalField& u1 = rep.solve1.u;
  const NodalField& u2 = rep.solve2.u;

  const auto sys = assemble_linearized(mesh, spec, u1, u2, certify.assembly);
  rep.F = assemble_load(mesh, f1, f2, certify.assembly);
  const Eigen::VectorXd W = u1.dofs(mesh) - u2.dofs(mesh);
  rep.linear_gap = W.size() ? (sys.A * W - rep.F).cwiseAbs().maxCoeff() : 0.0;
  rep.max_u1_minus_u2 = W.size() ? W.maxCoeff() : 0.0;
  rep.ordered = rep.max_u1_minus_u2 <= 1e-10;
  if (same) rep.uniqueness_gap = W.size() ? W.cwiseAbs().maxCoeff() : 0.0;

  rep.certificate = fiedler_ptak_certify(sys.A, mesh, spec, u1, u2, certify);
  const Verdict v = rep.certificate.verdict;
  rep.predicted = rep.f_ordered &&
                  (v == Verdict::certified_monotone || v == Verdict::oracle_monotone_only);
  return rep;
}

}  // namespace dcp
