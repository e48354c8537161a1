#include <cmath>
#include <map>

#include "doctest.h"

#include "dcp/certify.hpp"

using namespace dcp;

namespace {

const double kS3 = std::sqrt(3.0);

SparseMatrix sparse(const Eigen::MatrixXd& M) { return M.sparseView(); }

bool has_witness(const Certificate& c, const std::string& kind) {
  for (const auto& w : c.witnesses) {
    if (w.kind == kind) return true;
  }
  return false;
}

ProblemSpec tanh_problem(double f) {
  return {make_kappa("tanh", {2, 1, 1}), make_reaction("zero", {}), make_source("constant", {f}),
          {1, 3, 1, 0}};
}

// Nodal field equal to `value` at one vertex and zero elsewhere.
NodalField spike(const Mesh& mesh, int vertex, double value) {
  NodalField u = NodalField::zeros(mesh);
  u.values[vertex] = value;
  return u;
}

}  // namespace

TEST_CASE("verdict strings and exit codes") {
  CHECK(to_string(Verdict::certified_monotone) == "certified_monotone");
  CHECK(to_string(Verdict::refuted) == "refuted");
  CHECK(exit_code(Verdict::certified_monotone) == 0);
  CHECK(exit_code(Verdict::oracle_monotone_only) == 3);
  CHECK(exit_code(Verdict::not_certified) == 4);
  CHECK(exit_code(Verdict::refuted) == 5);
}

TEST_CASE("tight betas") {
  const auto adm = analyze(gen_structured(StructuredKind::three_direction, 4));
  const Betas b = tight_betas(adm);
  CHECK(b.beta_m == doctest::Approx(2 / kS3 - kCotSumTol).epsilon(1e-15));
  CHECK(b.beta_m < 2 / kS3);
  CHECK(b.beta_M == doctest::Approx(4 / kS3).epsilon(1e-14));
  CHECK_THROWS_AS(tight_betas(analyze(gen_structured(StructuredKind::right_uniform, 4))),
                  InadmissibleMeshError);
  const Mesh single({{0, 0}, {1, 0}, {0, 1}}, {Triangle{0, 1, 2}});
  CHECK_THROWS_AS(tight_betas(analyze(single)), InadmissibleMeshError);
}

TEST_CASE("Z-condition margins") {
  const Betas eq{2 / kS3, 4 / kS3};
  CHECK(z_condition_margin({1, 2, 1, 0}, eq, 0.9, 0.1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(z_condition_margin({1.5, 2, 0, 0}, eq, 7.0, 0.1) == 1.5);
  CHECK(std::isinf(z_condition_threshold({1, 2, 0, 3}, eq, 0.1)));
  // The threshold is where the margin vanishes.
  const DataBounds b{1.3, 2, 0.7, 2};
  const double thr = z_condition_threshold(b, eq, 0.05);
  CHECK(std::abs(z_condition_margin(b, eq, thr, 0.05)) < 1e-14);

  // A positive margin on a concrete configuration gives a Z-matrix.
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 6);
  const ProblemSpec spec = tanh_problem(0);
  const NodalField u2 = NodalField::interpolate(mesh, [](const Point& x) { return 0.9 * x.x(); });
  const auto z = check_z_condition(mesh, spec.bounds, u2);
  CHECK(z.passed);
  CHECK(z.min_margin > 0);
  std::size_t touching = 0;
  for (const Edge& e : mesh.edges()) touching += !mesh.is_boundary(e.a) || !mesh.is_boundary(e.b);
  CHECK(z.patches.size() == touching);
  const auto A = assemble_linearized(mesh, spec, u2, u2).A;
  CHECK(check_entrywise(A).z_matrix);
}

TEST_CASE("L-condition margins") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 2);
  const int centre = mesh.dof_vertex(0);
  const DataBounds b{1, 3, 2, 0};

  const auto ok = check_l_condition(mesh, b, spike(mesh, centre, 1.4));
  CHECK(ok.edges.size() == 6);
  CHECK(ok.min_margin == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(ok.passed);
  CHECK_FALSE(ok.unbounded);
  ProblemSpec spec{make_kappa("tanh", {2, 1, 2}), make_reaction("zero", {}),
                   make_source("constant", {0}), b};
  const NodalField u = spike(mesh, centre, 1.4);
  CHECK(check_entrywise(assemble_linearized(mesh, spec, u, u).A).positive_diagonal);

  const auto edge = check_l_condition(mesh, b, spike(mesh, centre, 1.5));
  CHECK(edge.min_margin == 0.0);
  CHECK_FALSE(edge.passed);

  const auto lin = check_l_condition(mesh, {1, 1, 0, 0}, spike(mesh, centre, 100));
  CHECK(lin.unbounded);
  CHECK(lin.passed);
  CHECK(std::isinf(lin.min_margin));
}

TEST_CASE("J values") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 4);
  ProblemSpec lin{make_kappa("constant", {2.5}), make_reaction("zero", {}),
                  make_source("constant", {1}), {2.5, 2.5, 0, 0}};
  const NodalField z = NodalField::zeros(mesh);
  const auto J = compute_J(mesh, lin, z, z);
  CHECK(J.entries.size() == 32);  // 16 interior-interior edges, both orientations
  CHECK(J.all_negative);
  for (const auto& e : J.entries) CHECK(e.value == doctest::Approx(-2.5 / kS3).epsilon(1e-13));
  CHECK(J.J_L == doctest::Approx(J.J_U).epsilon(1e-13));

  // u2 constant: J is the kappa(u1)-weighted stiffness entry.
  const ProblemSpec spec = tanh_problem(1);
  const NodalField u1 = NodalField::interpolate(mesh, [](const Point& x) { return std::sin(3 * x.x()) * x.y(); });
  const NodalField c = NodalField::interpolate(mesh, [](const Point&) { return 0.3; }, false);
  const auto Jc = compute_J(mesh, spec, u1, c);
  const auto A = assemble_linearized(mesh, spec, u1, c).A;
  for (const auto& e : Jc.entries) {
    CHECK(e.value == doctest::Approx(A.coeff(mesh.dof(e.i), mesh.dof(e.j))).epsilon(1e-13));
  }
}

TEST_CASE("scaling parameters and the epsilon sequence") {
  ScalingParams s;
  s.eps0 = 0.5;
  s.delta0 = 0.1;
  s.r = 0.5;
  const auto eps = epsilon_sequence(s, 4);
  CHECK(eps[0] == 0.5);
  CHECK(eps[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(eps[2] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(eps[3] == doctest::Approx(0.325).epsilon(1e-15));
  CHECK(s.eps_limit() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.sequence_positive());

  const std::vector<int> p = {0, 0, 0};
  const auto d = build_D_eps(s, p);
  CHECK((d.array() == 0.5).all());

  const auto c = ScalingParams::compute(0.8, 0.5, 2 / kS3, 6, 0.3, 0.6);
  CHECK(c.delta0 == doctest::Approx(0.8 * (2 / kS3) * 0.5 / (2 * 6 * 0.6)).epsilon(1e-15));
  CHECK(c.r == doctest::Approx(0.3 / 3.6).epsilon(1e-15));

  ScalingParams bad = s;
  bad.delta0 = 0.3;  // limit 0.5 - 0.6 < 0
  CHECK_FALSE(bad.sequence_positive());
  CHECK_THROWS_AS(build_D_eps(bad, p), ScalingError);
  CHECK_THROWS_AS(ScalingParams::compute(1, 1.0, 1, 6, 1, 1), std::invalid_argument);
}

TEST_CASE("strict dominance") {
  const Eigen::MatrixXd A{{2, -1}, {-1, 2}};
  const auto a = check_strict_dominance(sparse(A), Eigen::Vector2d(1, 1));
  CHECK(a.passed);
  CHECK(a.margins == std::vector<double>{1, 1});

  const Eigen::MatrixXd B{{1, -1}, {-1, 1}};
  const auto b = check_strict_dominance(sparse(B), Eigen::Vector2d(1, 1));
  CHECK_FALSE(b.passed);
  CHECK(b.margins == std::vector<double>{0, 0});

  const auto c = check_strict_dominance(sparse(B), Eigen::Vector2d(1, 0.9));
  CHECK_FALSE(c.passed);
  CHECK(c.margins[0] == doctest::Approx(0.1));
  CHECK(c.margins[1] == doctest::Approx(-0.1));
  CHECK(c.worst_row == 1);

  CHECK_THROWS_AS(check_strict_dominance(sparse(A), Eigen::Vector2d(1, 0)), std::invalid_argument);
}

TEST_CASE("monotone oracle") {
  const auto a = monotone_oracle(Eigen::MatrixXd{{2, -1}, {-1, 2}});
  CHECK(a.monotone);
  CHECK(a.min_entry == doctest::Approx(1.0 / 3));
  CHECK(a.max_abs == doctest::Approx(2.0 / 3));

  const auto b = monotone_oracle(Eigen::MatrixXd{{1, 2}, {2, 1}});
  CHECK_FALSE(b.monotone);
  // The inverse is -(1/3) [[1, -2], [-2, 1]].
  CHECK(b.min_entry == doctest::Approx(-1.0 / 3));
  CHECK(b.max_abs == doctest::Approx(2.0 / 3));
  CHECK(b.witness_row == b.witness_col);

  CHECK(monotone_oracle(Eigen::MatrixXd::Identity(5, 5)).monotone);

  const auto s = monotone_oracle(Eigen::MatrixXd{{1, 1}, {1, 1}});
  CHECK(s.singular);
  CHECK_FALSE(s.monotone);
}

TEST_CASE("entrywise check") {
  const auto e = check_entrywise(sparse(Eigen::MatrixXd{{2, 0.5}, {-1, -3}}));
  CHECK(e.scale == 3);
  CHECK(e.max_offdiag == 0.5);
  CHECK(e.offdiag_row == 0);
  CHECK(e.min_diag == -3);
  CHECK(e.diag_row == 1);
  CHECK_FALSE(e.z_matrix);
  CHECK_FALSE(e.positive_diagonal);
}

TEST_CASE("linear diffusion is certified on the first attempt") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 4);
  const auto spec = laplace_problem(make_source("constant", {1}));
  const NodalField z = NodalField::zeros(mesh);
  const auto A = assemble_linearized(mesh, spec, z, z).A;
  const auto cert = fiedler_ptak_certify(A, mesh, spec, z, z);
  CHECK(cert.verdict == Verdict::certified_monotone);
  CHECK(cert.attempts == 1);
  REQUIRE(cert.scaling);
  CHECK(cert.scaling->eps_bar == doctest::Approx(1.0));
  CHECK(cert.dominance->passed);
  CHECK(cert.oracle->monotone);
  CHECK(cert.witnesses.empty());
}

TEST_CASE("d is graded by boundary distance") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 10);
  const ProblemSpec spec = tanh_problem(1);
  const auto s = solve_picard(mesh, spec, spec.f);
  const auto A = assemble_linearized(mesh, spec, s.u, s.u).A;
  const auto cert = fiedler_ptak_certify(A, mesh, spec, s.u, s.u);
  REQUIRE(cert.verdict == Verdict::certified_monotone);
  std::map<int, double> level;
  for (std::size_t k = 0; k < cert.p.size(); ++k) {
    const double d = cert.d[static_cast<Eigen::Index>(k)];
    auto [it, fresh] = level.emplace(cert.p[k], d);
    if (!fresh) CHECK(it->second == d);
    CHECK(d > 0);
    CHECK(d < 1);
  }
  CHECK(level.size() == 5);
  double prev = 0;
  for (const auto& [p, d] : level) {
    CHECK(d > prev);
    prev = d;
  }
  // J_ij < -beta_m eps_bar / 2 on the certified configuration.
  for (const auto& e : cert.J->entries) {
    CHECK(e.value < -cert.betas->beta_m * cert.scaling->eps_bar / 2 + 1e-12);
  }
}

TEST_CASE("a steep u2 is not certified") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 6);
  const ProblemSpec spec = tanh_problem(0);
  const int v = mesh.dof_vertex(7);
  const NodalField u2 = spike(mesh, v, 5.0);
  const NodalField u1 = NodalField::zeros(mesh);
  const auto A = assemble_linearized(mesh, spec, u1, u2).A;
  CertifyOptions opts;
  opts.oracle_max_n = 0;
  const auto cert = fiedler_ptak_certify(A, mesh, spec, u1, u2, opts);
  CHECK(cert.verdict == Verdict::not_certified);
  REQUIRE(cert.z_condition);
  CHECK(cert.z_condition->min_margin < 0);
  bool listed = false;
  for (const auto& w : cert.witnesses) listed |= w.kind == "z_condition_patch" && (w.i == v || w.j == v);
  CHECK(listed);
  CHECK_FALSE(cert.oracle);
}

TEST_CASE("reaction without diffusion nonlinearity needs a fine mesh") {
  ProblemSpec spec{make_kappa("constant", {1}), make_reaction("linear", {200}),
                   make_source("constant", {1}), {1, 1, 0, 200}};
  auto verdict = [&](int n) {
    const Mesh mesh = gen_structured(StructuredKind::three_direction, n);
    const NodalField z = NodalField::zeros(mesh);
    CertifyOptions opts;
    opts.oracle_max_n = 0;
    return fiedler_ptak_certify(assemble_linearized(mesh, spec, z, z).A, mesh, spec, z, z, opts);
  };
  // |T| = sqrt(3) / (4 n^2) against 3 beta_m k_alpha / G_eta = 0.0173.
  const auto coarse = verdict(4);
  CHECK(coarse.verdict == Verdict::not_certified);
  CHECK(coarse.z_condition->min_margin < 0);
  const auto fine = verdict(8);
  CHECK(fine.verdict == Verdict::certified_monotone);
  CHECK(fine.z_condition->min_margin > 0);
}

TEST_CASE("warm-up scaling row sums") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 8);
  const auto spec = laplace_problem(make_source("constant", {1}));
  const NodalField z = NodalField::zeros(mesh);
  const auto A = assemble_linearized(mesh, spec, z, z).A;
  const Eigen::VectorXd d = warmup_scaling(mesh, 0.9);
  const Eigen::VectorXd sums = Eigen::MatrixXd(A).transpose() * d;
  const auto p = boundary_distance(mesh);
  int positive = 0, flat = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double s = sums[static_cast<Eigen::Index>(k)];
    CHECK(d[static_cast<Eigen::Index>(k)] == (p[k] == 0 ? 0.9 : 1.0));
    if (p[k] <= 1) {
      CHECK(s > 1e-3);
      ++positive;
    } else {
      CHECK(s > -1e-13);
      ++flat;
    }
  }
  CHECK(positive > 0);
  CHECK(flat > 0);
}

TEST_CASE("a sign-changing linearization is refuted with a witness") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 4);
  ProblemSpec spec{make_kappa("tanh", {1.001, 1, 10}), make_reaction("zero", {}),
                   make_source("constant", {0}), {0.001, 2.001, 10, 0}};
  const NodalField u = NodalField::interpolate(
      mesh, [](const Point& x) { return std::tanh(8.0 * (x.x() - 0.5 - 0.5 * x.y())); });
  const auto cert = fiedler_ptak_certify(assemble_linearized(mesh, spec, u, u).A, mesh, spec, u, u);
  CHECK(cert.verdict == Verdict::refuted);
  CHECK(has_witness(cert, "positive_offdiagonal"));
  CHECK(has_witness(cert, "negative_inverse_entry"));

  // Without the oracle the same input is only not certified.
  CertifyOptions opts;
  opts.oracle_max_n = 0;
  const auto blind = fiedler_ptak_certify(assemble_linearized(mesh, spec, u, u).A, mesh, spec, u, u, opts);
  CHECK(blind.verdict == Verdict::not_certified);
}

TEST_CASE("inadmissible meshes fall back to the oracle") {
  const Mesh mesh = gen_structured(StructuredKind::right_uniform, 6);
  const auto spec = laplace_problem(make_source("constant", {1}));
  const NodalField z = NodalField::zeros(mesh);
  const auto cert = fiedler_ptak_certify(assemble_linearized(mesh, spec, z, z).A, mesh, spec, z, z);
  CHECK(cert.verdict == Verdict::oracle_monotone_only);
  CHECK(has_witness(cert, "inadmissible_edge"));
}

TEST_CASE("explicit betas override the tight values") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 4);
  const auto spec = laplace_problem(make_source("constant", {1}));
  const NodalField z = NodalField::zeros(mesh);
  CertifyOptions opts;
  opts.betas = Betas{1 / kS3, 4 / kS3};
  const auto cert = fiedler_ptak_certify(assemble_linearized(mesh, spec, z, z).A, mesh, spec, z, z, opts);
  CHECK(cert.verdict == Verdict::certified_monotone);
  CHECK(cert.betas->beta_m == 1 / kS3);
}

TEST_CASE("no interior unknowns") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 1);
  const auto spec = laplace_problem(make_source("constant", {1}));
  const NodalField z = NodalField::zeros(mesh);
  const auto cert = fiedler_ptak_certify(assemble_linearized(mesh, spec, z, z).A, mesh, spec, z, z);
  CHECK(cert.verdict == Verdict::certified_monotone);
  CHECK(cert.n == 0);
}

TEST_CASE("comparison experiment") {
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 8);
  const ProblemSpec spec = tanh_problem(1);
  const auto rep = comparison_experiment(mesh, spec, make_source("constant", {0}),
                                         make_source("constant", {1}));
  CHECK(rep.f_ordered);
  CHECK_FALSE(rep.f_equal);
  CHECK(rep.solve1.u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.ordered);
  CHECK(rep.certificate.verdict == Verdict::certified_monotone);
  CHECK(rep.predicted);
  CHECK(rep.F.maxCoeff() <= 0.0);
  CHECK(rep.linear_gap < 1e-9);
  CHECK_FALSE(rep.uniqueness_gap);

  const auto same = comparison_experiment(mesh, spec, spec.f, spec.f);
  REQUIRE(same.uniqueness_gap);
  CHECK(*same.uniqueness_gap < 1e-8);
  CHECK(same.certificate.verdict == Verdict::certified_monotone);
}

TEST_CASE("monotone matrices order solutions of nonpositive loads") {
  // W solves A W = F with F <= 0; a monotone A forces W <= 0.
  const Mesh mesh = gen_structured(StructuredKind::three_direction, 7);
  ProblemSpec spec{make_kappa("quadratic", {2, 0.3, 0.4}), make_reaction("arctan", {1, 2}),
                   make_source("constant", {0}), {1.9, 4, 2, 2}};
  const auto f1 = make_source("bump", {1, 0.7, 0.4, 0.2});
  const auto f2 = make_source("poly", {3, 1, 0, 0, 0, 0});
  const auto rep = comparison_experiment(mesh, spec, f1, f2);
  REQUIRE(rep.certificate.oracle);
  REQUIRE(rep.certificate.oracle->monotone);
  CHECK(rep.F.maxCoeff() <= 0.0);
  CHECK(rep.max_u1_minus_u2 <= 1e-10);
}
