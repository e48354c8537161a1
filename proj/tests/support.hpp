#pragma once

// Helpers shared by the unit and acceptance tests: an independent assembly
// oracle, random meshes and random certified configurations.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dcp/certify.hpp"
#include "dcp/fem.hpp"
#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/solver.hpp"

namespace dcp::test {

struct BaryRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;  // fractions of the area
};

// Dunavant's symmetric degree-10 rule, 25 points.
inline BaryRule dunavant10() {
  BaryRule r;
  auto add1 = [&](double w) {
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(w);
  };
  auto add3 = [&](double a, double w) {
    const double c = 1.0 - 2.0 * a;
    for (const auto& p : {std::array{a, a, c}, std::array{a, c, a}, std::array{c, a, a}}) {
      r.points.push_back(p);
      r.weights.push_back(w);
    }
  };
  auto add6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                          std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
      r.points.push_back(p);
      r.weights.push_back(w);
    }
  };
  add1(0.090817990382754);
  add3(0.485577633383657, 0.036725957756467);
  add3(0.109481575485037, 0.045321059435528);
  add6(0.141707219414880, 0.307939838764121, 0.072757916845420);
  add6(0.025003534762686, 0.246672560639903, 0.028327242531057);
  add6(0.009540815400299, 0.066803251012200, 0.009421666963733);
  return r;
}

// Mean of h' over [lo, hi] as a difference quotient; derivative at the
// midpoint when the interval collapses.
template <typename Value, typename Deriv>
double mean_slope(Value&& h, Deriv&& dh, double u1, double u2) {
  const double d = u1 - u2;
  if (std::abs(d) < 1e-7) return dh(0.5 * (u1 + u2));
  return (h(u1) - h(u2)) / d;
}

// The rule applied on each of the 4^levels congruent subtriangles of a
// uniform refinement, expressed in barycentric coordinates of the parent.
inline BaryRule composite(const BaryRule& base, int levels) {
  const int k = 1 << levels;
  BaryRule out;
  const double scale = 1.0 / (k * k);
  auto emit = [&](std::array<double, 3> a, std::array<double, 3> b, std::array<double, 3> c) {
    for (std::size_t q = 0; q < base.points.size(); ++q) {
      const auto& l = base.points[q];
      std::array<double, 3> p{};
      for (int d = 0; d < 3; ++d) p[d] = l[0] * a[d] + l[1] * b[d] + l[2] * c[d];
      out.points.push_back(p);
      out.weights.push_back(base.weights[q] * scale);
    }
  };
  auto bary = [k](int i, int j) {
    return std::array<double, 3>{1.0 - double(i + j) / k, double(i) / k, double(j) / k};
  };
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i + j < k; ++i) {
      emit(bary(i, j), bary(i + 1, j), bary(i, j + 1));
      if (i + j + 1 < k) emit(bary(i + 1, j), bary(i + 1, j + 1), bary(i, j + 1));
    }
  }
  return out;
}

// Independent dense assembly of the linearized matrix over interior vertices,
// with the degree-10 rule (composite over 4^levels subtriangles) and exact
// t-averages.
inline Eigen::MatrixXd oracle_matrix(const Mesh& mesh, const ProblemSpec& spec,
                                     const NodalField& u1, const NodalField& u2,
                                     int levels = 0) {
  const BaryRule rule = composite(dunavant10(), levels);
  const auto n = static_cast<Eigen::Index>(mesh.num_dofs());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& tri : mesh.triangles()) {
    const Point p0 = mesh.vertex(tri[0]), p1 = mesh.vertex(tri[1]), p2 = mesh.vertex(tri[2]);
    // φ_k = lambda_k; solve for the gradients from the coordinate matrix.
    Eigen::Matrix3d M;
    M << 1, p0.x(), p0.y(), 1, p1.x(), p1.y(), 1, p2.x(), p2.y();
    const Eigen::Matrix3d C = M.inverse();  // column k: coefficients of φ_k
    std::array<Eigen::Vector2d, 3> g;
    for (int k = 0; k < 3; ++k) g[k] = {C(1, k), C(2, k)};
    const double area = 0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
    const Eigen::Vector2d grad_u2 = u2[tri[0]] * g[0] + u2[tri[1]] * g[1] + u2[tri[2]] * g[2];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      const double w = rule.weights[q] * area;
      const Point x = l[0] * p0 + l[1] * p1 + l[2] * p2;
      const double v1 = l[0] * u1[tri[0]] + l[1] * u1[tri[1]] + l[2] * u1[tri[2]];
      const double v2 = l[0] * u2[tri[0]] + l[1] * u2[tri[1]] + l[2] * u2[tri[2]];
      const double kappa = spec.kappa.value(x, v1);
      const double b = mean_slope([&](double e) { return spec.kappa.value(x, e); },
                                  [&](double e) { return spec.kappa.deriv(x, e); }, v1, v2);
      const double c = mean_slope([&](double e) { return spec.g.value(x, e); },
                                  [&](double e) { return spec.g.deriv(x, e); }, v1, v2);
      for (int a = 0; a < 3; ++a) {
        const int row = mesh.dof(tri[a]);
        if (row < 0) continue;
        for (int bb = 0; bb < 3; ++bb) {
          const int col = mesh.dof(tri[bb]);
          if (col < 0) continue;
          A(row, col) += w * (kappa * g[bb].dot(g[a]) + b * grad_u2.dot(g[a]) * l[bb] +
                              c * l[bb] * l[a]);
        }
      }
    }
  }
  return A;
}

// Unit square split into n x n cells, each cut along a random diagonal, with
// interior vertices jittered by up to `jitter` times the cell size.
inline Mesh random_grid_mesh(std::mt19937_64& rng, int n, double jitter) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::bernoulli_distribution flip(0.5);
  const double h = 1.0 / n;
  std::vector<Point> v;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      Point p(i * h, j * h);
      if (i > 0 && i < n && j > 0 && j < n) p += jitter * h * Point(U(rng), U(rng));
      v.push_back(p);
    }
  }
  std::vector<Triangle> t;
  auto id = [n](int i, int j) { return i + (n + 1) * j; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (flip(rng)) {
        t.push_back({a, b, c});
        t.push_back({a, c, d});
      } else {
        t.push_back({a, b, d});
        t.push_back({b, c, d});
      }
    }
  }
  return Mesh(std::move(v), std::move(t));
}

// Three-direction mesh with interior vertices moved by up to `jitter` times
// the spacing; small jitter keeps every angle acute.
inline Mesh jittered_three_direction(std::mt19937_64& rng, int n, double jitter) {
  const Mesh base = gen_structured(StructuredKind::three_direction, n);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Point> v = base.vertices();
  const double h = 1.0 / n;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!base.is_boundary(static_cast<int>(i))) v[i] += jitter * h * Point(U(rng), U(rng));
  }
  return Mesh(std::move(v), base.triangles());
}

inline NodalField random_field(std::mt19937_64& rng, const Mesh& mesh, double amplitude) {
  std::uniform_real_distribution<double> U(-amplitude, amplitude);
  return NodalField::interpolate(mesh, [&](const Point&) { return U(rng); });
}

// A random problem from the tanh / rational / quadratic diffusion families and
// the zero / linear / arctan / cubic reaction families. Bounds that depend on
// the solution range are set by `fit_bounds` after solving.
struct RandomProblem {
  ProblemSpec spec;
  SourceField f1, f2;
  bool range_dependent = false;
};

// Sets k_alpha, K_eta and G_eta to hold over eta in [lo, hi] (sampled densely
// with a small safety factor) for the range-dependent families.
inline void fit_bounds(ProblemSpec& spec, double lo, double hi) {
  const Point x(0.3, 0.3);
  double kmin = INFINITY, kmax = 0, dk = 0, dg = 0;
  for (int s = 0; s <= 2000; ++s) {
    const double e = lo + (hi - lo) * s / 2000.0;
    kmin = std::min(kmin, spec.kappa.value(x, e));
    kmax = std::max(kmax, spec.kappa.value(x, e));
    dk = std::max(dk, std::abs(spec.kappa.deriv(x, e)));
    dg = std::max(dg, spec.g.deriv(x, e));
  }
  spec.bounds.k_alpha = std::min(spec.bounds.k_alpha, kmin * 0.999);
  spec.bounds.k_beta = std::max(spec.bounds.k_beta, kmax * 1.001);
  spec.bounds.K_eta = std::max(spec.bounds.K_eta, dk * 1.001);
  spec.bounds.G_eta = std::max(spec.bounds.G_eta, dg * 1.001);
}

// Source strength is log-uniform in [1, max_strength).
inline RandomProblem random_problem(std::mt19937_64& rng, bool with_reaction = true,
                                    double max_strength = 20.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> pick_k(0, 2), pick_g(0, 3);
  RandomProblem out;
  auto& spec = out.spec;
  const double a = 1.0 + 2.0 * U(rng);
  switch (pick_k(rng)) {
    case 0: {
      const double b = 0.9 * a * U(rng), c = 0.2 + 2.8 * U(rng);
      spec.kappa = make_kappa("tanh", {a, b, c});
      spec.bounds = {a - b, a + b, b * c, 0.0};
      break;
    }
    case 1: {
      const double b = a * U(rng);
      spec.kappa = make_kappa("rational", {a, b});
      spec.bounds = {a, a + b, b * 3.0 * std::sqrt(3.0) / 8.0, 0.0};
      break;
    }
    default: {
      // a + b eta + c eta^2 with b^2 < 4ac stays above a - b^2 / (4c).
      const double c = 0.5 * U(rng), b = (U(rng) - 0.5) * std::sqrt(2.0 * a * c);
      spec.kappa = make_kappa("quadratic", {a, b, c});
      spec.bounds = {a - b * b / (4.0 * c + 1e-300), a, 0.0, 0.0};
      if (c == 0.0) spec.bounds.k_alpha = a;
      out.range_dependent = true;
    }
  }
  const int gk = with_reaction ? pick_g(rng) : 0;
  switch (gk) {
    case 0:
      spec.g = make_reaction("zero", {});
      break;
    case 1: {
      const double s = 2.0 * U(rng);
      spec.g = make_reaction("linear", {s});
      spec.bounds.G_eta = s;
      break;
    }
    case 2: {
      const double s = U(rng), t = 1.0 + U(rng);
      spec.g = make_reaction("arctan", {s, t});
      spec.bounds.G_eta = s * t;
      break;
    }
    default:
      spec.g = make_reaction("cubic", {U(rng)});
      out.range_dependent = true;
  }
  // f1 <= f2: a shared smooth part plus a nonnegative bump in f2.
  const double s = std::exp(std::log(max_strength) * U(rng));
  const double c0 = s * (2.0 * U(rng) - 0.5), c1 = s * (U(rng) - 0.5), c2 = s * (U(rng) - 0.5);
  const double amp = s * (0.2 + 2.0 * U(rng)), x0 = U(rng), y0 = U(rng) * 0.8, w = 0.2 + 0.3 * U(rng);
  out.f1 = SourceField("custom", {}, [=](const Point& x) { return c0 + c1 * x.x() + c2 * x.y(); });
  out.f2 = SourceField("custom", {}, [=](const Point& x) {
    const double r2 = (x - Point(x0, y0)).squaredNorm();
    return c0 + c1 * x.x() + c2 * x.y() + amp * std::exp(-r2 / (w * w));
  });
  spec.f = out.f1;
  return out;
}

// Column sums of A (row sums of A^T).
inline Eigen::VectorXd transpose_row_sums(const SparseMatrix& A) {
  return Eigen::RowVectorXd::Ones(A.rows()) * A;
}

}  // namespace dcp::test
