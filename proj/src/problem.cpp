#include "dcp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/LU>

namespace dcp {

namespace {

void expect_params(const std::string& kind, const std::string& family,
                   const std::vector<double>& params, std::size_t n) {
  if (params.size() != n) {
    throw std::invalid_argument(kind + " family '" + family + "' takes " + std::to_string(n) +
                                " parameters, got " + std::to_string(params.size()));
  }
}

}  // namespace

void DataBounds::validate() const {
  if (!(k_alpha > 0.0)) throw std::invalid_argument("k_alpha must be positive");
  if (!(k_beta >= k_alpha)) throw std::invalid_argument("k_beta must be >= k_alpha");
  if (!(K_eta >= 0.0)) throw std::invalid_argument("K_eta must be nonnegative");
  if (!(G_eta >= 0.0)) throw std::invalid_argument("G_eta must be nonnegative");
}

Coefficient make_kappa(const std::string& family, const std::vector<double>& p) {
  if (family == "constant") {
    expect_params("kappa", family, p, 1);
    const double a = p[0];
    return {family, p, [a](const Point&, double) { return a; },
            [](const Point&, double) { return 0.0; }};
  }
  if (family == "tanh") {
    expect_params("kappa", family, p, 3);
    const double a = p[0], b = p[1], c = p[2];
    return {family, p, [=](const Point&, double e) { return a + b * std::tanh(c * e); },
            [=](const Point&, double e) {
              const double s = 1.0 / std::cosh(c * e);
              return b * c * s * s;
            }};
  }
  if (family == "tanh_x") {
    expect_params("kappa", family, p, 4);
    const double a = p[0], b = p[1], c = p[2], d = p[3];
    return {family, p,
            [=](const Point& x, double e) { return a + b * std::tanh(c * e) + d * x.x(); },
            [=](const Point&, double e) {
              const double s = 1.0 / std::cosh(c * e);
              return b * c * s * s;
            }};
  }
  if (family == "rational") {
    expect_params("kappa", family, p, 2);
    const double a = p[0], b = p[1];
    return {family, p, [=](const Point&, double e) { return a + b / (1.0 + e * e); },
            [=](const Point&, double e) {
              const double q = 1.0 + e * e;
              return -2.0 * b * e / (q * q);
            }};
  }
  if (family == "quadratic") {
    expect_params("kappa", family, p, 3);
    const double a = p[0], b = p[1], c = p[2];
    return {family, p, [=](const Point&, double e) { return a + e * (b + c * e); },
            [=](const Point&, double e) { return b + 2.0 * c * e; }};
  }
  throw std::invalid_argument("unknown kappa family '" + family + "'");
}

Coefficient make_reaction(const std::string& family, const std::vector<double>& p) {
  if (family == "zero") {
    expect_params("g", family, p, 0);
    return {family, p, [](const Point&, double) { return 0.0; },
            [](const Point&, double) { return 0.0; }};
  }
  if (family == "linear") {
    expect_params("g", family, p, 1);
    const double a = p[0];
    return {family, p, [a](const Point&, double e) { return a * e; },
            [a](const Point&, double) { return a; }};
  }
  if (family == "cubic") {
    expect_params("g", family, p, 1);
    const double a = p[0];
    return {family, p, [a](const Point&, double e) { return a * e * e * e; },
            [a](const Point&, double e) { return 3.0 * a * e * e; }};
  }
  if (family == "arctan") {
    expect_params("g", family, p, 2);
    const double a = p[0], b = p[1];
    return {family, p, [=](const Point&, double e) { return a * std::atan(b * e); },
            [=](const Point&, double e) { return a * b / (1.0 + b * b * e * e); }};
  }
  throw std::invalid_argument("unknown g family '" + family + "'");
}

SourceField make_source(const std::string& family, const std::vector<double>& p) {
  if (family == "constant") {
    expect_params("f", family, p, 1);
    const double a = p[0];
    return {family, p, [a](const Point&) { return a; }};
  }
  if (family == "poly") {
    expect_params("f", family, p, 6);
    return {family, p, [p](const Point& x) {
              return p[0] + p[1] * x.x() + p[2] * x.y() + p[3] * x.x() * x.x() +
                     p[4] * x.x() * x.y() + p[5] * x.y() * x.y();
            }};
  }
  if (family == "sine") {
    expect_params("f", family, p, 3);
    const double a = p[0], kx = p[1], ky = p[2];
    return {family, p, [=](const Point& x) {
              return a * std::sin(kx * std::numbers::pi * x.x()) *
                     std::sin(ky * std::numbers::pi * x.y());
            }};
  }
  if (family == "bump") {
    expect_params("f", family, p, 4);
    const double a = p[0], w = p[3];
    const Point c(p[1], p[2]);
    if (!(w > 0)) throw std::invalid_argument("bump width must be positive");
    return {family, p, [=](const Point& x) { return a * std::exp(-(x - c).squaredNorm() / (w * w)); }};
  }
  throw std::invalid_argument("unknown f family '" + family + "'");
}

std::vector<std::string> kappa_families() {
  return {"constant", "tanh", "tanh_x", "rational", "quadratic"};
}
std::vector<std::string> reaction_families() { return {"zero", "linear", "cubic", "arctan"}; }
std::vector<std::string> source_families() { return {"constant", "poly", "sine", "bump"}; }

ProblemSpec laplace_problem(SourceField f) {
  return {make_kappa("constant", {1.0}), make_reaction("zero", {}), std::move(f),
          DataBounds{1.0, 1.0, 0.0, 0.0}};
}

BoundsReport validate_bounds(const ProblemSpec& spec, std::span<const Point> x_samples,
                             double eta_lo, double eta_hi, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("validate_bounds needs n_samples >= 1");
  if (!std::isfinite(eta_lo) || !std::isfinite(eta_hi) || eta_hi < eta_lo) {
    throw std::invalid_argument("validate_bounds needs a finite eta range");
  }

  std::vector<double> etas{eta_lo, eta_hi};
  if (n_samples > 1) {
    for (int k = 0; k < n_samples; ++k) {
      etas.push_back(eta_lo + (eta_hi - eta_lo) * k / (n_samples - 1));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(eta_lo, eta_hi);
  for (int k = 0; k < n_samples; ++k) etas.push_back(draw(rng));

  const DataBounds& b = spec.bounds;
  BoundsReport report;
  report.kappa_min = report.dg_min = std::numeric_limits<double>::infinity();
  report.kappa_max = report.dg_max = -std::numeric_limits<double>::infinity();
  for (const Point& x : x_samples) {
    for (double eta : etas) {
      const double k = spec.kappa.value(x, eta);
      const double dk = spec.kappa.deriv(x, eta);
      const double dg = spec.g.deriv(x, eta);
      report.kappa_min = std::min(report.kappa_min, k);
      report.kappa_max = std::max(report.kappa_max, k);
      report.dkappa_abs_max = std::max(report.dkappa_abs_max, std::abs(dk));
      report.dg_min = std::min(report.dg_min, dg);
      report.dg_max = std::max(report.dg_max, dg);
      ++report.samples;
      if (k < b.k_alpha || k > b.k_beta) report.violations.push_back({"kappa", x, eta, k});
      if (std::abs(dk) > b.K_eta) report.violations.push_back({"dkappa_deta", x, eta, dk});
      if (dg < 0.0 || dg > b.G_eta) report.violations.push_back({"dg_deta", x, eta, dg});
    }
  }
  return report;
}

Bubble Bubble::for_domain(StructuredKind kind, double amplitude) {
  Bubble bub;
  bub.amplitude = amplitude;
  if (kind == StructuredKind::three_direction) bub.e2 = Point(0.5, std::sqrt(3.0) / 2.0);
  return bub;
}

namespace {

// Parallelogram coordinates (s, t) of x and the inverse basis matrix.
struct Local {
  Eigen::Matrix2d inv;
  Eigen::Vector2d st;
};

Local local_coords(const Bubble& b, const Point& x) {
  Eigen::Matrix2d basis;
  basis.col(0) = b.e1;
  basis.col(1) = b.e2;
  Local out;
  out.inv = basis.inverse();
  out.st = out.inv * (x - b.origin);
  return out;
}

}  // namespace

double Bubble::value(const Point& x) const {
  const auto [inv, st] = local_coords(*this, x);
  return amplitude * std::sin(std::numbers::pi * st[0]) * std::sin(std::numbers::pi * st[1]);
}

Point Bubble::gradient(const Point& x) const {
  const auto [inv, st] = local_coords(*this, x);
  const double pi = std::numbers::pi;
  const Eigen::Vector2d dst(pi * std::cos(pi * st[0]) * std::sin(pi * st[1]),
                            pi * std::sin(pi * st[0]) * std::cos(pi * st[1]));
  return amplitude * (inv.transpose() * dst);
}

double Bubble::laplacian(const Point& x) const {
  const auto [inv, st] = local_coords(*this, x);
  const double pi = std::numbers::pi;
  const double ss = std::sin(pi * st[0]), cs = std::cos(pi * st[0]);
  const double st_ = std::sin(pi * st[1]), ct = std::cos(pi * st[1]);
  Eigen::Matrix2d hess;
  hess << -pi * pi * ss * st_, pi * pi * cs * ct,
           pi * pi * cs * ct, -pi * pi * ss * st_;
  // Hessian in x is inv^T H inv; its trace is the Laplacian.
  return amplitude * (inv.transpose() * hess * inv).trace();
}

SourceField manufactured_source(const ProblemSpec& spec, const Bubble& bubble) {
  if (spec.kappa.family() == "tanh_x") {
    throw std::invalid_argument("manufactured_source needs kappa without explicit x-dependence");
  }
  const Coefficient kappa = spec.kappa;
  const Coefficient g = spec.g;
  return {"custom", {}, [=](const Point& x) {
            const double u = bubble.value(x);
            const Point grad = bubble.gradient(x);
            return -kappa.deriv(x, u) * grad.squaredNorm() - kappa.value(x, u) * bubble.laplacian(x) +
                   g.value(x, u);
          }};
}

}  // namespace dcp
