#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dcp/mesh.hpp"

namespace dcp {

/// Declared constants of the data: k_alpha <= kappa <= k_beta,
/// |dkappa/deta| <= K_eta and 0 <= dg/deta <= G_eta.
struct DataBounds {
  double k_alpha = 1.0;
  double k_beta = 1.0;
  double K_eta = 0.0;
  double G_eta = 0.0;

  /// Throws std::invalid_argument unless 0 < k_alpha <= k_beta, K_eta >= 0, G_eta >= 0.
  void validate() const;
};

/// A scalar field c(x, eta) together with its analytic eta-derivative.
///
/// Instances come from the closed registry below; `family` and `params` are
/// kept so a coefficient round-trips through configuration files.
class Coefficient {
 public:
  using Fn = std::function<double(const Point&, double)>;

  Coefficient() = default;
  Coefficient(std::string family, std::vector<double> params, Fn value, Fn deriv)
      : family_(std::move(family)), params_(std::move(params)),
        value_(std::move(value)), deriv_(std::move(deriv)) {}

  double value(const Point& x, double eta) const { return value_(x, eta); }
  double deriv(const Point& x, double eta) const { return deriv_(x, eta); }

  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::string family_;
  std::vector<double> params_;
  Fn value_;
  Fn deriv_;
};

/// A source term f(x).
class SourceField {
 public:
  using Fn = std::function<double(const Point&)>;

  SourceField() = default;
  SourceField(std::string family, std::vector<double> params, Fn fn)
      : family_(std::move(family)), params_(std::move(params)), fn_(std::move(fn)) {}

  double operator()(const Point& x) const { return fn_(x); }
  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }

  /// Same registry entry and parameters.
  bool same_as(const SourceField& other) const {
    return family_ == other.family_ && params_ == other.params_ && family_ != "custom";
  }

 private:
  std::string family_;
  std::vector<double> params_;
  Fn fn_;
};

// Diffusion families, with params in order:
//   constant   [a]            a
//   tanh       [a, b, c]      a + b tanh(c eta)
//   tanh_x     [a, b, c, d]   a + b tanh(c eta) + d x0
//   rational   [a, b]         a + b / (1 + eta^2)
//   quadratic  [a, b, c]      a + b eta + c eta^2
Coefficient make_kappa(const std::string& family, const std::vector<double>& params);

// Reaction families:
//   zero       []             0
//   linear     [a]            a eta
//   cubic      [a]            a eta^3
//   arctan     [a, b]         a atan(b eta)
Coefficient make_reaction(const std::string& family, const std::vector<double>& params);

// Source families:
//   constant   [a]                 a
//   poly       [c0 .. c5]          c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
//   sine       [a, kx, ky]         a sin(kx pi x) sin(ky pi y)
//   bump       [a, x0, y0, w]      a exp(-|x - x0|^2 / w^2)
SourceField make_source(const std::string& family, const std::vector<double>& params);

std::vector<std::string> kappa_families();
std::vector<std::string> reaction_families();
std::vector<std::string> source_families();

struct ProblemSpec {
  Coefficient kappa;
  Coefficient g;
  SourceField f;
  DataBounds bounds;
};

/// Linear diffusion -Δu = f with unit bounds; the default problem.
ProblemSpec laplace_problem(SourceField f);

struct BoundViolation {
  std::string quantity;  // "kappa", "dkappa_deta" or "dg_deta"
  Point x;
  double eta = 0;
  double value = 0;
};

struct BoundsReport {
  double kappa_min = 0, kappa_max = 0;
  double dkappa_abs_max = 0;
  double dg_min = 0, dg_max = 0;
  std::size_t samples = 0;
  std::vector<BoundViolation> violations;
  bool ok() const { return violations.empty(); }
  /// Sampling can only falsify the declared bounds, never prove them.
  static constexpr const char* note =
      "sampled falsification check; absence of violations is not a proof";
};

/// Samples kappa, dkappa/deta and dg/deta at every x in `x_samples` and at
/// `n_samples` eta values: the endpoints of [eta_lo, eta_hi], an even grid,
/// and seeded uniform draws. Violations are collected, not thrown.
BoundsReport validate_bounds(const ProblemSpec& spec, std::span<const Point> x_samples,
                             double eta_lo, double eta_hi, int n_samples,
                             std::uint64_t seed = 0);

/// Smooth function vanishing on the boundary of the parallelogram
/// {origin + s e1 + t e2 : 0 <= s, t <= 1}:
///   psi(x) = amplitude sin(pi s) sin(pi t).
struct Bubble {
  Point origin = Point::Zero();
  Point e1 = Point(1, 0);
  Point e2 = Point(0, 1);
  double amplitude = 1.0;

  /// Domain of gen_structured(kind, n).
  static Bubble for_domain(StructuredKind kind, double amplitude);

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double laplacian(const Point& x) const;
};

/// f = -div(kappa(x, psi) grad psi) + g(x, psi) for psi = bubble. Only valid
/// for coefficient families without explicit x-dependence of kappa.
SourceField manufactured_source(const ProblemSpec& spec, const Bubble& bubble);

}  // namespace dcp
