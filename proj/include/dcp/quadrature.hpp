#pragma once

#include <array>
#include <string>
#include <vector>

namespace dcp {

/// Gauss–Legendre rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

LineRule gauss_legendre(int order);

/// Rule on a triangle in barycentric coordinates. Weights are fractions of
/// the triangle area and sum to 1.
struct TriangleRule {
  std::string name;
  int degree = 0;  // polynomial degree integrated exactly
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }

  /// Edge midpoints, equal weights; exact for quadratics.
  static TriangleRule edge_midpoint();
  /// Conical product of two k-point Gauss–Legendre rules (Duffy collapse of
  /// the square). Positive weights, exact through degree 2k - 2.
  static TriangleRule collapsed_gauss(int k);
  /// The rule used by assembly unless configured otherwise.
  static TriangleRule standard() { return collapsed_gauss(14); }

  static TriangleRule by_name(const std::string& name);
};

}  // namespace dcp
