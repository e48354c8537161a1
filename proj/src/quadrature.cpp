#include "dcp/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace dcp {

LineRule gauss_legendre(int order) {
  if (order < 1 || order > 64) throw std::invalid_argument("Gauss-Legendre order must be in [1, 64]");
  const unsigned n = static_cast<unsigned>(order);
  // Nonnegative zeros of P_n on [-1, 1], ascending.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  std::vector<std::pair<double, double>> nw;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(static_cast<int>(n), x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nw.emplace_back(x, w);
    if (x != 0.0) nw.emplace_back(-x, w);
  }
  std::sort(nw.begin(), nw.end());
  LineRule rule;
  for (auto [x, w] : nw) {
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  }
  return rule;
}

TriangleRule TriangleRule::edge_midpoint() {
  TriangleRule r;
  r.name = "edge_midpoint";
  r.degree = 2;
  r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return r;
}

TriangleRule TriangleRule::collapsed_gauss(int k) {
  if (k < 1) throw std::invalid_argument("collapsed Gauss rule needs k >= 1");
  const LineRule g = gauss_legendre(k);
  TriangleRule r;
  r.name = "collapsed_gauss_" + std::to_string(k);
  r.degree = 2 * k - 2;
  // (a, b) in the unit square maps to barycentric (1 - a, a (1 - b), a b);
  // the Jacobian relative to the reference area is 2a.
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double a = g.nodes[i], b = g.nodes[j];
      r.points.push_back({1.0 - a, a * (1.0 - b), a * b});
      r.weights.push_back(2.0 * a * g.weights[i] * g.weights[j]);
    }
  }
  return r;
}

TriangleRule TriangleRule::by_name(const std::string& name) {
  if (name == "edge_midpoint") return edge_midpoint();
  if (name == "standard") return standard();
  const std::string prefix = "collapsed_gauss_";
  if (name.rfind(prefix, 0) == 0) return collapsed_gauss(std::stoi(name.substr(prefix.size())));
  throw std::invalid_argument("unknown triangle rule '" + name + "'");
}

}  // namespace dcp
