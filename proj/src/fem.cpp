#include "dcp/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dcp {

namespace {

using Triplet = Eigen::Triplet<double>;

// Per-triangle data shared by the assembly loops.
struct ElementGeometry {
  std::array<int, 3> v;
  std::array<Point, 3> p;
  std::array<Point, 3> grad;
  double area;
};

ElementGeometry element(const Mesh& mesh, int t) {
  ElementGeometry g;
  g.v = mesh.triangle(t);
  for (int k = 0; k < 3; ++k) g.p[k] = mesh.vertex(g.v[k]);
  g.area = mesh.area(t);
  g.grad = basis_gradients(mesh, t);
  return g;
}

void require_size(const Mesh& mesh, const NodalField& u, const char* name) {
  if (static_cast<std::size_t>(u.values.size()) != mesh.num_vertices()) {
    throw std::invalid_argument(std::string(name) + " has " + std::to_string(u.values.size()) +
                                " values, mesh has " + std::to_string(mesh.num_vertices()) +
                                " vertices");
  }
}

SparseMatrix from_triplets(const Mesh& mesh, const std::vector<Triplet>& trips) {
  const auto n = static_cast<Eigen::Index>(mesh.num_dofs());
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

const LineRule& cached_rule(int order) {
  thread_local std::map<int, LineRule> cache;
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
  return it->second;
}

template <typename Fn>
double mean_along_segment(Fn&& fn, double u1, double u2, int order) {
  if (u1 == u2) return fn(u1);
  const LineRule& rule = cached_rule(order);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.nodes[q];
    s += rule.weights[q] * fn(t * u1 + (1.0 - t) * u2);
  }
  return s;
}

}  // namespace

NodalField NodalField::zeros(const Mesh& mesh) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()))};
}

NodalField NodalField::from_dofs(const Mesh& mesh, const Eigen::VectorXd& dofs) {
  if (static_cast<std::size_t>(dofs.size()) != mesh.num_dofs()) {
    throw std::invalid_argument("dof vector size does not match the mesh");
  }
  NodalField out = zeros(mesh);
  for (std::size_t d = 0; d < mesh.num_dofs(); ++d) {
    out.values[mesh.dof_vertex(static_cast<int>(d))] = dofs[static_cast<Eigen::Index>(d)];
  }
  return out;
}

Eigen::VectorXd NodalField::dofs(const Mesh& mesh) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.num_dofs()));
  for (std::size_t d = 0; d < mesh.num_dofs(); ++d) {
    out[static_cast<Eigen::Index>(d)] = values[mesh.dof_vertex(static_cast<int>(d))];
  }
  return out;
}

bool NodalField::dirichlet_conforming(const Mesh& mesh) const {
  if (static_cast<std::size_t>(values.size()) != mesh.num_vertices()) return false;
  for (int v : mesh.boundary_vertices()) {
    if (values[v] != 0.0) return false;
  }
  return true;
}

std::array<Point, 3> basis_gradients(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  const double two_area = 2.0 * mesh.area(t);
  if (!(two_area > 0.0)) throw std::invalid_argument("degenerate triangle");
  std::array<Point, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point e = mesh.vertex(tri[(k + 2) % 3]) - mesh.vertex(tri[(k + 1) % 3]);
    g[k] = Point(-e.y(), e.x()) / two_area;
  }
  return g;
}

double local_grad_dot(const Mesh& mesh, int t, int vi, int vj) {
  const int ki = mesh.corner(t, vi);
  const int kj = mesh.corner(t, vj);
  if (ki < 0 || kj < 0) throw std::invalid_argument("vertex is not a corner of the triangle");
  if (!(mesh.area(t) > 0.0)) throw std::invalid_argument("degenerate triangle");
  if (ki != kj) return -mesh.cot(t, 3 - ki - kj) / (2.0 * mesh.area(t));
  return basis_gradients(mesh, t)[ki].squaredNorm();
}

double local_mass(const Mesh& mesh, int t, int vi, int vj) {
  const int ki = mesh.corner(t, vi);
  const int kj = mesh.corner(t, vj);
  if (ki < 0 || kj < 0) throw std::invalid_argument("vertex is not a corner of the triangle");
  if (!(mesh.area(t) > 0.0)) throw std::invalid_argument("degenerate triangle");
  return mesh.area(t) / (ki == kj ? 6.0 : 12.0);
}

double local_integral(const Mesh& mesh, int t) { return mesh.area(t) / 3.0; }

double averaged_b(const ProblemSpec& spec, const Point& x, double u1, double u2, int order) {
  return mean_along_segment([&](double eta) { return spec.kappa.deriv(x, eta); }, u1, u2, order);
}

double averaged_c(const ProblemSpec& spec, const Point& x, double u1, double u2, int order) {
  return mean_along_segment([&](double eta) { return spec.g.deriv(x, eta); }, u1, u2, order);
}

AssembledSystem assemble_linearized(const Mesh& mesh, const ProblemSpec& spec,
                                    const NodalField& u1, const NodalField& u2,
                                    const AssemblyOptions& opts) {
  require_size(mesh, u1, "u1");
  require_size(mesh, u2, "u2");
  const TriangleRule& rule = opts.rule;

  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.num_triangles());
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    const ElementGeometry el = element(mesh, t);
    Point grad_u2 = Point::Zero();
    for (int k = 0; k < 3; ++k) grad_u2 += u2[el.v[k]] * el.grad[k];

    double kappa_int = 0.0;                         // ∫ kappa(x, u1)
    Eigen::Vector3d b_int = Eigen::Vector3d::Zero();  // ∫ b φ_k
    Eigen::Matrix3d c_int = Eigen::Matrix3d::Zero();  // ∫ c φ_k φ_l
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const double w = rule.weights[q] * el.area;
      const Point x = lam[0] * el.p[0] + lam[1] * el.p[1] + lam[2] * el.p[2];
      double v1 = 0.0, v2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        v1 += lam[k] * u1[el.v[k]];
        v2 += lam[k] * u2[el.v[k]];
      }
      kappa_int += w * spec.kappa.value(x, v1);
      const double bq = averaged_b(spec, x, v1, v2, opts.t_order);
      const double cq = averaged_c(spec, x, v1, v2, opts.t_order);
      for (int k = 0; k < 3; ++k) {
        b_int[k] += w * bq * lam[k];
        for (int l = 0; l < 3; ++l) c_int(k, l) += w * cq * lam[k] * lam[l];
      }
    }

    for (int a = 0; a < 3; ++a) {  // test function φ_a, row
      const int row = mesh.dof(el.v[a]);
      if (row < 0) continue;
      const double conv = grad_u2.dot(el.grad[a]);
      for (int b = 0; b < 3; ++b) {  // trial function φ_b, column
        const int col = mesh.dof(el.v[b]);
        if (col < 0) continue;
        const double val =
            kappa_int * el.grad[b].dot(el.grad[a]) + conv * b_int[b] + c_int(a, b);
        trips.emplace_back(row, col, val);
      }
    }
  }

  AssembledSystem sys;
  sys.A = from_triplets(mesh, trips);
  sys.dof_to_vertex = mesh.dof_vertices();
  return sys;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const SourceField& f1, const SourceField& f2,
                              const AssemblyOptions& opts) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_dofs()));
  const TriangleRule& rule = opts.rule;
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    const auto& tri = mesh.triangle(t);
    std::array<Point, 3> p;
    for (int k = 0; k < 3; ++k) p[k] = mesh.vertex(tri[k]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const Point x = lam[0] * p[0] + lam[1] * p[1] + lam[2] * p[2];
      const double w = rule.weights[q] * mesh.area(t) * (f1(x) - f2(x));
      for (int k = 0; k < 3; ++k) {
        const int d = mesh.dof(tri[k]);
        if (d >= 0) F[d] += w * lam[k];
      }
    }
  }
  return F;
}

Eigen::VectorXd assemble_residual(const Mesh& mesh, const ProblemSpec& spec, const NodalField& u,
                                  const SourceField& f, const AssemblyOptions& opts) {
  require_size(mesh, u, "u");
  Eigen::VectorXd R = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_dofs()));
  const TriangleRule& rule = opts.rule;
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    const ElementGeometry el = element(mesh, t);
    Point grad_u = Point::Zero();
    for (int k = 0; k < 3; ++k) grad_u += u[el.v[k]] * el.grad[k];

    double kappa_int = 0.0;
    Eigen::Vector3d lower = Eigen::Vector3d::Zero();  // ∫ (g - f) φ_k
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const double w = rule.weights[q] * el.area;
      const Point x = lam[0] * el.p[0] + lam[1] * el.p[1] + lam[2] * el.p[2];
      const double uq = lam[0] * u[el.v[0]] + lam[1] * u[el.v[1]] + lam[2] * u[el.v[2]];
      kappa_int += w * spec.kappa.value(x, uq);
      const double s = spec.g.value(x, uq) - f(x);
      for (int k = 0; k < 3; ++k) lower[k] += w * s * lam[k];
    }
    for (int a = 0; a < 3; ++a) {
      const int d = mesh.dof(el.v[a]);
      if (d >= 0) R[d] += kappa_int * grad_u.dot(el.grad[a]) + lower[a];
    }
  }
  return R;
}

SparseMatrix stiffness_matrix(const Mesh& mesh) {
  std::vector<Triplet> trips;
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    for (int vi : mesh.triangle(t)) {
      for (int vj : mesh.triangle(t)) {
        if (mesh.dof(vi) >= 0 && mesh.dof(vj) >= 0) {
          trips.emplace_back(mesh.dof(vi), mesh.dof(vj), local_grad_dot(mesh, t, vi, vj) * mesh.area(t));
        }
      }
    }
  }
  return from_triplets(mesh, trips);
}

SparseMatrix mass_matrix(const Mesh& mesh) {
  std::vector<Triplet> trips;
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    for (int vi : mesh.triangle(t)) {
      for (int vj : mesh.triangle(t)) {
        if (mesh.dof(vi) >= 0 && mesh.dof(vj) >= 0) {
          trips.emplace_back(mesh.dof(vi), mesh.dof(vj), local_mass(mesh, t, vi, vj));
        }
      }
    }
  }
  return from_triplets(mesh, trips);
}

NodalDifferences nodal_differences(const Mesh& mesh, const NodalField& v) {
  require_size(mesh, v, "v");
  const std::size_t ne = mesh.edges().size();
  NodalDifferences out;
  out.edge.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Edge& ed = mesh.edge(static_cast<int>(e));
    out.edge[e] = std::abs(v[ed.a] - v[ed.b]);
  }
  out.patch.assign(ne, 0.0);
  out.patch_excl_a.assign(ne, 0.0);
  out.patch_excl_b.assign(ne, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    const Edge& ed = mesh.edge(static_cast<int>(e));
    for (const EdgeSide& side : ed.adjacent()) {
      for (int k : mesh.triangle_edges(side.triangle)) {
        const Edge& other = mesh.edge(k);
        const double d = out.edge[k];
        out.patch[e] = std::max(out.patch[e], d);
        if (other.a != ed.a && other.b != ed.a) out.patch_excl_a[e] = std::max(out.patch_excl_a[e], d);
        if (other.a != ed.b && other.b != ed.b) out.patch_excl_b[e] = std::max(out.patch_excl_b[e], d);
      }
    }
  }
  return out;
}

}  // namespace dcp
