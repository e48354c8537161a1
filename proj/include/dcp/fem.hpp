#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/quadrature.hpp"

namespace dcp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Nodal values of a P1 function over all mesh vertices.
struct NodalField {
  Eigen::VectorXd values;

  static NodalField zeros(const Mesh& mesh);
  /// Interpolant of fn; boundary vertices are set to zero when `conforming`.
  template <typename Fn>
  static NodalField interpolate(const Mesh& mesh, Fn&& fn, bool conforming = true) {
    NodalField out{Eigen::VectorXd(mesh.num_vertices())};
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      const int iv = static_cast<int>(v);
      out.values[iv] = (conforming && mesh.is_boundary(iv)) ? 0.0 : fn(mesh.vertex(iv));
    }
    return out;
  }
  /// Expands interior (dof) values, zero on the Dirichlet boundary.
  static NodalField from_dofs(const Mesh& mesh, const Eigen::VectorXd& dofs);

  Eigen::VectorXd dofs(const Mesh& mesh) const;
  /// Exactly zero on every boundary vertex.
  bool dirichlet_conforming(const Mesh& mesh) const;
  double operator[](int v) const { return values[v]; }
};

struct AssemblyOptions {
  TriangleRule rule = TriangleRule::standard();
  int t_order = 20;  // Gauss–Legendre order for the integrals over t in [0, 1]
};

/// Linearized matrix A (and optionally the load F) over interior vertices.
/// Row/column d corresponds to vertex dof_to_vertex[d].
struct AssembledSystem {
  SparseMatrix A;
  Eigen::VectorXd F;
  std::vector<int> dof_to_vertex;
};

/// grad(phi_i) . grad(phi_j) on triangle t; vi, vj are global vertex ids.
/// For vi != vj this is -cot(theta_ij,T) / (2|T|).
double local_grad_dot(const Mesh& mesh, int t, int vi, int vj);

/// Integral of phi_i phi_j over t: |T|/6 on the diagonal, |T|/12 off it.
double local_mass(const Mesh& mesh, int t, int vi, int vj);

/// Integral of phi_i over t, |T|/3.
double local_integral(const Mesh& mesh, int t);

/// Gradients of the three barycentric basis functions of triangle t
/// (constant on t), in corner order.
std::array<Point, 3> basis_gradients(const Mesh& mesh, int t);

/// Mean of dkappa/deta along z(s) = s u1 + (1 - s) u2, s in [0, 1].
double averaged_b(const ProblemSpec& spec, const Point& x, double u1, double u2, int order = 20);
/// Mean of dg/deta along the same segment.
double averaged_c(const ProblemSpec& spec, const Point& x, double u1, double u2, int order = 20);

/// Matrix of the problem satisfied by w = u1 - u2:
///   a_ij = ∫ kappa(x,u1) ∇φ_j·∇φ_i + b(x) (∇u2·∇φ_i) φ_j + c(x) φ_j φ_i
/// with b, c the averaged derivatives above. Boundary rows and columns are
/// eliminated; the sparsity pattern is symmetric.
AssembledSystem assemble_linearized(const Mesh& mesh, const ProblemSpec& spec,
                                    const NodalField& u1, const NodalField& u2,
                                    const AssemblyOptions& opts = {});

/// F_i = ∫ (f1 - f2) φ_i over interior vertices.
Eigen::VectorXd assemble_load(const Mesh& mesh, const SourceField& f1, const SourceField& f2,
                              const AssemblyOptions& opts = {});

/// R_i = ∫ kappa(x,u) ∇u·∇φ_i + g(x,u) φ_i - f φ_i over interior vertices.
Eigen::VectorXd assemble_residual(const Mesh& mesh, const ProblemSpec& spec, const NodalField& u,
                                  const SourceField& f, const AssemblyOptions& opts = {});
inline Eigen::VectorXd assemble_residual(const Mesh& mesh, const ProblemSpec& spec,
                                         const NodalField& u, const AssemblyOptions& opts = {}) {
  return assemble_residual(mesh, spec, u, spec.f, opts);
}

/// P1 stiffness and mass matrices over interior vertices (unit coefficients).
SparseMatrix stiffness_matrix(const Mesh& mesh);
SparseMatrix mass_matrix(const Mesh& mesh);

struct NodalDifferences {
  /// |v(a) - v(b)| per mesh edge.
  std::vector<double> edge;
  /// Max over all edges of the triangles sharing edge e.
  std::vector<double> patch;
  /// Same maximum restricted to edges not touching edge(e).a / edge(e).b.
  std::vector<double> patch_excl_a;
  std::vector<double> patch_excl_b;
};

NodalDifferences nodal_differences(const Mesh& mesh, const NodalField& v);

}  // namespace dcp
