#include "dcp/solver.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace dcp {

namespace {

using Triplet = Eigen::Triplet<double>;

// Frozen-coefficient system of one Picard step.
void picard_system(const Mesh& mesh, const ProblemSpec& spec, const SourceField& f,
                   const NodalField& u, const TriangleRule& rule, SparseMatrix& K,
                   Eigen::VectorXd& rhs) {
  const auto n = static_cast<Eigen::Index>(mesh.num_dofs());
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.num_triangles());
  rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t tt = 0; tt < mesh.num_triangles(); ++tt) {
    const int t = static_cast<int>(tt);
    const auto& tri = mesh.triangle(t);
    const auto grad = basis_gradients(mesh, t);
    double kappa_int = 0.0;
    Eigen::Matrix3d c_int = Eigen::Matrix3d::Zero();
    Eigen::Vector3d load = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lam = rule.points[q];
      const double w = rule.weights[q] * mesh.area(t);
      const Point x = lam[0] * mesh.vertex(tri[0]) + lam[1] * mesh.vertex(tri[1]) +
                      lam[2] * mesh.vertex(tri[2]);
      const double uq = lam[0] * u[tri[0]] + lam[1] * u[tri[1]] + lam[2] * u[tri[2]];
      const double cq = spec.g.deriv(x, uq);
      kappa_int += w * spec.kappa.value(x, uq);
      const double s = f(x) - spec.g.value(x, uq) + cq * uq;
      for (int a = 0; a < 3; ++a) {
        load[a] += w * s * lam[a];
        for (int b = 0; b < 3; ++b) c_int(a, b) += w * cq * lam[a] * lam[b];
      }
    }
    for (int a = 0; a < 3; ++a) {
      const int row = mesh.dof(tri[a]);
      if (row < 0) continue;
      rhs[row] += load[a];
      for (int b = 0; b < 3; ++b) {
        const int col = mesh.dof(tri[b]);
        if (col >= 0) trips.emplace_back(row, col, kappa_int * grad[a].dot(grad[b]) + c_int(a, b));
      }
    }
  }
  K.resize(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
}

}  // namespace

void SolveOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& rhs,
                             std::size_t dense_limit) {
  if (A.rows() == 0) return Eigen::VectorXd(0);
  if (static_cast<std::size_t>(A.rows()) <= dense_limit) {
    const Eigen::MatrixXd dense(A);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    if (!(lu.rcond() > 1e-14)) {
      throw SolveError("linear system is numerically singular", {});
    }
    return lu.solve(rhs);
  }
  Eigen::SparseMatrix<double> colmajor(A);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(colmajor);
  if (lu.info() != Eigen::Success) {
    throw SolveError("sparse LU failed: " + lu.lastErrorMessage(), {});
  }
  return lu.solve(rhs);
}

SolveResult solve_picard(const Mesh& mesh, const ProblemSpec& spec, const SourceField& f,
                         const SolveOptions& opts) {
  opts.validate();
  NodalField u = opts.initial_guess.value_or(NodalField::zeros(mesh));
  if (static_cast<std::size_t>(u.values.size()) != mesh.num_vertices()) {
    throw std::invalid_argument("initial guess does not match the mesh");
  }
  for (int v : mesh.boundary_vertices()) u.values[v] = 0.0;

  SolveTrace trace;
  SparseMatrix K;
  Eigen::VectorXd rhs;
  for (int k = 0; k < opts.max_iters; ++k) {
    picard_system(mesh, spec, f, u, opts.assembly.rule, K, rhs);
    Eigen::VectorXd next;
    try {
      next = solve_linear(K, rhs, opts.dense_limit);
    } catch (const SolveError& e) {
      throw SolveError(e.what(), trace);
    }
    const Eigen::VectorXd prev = u.dofs(mesh);
    const double inc = next.size() ? (next - prev).cwiseAbs().maxCoeff() : 0.0;
    u = NodalField::from_dofs(mesh, next);
    trace.increments.push_back(inc);
    trace.iterations = k + 1;
    if (!std::isfinite(inc)) break;
    if (inc <= opts.tol) {
      trace.converged = true;
      break;
    }
  }
  const Eigen::VectorXd R = assemble_residual(mesh, spec, u, f, opts.assembly);
  trace.residual = R.size() ? R.cwiseAbs().maxCoeff() : 0.0;
  if (!trace.converged) {
    throw SolveError("Picard iteration did not converge in " + std::to_string(opts.max_iters) +
                         " iterations (last increment " +
                         std::to_string(trace.increments.empty() ? 0.0 : trace.increments.back()) + ")",
                     trace);
  }
  return {std::move(u), std::move(trace)};
}

}  // namespace dcp
