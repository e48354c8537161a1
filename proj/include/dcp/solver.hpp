#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "dcp/fem.hpp"

namespace dcp {

struct SolveOptions {
  int max_iters = 200;
  double tol = 1e-10;  // max-norm of the nodal increment
  std::optional<NodalField> initial_guess;
  std::size_t dense_limit = 2000;  // dense LU up to this many unknowns, sparse LU above
  AssemblyOptions assembly;

  void validate() const;
};

struct SolveTrace {
  std::vector<double> increments;
  double residual = 0.0;  // max-norm of the nonlinear residual at return
  int iterations = 0;
  bool converged = false;
};

struct SolveResult {
  NodalField u;
  SolveTrace trace;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

/// Solves A x = rhs with dense partial-pivot LU when n <= dense_limit and
/// sparse LU otherwise. Throws SolveError when A is numerically singular.
Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& rhs,
                             std::size_t dense_limit = 2000);

/// Picard iteration with frozen diffusion and a semi-implicit reaction term:
///   ∫ kappa(x,u^k) ∇u^{k+1}·∇φ_i + [g(x,u^k) + c_k (u^{k+1} - u^k)] φ_i = ∫ f φ_i
/// with c_k = dg/deta(x, u^k). Homogeneous Dirichlet data.
/// Throws SolveError (carrying the trace) when max_iters is exhausted.
SolveResult solve_picard(const Mesh& mesh, const ProblemSpec& spec, const SourceField& f,
                         const SolveOptions& opts = {});

}  // namespace dcp
