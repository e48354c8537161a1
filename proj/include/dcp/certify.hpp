#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcp/fem.hpp"
#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/solver.hpp"

namespace dcp {

// Monotonicity certification of the linearized matrix A.
//
// The certifier proves A monotone through the Fiedler–Pták criterion: A is a
// Z-matrix and A^T D is strictly diagonally dominant for a positive diagonal
// D. D is graded by the distance of each vertex from the Dirichlet boundary,
//   d_i = 1 - eps_{p_i},   eps_p = eps_{p-1} - r^{p-1} delta0,
// with delta0 and r computed from the mesh angle constants and the
// off-diagonal magnitudes J_ij. The local sufficient conditions on u2 (the
// Z- and L-conditions) are evaluated alongside, and a dense inverse serves as
// an independent oracle for small systems.

enum class Verdict { certified_monotone, oracle_monotone_only, not_certified, refuted };

std::string to_string(Verdict v);

/// CLI exit code of a verdict: 0, 3, 4, 5.
int exit_code(Verdict v);

class InadmissibleMeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lower bound on opposite-angle cot sums and upper bound on patch cot sums.
struct Betas {
  double beta_m = 0;
  double beta_M = 0;
};

/// beta_m just below the tight minimum (by kCotSumTol) and beta_M at the
/// maximum. Throws InadmissibleMeshError when the mesh fails the angle
/// conditions or has no interior edge.
Betas tight_betas(const MeshAdmissibility& adm);

struct PatchMargin {
  int edge = -1;
  int i = -1, j = -1;  // vertex ids
  double delta = 0;    // max nodal difference of u2 over the patch
  double margin = 0;
};

struct ZCondition {
  Betas betas;
  std::vector<PatchMargin> patches;  // every edge with an interior endpoint
  double min_margin = 0;
  bool passed = false;  // all margins >= 0
};

/// k_alpha - (K_eta beta_M delta + G_eta max_area) / (3 beta_m).
double z_condition_margin(const DataBounds& b, const Betas& betas, double delta, double max_area);

/// Largest patch difference with a nonnegative Z-condition margin.
double z_condition_threshold(const DataBounds& b, const Betas& betas, double max_area);

ZCondition check_z_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2,
                             const Betas& betas);
/// Uses tight_betas(analyze(mesh)).
ZCondition check_z_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2);

struct EdgeMargin {
  int edge = -1;
  int i = -1, j = -1;
  double delta = 0;
  double margin = 0;  // +inf when K_eta = 0
};

struct LCondition {
  std::vector<EdgeMargin> edges;
  double min_margin = 0;
  bool unbounded = false;  // K_eta = 0
  bool passed = false;     // all margins > 0
};

LCondition check_l_condition(const Mesh& mesh, const DataBounds& bounds, const NodalField& u2);

struct JEntry {
  int i = -1, j = -1;  // vertex ids, both interior
  double value = 0;
};

struct JValues {
  std::vector<JEntry> entries;  // one per ordered pair of interior neighbors
  double J_L = 0;               // min |J_ij|
  double J_U = 0;               // max |J_ij|
  bool all_negative = false;
  JEntry worst;  // largest J_ij
};

/// The off-diagonal transport coefficients of A^T without the reaction
/// contribution,
///   J_ij = ∫_{ω_ij} (kappa(x,u1) + (u2_i - u2_j) b φ_i) ∇φ_i·∇φ_j
///          + Σ_T (u2(q_T) - u2_j) ∫_T ∇φ_{q_T}·∇φ_j b φ_i,
/// using the assembly quadrature. q_T is the vertex of T opposite edge ij.
JValues compute_J(const Mesh& mesh, const ProblemSpec& spec, const NodalField& u1,
                  const NodalField& u2, const AssemblyOptions& opts = {});

struct ScalingParams {
  double eps_bar = 0;
  double eps0 = 0.5;
  double delta0 = 0;
  double r = 0;
  double J_L = 0;
  double J_U = 0;
  double beta_m = 0;
  int m = 0;

  /// delta0 = eps_bar beta_m (1 - eps0) / (2 m J_U), r = J_L / (m J_U).
  static ScalingParams compute(double eps_bar, double eps0, double beta_m, int m, double J_L,
                               double J_U);
  /// eps0 > delta0 / (1 - r): every eps_p stays positive.
  bool sequence_positive() const { return eps0 > delta0 / (1.0 - r); }
  double eps_limit() const { return eps0 - delta0 / (1.0 - r); }
};

class ScalingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// eps_0 .. eps_{max_p}.
std::vector<double> epsilon_sequence(const ScalingParams& params, int max_p);

/// d_i = 1 - eps_{p_i}. Throws ScalingError unless the sequence is positive.
Eigen::VectorXd build_D_eps(const ScalingParams& params, std::span<const int> p);

/// d_i = 1 for vertices without a Dirichlet neighbor, d_eps otherwise.
Eigen::VectorXd warmup_scaling(const Mesh& mesh, double d_eps);

struct Dominance {
  std::vector<double> margins;  // |(A^T D)_ii| - Σ_{j≠i} |(A^T D)_ij|
  double min_margin = 0;
  int worst_row = -1;
  bool passed = false;  // margin_i > rel_tol * Σ_j |(A^T D)_ij| for all i
};

/// Strict diagonal dominance of A^T diag(d).
Dominance check_strict_dominance(const SparseMatrix& A, const Eigen::VectorXd& d,
                                 double rel_tol = 1e-13);

struct OracleResult {
  bool monotone = false;
  bool singular = false;
  double min_entry = 0;   // of A^{-1}
  double max_abs = 0;     // of A^{-1}
  int witness_row = -1;   // location of min_entry
  int witness_col = -1;
};

/// Dense inverse check: A is monotone iff it is invertible with
/// min(A^{-1}) >= -rel_tol * max|A^{-1}|.
OracleResult monotone_oracle(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

struct CertifyOptions {
  double eps0 = 0.5;
  double sign_tol = 1e-13;     // relative to max|a_ij|
  double dominance_tol = 1e-13;
  int max_retries = 8;         // eps_bar halvings after the first attempt
  std::size_t oracle_max_n = 2000;  // 0 disables the oracle
  double oracle_tol = 1e-10;
  std::optional<Betas> betas;  // override the tight values from analyze()
  AssemblyOptions assembly;
};

struct EntrywiseCheck {
  double scale = 0;  // max |a_ij|
  double max_offdiag = 0;
  int offdiag_row = -1, offdiag_col = -1;
  double min_diag = 0;
  int diag_row = -1;
  bool z_matrix = false;
  bool positive_diagonal = false;
};

EntrywiseCheck check_entrywise(const SparseMatrix& A, double sign_tol = 1e-13);

struct Witness {
  std::string kind;
  int row = -1, col = -1;  // matrix indices (dofs) where applicable
  int i = -1, j = -1;      // vertex ids where applicable
  double value = 0;
};

struct Certificate {
  Verdict verdict = Verdict::not_certified;
  std::size_t n = 0;
  MeshAdmissibility mesh;
  std::optional<Betas> betas;
  EntrywiseCheck entrywise;
  std::optional<ZCondition> z_condition;
  std::optional<LCondition> l_condition;
  std::optional<JValues> J;
  std::optional<ScalingParams> scaling;
  std::vector<int> p;       // boundary distance per dof
  Eigen::VectorXd d;        // scaling diagonal of the last attempt
  std::optional<Dominance> dominance;
  int attempts = 0;
  std::optional<OracleResult> oracle;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;
};

/// Full pipeline: mesh admissibility, entrywise Z/L checks, the local
/// conditions on u2, J bounds, D_eps construction with eps_bar halving, and
/// the dominance check. Falls back to the oracle when the pipeline fails.
Certificate fiedler_ptak_certify(const SparseMatrix& A, const Mesh& mesh, const ProblemSpec& spec,
                                 const NodalField& u1, const NodalField& u2,
                                 const CertifyOptions& opts = {});

struct ComparisonReport {
  SolveResult solve1, solve2;
  Certificate certificate;
  Eigen::VectorXd F;
  bool f_ordered = false;  // f1 <= f2 at every sampled quadrature point
  bool f_equal = false;
  double max_u1_minus_u2 = 0;
  bool ordered = false;      // max(u1 - u2) <= 1e-10
  double linear_gap = 0;     // |A (W1 - W2) - F|_inf
  bool predicted = false;    // certificate implies the observed ordering
  std::optional<double> uniqueness_gap;  // |u1 - u2|_inf from distinct guesses when f1 = f2
};

/// Solves both problems, assembles A at (u1, u2) and certifies it. When f1
/// and f2 coincide the second solve starts from a different initial guess so
/// the report doubles as a uniqueness check.
ComparisonReport comparison_experiment(const Mesh& mesh, const ProblemSpec& spec,
                                       const SourceField& f1, const SourceField& f2,
                                       const SolveOptions& solve = {},
                                       const CertifyOptions& certify = {});

}  // namespace dcp
