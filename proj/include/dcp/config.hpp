#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcp/certify.hpp"
#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/report.hpp"
#include "dcp/solver.hpp"

namespace dcp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FamilySpec {
  std::string family;
  std::vector<double> params;
};

/// Exactly one of `file` or a generator (`kind`, `n`).
struct MeshSource {
  std::optional<std::filesystem::path> file;
  std::optional<StructuredKind> kind;
  int n = 0;

  Mesh build() const;
};

/// A run description, normally read from JSON:
///
///   {
///     "mesh":    {"generator": {"kind": "three_direction", "n": 8}} | {"file": "m/mesh"},
///     "problem": {"kappa": {"family": "tanh", "params": [2, 1, 1]},
///                 "g":     {"family": "zero", "params": []},
///                 "f":     {"family": "constant", "params": [1]},
///                 "bounds": {"k_alpha": 1, "k_beta": 3, "K_eta": 1, "G_eta": 0}},
///     "f1": {...}, "f2": {...},
///     "solver":  {"max_iters": 200, "tol": 1e-10},
///     "certify": {"eps0": 0.5, "oracle_max_n": 2000, ...},
///     "quadrature": "standard",
///     "output": "report.json"
///   }
///
/// Source entries accept the registry families plus
/// {"family": "manufactured", "params": [amplitude]}, the source whose exact
/// solution is the bubble of the generated domain.
struct RunConfig {
  MeshSource mesh;
  FamilySpec kappa{"constant", {1.0}};
  FamilySpec g{"zero", {}};
  FamilySpec f{"constant", {1.0}};
  std::optional<FamilySpec> f1, f2;  // default to f
  DataBounds bounds;
  SolveOptions solver;
  CertifyOptions certify;
  std::string quadrature = "standard";
  std::optional<std::filesystem::path> output;

  static RunConfig from_json(const Json& j);
  static RunConfig load(const std::filesystem::path& path);

  ProblemSpec problem() const;
  /// Resolves a source entry against the problem (for "manufactured").
  SourceField source(const FamilySpec& spec, const ProblemSpec& problem) const;
  /// Applies the quadrature choice to solver and certifier.
  void apply_quadrature();
};

}  // namespace dcp
