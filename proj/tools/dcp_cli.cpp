// dcp: mesh checks, nonlinear solves and monotonicity certificates.
//
//   dcp mesh --gen three_direction --n 4 --out m/
//   dcp solve --config run.json
//   dcp certify --config run.json --out cert.json
//   dcp oracle --matrix a.json
//
// Exit codes. mesh: 0 admissible, 2 inadmissible. certify: 0 certified,
// 3 monotone by the oracle only, 4 not certified, 5 refuted. oracle: 0
// monotone, 5 not monotone. Any error: 1.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dcp/certify.hpp"
#include "dcp/config.hpp"
#include "dcp/fem.hpp"
#include "dcp/mesh.hpp"
#include "dcp/report.hpp"
#include "dcp/solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInadmissible = 2;

void emit(const dcp::Json& report, const std::optional<fs::path>& out) {
  const std::string text = dcp::dump(report);
  if (!out) {
    std::cout << text;
    return;
  }
  if (out->has_parent_path()) fs::create_directories(out->parent_path());
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out->string());
  f << text;
}

// Flags shared by the config-driven subcommands.
struct RunFlags {
  std::string config;
  std::optional<std::string> gen, in, out, quadrature;
  std::optional<int> n, max_iters, max_retries;
  std::optional<double> tol, eps0, sign_tol, beta_m, beta_M;
  std::optional<std::size_t> oracle_max_n;

  void add(CLI::App* app, bool certify_flags) {
    app->add_option("-c,--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--gen", gen, "override the mesh with a generator (three_direction, right_uniform)");
    app->add_option("--n", n, "generator resolution");
    app->add_option("--in", in, "override the mesh with a .node/.ele file");
    app->add_option("-o,--out", out, "report path (default: config output, else stdout)");
    app->add_option("--quadrature", quadrature, "triangle rule: standard, edge_midpoint, collapsed_gauss_K");
    app->add_option("--max-iters", max_iters, "Picard iteration cap (default 200)");
    app->add_option("--tol", tol, "Picard increment tolerance (default 1e-10)");
    if (!certify_flags) return;
    app->add_option("--eps0", eps0, "base scaling deficit in (0, 1) (default 0.5)");
    app->add_option("--sign-tol", sign_tol, "relative sign tolerance (default 1e-13)");
    app->add_option("--max-retries", max_retries, "eps_bar halvings (default 8)");
    app->add_option("--oracle-max-n", oracle_max_n, "largest system for the dense oracle; 0 disables (default 2000)");
    app->add_option("--beta-m", beta_m, "override the lower cot-sum bound");
    app->add_option("--beta-M", beta_M, "override the upper patch cot-sum bound");
  }

  dcp::RunConfig resolve() const {
    dcp::RunConfig c;
    if (!config.empty()) {
      c = dcp::RunConfig::load(config);
    } else if (!gen && !in) {
      throw dcp::ConfigError("give --config or a mesh via --gen/--in");
    }
    if (gen && in) throw dcp::ConfigError("--gen and --in are exclusive");
    if (gen) {
      c.mesh = {};
      c.mesh.kind = dcp::parse_structured_kind(*gen);
      c.mesh.n = n.value_or(8);
    } else if (in) {
      c.mesh = {};
      c.mesh.file = *in;
    } else if (n && c.mesh.kind) {
      c.mesh.n = *n;
    }
    if (quadrature) {
      c.quadrature = *quadrature;
      c.apply_quadrature();
    }
    if (max_iters) c.solver.max_iters = *max_iters;
    if (tol) c.solver.tol = *tol;
    if (eps0) c.certify.eps0 = *eps0;
    if (sign_tol) c.certify.sign_tol = *sign_tol;
    if (max_retries) c.certify.max_retries = *max_retries;
    if (oracle_max_n) c.certify.oracle_max_n = *oracle_max_n;
    if (beta_m.has_value() != beta_M.has_value()) {
      throw dcp::ConfigError("--beta-m and --beta-M must be given together");
    }
    if (beta_m) c.certify.betas = dcp::Betas{*beta_m, *beta_M};
    if (out) c.output = *out;
    return c;
  }
};

int cmd_mesh(const std::optional<std::string>& gen, int n, const std::optional<std::string>& in,
             const std::optional<std::string>& out) {
  if (gen.has_value() == in.has_value()) throw dcp::ConfigError("give exactly one of --gen or --in");
  const dcp::Mesh mesh = gen ? dcp::gen_structured(dcp::parse_structured_kind(*gen), n)
                             : dcp::load_mesh(*in);
  const auto adm = dcp::analyze(mesh);
  const auto report = dcp::mesh_report(mesh, adm);
  if (out) {
    const fs::path dir(*out);
    fs::create_directories(dir);
    dcp::write_mesh(mesh, dir / "mesh");
    emit(report, dir / "report.json");
  }
  std::cout << dcp::dump(report);
  return adm.admissible ? 0 : kExitInadmissible;
}

int cmd_solve(const RunFlags& flags, const std::string& which) {
  const auto cfg = flags.resolve();
  const dcp::Mesh mesh = cfg.mesh.build();
  const auto spec = cfg.problem();
  const dcp::FamilySpec& fs_ = which == "f1" ? cfg.f1.value_or(cfg.f)
                               : which == "f2" ? cfg.f2.value_or(cfg.f)
                                               : cfg.f;
  const auto f = cfg.source(fs_, spec);
  dcp::Json report = {{"schema", dcp::kReportSchema}, {"source", which}};
  try {
    const auto res = dcp::solve_picard(mesh, spec, f, cfg.solver);
    report["solve"] = dcp::solve_report(res.trace);
    report["u"] = std::vector<double>(res.u.values.data(),
                                      res.u.values.data() + res.u.values.size());
    emit(report, cfg.output);
    return 0;
  } catch (const dcp::SolveError& e) {
    report["solve"] = dcp::solve_report(e.trace());
    report["error"] = e.what();
    emit(report, cfg.output);
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_certify(const RunFlags& flags) {
  const auto cfg = flags.resolve();
  const dcp::Mesh mesh = cfg.mesh.build();
  const auto spec = cfg.problem();
  const auto f1 = cfg.source(cfg.f1.value_or(cfg.f), spec);
  const auto f2 = cfg.source(cfg.f2.value_or(cfg.f), spec);
  const auto rep = dcp::comparison_experiment(mesh, spec, f1, f2, cfg.solver, cfg.certify);
  emit(dcp::comparison_report(mesh, rep), cfg.output);
  const auto& c = rep.certificate;
  std::cerr << "verdict: " << dcp::to_string(c.verdict) << " (n = " << c.n << ")\n";
  return dcp::exit_code(c.verdict);
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto j = dcp::Json::parse(in);
  const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw std::runtime_error("matrix must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) A(i, k) = rows[i][k];
  }
  return A;
}

int cmd_oracle(const RunFlags& flags, const std::optional<std::string>& matrix, double tol) {
  dcp::OracleResult res;
  std::optional<fs::path> out = flags.out ? std::optional<fs::path>(*flags.out) : std::nullopt;
  if (matrix) {
    res = dcp::monotone_oracle(read_matrix(*matrix), tol);
  } else {
    const auto cfg = flags.resolve();
    out = cfg.output;
    const dcp::Mesh mesh = cfg.mesh.build();
    const auto spec = cfg.problem();
    const auto u1 = dcp::solve_picard(mesh, spec, cfg.source(cfg.f1.value_or(cfg.f), spec),
                                      cfg.solver).u;
    const auto u2 = dcp::solve_picard(mesh, spec, cfg.source(cfg.f2.value_or(cfg.f), spec),
                                      cfg.solver).u;
    const auto sys = dcp::assemble_linearized(mesh, spec, u1, u2, cfg.certify.assembly);
    res = dcp::monotone_oracle(Eigen::MatrixXd(sys.A), tol);
  }
  dcp::Json report = {{"schema", dcp::kReportSchema}};
  report["oracle"] = dcp::oracle_report(res);
  emit(report, out);
  return res.monotone ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete comparison principle checks for P1 finite elements"};
  app.require_subcommand(1);

  auto* mesh = app.add_subcommand("mesh", "generate or load a mesh and check its angle conditions");
  std::optional<std::string> mesh_gen, mesh_in, mesh_out;
  int mesh_n = 8;
  mesh->add_option("--gen", mesh_gen, "three_direction or right_uniform");
  mesh->add_option("--n", mesh_n, "generator resolution")->capture_default_str();
  mesh->add_option("--in", mesh_in, "path to a .node/.ele mesh");
  mesh->add_option("-o,--out", mesh_out, "directory for mesh.node, mesh.ele and report.json");

  auto* solve = app.add_subcommand("solve", "solve the nonlinear problem by Picard iteration");
  RunFlags solve_flags;
  solve_flags.add(solve, false);
  std::string which = "f";
  solve->add_option("--source", which, "which source to use: f, f1 or f2")
      ->check(CLI::IsMember({"f", "f1", "f2"}))
      ->capture_default_str();

  auto* certify = app.add_subcommand("certify", "solve for f1 and f2 and certify the comparison matrix");
  RunFlags certify_flags;
  certify_flags.add(certify, true);

  auto* oracle = app.add_subcommand("oracle", "check monotonicity by dense inversion");
  RunFlags oracle_flags;
  oracle_flags.add(oracle, false);
  std::optional<std::string> matrix;
  double oracle_tol = 1e-10;
  oracle->add_option("--matrix", matrix, "JSON file {\"rows\": [[...], ...]}")->check(CLI::ExistingFile);
  oracle->add_option("--oracle-tol", oracle_tol, "relative tolerance on negative entries")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*mesh) return cmd_mesh(mesh_gen, mesh_n, mesh_in, mesh_out);
    if (*solve) return cmd_solve(solve_flags, which);
    if (*certify) return cmd_certify(certify_flags);
    if (*oracle) return cmd_oracle(oracle_flags, matrix, oracle_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
