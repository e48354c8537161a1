#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcp/certify.hpp"
#include "dcp/config.hpp"
#include "dcp/fem.hpp"
#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/report.hpp"
#include "dcp/solver.hpp"

namespace py = pybind11;

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Family = std::pair<std::string, std::vector<double>>;

py::object to_python(const dcp::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

dcp::Mesh make_mesh(const RowMatrixXd& vertices, const RowMatrixXi& triangles,
                    std::optional<std::vector<int>> boundary) {
  if (vertices.cols() != 2) throw std::invalid_argument("vertices must have shape (n, 2)");
  if (triangles.cols() != 3) throw std::invalid_argument("triangles must have shape (m, 3)");
  std::vector<dcp::Point> v(static_cast<std::size_t>(vertices.rows()));
  for (Eigen::Index i = 0; i < vertices.rows(); ++i) v[i] = {vertices(i, 0), vertices(i, 1)};
  std::vector<dcp::Triangle> t(static_cast<std::size_t>(triangles.rows()));
  for (Eigen::Index i = 0; i < triangles.rows(); ++i) {
    t[i] = {triangles(i, 0), triangles(i, 1), triangles(i, 2)};
  }
  return dcp::Mesh(std::move(v), std::move(t), std::move(boundary));
}

dcp::NodalField field(const dcp::Mesh& mesh, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != mesh.num_vertices()) {
    throw std::invalid_argument("nodal field must have one value per vertex");
  }
  return dcp::NodalField{values};
}

dcp::ProblemSpec make_problem(const Family& kappa, const Family& g, const Family& f,
                              const dcp::DataBounds& bounds) {
  bounds.validate();
  return {dcp::make_kappa(kappa.first, kappa.second), dcp::make_reaction(g.first, g.second),
          dcp::make_source(f.first, f.second), bounds};
}

dcp::CertifyOptions certify_options(double eps0, std::size_t oracle_max_n, double sign_tol,
                                    int max_retries, std::optional<std::pair<double, double>> betas) {
  dcp::CertifyOptions o;
  o.eps0 = eps0;
  o.oracle_max_n = oracle_max_n;
  o.sign_tol = sign_tol;
  o.max_retries = max_retries;
  if (betas) o.betas = dcp::Betas{betas->first, betas->second};
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "P1 finite elements for quasilinear problems with monotonicity certificates.";

  auto mesh_error = py::register_exception<dcp::MeshError>(m, "MeshError", PyExc_ValueError);
  py::register_exception<dcp::SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<dcp::ConfigError>(m, "ConfigError", PyExc_ValueError);
  (void)mesh_error;

  py::class_<dcp::Mesh>(m, "Mesh")
      .def(py::init(&make_mesh), py::arg("vertices"), py::arg("triangles"),
           py::arg("boundary") = py::none())
      .def_property_readonly("num_vertices", &dcp::Mesh::num_vertices)
      .def_property_readonly("num_triangles", &dcp::Mesh::num_triangles)
      .def_property_readonly("num_dofs", &dcp::Mesh::num_dofs)
      .def_property_readonly("vertices",
                             [](const dcp::Mesh& mesh) {
                               RowMatrixXd out(mesh.num_vertices(), 2);
                               for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
                                 out.row(i) = mesh.vertex(static_cast<int>(i)).transpose();
                               }
                               return out;
                             })
      .def_property_readonly("triangles",
                             [](const dcp::Mesh& mesh) {
                               RowMatrixXi out(mesh.num_triangles(), 3);
                               for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
                                 const auto& tri = mesh.triangle(static_cast<int>(t));
                                 out.row(t) << tri[0], tri[1], tri[2];
                               }
                               return out;
                             })
      .def_property_readonly("boundary", &dcp::Mesh::boundary_vertices)
      .def_property_readonly("dof_vertices", &dcp::Mesh::dof_vertices)
      .def("__repr__", [](const dcp::Mesh& mesh) {
        return "<Mesh vertices=" + std::to_string(mesh.num_vertices()) +
               " triangles=" + std::to_string(mesh.num_triangles()) + ">";
      });

  m.def("gen_structured",
        [](const std::string& kind, int n) {
          return dcp::gen_structured(dcp::parse_structured_kind(kind), n);
        },
        py::arg("kind"), py::arg("n"));
  m.def("load_mesh", [](const std::string& path) { return dcp::load_mesh(path); }, py::arg("path"));
  m.def("write_mesh", [](const dcp::Mesh& mesh, const std::string& base) { dcp::write_mesh(mesh, base); },
        py::arg("mesh"), py::arg("base"));
  m.def("analyze",
        [](const dcp::Mesh& mesh) { return to_python(dcp::mesh_report(mesh, dcp::analyze(mesh))); },
        py::arg("mesh"), "Angle conditions and cot-sum constants as a dict.");
  m.def("boundary_distance", &dcp::boundary_distance, py::arg("mesh"));

  py::class_<dcp::DataBounds>(m, "DataBounds")
      .def(py::init([](double k_alpha, double k_beta, double K_eta, double G_eta) {
             dcp::DataBounds b{k_alpha, k_beta, K_eta, G_eta};
             b.validate();
             return b;
           }),
           py::arg("k_alpha") = 1.0, py::arg("k_beta") = 1.0, py::arg("K_eta") = 0.0,
           py::arg("G_eta") = 0.0)
      .def_readonly("k_alpha", &dcp::DataBounds::k_alpha)
      .def_readonly("k_beta", &dcp::DataBounds::k_beta)
      .def_readonly("K_eta", &dcp::DataBounds::K_eta)
      .def_readonly("G_eta", &dcp::DataBounds::G_eta);

  py::class_<dcp::ProblemSpec>(m, "Problem")
      .def(py::init(&make_problem), py::arg("kappa") = Family{"constant", {1.0}},
           py::arg("g") = Family{"zero", {}}, py::arg("f") = Family{"constant", {1.0}},
           py::arg("bounds") = dcp::DataBounds{})
      .def_readonly("bounds", &dcp::ProblemSpec::bounds)
      .def("kappa", [](const dcp::ProblemSpec& s, double x, double y, double eta) {
        return s.kappa.value({x, y}, eta);
      })
      .def("g", [](const dcp::ProblemSpec& s, double x, double y, double eta) {
        return s.g.value({x, y}, eta);
      });

  m.def("solve",
        [](const dcp::Mesh& mesh, const dcp::ProblemSpec& spec, std::optional<Family> f,
           int max_iters, double tol, std::optional<Eigen::VectorXd> initial_guess) {
          dcp::SolveOptions opts;
          opts.max_iters = max_iters;
          opts.tol = tol;
          if (initial_guess) opts.initial_guess = field(mesh, *initial_guess);
          const auto src = f ? dcp::make_source(f->first, f->second) : spec.f;
          auto res = dcp::solve_picard(mesh, spec, src, opts);
          return py::make_tuple(res.u.values, to_python(dcp::solve_report(res.trace)));
        },
        py::arg("mesh"), py::arg("problem"), py::arg("f") = py::none(), py::arg("max_iters") = 200,
        py::arg("tol") = 1e-10, py::arg("initial_guess") = py::none(),
        "Picard solve; returns (nodal values, trace dict).");

  m.def("assemble",
        [](const dcp::Mesh& mesh, const dcp::ProblemSpec& spec, const Eigen::VectorXd& u1,
           const Eigen::VectorXd& u2) {
          const auto sys = dcp::assemble_linearized(mesh, spec, field(mesh, u1), field(mesh, u2));
          return Eigen::MatrixXd(sys.A);
        },
        py::arg("mesh"), py::arg("problem"), py::arg("u1"), py::arg("u2"),
        "Dense linearized matrix over interior vertices.");

  m.def("certify",
        [](const dcp::Mesh& mesh, const dcp::ProblemSpec& spec, const Eigen::VectorXd& u1,
           const Eigen::VectorXd& u2, double eps0, std::size_t oracle_max_n, double sign_tol,
           int max_retries, std::optional<std::pair<double, double>> betas) {
          const auto a = field(mesh, u1), b = field(mesh, u2);
          const auto sys = dcp::assemble_linearized(mesh, spec, a, b);
          const auto cert = dcp::fiedler_ptak_certify(
              sys.A, mesh, spec, a, b, certify_options(eps0, oracle_max_n, sign_tol, max_retries, betas));
          return to_python(dcp::certificate_report(mesh, cert));
        },
        py::arg("mesh"), py::arg("problem"), py::arg("u1"), py::arg("u2"), py::arg("eps0") = 0.5,
        py::arg("oracle_max_n") = 2000, py::arg("sign_tol") = 1e-13, py::arg("max_retries") = 8,
        py::arg("betas") = py::none(), "Certificate report as a dict.");

  m.def("compare",
        [](const dcp::Mesh& mesh, const dcp::ProblemSpec& spec, const Family& f1, const Family& f2,
           std::size_t oracle_max_n) {
          dcp::CertifyOptions opts;
          opts.oracle_max_n = oracle_max_n;
          const auto rep = dcp::comparison_experiment(mesh, spec, dcp::make_source(f1.first, f1.second),
                                                      dcp::make_source(f2.first, f2.second), {}, opts);
          return to_python(dcp::comparison_report(mesh, rep));
        },
        py::arg("mesh"), py::arg("problem"), py::arg("f1"), py::arg("f2"),
        py::arg("oracle_max_n") = 2000);

  m.def("monotone_oracle",
        [](const Eigen::MatrixXd& A, double tol) {
          return to_python(dcp::oracle_report(dcp::monotone_oracle(A, tol)));
        },
        py::arg("A"), py::arg("tol") = 1e-10);

  m.def("strict_dominance_margins",
        [](const Eigen::MatrixXd& A, const Eigen::VectorXd& d) {
          const dcp::SparseMatrix S = A.sparseView();
          const auto dom = dcp::check_strict_dominance(S, d);
          return py::make_tuple(dom.passed, dom.margins);
        },
        py::arg("A"), py::arg("d"), "Row margins of A^T diag(d); returns (passed, margins).");

  m.def("epsilon_sequence",
        [](double eps0, double delta0, double r, int max_p) {
          dcp::ScalingParams s;
          s.eps0 = eps0;
          s.delta0 = delta0;
          s.r = r;
          return dcp::epsilon_sequence(s, max_p);
        },
        py::arg("eps0"), py::arg("delta0"), py::arg("r"), py::arg("max_p"));

  m.def("run_certify",
        [](const py::dict& config) {
          const auto text = py::module_::import("json").attr("dumps")(config).cast<std::string>();
          const auto cfg = dcp::RunConfig::from_json(dcp::Json::parse(text));
          const dcp::Mesh mesh = cfg.mesh.build();
          const auto spec = cfg.problem();
          const auto rep = dcp::comparison_experiment(
              mesh, spec, cfg.source(cfg.f1.value_or(cfg.f), spec),
              cfg.source(cfg.f2.value_or(cfg.f), spec), cfg.solver, cfg.certify);
          return py::make_tuple(dcp::exit_code(rep.certificate.verdict),
                                to_python(dcp::comparison_report(mesh, rep)));
        },
        py::arg("config"), "Run a JSON-style config dict; returns (exit code, report).");
}
