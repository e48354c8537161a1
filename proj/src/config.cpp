#include "dcp/config.hpp"

#include <fstream>
#include <set>

namespace dcp {

namespace {

void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

FamilySpec family(const Json& j, const std::string& where) {
  check_keys(j, where, {"family", "params"});
  FamilySpec out;
  out.family = get<std::string>(j, "family", where);
  if (j.contains("params")) out.params = get<std::vector<double>>(j, "params", where);
  return out;
}

}  // namespace

Mesh MeshSource::build() const {
  if (file && kind) throw ConfigError("mesh: give either a file or a generator, not both");
  if (file) return load_mesh(*file);
  if (kind) return gen_structured(*kind, n);
  throw ConfigError("mesh: no source given");
}

RunConfig RunConfig::from_json(const Json& j) {
  check_keys(j, "config",
             {"mesh", "problem", "f1", "f2", "solver", "certify", "quadrature", "output"});
  RunConfig c;
  if (!j.contains("mesh")) throw ConfigError("config: missing 'mesh'");
  const Json& m = j.at("mesh");
  check_keys(m, "mesh", {"file", "generator"});
  if (m.contains("file") == m.contains("generator")) {
    throw ConfigError("mesh: give exactly one of 'file' or 'generator'");
  }
  if (m.contains("file")) {
    c.mesh.file = get<std::string>(m, "file", "mesh");
  } else {
    const Json& g = m.at("generator");
    check_keys(g, "mesh.generator", {"kind", "n"});
    try {
      c.mesh.kind = parse_structured_kind(get<std::string>(g, "kind", "mesh.generator"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("mesh.generator: ") + e.what());
    }
    c.mesh.n = get<int>(g, "n", "mesh.generator");
  }

  if (j.contains("problem")) {
    const Json& p = j.at("problem");
    check_keys(p, "problem", {"kappa", "g", "f", "bounds"});
    if (p.contains("kappa")) c.kappa = family(p.at("kappa"), "problem.kappa");
    if (p.contains("g")) c.g = family(p.at("g"), "problem.g");
    if (p.contains("f")) c.f = family(p.at("f"), "problem.f");
    if (p.contains("bounds")) {
      const Json& b = p.at("bounds");
      check_keys(b, "problem.bounds", {"k_alpha", "k_beta", "K_eta", "G_eta"});
      c.bounds.k_alpha = get<double>(b, "k_alpha", "problem.bounds");
      c.bounds.k_beta = get<double>(b, "k_beta", "problem.bounds");
      c.bounds.K_eta = get<double>(b, "K_eta", "problem.bounds");
      c.bounds.G_eta = get<double>(b, "G_eta", "problem.bounds");
    }
  }
  if (j.contains("f1")) c.f1 = family(j.at("f1"), "f1");
  if (j.contains("f2")) c.f2 = family(j.at("f2"), "f2");

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    check_keys(s, "solver", {"max_iters", "tol", "dense_limit"});
    if (s.contains("max_iters")) c.solver.max_iters = get<int>(s, "max_iters", "solver");
    if (s.contains("tol")) c.solver.tol = get<double>(s, "tol", "solver");
    if (s.contains("dense_limit")) {
      c.solver.dense_limit = get<std::size_t>(s, "dense_limit", "solver");
    }
  }
  if (j.contains("certify")) {
    const Json& s = j.at("certify");
    check_keys(s, "certify",
               {"eps0", "sign_tol", "dominance_tol", "max_retries", "oracle_max_n", "oracle_tol",
                "beta_m", "beta_M"});
    auto& o = c.certify;
    if (s.contains("eps0")) o.eps0 = get<double>(s, "eps0", "certify");
    if (s.contains("sign_tol")) o.sign_tol = get<double>(s, "sign_tol", "certify");
    if (s.contains("dominance_tol")) o.dominance_tol = get<double>(s, "dominance_tol", "certify");
    if (s.contains("max_retries")) o.max_retries = get<int>(s, "max_retries", "certify");
    if (s.contains("oracle_max_n")) o.oracle_max_n = get<std::size_t>(s, "oracle_max_n", "certify");
    if (s.contains("oracle_tol")) o.oracle_tol = get<double>(s, "oracle_tol", "certify");
    if (s.contains("beta_m") != s.contains("beta_M")) {
      throw ConfigError("certify: beta_m and beta_M must be given together");
    }
    if (s.contains("beta_m")) {
      o.betas = Betas{get<double>(s, "beta_m", "certify"), get<double>(s, "beta_M", "certify")};
    }
  }
  if (j.contains("quadrature")) c.quadrature = get<std::string>(j, "quadrature", "config");
  if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
  c.apply_quadrature();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::apply_quadrature() {
  try {
    const TriangleRule rule = TriangleRule::by_name(quadrature);
    solver.assembly.rule = rule;
    certify.assembly.rule = rule;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("quadrature: ") + e.what());
  }
}

ProblemSpec RunConfig::problem() const {
  bounds.validate();
  ProblemSpec spec;
  spec.kappa = make_kappa(kappa.family, kappa.params);
  spec.g = make_reaction(g.family, g.params);
  spec.bounds = bounds;
  spec.f = source(f, spec);
  return spec;
}

SourceField RunConfig::source(const FamilySpec& s, const ProblemSpec& problem) const {
  if (s.family != "manufactured") return make_source(s.family, s.params);
  if (!mesh.kind) throw ConfigError("manufactured sources need a generated mesh");
  if (s.params.size() != 1) throw ConfigError("manufactured source takes [amplitude]");
  return manufactured_source(problem, Bubble::for_domain(*mesh.kind, s.params[0]));
}

}  // namespace dcp
