#pragma once

#include <string>

#include "json.hpp"

#include "dcp/certify.hpp"
#include "dcp/mesh.hpp"
#include "dcp/problem.hpp"
#include "dcp/solver.hpp"

namespace dcp {

using Json = nlohmann::ordered_json;

/// Version of the report layout written by the functions below.
inline constexpr int kReportSchema = 1;

// Non-finite numbers (unbounded margins) serialize as null. Key order is
// fixed, so identical inputs give byte-identical output.

Json mesh_report(const Mesh& mesh, const MeshAdmissibility& adm);
Json certificate_report(const Mesh& mesh, const Certificate& cert);
Json solve_report(const SolveTrace& trace);
Json bounds_report(const BoundsReport& report);
Json comparison_report(const Mesh& mesh, const ComparisonReport& rep);
Json oracle_report(const OracleResult& oracle);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace dcp
