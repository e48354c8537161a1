#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dcp {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed .node/.ele text.
class ParseError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Out-of-range indices, inverted or degenerate triangles, nonconforming
/// connectivity.
class TopologyError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// One side of an edge: the triangle containing it and the vertex of that
/// triangle opposite the edge.
struct EdgeSide {
  int triangle = -1;
  int opposite = -1;
};

struct Edge {
  int a = -1;  // a < b
  int b = -1;
  std::array<EdgeSide, 2> sides{};
  int num_sides = 0;

  bool interior() const { return num_sides == 2; }
  std::span<const EdgeSide> adjacent() const {
    return {sides.data(), static_cast<std::size_t>(num_sides)};
  }
};

/// Conforming, counterclockwise triangulation with a Dirichlet boundary.
///
/// The constructor validates the mesh and derives the edge table, vertex
/// adjacency and the interior degree-of-freedom numbering. Instances are
/// immutable afterwards.
class Mesh {
 public:
  /// When `boundary` is empty the Dirichlet vertices are the endpoints of
  /// edges that belong to exactly one triangle.
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
       std::optional<std::vector<int>> boundary = std::nullopt);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_dofs() const { return dof_to_vertex_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  /// Index of edge {a, b}, if present.
  std::optional<int> find_edge(int a, int b) const;
  /// Edge indices of triangle t; entry k is the edge opposite corner k.
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }

  bool is_boundary(int v) const { return boundary_flag_[v] != 0; }
  std::vector<int> boundary_vertices() const;

  /// Sorted neighbor list of v (Q̄_v in the usual patch notation).
  std::span<const int> neighbors(int v) const;
  std::span<const int> vertex_triangles(int v) const;

  /// Interior numbering: -1 for Dirichlet vertices.
  int dof(int v) const { return vertex_to_dof_[v]; }
  int dof_vertex(int d) const { return dof_to_vertex_[d]; }
  const std::vector<int>& dof_vertices() const { return dof_to_vertex_; }

  double area(int t) const { return area_[t]; }
  double max_area() const;

  /// Position of vertex v within triangle t (0..2), or -1.
  int corner(int t, int v) const;
  /// Interior angle at corner k of triangle t, in radians.
  double angle(int t, int k) const;
  /// Cotangent of the angle at corner k, as (e1 . e2) / (2|T|).
  double cot(int t, int k) const;

 private:
  void build_topology();
  void check_conforming() const;

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> area_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<int> nbr_offsets_, nbr_list_;
  std::vector<int> vt_offsets_, vt_list_;
  std::vector<char> boundary_flag_;
  std::vector<int> vertex_to_dof_, dof_to_vertex_;
};

/// Angles and cotangents of the one or two triangles sharing an edge.
struct EdgePatch {
  struct Side {
    int triangle = -1;
    int opposite = -1;        // q_ij^T
    double theta_opposite = 0;  // angle at the opposite vertex
    double theta_i = 0;         // angle at endpoint i
    double theta_j = 0;
    double cot_opposite = 0;
    double cot_i = 0;
    double cot_j = 0;
  };
  int i = -1;
  int j = -1;
  std::vector<Side> sides;

  double theta_plus() const { return sides.at(0).theta_opposite; }
  std::optional<double> theta_minus() const {
    if (sides.size() < 2) return std::nullopt;
    return sides[1].theta_opposite;
  }
  double opposite_cot_sum() const;
  /// cot θ⁺ + cot θ⁻ + Σ_T cot θ_{v,T} for endpoint v ∈ {i, j}.
  double patch_cot_sum(int v) const;
};

EdgePatch edge_patch(const Mesh& mesh, int edge);

struct MeshAdmissibility {
  double max_interior_angle = 0;
  /// Unset when the mesh has no interior edge.
  std::optional<double> min_opposite_cot_sum;
  std::optional<double> max_patch_cot_sum;
  int max_degree = 0;
  bool admissible = false;
  std::vector<int> violating_edges;    // interior edges with cot sum <= tol
  std::vector<int> obtuse_triangles;   // angle above π/2 + tol
};

inline constexpr double kAngleTol = 1e-12;
inline constexpr double kCotSumTol = 1e-12;

MeshAdmissibility analyze(const Mesh& mesh);

/// Edge-count distance from each interior vertex to the layer of vertices
/// that touch the Dirichlet boundary. Indexed by dof.
std::vector<int> boundary_distance(const Mesh& mesh);

int max_degree(const Mesh& mesh);

enum class StructuredKind { three_direction, right_uniform };

StructuredKind parse_structured_kind(const std::string& name);
std::string to_string(StructuredKind kind);

/// `three_direction`: unit rhombus spanned by (1,0) and (1/2, √3/2), split
/// into 2n² equilateral triangles. `right_uniform`: unit square, n×n cells
/// each cut by the same diagonal.
Mesh gen_structured(StructuredKind kind, int n);

/// Reads `<base>.node` and `<base>.ele`. `path` may name either file or the
/// shared base.
Mesh load_mesh(const std::filesystem::path& path);

/// Writes 1-based `<base>.node` (with boundary markers) and `<base>.ele`.
void write_mesh(const Mesh& mesh, const std::filesystem::path& base);

}  // namespace dcp
