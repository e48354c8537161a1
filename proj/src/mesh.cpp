#include "dcp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace dcp {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::optional<std::vector<int>> boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw TopologyError("mesh has no triangles");
  const int nv = static_cast<int>(vertices_.size());
  area_.reserve(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        std::ostringstream msg;
        msg << "triangle " << t << " references vertex " << v << " outside [0, " << nv << ")";
        throw TopologyError(msg.str());
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw TopologyError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const double a = 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]],
                                 vertices_[tri[2]] - vertices_[tri[0]]);
    if (!(a > 0.0)) {
      throw TopologyError("triangle " + std::to_string(t) +
                          (a < 0.0 ? " is clockwise (inverted)" : " is degenerate"));
    }
    area_.push_back(a);
  }

  build_topology();
  check_conforming();

  boundary_flag_.assign(nv, 0);
  if (boundary) {
    for (int v : *boundary) {
      if (v < 0 || v >= nv) throw TopologyError("boundary marker on nonexistent vertex");
      boundary_flag_[v] = 1;
    }
    for (const Edge& e : edges_) {
      if (!e.interior() && (!boundary_flag_[e.a] || !boundary_flag_[e.b])) {
        throw TopologyError("boundary edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                            ") has an endpoint not marked as boundary");
      }
    }
  } else {
    for (const Edge& e : edges_) {
      if (!e.interior()) boundary_flag_[e.a] = boundary_flag_[e.b] = 1;
    }
  }

  vertex_to_dof_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!boundary_flag_[v]) {
      vertex_to_dof_[v] = static_cast<int>(dof_to_vertex_.size());
      dof_to_vertex_.push_back(v);
    }
  }
}

void Mesh::build_topology() {
  const int nv = static_cast<int>(vertices_.size());
  std::map<std::pair<int, int>, int> index;
  tri_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      auto key = ordered(a, b);
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.a = key.first;
        e.b = key.second;
        edges_.push_back(e);
      }
      Edge& e = edges_[it->second];
      if (e.num_sides == 2) {
        throw TopologyError("edge (" + std::to_string(key.first) + ", " +
                            std::to_string(key.second) + ") is shared by more than two triangles");
      }
      if (e.num_sides == 1) {
        // A consistently oriented neighbor traverses the shared edge backwards.
        const auto& other = triangles_[e.sides[0].triangle];
        const int ko = corner(e.sides[0].triangle, e.sides[0].opposite);
        if (other[(ko + 1) % 3] == a) {
          throw TopologyError("triangles " + std::to_string(e.sides[0].triangle) + " and " +
                              std::to_string(t) + " overlap along a shared edge");
        }
      }
      e.sides[e.num_sides++] = EdgeSide{static_cast<int>(t), tri[k]};
      tri_edges_[t][k] = it->second;
    }
  }

  std::vector<std::vector<int>> nbrs(nv), vtris(nv);
  for (const Edge& e : edges_) {
    nbrs[e.a].push_back(e.b);
    nbrs[e.b].push_back(e.a);
  }
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int v : triangles_[t]) vtris[v].push_back(static_cast<int>(t));
  }
  nbr_offsets_.assign(1, 0);
  vt_offsets_.assign(1, 0);
  for (int v = 0; v < nv; ++v) {
    std::sort(nbrs[v].begin(), nbrs[v].end());
    nbr_list_.insert(nbr_list_.end(), nbrs[v].begin(), nbrs[v].end());
    nbr_offsets_.push_back(static_cast<int>(nbr_list_.size()));
    vt_list_.insert(vt_list_.end(), vtris[v].begin(), vtris[v].end());
    vt_offsets_.push_back(static_cast<int>(vt_list_.size()));
  }
}

void Mesh::check_conforming() const {
  // A hanging node leaves a one-sided edge that has a vertex in its interior.
  for (const Edge& e : edges_) {
    if (e.interior()) continue;
    const Point& p = vertices_[e.a];
    const Point d = vertices_[e.b] - p;
    const double len2 = d.squaredNorm();
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (static_cast<int>(v) == e.a || static_cast<int>(v) == e.b) continue;
      const Point w = vertices_[v] - p;
      const double s = w.dot(d) / len2;
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
      if (std::abs(cross(d, w)) <= 1e-12 * len2) {
        throw TopologyError("vertex " + std::to_string(v) + " hangs on edge (" +
                            std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
      }
    }
  }
}

std::optional<int> Mesh::find_edge(int a, int b) const {
  if (a == b) return std::nullopt;
  for (int t : vertex_triangles(a)) {
    const int ka = corner(t, a);
    const int kb = corner(t, b);
    if (kb >= 0) return tri_edges_[t][3 - ka - kb];
  }
  return std::nullopt;
}

std::vector<int> Mesh::boundary_vertices() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < boundary_flag_.size(); ++v) {
    if (boundary_flag_[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

std::span<const int> Mesh::neighbors(int v) const {
  return {nbr_list_.data() + nbr_offsets_[v],
          static_cast<std::size_t>(nbr_offsets_[v + 1] - nbr_offsets_[v])};
}

std::span<const int> Mesh::vertex_triangles(int v) const {
  return {vt_list_.data() + vt_offsets_[v],
          static_cast<std::size_t>(vt_offsets_[v + 1] - vt_offsets_[v])};
}

double Mesh::max_area() const { return *std::max_element(area_.begin(), area_.end()); }

int Mesh::corner(int t, int v) const {
  const auto& tri = triangles_[t];
  for (int k = 0; k < 3; ++k) {
    if (tri[k] == v) return k;
  }
  return -1;
}

double Mesh::angle(int t, int k) const {
  const auto& tri = triangles_[t];
  const Point e1 = vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]];
  const Point e2 = vertices_[tri[(k + 2) % 3]] - vertices_[tri[k]];
  return std::atan2(std::abs(cross(e1, e2)), e1.dot(e2));
}

double Mesh::cot(int t, int k) const {
  const auto& tri = triangles_[t];
  const Point e1 = vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]];
  const Point e2 = vertices_[tri[(k + 2) % 3]] - vertices_[tri[k]];
  return e1.dot(e2) / (2.0 * area_[t]);
}

double EdgePatch::opposite_cot_sum() const {
  double s = 0;
  for (const auto& side : sides) s += side.cot_opposite;
  return s;
}

double EdgePatch::patch_cot_sum(int v) const {
  double s = opposite_cot_sum();
  for (const auto& side : sides) s += (v == i) ? side.cot_i : side.cot_j;
  return s;
}

EdgePatch edge_patch(const Mesh& mesh, int edge) {
  const Edge& e = mesh.edge(edge);
  EdgePatch patch;
  patch.i = e.a;
  patch.j = e.b;
  for (const EdgeSide& s : e.adjacent()) {
    const int ko = mesh.corner(s.triangle, s.opposite);
    const int ki = mesh.corner(s.triangle, e.a);
    const int kj = mesh.corner(s.triangle, e.b);
    EdgePatch::Side side;
    side.triangle = s.triangle;
    side.opposite = s.opposite;
    side.theta_opposite = mesh.angle(s.triangle, ko);
    side.theta_i = mesh.angle(s.triangle, ki);
    side.theta_j = mesh.angle(s.triangle, kj);
    side.cot_opposite = mesh.cot(s.triangle, ko);
    side.cot_i = mesh.cot(s.triangle, ki);
    side.cot_j = mesh.cot(s.triangle, kj);
    patch.sides.push_back(side);
  }
  return patch;
}

MeshAdmissibility analyze(const Mesh& mesh) {
  MeshAdmissibility out;
  const double right = std::numbers::pi / 2 + kAngleTol;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    double worst = 0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, mesh.angle(static_cast<int>(t), k));
    out.max_interior_angle = std::max(out.max_interior_angle, worst);
    if (worst > right) out.obtuse_triangles.push_back(static_cast<int>(t));
  }
  for (std::size_t e = 0; e < mesh.edges().size(); ++e) {
    if (!mesh.edge(static_cast<int>(e)).interior()) continue;
    const EdgePatch p = edge_patch(mesh, static_cast<int>(e));
    const double opp = p.opposite_cot_sum();
    const double full = std::max(p.patch_cot_sum(p.i), p.patch_cot_sum(p.j));
    out.min_opposite_cot_sum = std::min(out.min_opposite_cot_sum.value_or(opp), opp);
    out.max_patch_cot_sum = std::max(out.max_patch_cot_sum.value_or(full), full);
    if (opp <= kCotSumTol) out.violating_edges.push_back(static_cast<int>(e));
  }
  out.max_degree = max_degree(mesh);
  out.admissible = out.obtuse_triangles.empty() && out.violating_edges.empty();
  return out;
}

std::vector<int> boundary_distance(const Mesh& mesh) {
  if (mesh.boundary_vertices().empty()) {
    throw MeshError("boundary distance needs at least one Dirichlet vertex");
  }
  std::vector<int> p(mesh.num_dofs(), -1);
  std::deque<int> queue;
  for (std::size_t d = 0; d < mesh.num_dofs(); ++d) {
    const int v = mesh.dof_vertex(static_cast<int>(d));
    for (int w : mesh.neighbors(v)) {
      if (mesh.is_boundary(w)) {
        p[d] = 0;
        queue.push_back(static_cast<int>(d));
        break;
      }
    }
  }
  while (!queue.empty()) {
    const int d = queue.front();
    queue.pop_front();
    for (int w : mesh.neighbors(mesh.dof_vertex(d))) {
      const int dw = mesh.dof(w);
      if (dw >= 0 && p[dw] < 0) {
        p[dw] = p[d] + 1;
        queue.push_back(dw);
      }
    }
  }
  if (std::find(p.begin(), p.end(), -1) != p.end()) {
    throw TopologyError("interior vertex not connected to the Dirichlet boundary");
  }
  return p;
}

int max_degree(const Mesh& mesh) {
  std::size_t m = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    m = std::max(m, mesh.neighbors(static_cast<int>(v)).size());
  }
  return static_cast<int>(m);
}

StructuredKind parse_structured_kind(const std::string& name) {
  if (name == "three_direction") return StructuredKind::three_direction;
  if (name == "right_uniform") return StructuredKind::right_uniform;
  throw std::invalid_argument("unknown mesh generator '" + name + "'");
}

std::string to_string(StructuredKind kind) {
  return kind == StructuredKind::three_direction ? "three_direction" : "right_uniform";
}

Mesh gen_structured(StructuredKind kind, int n) {
  if (n < 1) throw std::invalid_argument("structured mesh needs n >= 1 subdivisions");
  const double h = 1.0 / n;
  const auto id = [n](int i, int j) { return i + (n + 1) * j; };
  std::vector<Point> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      if (kind == StructuredKind::three_direction) {
        verts.emplace_back(h * (i + 0.5 * j), h * j * std::sqrt(3.0) / 2.0);
      } else {
        verts.emplace_back(h * i, h * j);
      }
    }
  }
  std::vector<Triangle> tris;
  tris.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if (kind == StructuredKind::three_direction) {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      } else {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      }
    }
  }
  return Mesh(std::move(verts), std::move(tris));
}

}  // namespace dcp
