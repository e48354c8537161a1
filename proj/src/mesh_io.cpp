// Triangle-compatible .node/.ele reader and writer.

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "dcp/mesh.hpp"

namespace dcp {

namespace {

namespace fs = std::filesystem;

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw ParseError("cannot open " + path.string());
  }

  // Next non-blank line with '#' comments removed.
  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw error(std::string("unexpected end of file while reading ") + what);
  }

  ParseError error(const std::string& msg) const {
    return ParseError(path_.string() + ":" + std::to_string(lineno_) + ": " + msg);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  int lineno_ = 0;
};

template <typename T>
T read_field(std::istringstream& ss, const LineReader& reader, const char* what) {
  T value{};
  if (!(ss >> value)) throw reader.error(std::string("expected ") + what);
  return value;
}

fs::path base_of(const fs::path& path) {
  if (path.extension() == ".node" || path.extension() == ".ele") {
    return fs::path(path).replace_extension();
  }
  return path;
}

}  // namespace

Mesh load_mesh(const fs::path& path) {
  const fs::path base = base_of(path);

  LineReader nodes(fs::path(base).concat(".node"));
  auto header = nodes.next("node header");
  const auto nv = read_field<long>(header, nodes, "vertex count");
  const auto dim = read_field<int>(header, nodes, "dimension");
  int nattr = 0, nmark = 0;
  header >> nattr >> nmark;
  if (nv <= 0) throw nodes.error("vertex count must be positive");
  if (dim != 2) throw nodes.error("only two-dimensional meshes are supported");
  if (nattr < 0 || nmark < 0 || nmark > 1) throw nodes.error("bad attribute/marker counts");

  int index_base = 0;
  std::vector<Point> verts;
  std::vector<int> marked;
  verts.reserve(nv);
  for (long k = 0; k < nv; ++k) {
    auto line = nodes.next("vertex");
    const auto idx = read_field<long>(line, nodes, "vertex index");
    if (k == 0) {
      if (idx != 0 && idx != 1) throw nodes.error("first vertex index must be 0 or 1");
      index_base = static_cast<int>(idx);
    }
    if (idx != k + index_base) throw nodes.error("vertex indices must be consecutive");
    const auto x = read_field<double>(line, nodes, "x coordinate");
    const auto y = read_field<double>(line, nodes, "y coordinate");
    for (int a = 0; a < nattr; ++a) read_field<double>(line, nodes, "vertex attribute");
    if (nmark == 1 && read_field<long>(line, nodes, "boundary marker") != 0) {
      marked.push_back(static_cast<int>(k));
    }
    verts.emplace_back(x, y);
  }

  LineReader eles(fs::path(base).concat(".ele"));
  header = eles.next("element header");
  const auto nt = read_field<long>(header, eles, "triangle count");
  const auto per = read_field<int>(header, eles, "nodes per triangle");
  if (nt <= 0) throw eles.error("triangle count must be positive");
  if (per != 3 && per != 6) throw eles.error("nodes per triangle must be 3 or 6");

  std::vector<Triangle> tris;
  tris.reserve(nt);
  for (long k = 0; k < nt; ++k) {
    auto line = eles.next("triangle");
    read_field<long>(line, eles, "triangle index");
    Triangle tri{};
    for (int c = 0; c < 3; ++c) {
      const auto v = read_field<long>(line, eles, "vertex index") - index_base;
      if (v < 0 || v >= nv) {
        throw TopologyError("triangle " + std::to_string(k + index_base) +
                            " references vertex " + std::to_string(v + index_base) +
                            " outside the node file");
      }
      tri[c] = static_cast<int>(v);
    }
    // Higher-order midside nodes are ignored.
    tris.push_back(tri);
  }

  if (nmark == 1) return Mesh(std::move(verts), std::move(tris), std::move(marked));
  return Mesh(std::move(verts), std::move(tris));
}

void write_mesh(const Mesh& mesh, const fs::path& base_path) {
  const fs::path base = base_of(base_path);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());

  std::ofstream node(fs::path(base).concat(".node"));
  if (!node) throw MeshError("cannot write " + base.string() + ".node");
  node << std::setprecision(std::numeric_limits<double>::max_digits10);
  node << mesh.num_vertices() << " 2 0 1\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point& p = mesh.vertex(static_cast<int>(v));
    node << v + 1 << ' ' << p.x() << ' ' << p.y() << ' '
         << (mesh.is_boundary(static_cast<int>(v)) ? 1 : 0) << '\n';
  }

  std::ofstream ele(fs::path(base).concat(".ele"));
  if (!ele) throw MeshError("cannot write " + base.string() + ".ele");
  ele << mesh.num_triangles() << " 3 0\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(static_cast<int>(t));
    ele << t + 1 << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
  }
}

}  // namespace dcp
