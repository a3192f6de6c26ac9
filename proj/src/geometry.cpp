#include "blochcav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "blochcav/csv.hpp"
#include "blochcav/errors.hpp"

namespace blochcav {

namespace {

using Edge = std::pair<int, int>;

std::string edge_name(const Edge& e) {
  return "(" + std::to_string(e.first) + ", " + std::to_string(e.second) + ")";
}

double signed_volume(const std::vector<Vec3>& v, const std::vector<SurfaceMesh::Triangle>& tris) {
  double vol = 0.0;
  for (const auto& t : tris) vol += v[t[0]].dot(v[t[1]].cross(v[t[2]]));
  return vol / 6.0;
}

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (triangles_.empty()) throw ValidationError("mesh has no triangles");
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& p : vertices_) {
    if (!p.allFinite()) throw ValidationError("mesh vertex is not finite");
  }

  // Each directed edge must occur once, together with its reverse.
  std::map<Edge, int> directed;
  for (const auto& t : triangles_) {
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= nv) {
        throw ValidationError("triangle references vertex " + std::to_string(t[c]) +
                              " out of range");
      }
      const Edge e{t[c], t[(c + 1) % 3]};
      if (e.first == e.second) throw ValidationError("degenerate triangle edge " + edge_name(e));
      if (++directed[e] > 1) {
        throw ValidationError("non-manifold or inconsistently oriented edge " + edge_name(e));
      }
    }
  }
  for (const auto& [e, count] : directed) {
    if (!directed.contains({e.second, e.first})) {
      throw ValidationError("open surface: edge " + edge_name(e) + " has one adjacent triangle");
    }
  }

  const std::size_t nt = triangles_.size();
  centroids_.resize(nt);
  normals_.resize(nt);
  areas_.resize(nt);
  diameters_.resize(nt);
  Vec3 gauss = Vec3::Zero();
  for (std::size_t i = 0; i < nt; ++i) {
    const auto [a, b, c] = corners(i);
    const Vec3 cr = (b - a).cross(c - a);
    const double twice = cr.norm();
    if (!(twice > 0)) throw ValidationError("triangle " + std::to_string(i) + " has zero area");
    areas_[i] = 0.5 * twice;
    normals_[i] = cr / twice;
    centroids_[i] = (a + b + c) / 3.0;
    diameters_[i] = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    total_area_ += areas_[i];
    gauss += areas_[i] * normals_[i];
  }
  if (gauss.norm() > 1e-8 * total_area_) {
    throw ValidationError("surface fails closedness check");
  }
  volume_ = signed_volume(vertices_, triangles_);
  if (!(volume_ > 0)) throw ValidationError("surface is not outward oriented");
}

std::array<Vec3, 3> SurfaceMesh::corners(std::size_t t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double SurfaceMesh::extent() const {
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const auto& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double SurfaceMesh::mesh_size() const {
  return std::sqrt(total_area_ / static_cast<double>(triangles_.size()));
}

SurfaceMesh SurfaceMesh::scaled(double factor) const {
  if (!(factor > 0)) throw ValidationError("scale factor must be positive");
  std::vector<Vec3> v = vertices_;
  for (auto& p : v) p *= factor;
  return SurfaceMesh(std::move(v), triangles_);
}

SurfaceMesh SurfaceMesh::translated(const Vec3& shift) const {
  std::vector<Vec3> v = vertices_;
  for (auto& p : v) p += shift;
  return SurfaceMesh(std::move(v), triangles_);
}

namespace {

struct Icosphere {
  std::vector<Vec3> vertices;
  std::vector<SurfaceMesh::Triangle> triangles;
};

Icosphere unit_icosphere(int refinement) {
  if (refinement < 0 || refinement > kMaxRefinement) {
    throw ValidationError("refinement must lie in [0, " + std::to_string(kMaxRefinement) + "]");
  }
  const double phi = std::numbers::phi;
  Icosphere ico;
  ico.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : ico.vertices) v.normalize();
  ico.triangles = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < refinement; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      ico.vertices.push_back((ico.vertices[i] + ico.vertices[j]).normalized());
      const int id = static_cast<int>(ico.vertices.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<SurfaceMesh::Triangle> next;
    next.reserve(ico.triangles.size() * 4);
    for (const auto& [a, b, c] : ico.triangles) {
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    ico.triangles = std::move(next);
  }
  return ico;
}

}  // namespace

SurfaceMesh make_sphere_mesh(double radius, int refinement) {
  if (!(radius > 0)) throw ValidationError("sphere radius must be positive");
  auto ico = unit_icosphere(refinement);
  for (auto& v : ico.vertices) v *= radius;
  return SurfaceMesh(std::move(ico.vertices), std::move(ico.triangles));
}

SurfaceMesh make_ellipsoid_mesh(const Vec3& semi_axes, int refinement) {
  if (!(semi_axes.minCoeff() > 0)) throw ValidationError("ellipsoid semi-axes must be positive");
  auto ico = unit_icosphere(refinement);
  for (auto& v : ico.vertices) v = v.cwiseProduct(semi_axes);
  return SurfaceMesh(std::move(ico.vertices), std::move(ico.triangles));
}

SurfaceMesh make_box_mesh(const Vec3& size, int n) {
  if (!(size.minCoeff() > 0)) throw ValidationError("box size must be positive");
  if (n < 1 || n > 256) throw ValidationError("box subdivisions must lie in [1, 256]");

  // Grid points on the surface of [0,n]^3 indexed by integer coordinates.
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> vertices;
  auto vertex = [&](const std::array<int, 3>& g) {
    if (auto it = index.find(g); it != index.end()) return it->second;
    const Vec3 p(size[0] * (double(g[0]) / n - 0.5), size[1] * (double(g[1]) / n - 0.5),
                 size[2] * (double(g[2]) / n - 0.5));
    vertices.push_back(p);
    const int id = static_cast<int>(vertices.size()) - 1;
    index.emplace(g, id);
    return id;
  };

  std::vector<SurfaceMesh::Triangle> triangles;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, w = (axis + 2) % 3;  // (u, w, axis) is right-handed
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          auto at = [&](int di, int dj) {
            std::array<int, 3> g{};
            g[axis] = side * n;
            g[u] = i + di;
            g[w] = j + dj;
            return vertex(g);
          };
          const int p00 = at(0, 0), p10 = at(1, 0), p11 = at(1, 1), p01 = at(0, 1);
          if (side == 1) {  // normal +axis
            triangles.push_back({p00, p10, p11});
            triangles.push_back({p00, p11, p01});
          } else {
            triangles.push_back({p00, p11, p10});
            triangles.push_back({p00, p01, p11});
          }
        }
      }
    }
  }
  return SurfaceMesh(std::move(vertices), std::move(triangles));
}

SurfaceMesh subdivide(const SurfaceMesh& mesh) {
  std::vector<Vec3> vertices = mesh.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    vertices.push_back(0.5 * (vertices[i] + vertices[j]));
    const int id = static_cast<int>(vertices.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  std::vector<SurfaceMesh::Triangle> triangles;
  triangles.reserve(mesh.size() * 4);
  for (const auto& [a, b, c] : mesh.triangles()) {
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    triangles.push_back({a, ab, ca});
    triangles.push_back({b, bc, ab});
    triangles.push_back({c, ca, bc});
    triangles.push_back({ab, bc, ca});
  }
  return SurfaceMesh(std::move(vertices), std::move(triangles));
}

namespace {

// Next non-empty, non-comment line; false at end of input.
bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void off_error(int lineno, const std::string& what) {
  throw ValidationError("OFF line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

SurfaceMesh load_off(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) throw ValidationError("OFF: empty input");
  {
    std::istringstream hs(line);
    std::string magic;
    hs >> magic;
    if (magic != "OFF") off_error(lineno, "missing OFF header");
  }
  if (!next_line(in, line, lineno)) off_error(lineno, "missing counts line");
  long nv = -1, nf = -1;
  {
    std::istringstream cs(line);
    if (!(cs >> nv >> nf) || nv < 3 || nf < 1) off_error(lineno, "malformed counts");
  }

  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, lineno)) off_error(lineno, "unexpected end of vertex list");
    std::istringstream vs(line);
    vs.imbue(std::locale::classic());
    double x, y, z;
    if (!(vs >> x >> y >> z)) off_error(lineno, "malformed vertex");
    vertices.emplace_back(x, y, z);
  }

  std::vector<SurfaceMesh::Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(nf));
  for (long f = 0; f < nf; ++f) {
    if (!next_line(in, line, lineno)) off_error(lineno, "unexpected end of face list");
    std::istringstream fs(line);
    int count = 0;
    if (!(fs >> count)) off_error(lineno, "malformed face");
    if (count != 3) off_error(lineno, "non-triangle face with " + std::to_string(count) + " vertices");
    SurfaceMesh::Triangle t{};
    if (!(fs >> t[0] >> t[1] >> t[2])) off_error(lineno, "malformed face indices");
    for (int c : t) {
      if (c < 0 || c >= nv) off_error(lineno, "face index out of range");
    }
    triangles.push_back(t);
  }

  if (signed_volume(vertices, triangles) < 0) {
    for (auto& t : triangles) std::swap(t[1], t[2]);
  }
  return SurfaceMesh(std::move(vertices), std::move(triangles));
}

SurfaceMesh load_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mesh file '" + path + "'");
  return load_off(in);
}

SurfaceMesh load_off_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_off(in);
}

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n" << mesh.vertices().size() << ' ' << mesh.size() << " 0\n";
  for (const auto& v : mesh.vertices()) {
    out << format_number(v[0]) << ' ' << format_number(v[1]) << ' ' << format_number(v[2]) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace blochcav
