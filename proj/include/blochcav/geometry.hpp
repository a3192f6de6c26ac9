#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "blochcav/lattice.hpp"

namespace blochcav {

/// Closed, outward-oriented triangulated surface at unit cavity scale.
///
/// Construction validates the mesh: every edge is shared by exactly two triangles with
/// opposite orientation, all areas are positive, the area-weighted normals sum to zero
/// and the enclosed volume is positive. Instances are immutable.
class SurfaceMesh {
 public:
  using Triangle = std::array<int, 3>;

  SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t size() const { return triangles_.size(); }

  const Vec3& centroid(std::size_t t) const { return centroids_[t]; }
  double area(std::size_t t) const { return areas_[t]; }
  const Vec3& normal(std::size_t t) const { return normals_[t]; }
  std::array<Vec3, 3> corners(std::size_t t) const;
  /// Longest edge of triangle t.
  double diameter(std::size_t t) const { return diameters_[t]; }

  double total_area() const { return total_area_; }
  double volume() const { return volume_; }
  /// Largest vertex-to-vertex distance (bounding-box diagonal is used as an upper bound).
  double extent() const;
  /// Root mean triangle area; the mesh size used for extrapolation.
  double mesh_size() const;

  SurfaceMesh scaled(double factor) const;
  SurfaceMesh translated(const Vec3& shift) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> centroids_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double total_area_ = 0.0;
  double volume_ = 0.0;
};

inline constexpr int kMaxRefinement = 7;

/// Icosahedron subdivided `refinement` times with vertices projected onto the sphere.
SurfaceMesh make_sphere_mesh(double radius, int refinement);

/// Icosphere with vertices scaled per axis.
SurfaceMesh make_ellipsoid_mesh(const Vec3& semi_axes, int refinement);

/// Axis-aligned box centred at the origin; each face split into n x n squares.
SurfaceMesh make_box_mesh(const Vec3& size, int subdivisions);

/// Splits every triangle into four at its edge midpoints (the surface itself is unchanged).
SurfaceMesh subdivide(const SurfaceMesh& mesh);

/// Parses ASCII OFF. Flips all triangles if the enclosed volume comes out negative.
SurfaceMesh load_off(std::istream& in);
SurfaceMesh load_off_file(const std::string& path);
SurfaceMesh load_off_string(std::string_view text);

/// Writes ASCII OFF with 17 significant digits.
void write_off(std::ostream& out, const SurfaceMesh& mesh);

}  // namespace blochcav
