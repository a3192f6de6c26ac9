#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace blochcav {

using Vec3 = Eigen::Vector3d;

/// Direct basis ell_i and reciprocal basis b_j with ell_i . b_j = 2 pi delta_ij.
struct Lattice {
  std::array<Vec3, 3> ell;
  std::array<Vec3, 3> b;
  double cell_volume = 0.0;

  /// Cartesian reciprocal vector m1 b1 + m2 b2 + m3 b3.
  Vec3 reciprocal(const std::array<int, 3>& coeffs) const;
  /// Cartesian vector from fractional reciprocal coordinates.
  Vec3 from_fractional(const Vec3& frac) const;
  Vec3 direct(const std::array<int, 3>& coeffs) const;
  double min_direct_length() const;
};

struct ReciprocalPoint {
  std::array<int, 3> coeffs{0, 0, 0};
  Vec3 vec = Vec3::Zero();
};

/// All reciprocal lattice points on the sphere centred at k through the origin.
struct ExceptionalSet {
  Vec3 k = Vec3::Zero();
  int order = 1;
  std::vector<ReciprocalPoint> points;  // points[0] is the origin
  double tolerance = 0.0;

  bool exceptional() const { return order > 1; }
};

inline constexpr double kDefaultExceptionalTol = 1e-9;

/// Throws ValidationError("degenerate lattice") when the basis is (nearly) coplanar.
Lattice make_lattice(const Vec3& ell1, const Vec3& ell2, const Vec3& ell3);

/// Cubic lattice with period `period` along each axis.
Lattice make_cubic_lattice(double period);

/// Integer coefficient triples whose reciprocal vectors lie in the closed ball |m| <= radius.
/// Returned in lexicographic coefficient order.
std::vector<ReciprocalPoint> reciprocal_points_in_ball(const Lattice& lattice, double radius);

/// Direct lattice translations with |R| <= radius, lexicographic order.
std::vector<Vec3> direct_points_in_ball(const Lattice& lattice, double radius);

ExceptionalSet enumerate_exceptional(const Lattice& lattice, const Vec3& k,
                                     double tol = kDefaultExceptionalTol);

/// Distance from k to the nearest Bragg plane 2 k.m = |m|^2 over 0 < |m| <= search_radius.
double distance_to_exceptional(const Lattice& lattice, const Vec3& k, double search_radius);

/// A search radius for which distance_to_exceptional is exact (no farther plane can be closer).
double complete_search_radius(const Lattice& lattice, const Vec3& k);

}  // namespace blochcav
