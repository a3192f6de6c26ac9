#include "blochcav/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "blochcav/errors.hpp"

namespace blochcav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integer bound on |c_i| for vectors of length <= radius in the basis dual to `dual`.
// If v = sum c_i e_i and dual_i . e_j = scale delta_ij then |c_i| <= radius |dual_i| / scale.
int coefficient_bound(double radius, const Vec3& dual, double scale) {
  const double bound = radius * dual.norm() / scale;
  if (!std::isfinite(bound) || bound > 1e6) {
    throw ValidationError("lattice enumeration radius too large");
  }
  return static_cast<int>(std::floor(bound * (1.0 + 1e-12) + 1e-12));
}

}  // namespace

Vec3 Lattice::reciprocal(const std::array<int, 3>& c) const {
  return c[0] * b[0] + c[1] * b[1] + c[2] * b[2];
}

Vec3 Lattice::from_fractional(const Vec3& frac) const {
  return frac[0] * b[0] + frac[1] * b[1] + frac[2] * b[2];
}

Vec3 Lattice::direct(const std::array<int, 3>& c) const {
  return c[0] * ell[0] + c[1] * ell[1] + c[2] * ell[2];
}

double Lattice::min_direct_length() const {
  return std::min({ell[0].norm(), ell[1].norm(), ell[2].norm()});
}

Lattice make_lattice(const Vec3& ell1, const Vec3& ell2, const Vec3& ell3) {
  Eigen::Matrix3d rows;
  rows.row(0) = ell1.transpose();
  rows.row(1) = ell2.transpose();
  rows.row(2) = ell3.transpose();
  const double det = rows.determinant();
  const double scale = ell1.norm() * ell2.norm() * ell3.norm();
  if (!std::isfinite(det) || !(std::abs(det) > 1e-14 * scale)) {
    throw ValidationError("degenerate lattice");
  }
  // rows * B = 2 pi I, so column j of B is b_j.
  const Eigen::Matrix3d recip = kTwoPi * rows.inverse();

  Lattice lat;
  lat.ell = {ell1, ell2, ell3};
  for (int j = 0; j < 3; ++j) lat.b[j] = recip.col(j);
  lat.cell_volume = std::abs(det);
  return lat;
}

Lattice make_cubic_lattice(double period) {
  return make_lattice(Vec3(period, 0, 0), Vec3(0, period, 0), Vec3(0, 0, period));
}

std::vector<ReciprocalPoint> reciprocal_points_in_ball(const Lattice& lattice, double radius) {
  std::vector<ReciprocalPoint> out;
  if (radius < 0) return out;
  // m . ell_i = 2 pi m_i
  std::array<int, 3> n{};
  for (int i = 0; i < 3; ++i) n[i] = coefficient_bound(radius, lattice.ell[i], kTwoPi);
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (int i = -n[0]; i <= n[0]; ++i) {
    for (int j = -n[1]; j <= n[1]; ++j) {
      for (int l = -n[2]; l <= n[2]; ++l) {
        const std::array<int, 3> c{i, j, l};
        const Vec3 v = lattice.reciprocal(c);
        if (v.squaredNorm() <= r2) out.push_back({c, v});
      }
    }
  }
  return out;
}

std::vector<Vec3> direct_points_in_ball(const Lattice& lattice, double radius) {
  std::vector<Vec3> out;
  std::array<int, 3> n{};
  for (int i = 0; i < 3; ++i) n[i] = coefficient_bound(radius, lattice.b[i], kTwoPi);
  const double r2 = radius * radius;
  for (int i = -n[0]; i <= n[0]; ++i) {
    for (int j = -n[1]; j <= n[1]; ++j) {
      for (int l = -n[2]; l <= n[2]; ++l) {
        const Vec3 v = lattice.direct({i, j, l});
        if (v.squaredNorm() <= r2) out.push_back(v);
      }
    }
  }
  return out;
}

ExceptionalSet enumerate_exceptional(const Lattice& lattice, const Vec3& k, double tol) {
  if (!(tol > 0) || !std::isfinite(tol)) {
    throw ValidationError("exceptional tolerance must be positive");
  }
  if (!k.allFinite()) throw ValidationError("Bloch vector must be finite");
  if (tol >= 0.5) throw ValidationError("exceptional tolerance must be below 0.5");

  // Any m with |2k.m - |m|^2| <= tol (1 + |m|^2) satisfies
  // (1 - tol)|m|^2 - 2|k||m| - tol <= 0.
  const double kn = k.norm();
  const double bound =
      (2.0 * kn + std::sqrt(4.0 * kn * kn + 4.0 * tol * (1.0 - tol))) / (2.0 * (1.0 - tol));
  const double radius = bound * (1.0 + 1e-6) + 1e-12;

  ExceptionalSet set;
  set.k = k;
  set.tolerance = tol;
  set.points.push_back(ReciprocalPoint{});
  for (const auto& p : reciprocal_points_in_ball(lattice, radius)) {
    if (p.coeffs == std::array<int, 3>{0, 0, 0}) continue;
    const double m2 = p.vec.squaredNorm();
    if (std::abs(2.0 * k.dot(p.vec) - m2) <= tol * (1.0 + m2)) set.points.push_back(p);
  }
  // reciprocal_points_in_ball already yields lexicographic order
  set.order = static_cast<int>(set.points.size());
  return set;
}

double distance_to_exceptional(const Lattice& lattice, const Vec3& k, double search_radius) {
  if (!(search_radius > 0)) throw ValidationError("search radius must be positive");
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& p : reciprocal_points_in_ball(lattice, search_radius)) {
    if (p.coeffs == std::array<int, 3>{0, 0, 0}) continue;
    const double mn = p.vec.norm();
    best = std::min(best, std::abs(k.dot(p.vec) / mn - 0.5 * mn));
    any = true;
  }
  if (!any) throw ValidationError("empty search");
  return best;
}

double complete_search_radius(const Lattice& lattice, const Vec3& k) {
  // A plane for m is at distance >= |m|/2 - |k|; the plane of the longest basis vector b_i
  // is at distance <= |k| + |b_i|/2, so nothing beyond 4|k| + 2 max|b| can win.
  const double bmax = std::max({lattice.b[0].norm(), lattice.b[1].norm(), lattice.b[2].norm()});
  return 4.0 * k.norm() + 2.0 * bmax;
}

}  // namespace blochcav
