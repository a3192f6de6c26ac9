#include <cmath>

#include "blochcav/capacitance.hpp"

namespace blochcav {

double triangle_potential_exact(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 cr = (b - a).cross(c - a);
  const Vec3 n = cr.normalized();
  const double h = (x - a).dot(n);
  const double ah = std::abs(h);
  const Vec3 rho = x - h * n;
  const Vec3 v[3] = {a, b, c};

  double line = 0.0, angle = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3& p = v[e];
    const Vec3& q = v[(e + 1) % 3];
    const double len = (q - p).norm();
    const Vec3 s = (q - p) / len;
    const Vec3 u = s.cross(n);  // in-plane outward edge normal
    const double t0 = (p - rho).dot(u);
    const double lm = (p - rho).dot(s);
    const double lp = (q - rho).dot(s);
    const double r0sq = t0 * t0 + h * h;
    if (std::abs(t0) <= 1e-15 * len) continue;  // x projects onto this edge's line
    const double r0 = std::sqrt(r0sq);
    line += t0 * (std::asinh(lp / r0) - std::asinh(lm / r0));
    if (ah > 0) {
      const double rp = std::sqrt(r0sq + lp * lp);
      const double rm = std::sqrt(r0sq + lm * lm);
      angle += std::atan(t0 * lp / (r0sq + ah * rp)) - std::atan(t0 * lm / (r0sq + ah * rm));
    }
  }
  return line - ah * angle;
}

double triangle_potential_gauss3(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area = 0.5 * (b - a).cross(c - a).norm();
  constexpr double w1 = 2.0 / 3.0, w2 = 1.0 / 6.0;
  const Vec3 p1 = w1 * a + w2 * b + w2 * c;
  const Vec3 p2 = w2 * a + w1 * b + w2 * c;
  const Vec3 p3 = w2 * a + w2 * b + w1 * c;
  return area / 3.0 * (1.0 / (x - p1).norm() + 1.0 / (x - p2).norm() + 1.0 / (x - p3).norm());
}

namespace {

inline double influence(const SurfaceMesh& mesh, const Vec3& x, std::size_t j) {
  const auto [a, b, c] = mesh.corners(j);
  if ((x - mesh.centroid(j)).norm() < 2.0 * mesh.diameter(j)) {
    return triangle_potential_exact(x, a, b, c);
  }
  return triangle_potential_gauss3(x, a, b, c);
}

inline void fill_row(const SurfaceMesh& mesh, std::size_t i, Eigen::MatrixXd& S) {
  const Vec3& x = mesh.centroid(i);
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = influence(mesh, x, j);
  }
}

}  // namespace

Eigen::MatrixXd assemble_single_layer(const SurfaceMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd S(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) fill_row(mesh, static_cast<std::size_t>(i), S);
  return S;
}

namespace serial {

Eigen::MatrixXd assemble_single_layer(const SurfaceMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) fill_row(mesh, static_cast<std::size_t>(i), S);
  return S;
}

}  // namespace serial

double CapacitanceSolution::potential(const Vec3& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j) v += density[j] * influence(mesh, x, j);
  return v;
}

}  // namespace blochcav
