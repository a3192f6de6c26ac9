#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "blochcav/geometry.hpp"

namespace blochcav {

/// Exact integral of 1/|x - y| over the flat triangle (a, b, c), y ranging over the triangle.
double triangle_potential_exact(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// Three-point interior Gauss rule (degree 2) for the same integral; valid away from the triangle.
double triangle_potential_gauss3(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// S[i][j] = integral over T_j of dS / |c_i - y|, c_i the centroid of T_i.
/// Near field (centroid distance < 2 diam(T_j)) uses the closed form, the rest the Gauss rule.
/// Rows are assembled in parallel with OpenMP; the result does not depend on the thread count.
Eigen::MatrixXd assemble_single_layer(const SurfaceMesh& mesh);

namespace serial {
/// Reference single-threaded assembly; bitwise identical to assemble_single_layer.
Eigen::MatrixXd assemble_single_layer(const SurfaceMesh& mesh);
}  // namespace serial

struct CapacitanceSolution {
  SurfaceMesh mesh;
  std::vector<double> density;  // per-triangle charge density
  double q = 0.0;               // total charge at unit potential
  double residual = 0.0;        // max |potential - 1| over collocation points
  double condition_estimate = 0.0;
  double tolerance = 0.0;       // residual bound the solve was checked against

  /// Single-layer potential of the computed density at an arbitrary point.
  double potential(const Vec3& x) const;
};

inline constexpr double kMaxConditionEstimate = 1e12;
inline constexpr double kCapacitanceResidualTol = 1e-8;

/// Collocation solve of S sigma = 1 at the centroids with Jacobi scaling and dense LU.
/// Throws NumericalError("degenerate BEM system") if the scaled condition estimate exceeds 1e12.
CapacitanceSolution solve_capacitance(const SurfaceMesh& mesh);

struct RichardsonResult {
  double q = 0.0;              // extrapolated value (finest-level q if not extrapolated)
  double fitted_order = 0.0;   // p in q_h = q + C h^p; NaN when no fit was possible
  bool extrapolated = false;
  bool warning = false;        // non-monotone or degenerate sequence
  std::vector<double> level_q;
  std::vector<double> level_h;
};

/// Extrapolation from (h, q_h) pairs ordered coarse to fine, using the last three levels.
RichardsonResult richardson_extrapolate(std::span<const double> h, std::span<const double> q);

/// Solves every mesh and extrapolates; needs at least three meshes of the same shape.
RichardsonResult richardson_q(std::span<const SurfaceMesh> meshes);

}  // namespace blochcav
