#include "blochcav/capacitance.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "blochcav/errors.hpp"

namespace blochcav {

CapacitanceSolution solve_capacitance(const SurfaceMesh& mesh) {
  Eigen::MatrixXd A = assemble_single_layer(mesh);
  const Eigen::Index n = A.rows();

  // Jacobi scaling: A <- D^-1/2 S D^-1/2, solve A y = D^-1/2 1, sigma = D^-1/2 y.
  const Eigen::VectorXd dinv = A.diagonal().cwiseSqrt().cwiseInverse();
  if (!dinv.allFinite()) throw NumericalError("degenerate BEM system");
  A = dinv.asDiagonal() * A * dinv.asDiagonal();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  const double cond = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxConditionEstimate)) throw NumericalError("degenerate BEM system");

  const Eigen::VectorXd rhs = dinv;  // D^-1/2 * ones
  const Eigen::VectorXd y = lu.solve(rhs);
  const Eigen::VectorXd sigma = dinv.cwiseProduct(y);

  // Potential at the centroids: S sigma = D^1/2 A y.
  const Eigen::VectorXd pot = (A * y).cwiseQuotient(dinv);
  const double residual = (pot.array() - 1.0).abs().maxCoeff();

  CapacitanceSolution sol{mesh, {}, 0.0, residual, cond, kCapacitanceResidualTol};
  sol.density.assign(sigma.data(), sigma.data() + n);
  for (Eigen::Index j = 0; j < n; ++j) sol.q += sigma[j] * mesh.area(static_cast<std::size_t>(j));

  if (!std::isfinite(sol.q) || !(residual <= sol.tolerance)) {
    throw NumericalError("degenerate BEM system");
  }
  if (!(sol.q > 0)) throw NumericalError("non-positive capacitance");
  return sol;
}

RichardsonResult richardson_extrapolate(std::span<const double> h, std::span<const double> q) {
  if (h.size() != q.size() || h.size() < 3) {
    throw ValidationError("extrapolation needs at least three refinement levels");
  }
  RichardsonResult r;
  r.level_h.assign(h.begin(), h.end());
  r.level_q.assign(q.begin(), q.end());
  r.fitted_order = std::numeric_limits<double>::quiet_NaN();

  const std::size_t m = q.size();
  const double h1 = h[m - 3], h2 = h[m - 2], h3 = h[m - 1];
  const double q1 = q[m - 3], q2 = q[m - 2], q3 = q[m - 1];
  r.q = q3;
  const double d1 = q1 - q2, d2 = q2 - q3;
  const double scale = 1e-13 * std::max(1.0, std::abs(q3));
  if (std::abs(d1) <= scale && std::abs(d2) <= scale) {
    r.warning = true;  // converged or repeated meshes: nothing to fit
    return r;
  }
  if (d1 * d2 <= 0 || !(h1 > h2 && h2 > h3)) {
    r.warning = true;
    return r;
  }

  // Solve (h1^p - h2^p) / (h2^p - h3^p) = d1 / d2 for p by bisection.
  const double target = d1 / d2;
  auto ratio = [&](double p) {
    return (std::pow(h1, p) - std::pow(h2, p)) / (std::pow(h2, p) - std::pow(h3, p));
  };
  double lo = 0.05, hi = 8.0;
  double flo = ratio(lo) - target, fhi = ratio(hi) - target;
  if (flo * fhi > 0) {
    r.warning = true;
    return r;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ratio(mid) - target;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  const double C = d2 / (std::pow(h2, p) - std::pow(h3, p));
  r.q = q3 - C * std::pow(h3, p);
  r.fitted_order = p;
  r.extrapolated = true;
  return r;
}

RichardsonResult richardson_q(std::span<const SurfaceMesh> meshes) {
  if (meshes.size() < 3) throw ValidationError("extrapolation needs at least three meshes");
  std::vector<double> h, q;
  for (const auto& mesh : meshes) {
    h.push_back(mesh.mesh_size());
    q.push_back(solve_capacitance(mesh).q);
  }
  return richardson_extrapolate(h, q);
}

}  // namespace blochcav
