#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "blochcav/errors.hpp"
#include "blochcav/oracle.hpp"

namespace blochcav {

using std::numbers::pi;

std::pair<double, double> default_root_bracket(const LatticeSumContext& ctx) {
  const double k2 = ctx.k.squaredNorm();
  // Smallest resonance strictly above |k|^2.
  double next = std::numeric_limits<double>::infinity();
  const double radius = ctx.k.norm() + std::sqrt(k2) + 2.0 * std::max({ctx.lattice.b[0].norm(),
                                                                        ctx.lattice.b[1].norm(),
                                                                        ctx.lattice.b[2].norm()});
  for (const auto& p : reciprocal_points_in_ball(ctx.lattice, radius)) {
    const double r = (ctx.k - p.vec).squaredNorm();
    if (r > k2 * (1.0 + 1e-8) + 1e-12) next = std::min(next, r);
  }
  if (!std::isfinite(next)) throw NumericalError("no resonance above |k|^2 found");
  const double lo = k2 + 1e-9 * (1.0 + k2);
  const double hi = next - 1e-9 * (1.0 + next);
  return {lo, hi};
}

double oracle_dispersion_root(const LatticeSumContext& ctx, double alpha,
                              std::pair<double, double> bracket) {
  if (!(alpha > 0)) throw ValidationError("scattering length must be positive");
  const double target = 1.0 / (4.0 * pi * alpha);
  auto f = [&](double z) { return regularized_green(ctx, z) + target; };

  double lo = bracket.first, hi = bracket.second;
  if (!(lo < hi)) throw NumericalError("bracket invalid");
  double flo = f(lo), fhi = f(hi);
  if (!(flo < 0 && fhi > 0)) throw NumericalError("bracket invalid");

  // Bisection until the bracket is tight enough for the secant to behave.
  while (hi - lo > 1e-6 * std::abs(hi)) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm < 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }

  // Secant from the bracket ends, falling back to bisection if a step leaves it.
  double z0 = lo, f0 = flo, z1 = hi, f1 = fhi;
  for (int it = 0; it < 100; ++it) {
    double z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
    if (!(z2 > lo && z2 < hi)) z2 = 0.5 * (lo + hi);
    const double f2 = f(z2);
    if (f2 < 0) {
      lo = z2;
    } else {
      hi = z2;
    }
    const double step = std::abs(z2 - z1);
    z0 = z1;
    f0 = f1;
    z1 = z2;
    f1 = f2;
    if (f2 == 0.0 || step <= 1e-13 * std::abs(z2) || hi - lo <= 1e-13 * std::abs(z2)) return z2;
  }
  if (hi - lo <= 1e-10 * std::abs(z1)) return z1;
  throw NumericalError("root refinement did not converge");
}

double oracle_dispersion_root(const LatticeSumContext& ctx, double alpha) {
  return oracle_dispersion_root(ctx, alpha, default_root_bracket(ctx));
}

ResidueFit fit_pole_residue(const LatticeSumContext& ctx, const std::vector<double>& deltas) {
  if (deltas.size() < 2) throw ValidationError("residue fit needs at least two offsets");
  const double k2 = ctx.k.squaredNorm();
  ResidueFit fit;
  fit.deltas = deltas;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(deltas.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(deltas.size()));
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    const double sample = regularized_green(ctx, k2 - d) * d;
    fit.samples.push_back(sample);
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A(static_cast<Eigen::Index>(i), 1) = d;
    y[static_cast<Eigen::Index>(i)] = sample;
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  fit.residue = coef[0];
  fit.pole_count = fit.residue * ctx.lattice.cell_volume;
  return fit;
}

double fit_linear_coefficient(const std::vector<double>& alpha, const std::vector<double>& shift) {
  if (alpha.size() != shift.size() || alpha.size() < 2) {
    throw ValidationError("linear-coefficient fit needs at least two samples");
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(alpha.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = alpha[i];
    A(r, 1) = alpha[i] * alpha[i];
    y[r] = shift[i];
  }
  return A.colPivHouseholderQr().solve(y)[0];
}

double fit_convergence_order(const std::vector<double>& a, const std::vector<double>& err) {
  if (a.size() != err.size() || a.size() < 2) {
    throw ValidationError("order fit needs at least two samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(err[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(a[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

OracleCase run_case(const Lattice& lattice, const std::string& label, const Vec3& k, double q,
                    const std::vector<double>& a_values, const OracleThresholds& th) {
  OracleCase oc;
  oc.label = label;
  oc.k = k;
  oc.order = enumerate_exceptional(lattice, k).order;
  oc.a = a_values;
  const double k2 = k.squaredNorm();
  oc.expected_slope = 4.0 * pi * oc.order / lattice.cell_volume;
  const auto ctx = make_lattice_sum_context(lattice, k);

  std::vector<double> shifts;
  for (double a : a_values) {
    const double alpha = a * q;
    const double zs = alpha > 0 ? oracle_dispersion_root(ctx, alpha) : k2;
    const double zf = k2 + oc.expected_slope * alpha;
    oc.alpha.push_back(alpha);
    oc.z_star.push_back(zs);
    oc.z_formula.push_back(zf);
    oc.abs_error.push_back(std::abs(zs - zf));
    oc.rel_error.push_back(zs > k2 ? std::abs(zs - zf) / (zs - k2) : 0.0);
    shifts.push_back(zs - k2);
  }

  const ResidueFit res = fit_pole_residue(ctx);
  oc.pole_count = res.pole_count;
  // Point-scatterer modes on the resonant shell with sum(tau) = 0 vanish at the scatterer and
  // keep z = |k|^2 exactly: pole multiplicity minus the one shifted branch.
  oc.unshifted_branches = static_cast<int>(std::lround(res.pole_count)) - 1;
  const bool poles_ok = std::abs(res.pole_count - oc.order) <= th.pole_count_tol;

  if (q == 0.0) {
    oc.fitted_order = std::numeric_limits<double>::quiet_NaN();
    oc.fitted_slope = 0.0;
    oc.pass = poles_ok && std::all_of(oc.abs_error.begin(), oc.abs_error.end(),
                                      [](double e) { return e == 0.0; });
    return oc;
  }
  oc.fitted_order = fit_convergence_order(oc.a, oc.abs_error);
  oc.fitted_slope = fit_linear_coefficient(oc.alpha, shifts);
  const bool slope_ok =
      std::abs(oc.fitted_slope - oc.expected_slope) <= th.slope_rel_tol * oc.expected_slope;
  const bool order_ok = std::isfinite(oc.fitted_order) && oc.fitted_order >= th.min_order;
  oc.pass = poles_ok && slope_ok && order_ok;
  return oc;
}

}  // namespace

OracleReport oracle_validation_suite(const Lattice& lattice, double q,
                                     const std::vector<double>& a_values,
                                     const OracleThresholds& thresholds) {
  if (a_values.size() < 3) throw ValidationError("validation suite needs at least three a values");
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (!(a_values[i] > 0)) throw ValidationError("a values must be positive");
    if (i > 0 && !(a_values[i] < a_values[i - 1])) {
      throw ValidationError("a values must be decreasing");
    }
  }
  if (!(q >= 0)) throw ValidationError("q must be non-negative");

  OracleReport rep;
  rep.q = q;
  rep.cases.push_back(run_case(lattice, "non_exceptional",
                               lattice.from_fractional(Vec3(0.13, 0.21, 0.34)), q, a_values,
                               thresholds));
  rep.cases.push_back(run_case(lattice, "exceptional_b1_half",
                               lattice.from_fractional(Vec3(0.5, 0.0, 0.0)), q, a_values,
                               thresholds));
  rep.pass = std::all_of(rep.cases.begin(), rep.cases.end(),
                         [](const OracleCase& c) { return c.pass; });
  return rep;
}

}  // namespace blochcav
