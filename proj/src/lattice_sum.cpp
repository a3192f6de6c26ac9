#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "blochcav/errors.hpp"
#include "blochcav/oracle.hpp"

namespace blochcav {

namespace {

using std::numbers::pi;

// Truncation radii actually used for a given z.
struct Cuts {
  double spectral;
  double spatial;
};

Cuts effective_cuts(const LatticeSumContext& ctx, double z) {
  const double eta = ctx.ewald_eta, e = ctx.decay_exponent;
  const double zp = std::max(z, 0.0);
  Cuts c;
  // exp(-(|k-m|^2 - z) / (4 eta^2)) < exp(-e)
  c.spectral = std::max({ctx.spectral_cut, std::sqrt(zp + 4.0 * eta * eta * e),
                         2.02 * std::sqrt(zp)});
  // exp(-r^2 eta^2 + z / (4 eta^2)) < exp(-e)
  c.spatial = std::max(ctx.spatial_cut, std::sqrt(e + zp / (4.0 * eta * eta)) / eta);
  return c;
}

// (1 / (2 pi^1.5)) * integral_eta^inf exp(-r^2 t^2 + z / (4 t^2)) dt
double screened_kernel(double r, double z, double eta) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [=](double t) { return std::exp(-r * r * t * t + z / (4.0 * t * t)); };
  const double val = integrator.integrate(f, eta, std::numeric_limits<double>::infinity(), 1e-14);
  return val / (2.0 * std::pow(pi, 1.5));
}

// lim_{r->0} [screened_kernel(r) - 1 / (4 pi r)]
double self_term(double z, double eta) {
  const double x = z / (4.0 * eta * eta);
  double sum = 0.0, power = 1.0;  // x^j / j!
  for (int j = 1; j < 400; ++j) {
    power *= x / j;
    const double term = power / (2.0 * j - 1.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::max(1.0, std::abs(sum)) && j > 2) break;
  }
  return (eta * sum - eta) / (2.0 * std::pow(pi, 1.5));
}

struct Terms {
  std::vector<double> spectral_a;   // |k - m|^2 - z
  std::vector<double> spatial_r;    // distinct |R| > 0
  std::vector<double> spatial_cos;  // sum of cos(k . R) over each shell
};

Terms collect_terms(const LatticeSumContext& ctx, double z) {
  const Cuts cuts = effective_cuts(ctx, z);
  Terms t;
  const double kn = ctx.k.norm();
  for (const auto& p : reciprocal_points_in_ball(ctx.lattice, kn + cuts.spectral)) {
    const double a = (ctx.k - p.vec).squaredNorm() - z;
    if ((ctx.k - p.vec).norm() > cuts.spectral) continue;
    if (std::abs(a) < 1e-10 * (1.0 + std::abs(z))) throw NumericalError("resonant z");
    t.spectral_a.push_back(a);
  }
  std::vector<std::pair<double, double>> shells;  // (|R|, cos(k.R))
  for (const auto& R : direct_points_in_ball(ctx.lattice, cuts.spatial)) {
    const double r = R.norm();
    if (r == 0.0) continue;
    shells.emplace_back(r, std::cos(ctx.k.dot(R)));
  }
  std::sort(shells.begin(), shells.end());
  for (const auto& [r, cs] : shells) {
    if (!t.spatial_r.empty() && std::abs(r - t.spatial_r.back()) <= 1e-14 * r) {
      t.spatial_cos.back() += cs;
    } else {
      t.spatial_r.push_back(r);
      t.spatial_cos.push_back(cs);
    }
  }
  return t;
}

double combine(const LatticeSumContext& ctx, double z, const Terms& t,
               const std::vector<double>& spectral, const std::vector<double>& kernel) {
  double spec = 0.0;
  for (double v : spectral) spec += v;
  double real = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) real += t.spatial_cos[i] * kernel[i];
  return spec / ctx.lattice.cell_volume + real + self_term(z, ctx.ewald_eta);
}

}  // namespace

LatticeSumContext make_lattice_sum_context(const Lattice& lattice, const Vec3& k, double tol) {
  if (!(tol > 0)) throw ValidationError("lattice-sum tolerance must be positive");
  LatticeSumContext ctx;
  ctx.lattice = lattice;
  ctx.k = k;
  ctx.tol = tol;
  ctx.ewald_eta = std::sqrt(pi) / std::cbrt(lattice.cell_volume);
  return with_eta(ctx, ctx.ewald_eta);
}

LatticeSumContext with_eta(const LatticeSumContext& ctx, double eta) {
  if (!(eta > 0)) throw ValidationError("Ewald parameter must be positive");
  LatticeSumContext out = ctx;
  out.ewald_eta = eta;
  out.spectral_cut = 2.0 * eta * std::sqrt(out.decay_exponent);
  out.spatial_cut = std::sqrt(out.decay_exponent) / eta;
  return out;
}

double ewald_green(const LatticeSumContext& ctx, double z) {
  const Terms t = collect_terms(ctx, z);
  const double eta = ctx.ewald_eta;
  const auto ns = static_cast<long>(t.spectral_a.size());
  const auto nr = static_cast<long>(t.spatial_r.size());
  std::vector<double> spectral(t.spectral_a.size()), kernel(t.spatial_r.size());
#pragma omp parallel
  {
#pragma omp for schedule(static) nowait
    for (long i = 0; i < ns; ++i) {
      const double a = t.spectral_a[i];
      spectral[i] = std::exp(-a / (4.0 * eta * eta)) / a;
    }
#pragma omp for schedule(dynamic, 4)
    for (long i = 0; i < nr; ++i) kernel[i] = screened_kernel(t.spatial_r[i], z, eta);
  }
  return combine(ctx, z, t, spectral, kernel);
}

namespace serial {

double ewald_green(const LatticeSumContext& ctx, double z) {
  const Terms t = collect_terms(ctx, z);
  const double eta = ctx.ewald_eta;
  std::vector<double> spectral, kernel;
  for (double a : t.spectral_a) spectral.push_back(std::exp(-a / (4.0 * eta * eta)) / a);
  for (double r : t.spatial_r) kernel.push_back(screened_kernel(r, z, eta));
  return combine(ctx, z, t, spectral, kernel);
}

}  // namespace serial

double regularized_green(const LatticeSumContext& ctx, double z) {
  if (!std::isfinite(z)) throw ValidationError("z must be finite");
  LatticeSumContext base = ctx;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const double g1 = ewald_green(base, z);
    const double g2 = ewald_green(with_eta(base, 2.0 * base.ewald_eta), z);
    if (std::abs(g1 - g2) <= base.tol * (1.0 + std::abs(g1))) return g1;
    base.decay_exponent *= 1.5;
    base = with_eta(base, base.ewald_eta);
  }
  throw NumericalError("lattice sum not converged");
}

}  // namespace blochcav
