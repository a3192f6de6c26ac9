#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blochcav/lattice.hpp"

namespace blochcav {

/// Parameters of one Ewald-split evaluation of the periodic Helmholtz Green function
/// G(x) = (1/|Pi|) sum_m exp(i (k - m) . x) / (|k - m|^2 - z).
struct LatticeSumContext {
  Lattice lattice;
  Vec3 k = Vec3::Zero();
  double ewald_eta = 0.0;
  double spectral_cut = 0.0;  // minimum radius of the |k - m| ball
  double spatial_cut = 0.0;   // minimum radius of the |R| ball
  double tol = 1e-10;         // relative eta-invariance target
  double decay_exponent = 40.0;  // truncated terms are below exp(-decay_exponent)
};

/// Default splitting parameter sqrt(pi) / |Pi|^(1/3) with cuts matched to it.
LatticeSumContext make_lattice_sum_context(const Lattice& lattice, const Vec3& k,
                                           double tol = 1e-10);

/// Same context with a different splitting parameter; cuts rescaled to keep the decay.
LatticeSumContext with_eta(const LatticeSumContext& ctx, double eta);

/// Single Ewald evaluation of g(k, z) = lim_{x->0} [G(x) - 1/(4 pi |x|)] at ctx.ewald_eta,
/// without the invariance check. Term evaluation is OpenMP-parallel, summation is in a
/// fixed order, so the result is independent of the thread count.
double ewald_green(const LatticeSumContext& ctx, double z);

namespace serial {
double ewald_green(const LatticeSumContext& ctx, double z);
}  // namespace serial

/// g(k, z) checked against the evaluation at 2 eta; cuts are widened and the evaluation
/// retried before giving up. Throws NumericalError("resonant z") or
/// NumericalError("lattice sum not converged").
double regularized_green(const LatticeSumContext& ctx, double z);

/// Bracket (above |k|^2, below the next distinct resonance) containing the shifted root.
std::pair<double, double> default_root_bracket(const LatticeSumContext& ctx);

/// Root of g(k, z) = -1 / (4 pi alpha) in the bracket: bisection, then safeguarded secant.
/// Throws NumericalError("bracket invalid") if f does not change sign.
double oracle_dispersion_root(const LatticeSumContext& ctx, double alpha,
                              std::pair<double, double> bracket);
double oracle_dispersion_root(const LatticeSumContext& ctx, double alpha);

struct ResidueFit {
  double residue = 0.0;     // lim (|k|^2 - z) g as z -> |k|^2 from below
  double pole_count = 0.0;  // residue * |Pi|
  std::vector<double> deltas;
  std::vector<double> samples;
};

/// Linear extrapolation of (|k|^2 - z) g(k, z) at z = |k|^2 - delta to delta -> 0.
ResidueFit fit_pole_residue(const LatticeSumContext& ctx, const std::vector<double>& deltas = {
                                                              1e-3, 1e-4, 1e-5});

/// Coefficient S of shift(alpha) = S alpha + C alpha^2 by least squares.
double fit_linear_coefficient(const std::vector<double>& alpha, const std::vector<double>& shift);

/// Least-squares slope of log(err) against log(a).
double fit_convergence_order(const std::vector<double>& a, const std::vector<double>& err);

struct OracleCase {
  std::string label;
  Vec3 k = Vec3::Zero();
  int order = 1;
  std::vector<double> a;
  std::vector<double> alpha;
  std::vector<double> z_star;
  std::vector<double> z_formula;
  std::vector<double> abs_error;
  std::vector<double> rel_error;  // relative to the oracle shift z* - |k|^2
  double fitted_order = 0.0;      // NaN when errors vanish
  double fitted_slope = 0.0;      // d z* / d alpha at alpha -> 0
  double expected_slope = 0.0;    // 4 pi n / |Pi|
  double pole_count = 0.0;
  int unshifted_branches = 0;     // branches left at |k|^2 by the point model
  bool pass = false;
};

struct OracleReport {
  double q = 0.0;
  std::vector<OracleCase> cases;
  bool pass = false;
};

struct OracleThresholds {
  double min_order = 1.7;
  double slope_rel_tol = 0.02;
  double pole_count_tol = 0.05;
};

/// Compares the closed-form shifts with point-scatterer roots (alpha = a q) for a generic
/// Bloch vector (fractional 0.13, 0.21, 0.34) and the order >= 2 vector b1 / 2.
OracleReport oracle_validation_suite(const Lattice& lattice, double q,
                                     const std::vector<double>& a_values,
                                     const OracleThresholds& thresholds = {});

}  // namespace blochcav
