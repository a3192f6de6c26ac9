#include "blochcav/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blochcav/errors.hpp"

namespace blochcav {

using std::numbers::pi;

void MediumParams::validate() const {
  if (!(a >= 0) || !std::isfinite(a)) throw ValidationError("cavity scale a must be >= 0");
  if (!(q >= 0) || !std::isfinite(q)) throw ValidationError("shape coefficient q must be >= 0");
  if (!(c > 0) || !std::isfinite(c)) throw ValidationError("wave speed c must be positive");
}

double MediumParams::unit_shift() const { return 4.0 * pi * a * q / lattice.cell_volume; }

bool MediumParams::cavity_too_large(double shape_diameter) const {
  return a * shape_diameter > 0.2 * lattice.min_direct_length();
}

std::string to_string(ShiftOrder order) {
  return order == ShiftOrder::OrderA ? "O(a)" : "O(a^2)";
}

ClusterBranch dispersion_nonexceptional(const MediumParams& params, const Vec3& k, double tol) {
  params.validate();
  if (enumerate_exceptional(params.lattice, k, tol).exceptional()) {
    throw ValidationError("exceptional Bloch vector: use dispersion_clusters");
  }
  ClusterBranch br;
  br.index = 1;
  br.k_squared = k.squaredNorm() + params.unit_shift();
  br.omega = params.c * std::sqrt(br.k_squared);
  br.tau = {1.0};
  br.shift_order = ShiftOrder::OrderA;
  br.amplitude_determined = true;
  return br;
}

std::vector<double> helmert_vector(int n, int s) {
  if (n < 1 || s < 1 || s > n) throw ValidationError("Helmert index out of range");
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  if (s == 1) {
    std::fill(v.begin(), v.end(), 1.0 / std::sqrt(double(n)));
    return v;
  }
  const double norm = std::sqrt(double(s) * double(s - 1));
  for (int j = 0; j < s - 1; ++j) v[j] = 1.0 / norm;
  v[s - 1] = -double(s - 1) / norm;
  return v;
}

JSpectrum cluster_J_spectrum(int n) {
  if (n < 1) throw ValidationError("cluster order must be >= 1");
  JSpectrum spec;
  spec.eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
  spec.eigenvalues[0] = n;
  for (int s = 1; s <= n; ++s) spec.eigenvectors.push_back(helmert_vector(n, s));
  return spec;
}

std::vector<ClusterBranch> dispersion_clusters(const MediumParams& params,
                                               const ExceptionalSet& exc) {
  params.validate();
  if (exc.order < 1 || exc.order != static_cast<int>(exc.points.size())) {
    throw ValidationError("inconsistent exceptional set");
  }
  if (exc.order == 1) return {dispersion_nonexceptional(params, exc.k, exc.tolerance)};

  const int n = exc.order;
  const double k2 = exc.k.squaredNorm();
  std::vector<ClusterBranch> out;
  for (int s = 1; s <= n; ++s) {
    ClusterBranch br;
    br.index = s;
    const auto v = helmert_vector(n, s);
    br.tau.assign(v.begin(), v.end());
    if (s == 1) {
      br.k_squared = k2 + n * params.unit_shift();
      br.shift_order = ShiftOrder::OrderA;
      br.amplitude_determined = true;
    } else {
      br.k_squared = k2;  // O(a^2) correction unresolved
      br.shift_order = ShiftOrder::OrderA2;
      br.amplitude_determined = (n == 2);
    }
    br.omega = params.c * std::sqrt(br.k_squared);
    out.push_back(std::move(br));
  }
  return out;
}

CutoffData cutoff(const MediumParams& params, int n) {
  params.validate();
  if (n < 1) throw ValidationError("cluster order must be >= 1");
  const double vol = params.lattice.cell_volume;
  const double aqn = params.a * params.q * n;
  CutoffData cd;
  cd.omega_c = 2.0 * params.c * std::sqrt(pi * aqn / vol);
  cd.lambda_max = aqn > 0 ? std::sqrt(pi * vol / aqn) : std::numeric_limits<double>::infinity();
  return cd;
}

std::vector<std::complex<double>> bloch_field(const ClusterBranch& branch,
                                              const ExceptionalSet& exc,
                                              std::span<const Vec3> points) {
  if (branch.tau.size() != exc.points.size()) {
    throw ValidationError("amplitude vector length does not match cluster order");
  }
  std::vector<std::complex<double>> u;
  u.reserve(points.size());
  for (const auto& x : points) {
    std::complex<double> sum = 0.0;
    for (std::size_t j = 0; j < exc.points.size(); ++j) {
      const double phase = -(exc.k - exc.points[j].vec).dot(x);
      sum += branch.tau[j] * std::polar(1.0, phase);
    }
    u.push_back(sum);
  }
  return u;
}

InfeasibilityReport single_direction_infeasibility(const MediumParams& params,
                                                   const ExceptionalSet& exc) {
  if (exc.order < 2) {
    throw ValidationError("single-direction analysis needs an exceptional Bloch vector");
  }
  const auto branches = dispersion_clusters(params, exc);
  const int n = exc.order;
  const double k2 = exc.k.squaredNorm();

  InfeasibilityReport rep;
  rep.order = n;
  rep.coupling = params.unit_shift() / k2;
  rep.bound = rep.coupling * std::sqrt(double(n - 1)) / n;
  rep.defects.assign(static_cast<std::size_t>(n), {});
  rep.min_defect.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());

  for (int j = 0; j < n; ++j) {
    for (const auto& br : branches) {
      const double two_eps = (br.k_squared - k2) / k2;
      // (2 eps I - beta J) e_j: every entry is -beta, entry j additionally gets 2 eps.
      double sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double entry = (i == j ? two_eps : 0.0) - rep.coupling;
        sq += entry * entry;
      }
      const double defect = std::sqrt(sq);
      rep.defects[j].push_back(defect);
      rep.min_defect[j] = std::min(rep.min_defect[j], defect);
    }
  }
  const double floor_bound = rep.bound * (1.0 - 10.0 * params.a);
  rep.feasible_single_direction = !std::all_of(
      rep.min_defect.begin(), rep.min_defect.end(),
      [&](double d) { return d > 0 && d >= floor_bound; });
  return rep;
}

bool near_exceptional(const MediumParams& params, const Vec3& k) {
  const double shift = params.unit_shift();
  if (!(shift > 0)) return false;
  const double kn = std::max(k.norm(), std::sqrt(shift));
  const double dist =
      distance_to_exceptional(params.lattice, k, complete_search_radius(params.lattice, k));
  return dist < 10.0 * shift / kn;
}

}  // namespace blochcav
