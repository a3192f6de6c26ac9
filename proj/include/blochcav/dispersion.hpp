#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blochcav/lattice.hpp"

namespace blochcav {

/// Periodic medium: lattice, cavity scale a, shape coefficient q (capacitance at unit
/// scale) and wave speed c.
struct MediumParams {
  Lattice lattice;
  double a = 0.0;
  double q = 1.0;
  double c = 1.0;

  /// Throws ValidationError unless a >= 0, q >= 0 and c > 0.
  void validate() const;
  /// O(a) shift of k^2 for a single plane wave: 4 pi a q / |Pi|.
  double unit_shift() const;
  /// True when the scaled cavity is not small compared with the lattice spacing.
  bool cavity_too_large(double shape_diameter) const;
};

enum class ShiftOrder { OrderA, OrderA2 };

std::string to_string(ShiftOrder order);

/// One dispersion branch at a Bloch vector.
struct ClusterBranch {
  int index = 1;             // s, 1-based
  double k_squared = 0.0;    // (omega / c)^2 to O(a)
  double omega = 0.0;
  std::vector<std::complex<double>> tau;  // amplitudes over directions k - m_j
  ShiftOrder shift_order = ShiftOrder::OrderA;
  bool amplitude_determined = true;
};

struct CutoffData {
  double omega_c = 0.0;
  double lambda_max = 0.0;
};

/// Non-exceptional Bloch vector: k^2 = |k|^2 + 4 pi a q / |Pi|.
/// Throws ValidationError("use dispersion_clusters") if k is exceptional.
ClusterBranch dispersion_nonexceptional(const MediumParams& params, const Vec3& k,
                                        double tol = kDefaultExceptionalTol);

/// All n branches at a Bloch vector of order n. Branch 1 is the symmetric cluster with the
/// n-fold shift; the others carry no O(a) shift and a Helmert basis of sum(tau) = 0.
std::vector<ClusterBranch> dispersion_clusters(const MediumParams& params,
                                               const ExceptionalSet& exc);

struct JSpectrum {
  std::vector<double> eigenvalues;                // n, then n - 1 zeros
  std::vector<std::vector<double>> eigenvectors;  // orthonormal, matching order
};

/// Analytic spectrum of the n x n all-ones matrix.
JSpectrum cluster_J_spectrum(int n);

/// s-th Helmert vector of length n (s = 1 is the normalized all-ones vector).
std::vector<double> helmert_vector(int n, int s);

/// omega_c = 2 c sqrt(pi a n q / |Pi|), lambda_max = sqrt(pi |Pi| / (a q n)).
CutoffData cutoff(const MediumParams& params, int n);

/// Leading-order field sum_j tau_j exp(-i (k - m_j) . x).
std::vector<std::complex<double>> bloch_field(const ClusterBranch& branch,
                                              const ExceptionalSet& exc,
                                              std::span<const Vec3> points);

struct InfeasibilityReport {
  int order = 0;
  double coupling = 0.0;  // beta = 4 pi a q / (|k|^2 |Pi|)
  double bound = 0.0;     // beta sqrt(n - 1) / n
  /// defects[j][s]: || (2 eps_s I - beta J) e_j || for coordinate vector j at branch s.
  std::vector<std::vector<double>> defects;
  std::vector<double> min_defect;  // per coordinate vector, over branches
  bool feasible_single_direction = true;
};

/// Checks that no coordinate amplitude vector solves the leading-order cluster equation
/// (2 eps I - beta J) tau = 0 at any branch. Requires order >= 2.
InfeasibilityReport single_direction_infeasibility(const MediumParams& params,
                                                   const ExceptionalSet& exc);

/// Near-exceptional flag for non-exceptional asymptotics: the distance to the nearest Bragg
/// plane is compared with 10 (4 pi a q / |Pi|) / |k|.
bool near_exceptional(const MediumParams& params, const Vec3& k);

}  // namespace blochcav
