#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "blochcav/dispersion.hpp"
#include "blochcav/errors.hpp"
#include "doctest.h"

using namespace blochcav;
using std::numbers::pi;

namespace {

MediumParams cubic_params(double a, double q = 1.0, double c = 1.0) {
  return MediumParams{make_cubic_lattice(2.0 * pi), a, q, c};
}

Vec3 frac(const Lattice& L, double x, double y, double z) {
  return L.from_fractional(Vec3(x, y, z));
}

double tau_dot(const ClusterBranch& u, const ClusterBranch& v) {
  std::complex<double> s = 0.0;
  for (std::size_t j = 0; j < u.tau.size(); ++j) s += std::conj(u.tau[j]) * v.tau[j];
  return std::abs(s);
}

}  // namespace

TEST_CASE("non-exceptional dispersion") {
  const auto p = cubic_params(0.01);
  const Vec3 k(0.13, 0.21, 0.34);
  const auto br = dispersion_nonexceptional(p, k);
  CHECK(br.k_squared - k.squaredNorm() == doctest::Approx(5.0661e-4).epsilon(1e-4));
  CHECK(br.k_squared - k.squaredNorm() == doctest::Approx(4 * pi * 0.01 / std::pow(2 * pi, 3)));
  CHECK(br.omega == doctest::Approx(std::sqrt(br.k_squared)));
  CHECK(br.index == 1);
  CHECK(br.shift_order == ShiftOrder::OrderA);
  REQUIRE(br.tau.size() == 1);
  CHECK(br.tau[0] == std::complex<double>(1.0, 0.0));

  SUBCASE("a = 0 is the unperturbed medium") {
    const auto b0 = dispersion_nonexceptional(cubic_params(0.0), k);
    CHECK(b0.k_squared == k.squaredNorm());
  }
  SUBCASE("wave speed scales omega") {
    const auto b3 = dispersion_nonexceptional(cubic_params(0.01, 1.0, 3.0), k);
    CHECK(b3.omega == doctest::Approx(3.0 * br.omega).epsilon(1e-14));
  }
  SUBCASE("exceptional input is rejected") {
    CHECK_THROWS_WITH_AS(dispersion_nonexceptional(p, frac(p.lattice, 0.5, 0, 0)),
                         doctest::Contains("use dispersion_clusters"), ValidationError);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(cubic_params(-0.1).validate(), ValidationError);
  CHECK_THROWS_AS(cubic_params(0.01, -1.0).validate(), ValidationError);
  CHECK_THROWS_AS(cubic_params(0.01, 1.0, 0.0).validate(), ValidationError);
  CHECK_NOTHROW(cubic_params(0.01).validate());
  const auto p = cubic_params(0.1);
  CHECK(!p.cavity_too_large(2.0));
  CHECK(p.cavity_too_large(20.0));
}

TEST_CASE("order-2 cluster at (1/2, 0, 0)") {
  const auto p = cubic_params(0.01);
  const auto exc = enumerate_exceptional(p.lattice, frac(p.lattice, 0.5, 0, 0));
  REQUIRE(exc.order == 2);
  const auto brs = dispersion_clusters(p, exc);
  REQUIRE(brs.size() == 2);
  const double k2 = exc.k.squaredNorm();
  CHECK(brs[0].k_squared - k2 == doctest::Approx(1.01321e-3).epsilon(1e-5));
  CHECK(brs[0].shift_order == ShiftOrder::OrderA);
  CHECK(brs[0].amplitude_determined);
  CHECK(brs[1].k_squared == k2);
  CHECK(brs[1].shift_order == ShiftOrder::OrderA2);
  CHECK(brs[1].amplitude_determined);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(brs[1].tau[0].real() == doctest::Approx(r));
  CHECK(brs[1].tau[1].real() == doctest::Approx(-r));
  for (const auto& b : brs)
    for (const auto& t : b.tau) CHECK(t.imag() == 0.0);
}

TEST_CASE("cluster shift is n times the non-exceptional shift") {
  const auto p = cubic_params(0.02, 0.8);
  const double ne_shift = p.unit_shift();
  const Vec3 fracs[] = {{0.5, 0, 0}, {0.5, 0.25, 0.25}, {1, 0.25, 0.25}, {0.5, 0.5, 0},
                        {0, 0.5, 0.5}, {0.5, 0.5, 0.5}};
  const int orders[] = {2, 2, 3, 4, 4, 8};
  for (int i = 0; i < 6; ++i) {
    const auto exc = enumerate_exceptional(p.lattice, frac(p.lattice, fracs[i][0], fracs[i][1], fracs[i][2]));
    REQUIRE(exc.order == orders[i]);
    const auto brs = dispersion_clusters(p, exc);
    REQUIRE(brs.size() == static_cast<std::size_t>(exc.order));
    CHECK(brs[0].k_squared - exc.k.squaredNorm() ==
          doctest::Approx(exc.order * ne_shift).epsilon(1e-12));
  }
}

TEST_CASE("cluster amplitude invariants") {
  const auto p = cubic_params(0.01);
  for (const Vec3 f : {Vec3(0.5, 0.5, 0), Vec3(1, 0.25, 0.25), Vec3(0.5, 0.5, 0.5)}) {
    const auto exc = enumerate_exceptional(p.lattice, frac(p.lattice, f[0], f[1], f[2]));
    const auto brs = dispersion_clusters(p, exc);
    const int n = exc.order;
    CAPTURE(n);
    for (int s = 0; s < n; ++s) {
      CHECK(brs[s].index == s + 1);
      CHECK(tau_dot(brs[s], brs[s]) == doctest::Approx(1.0).epsilon(1e-14));
      for (int t = s + 1; t < n; ++t) CHECK(tau_dot(brs[s], brs[t]) < 1e-14);
      if (s > 0) {
        std::complex<double> sum = 0.0;
        for (const auto& x : brs[s].tau) sum += x;
        CHECK(std::abs(sum) < 1e-14);
        CHECK(brs[s].shift_order == ShiftOrder::OrderA2);
        CHECK(brs[s].amplitude_determined == (n == 2));
      }
    }
    for (const auto& x : brs[0].tau) CHECK(x.real() == doctest::Approx(1.0 / std::sqrt(n)));
  }
}

TEST_CASE("order 1 delegates") {
  const auto p = cubic_params(0.01);
  const Vec3 k(0.13, 0.21, 0.34);
  const auto exc = enumerate_exceptional(p.lattice, k);
  REQUIRE(exc.order == 1);
  const auto brs = dispersion_clusters(p, exc);
  REQUIRE(brs.size() == 1);
  const auto ne = dispersion_nonexceptional(p, k);
  CHECK(brs[0].k_squared == ne.k_squared);
  CHECK(brs[0].omega == ne.omega);
  CHECK(brs[0].tau == ne.tau);
}

TEST_CASE("omega monotone in a for branch 1, flat for s > 1") {
  const auto L = make_cubic_lattice(2.0 * pi);
  const auto exc = enumerate_exceptional(L, frac(L, 0.5, 0.5, 0));
  std::vector<ClusterBranch> prev;
  for (double a : {0.0, 1e-3, 5e-3, 1e-2, 5e-2}) {
    const auto brs = dispersion_clusters(MediumParams{L, a, 1.0, 1.0}, exc);
    if (!prev.empty()) {
      CHECK(brs[0].omega >= prev[0].omega);
      for (std::size_t s = 1; s < brs.size(); ++s) CHECK(brs[s].omega == prev[s].omega);
    }
    prev = brs;
  }
}

TEST_CASE("J spectrum against a dense eigensolver") {
  for (int n = 1; n <= 8; ++n) {
    CAPTURE(n);
    const auto spec = cluster_J_spectrum(n);
    REQUIRE(spec.eigenvalues.size() == static_cast<std::size_t>(n));
    CHECK(spec.eigenvalues[0] == n);
    for (int s = 1; s < n; ++s) CHECK(spec.eigenvalues[s] == 0.0);

    const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // ascending: n - 1 zeros then n
    CHECK(es.eigenvalues()(n - 1) == doctest::Approx(n).epsilon(1e-12));
    for (int s = 0; s < n - 1; ++s) CHECK(std::abs(es.eigenvalues()(s)) < 1e-12);

    Eigen::MatrixXd V(n, n);
    for (int s = 0; s < n; ++s)
      for (int j = 0; j < n; ++j) V(j, s) = spec.eigenvectors[s][j];
    CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd D = V.transpose() * J * V;
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(n, n);
    expect(0, 0) = n;
    CHECK((D - expect).cwiseAbs().maxCoeff() < 1e-12);
    // leading eigenvector spans the same line as the numeric one
    CHECK(std::abs(V.col(0).dot(es.eigenvectors().col(n - 1))) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cluster_J_spectrum(0), ValidationError);
}

TEST_CASE("Helmert vectors") {
  const auto h3 = helmert_vector(4, 3);
  const double nrm = std::sqrt(6.0);
  CHECK(h3[0] == doctest::Approx(1 / nrm));
  CHECK(h3[1] == doctest::Approx(1 / nrm));
  CHECK(h3[2] == doctest::Approx(-2 / nrm));
  CHECK(h3[3] == 0.0);
  const auto h1 = helmert_vector(4, 1);
  for (double x : h1) CHECK(x == doctest::Approx(0.5));
}

TEST_CASE("cutoff") {
  const auto p = cubic_params(0.01);
  const auto c1 = cutoff(p, 1);
  CHECK(c1.omega_c == doctest::Approx(0.022507).epsilon(2e-5));
  CHECK(c1.lambda_max == doctest::Approx(279.16).epsilon(2e-5));
  CHECK(std::abs(c1.omega_c * c1.lambda_max - 2 * pi) <= 1e-12 * 2 * pi);
  const auto c2 = cutoff(p, 2);
  CHECK(c2.omega_c == doctest::Approx(std::sqrt(2.0) * c1.omega_c).epsilon(1e-14));
  CHECK(c2.lambda_max == doctest::Approx(c1.lambda_max / std::sqrt(2.0)).epsilon(1e-14));
  const auto pc = cubic_params(0.01, 1.3, 2.5);
  for (int n : {1, 2, 3, 4, 8}) {
    const auto c = cutoff(pc, n);
    CHECK(std::abs(c.omega_c * c.lambda_max - 2 * pi * 2.5) <= 1e-12 * 2 * pi * 2.5);
  }
  CHECK(std::isinf(cutoff(cubic_params(0.0), 1).lambda_max));
}

TEST_CASE("Bloch field") {
  const auto p = cubic_params(0.01);
  const std::vector<Vec3> origin{Vec3::Zero()};

  const Vec3 k(0.13, 0.21, 0.34);
  const auto e1 = enumerate_exceptional(p.lattice, k);
  const auto b = dispersion_clusters(p, e1);
  CHECK(std::abs(bloch_field(b[0], e1, origin)[0] - 1.0) < 1e-15);

  const auto e2 = enumerate_exceptional(p.lattice, frac(p.lattice, 0.5, 0, 0));
  const auto brs = dispersion_clusters(p, e2);
  CHECK(std::abs(bloch_field(brs[0], e2, origin)[0]) == doctest::Approx(std::sqrt(2.0)));
  CHECK(bloch_field(brs[1], e2, origin)[0] == std::complex<double>(0.0, 0.0));

  // symmetric cluster |u(x)| = sqrt(2) |cos(x / 2)| along the first axis
  const std::vector<Vec3> line{Vec3(0.7, 0, 0), Vec3(2.0, 0.3, -1.0)};
  const auto u = bloch_field(brs[0], e2, line);
  CHECK(std::abs(u[0]) == doctest::Approx(std::sqrt(2.0) * std::abs(std::cos(0.35))));
  CHECK(std::abs(u[1]) == doctest::Approx(std::sqrt(2.0) * std::abs(std::cos(1.0))));

  // direct evaluation of the plane-wave sum
  const Vec3 x(0.3, -1.1, 2.4);
  std::complex<double> ref = 0.0;
  for (std::size_t j = 0; j < e2.points.size(); ++j)
    ref += brs[0].tau[j] * std::exp(std::complex<double>(0.0, -(e2.k - e2.points[j].vec).dot(x)));
  CHECK(std::abs(bloch_field(brs[0], e2, std::vector<Vec3>{x})[0] - ref) < 1e-14);

  for (const Vec3 f : {Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 0.5)}) {
    const auto e = enumerate_exceptional(p.lattice, frac(p.lattice, f[0], f[1], f[2]));
    const auto bs = dispersion_clusters(p, e);
    for (std::size_t s = 1; s < bs.size(); ++s)
      CHECK(std::abs(bloch_field(bs[s], e, origin)[0]) < 1e-15);
  }

  ClusterBranch bad = b[0];
  bad.tau.push_back(1.0);
  CHECK_THROWS_AS(bloch_field(bad, e1, origin), ValidationError);
}

TEST_CASE("single-direction infeasibility") {
  for (double a : {1e-3, 1e-2, 3e-2}) {
    const auto p = cubic_params(a, 0.9);
    for (const Vec3 f : {Vec3(0.5, 0, 0), Vec3(1, 0.25, 0.25), Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 0.5)}) {
      const auto exc = enumerate_exceptional(p.lattice, frac(p.lattice, f[0], f[1], f[2]));
      const int n = exc.order;
      CAPTURE(n);
      const auto rep = single_direction_infeasibility(p, exc);
      const double k2 = exc.k.squaredNorm();
      const double beta = 4 * pi * a * 0.9 / (k2 * p.lattice.cell_volume);
      CHECK(rep.coupling == doctest::Approx(beta).epsilon(1e-14));
      CHECK(rep.feasible_single_direction == false);

      // oracle: explicit pencil per branch
      const auto brs = dispersion_clusters(p, exc);
      const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(n, n);
      for (int j = 0; j < n; ++j) {
        double mn = INFINITY;
        for (int s = 0; s < n; ++s) {
          const double two_eps = (brs[s].k_squared - k2) / k2;
          const Eigen::MatrixXd M = two_eps * Eigen::MatrixXd::Identity(n, n) - beta * J;
          const double d = M.col(j).norm();
          CHECK(rep.defects[j][s] == doctest::Approx(d).epsilon(1e-12));
          CHECK(d > 0.0);
          mn = std::min(mn, d);
        }
        CHECK(rep.min_defect[j] >= beta * std::sqrt(n - 1.0) / n * (1 - 10 * a));
      }
    }
  }
  const auto p = cubic_params(0.01);
  CHECK_THROWS_AS(single_direction_infeasibility(p, enumerate_exceptional(p.lattice, Vec3(0.13, 0.21, 0.34))),
                  ValidationError);
}

TEST_CASE("near-exceptional flag") {
  const auto p = cubic_params(0.01);
  const double d = 10.0 * p.unit_shift() / 0.5;
  CHECK(near_exceptional(p, Vec3(0.5 - 0.1 * d, 0.0, 0.0)));
  CHECK(!near_exceptional(p, Vec3(0.13, 0.21, 0.34)));
}
