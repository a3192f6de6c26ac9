#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "blochcav/errors.hpp"
#include "blochcav/lattice.hpp"
#include "doctest.h"

using namespace blochcav;
using std::numbers::pi;

namespace {

// Naive scan over a fixed coefficient box; independent of the ball enumeration.
std::vector<std::array<int, 3>> brute_force_exceptional(const Lattice& lat, const Vec3& k, double tol,
                                                        int range) {
  std::vector<std::array<int, 3>> out;
  for (int i = -range; i <= range; ++i)
    for (int j = -range; j <= range; ++j)
      for (int l = -range; l <= range; ++l) {
        const Vec3 m = i * lat.b[0] + j * lat.b[1] + l * lat.b[2];
        const double m2 = m.squaredNorm();
        if (std::abs(2 * k.dot(m) - m2) <= tol * (1 + m2)) out.push_back({i, j, l});
      }
  return out;
}

std::vector<std::array<int, 3>> coeffs_of(const ExceptionalSet& set) {
  std::vector<std::array<int, 3>> out;
  for (const auto& p : set.points) out.push_back(p.coeffs);
  std::sort(out.begin(), out.end());
  return out;
}

Lattice random_lattice(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> s(0.5, 2.0);
  for (;;) {
    Vec3 e1(s(rng), u(rng), u(rng)), e2(u(rng), s(rng), u(rng)), e3(u(rng), u(rng), s(rng));
    try {
      return make_lattice(e1, e2, e3);
    } catch (const ValidationError&) {
    }
  }
}

}  // namespace

TEST_CASE("make_lattice: cubic period 2 pi gives the standard reciprocal lattice") {
  const auto lat = make_cubic_lattice(2 * pi);
  for (int i = 0; i < 3; ++i) {
    CHECK((lat.b[i] - Vec3::Unit(i)).norm() < 1e-14);
  }
  CHECK(lat.cell_volume == doctest::Approx(std::pow(2 * pi, 3)).epsilon(1e-14));
}

TEST_CASE("make_lattice: unit cube") {
  const auto lat = make_cubic_lattice(1.0);
  for (int i = 0; i < 3; ++i) CHECK((lat.b[i] - 2 * pi * Vec3::Unit(i)).norm() < 1e-13);
  CHECK(lat.cell_volume == doctest::Approx(1.0));
}

TEST_CASE("make_lattice: hexagonal prism duality") {
  const auto lat = make_lattice(Vec3(1, 0, 0), Vec3(0.5, std::sqrt(3.0) / 2, 0), Vec3(0, 0, 1));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expect = i == j ? 2 * pi : 0.0;
      CHECK(std::abs(lat.ell[i].dot(lat.b[j]) - expect) <= 1e-12 * 2 * pi);
    }
  CHECK(lat.cell_volume == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
}

TEST_CASE("make_lattice: degenerate basis is rejected") {
  CHECK_THROWS_WITH_AS(make_lattice(Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)),
                       "degenerate lattice", ValidationError);
  CHECK_THROWS_AS(make_lattice(Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 1)), ValidationError);
}

TEST_CASE("make_lattice: reciprocity and scaling covariance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lat = random_lattice(rng);
    const auto back = make_lattice(lat.b[0], lat.b[1], lat.b[2]);
    for (int i = 0; i < 3; ++i) CHECK((back.b[i] - lat.ell[i]).norm() < 1e-10 * lat.ell[i].norm());

    const double lambda = 2.7;
    const auto scaled = make_lattice(lambda * lat.ell[0], lambda * lat.ell[1], lambda * lat.ell[2]);
    for (int i = 0; i < 3; ++i) CHECK((scaled.b[i] - lat.b[i] / lambda).norm() < 1e-12);

    const Vec3 k = lat.from_fractional(Vec3(0.5, 0.0, 0.0));
    const auto e1 = enumerate_exceptional(lat, k);
    const auto e2 = enumerate_exceptional(scaled, k / lambda);
    CHECK(coeffs_of(e1) == coeffs_of(e2));
  }
}

TEST_CASE("enumerate_exceptional: worked examples on the standard lattice") {
  const auto lat = make_cubic_lattice(2 * pi);
  SUBCASE("X point, order 2") {
    const auto e = enumerate_exceptional(lat, Vec3(0.5, 0, 0));
    REQUIRE(e.order == 2);
    CHECK(e.points[0].coeffs == std::array<int, 3>{0, 0, 0});
    CHECK(e.points[1].coeffs == std::array<int, 3>{1, 0, 0});
  }
  SUBCASE("M point, order 4, zero first then lexicographic") {
    const auto e = enumerate_exceptional(lat, Vec3(0.5, 0.5, 0));
    REQUIRE(e.order == 4);
    CHECK(e.points[0].coeffs == std::array<int, 3>{0, 0, 0});
    CHECK(e.points[1].coeffs == std::array<int, 3>{0, 1, 0});
    CHECK(e.points[2].coeffs == std::array<int, 3>{1, 0, 0});
    CHECK(e.points[3].coeffs == std::array<int, 3>{1, 1, 0});
    // brute-force scan over |m_i| <= 3
    CHECK(brute_force_exceptional(lat, Vec3(0.5, 0.5, 0), 1e-9, 3).size() == 4);
  }
  SUBCASE("generic vector is non-exceptional") {
    const Vec3 k(0.13, 0.21, 0.34);
    const auto e = enumerate_exceptional(lat, k);
    CHECK(e.order == 1);
    CHECK(!e.exceptional());
    CHECK(brute_force_exceptional(lat, k, 1e-9, 3).size() == 1);
  }
  SUBCASE("order 3") {
    const auto e = enumerate_exceptional(lat, Vec3(1.0, 0.25, 0.25));
    CHECK(e.order == 3);
  }
  SUBCASE("type invariant on the squared condition") {
    const auto e = enumerate_exceptional(lat, Vec3(0.5, 0.5, 0.5));
    CHECK(e.order == 8);
    for (const auto& p : e.points) {
      const double m2 = p.vec.squaredNorm();
      CHECK(std::abs(e.k.squaredNorm() - (e.k - p.vec).squaredNorm()) <= e.tolerance * (1 + m2));
      CHECK((p.vec - lat.reciprocal(p.coeffs)).norm() <= 1e-12 * (1 + p.vec.norm()));
    }
  }
}

TEST_CASE("enumerate_exceptional: tolerance must be positive") {
  const auto lat = make_cubic_lattice(2 * pi);
  CHECK_THROWS_AS(enumerate_exceptional(lat, Vec3(0.1, 0, 0), 0.0), ValidationError);
  CHECK_THROWS_AS(enumerate_exceptional(lat, Vec3(0.1, 0, 0), -1e-9), ValidationError);
}

TEST_CASE("enumerate_exceptional: agrees with the naive triple loop") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> frac(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lat = random_lattice(rng);
    Vec3 k = lat.from_fractional(Vec3(frac(rng), frac(rng), frac(rng)));
    if (trial % 2 == 1) {
      // place k on the Bragg plane of a short reciprocal vector
      const std::array<int, 3> c{trial % 3 == 0 ? 1 : 0, trial % 5 == 0 ? -1 : 1, trial % 7 == 0};
      const Vec3 m = lat.reciprocal(c);
      k = 0.5 * m + (k - k.dot(m) / m.squaredNorm() * m) * 0.3;
    }
    const auto fast = coeffs_of(enumerate_exceptional(lat, k));
    auto naive = brute_force_exceptional(lat, k, kDefaultExceptionalTol, 6);
    std::sort(naive.begin(), naive.end());
    CHECK(fast == naive);
    if (trial % 2 == 1) CHECK(fast.size() >= 2);
  }
}

TEST_CASE("distance_to_exceptional") {
  const auto lat = make_cubic_lattice(2 * pi);
  CHECK(distance_to_exceptional(lat, Vec3(0.5, 0, 0), 2.0) == doctest::Approx(0.0));
  CHECK(distance_to_exceptional(lat, Vec3(0.4, 0, 0), 2.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(distance_to_exceptional(lat, Vec3(0, 0, 0), 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(distance_to_exceptional(lat, Vec3(0, 0, 0), 0.5), "empty search",
                       ValidationError);
  CHECK_THROWS_AS(distance_to_exceptional(lat, Vec3(0, 0, 0), 0.0), ValidationError);
}

TEST_CASE("complete_search_radius does not change the minimum when enlarged") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frac(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lat = random_lattice(rng);
    const Vec3 k = lat.from_fractional(Vec3(frac(rng), frac(rng), frac(rng)));
    const double r = complete_search_radius(lat, k);
    CHECK(distance_to_exceptional(lat, k, r) ==
          doctest::Approx(distance_to_exceptional(lat, k, 3 * r)).epsilon(1e-14));
  }
}
