#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cbs/average.hpp"
#include "cbs/spherical.hpp"

using namespace cbs;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("spherical basis vectors have the standard cartesian forms") {
  const double r = 1.0 / std::sqrt(2.0);
  const Eigen::Vector3cd em = to_cartesian(spherical_unit(-1));
  const Eigen::Vector3cd e0 = to_cartesian(spherical_unit(0));
  const Eigen::Vector3cd ep = to_cartesian(spherical_unit(+1));
  REQUIRE((em - Eigen::Vector3cd(r, -kImag * r, 0.0)).norm() < 1e-15);
  REQUIRE((e0 - Eigen::Vector3cd(0.0, 0.0, 1.0)).norm() < 1e-15);
  REQUIRE((ep - Eigen::Vector3cd(-r, -kImag * r, 0.0)).norm() < 1e-15);
}

TEST_CASE("bilinear pairing matches the metric") {
  const SphericalTensor eta = metric_tensor();
  for (int q = -1; q <= 1; ++q)
    for (int p = -1; p <= 1; ++p) {
      const Complex dot = bilinear_dot(spherical_unit(q), spherical_unit(p));
      REQUIRE(std::abs(dot - eta(sph_index(q), sph_index(p))) < 1e-15);
      const Complex expected = (q + p == 0) ? Complex(q == 0 ? 1.0 : -1.0) : Complex(0.0);
      REQUIRE(std::abs(dot - expected) < 1e-15);
    }
}

TEST_CASE("conjugation and cartesian round trips") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    SphericalVec a;
    for (int k = 0; k < 3; ++k) a[k] = Complex(u(rng), u(rng));
    REQUIRE((from_cartesian(to_cartesian(a)) - a).norm() < 1e-14);
    const Eigen::Vector3cd conj_direct = to_cartesian(a).conjugate();
    REQUIRE((to_cartesian(conjugate_coefficients(a)) - conj_direct).norm() < 1e-14);
    // bilinear dot of a vector with its own conjugate gives the squared norm
    const Complex n2 = bilinear_dot(conjugate_coefficients(a), a);
    REQUIRE(std::abs(n2 - Complex(to_cartesian(a).squaredNorm())) < 1e-14);
  }
}

TEST_CASE("direction coefficients agree with the cartesian direction") {
  for (double theta : {0.0, 0.4, 1.3, 2.8})
    for (double phi : {0.0, 0.9, 4.2}) {
      const Eigen::Vector3cd c = to_cartesian(unit_vector(theta, phi));
      const CartesianVec r = cartesian_unit_vector(theta, phi);
      REQUIRE(std::abs(c.x() - r.x()) < 1e-15);
      REQUIRE(std::abs(c.y() - r.y()) < 1e-15);
      REQUIRE(std::abs(c.z() - r.z()) < 1e-15);
      REQUIRE(c.imag().norm() < 1e-15);
    }
}

TEST_CASE("transverse projector is idempotent and kills the axis") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uc(-1.0, 1.0), up(0.0, 2.0 * kPi);
  const SphericalTensor eta = metric_tensor();
  for (int i = 0; i < 1000; ++i) {
    const double theta = std::acos(uc(rng)), phi = up(rng);
    const SphericalVec n = unit_vector(theta, phi);
    const SphericalTensor d = transverse_projector(n);
    REQUIRE((d * eta * d - d).norm() < 1e-14);
    REQUIRE((d * n).norm() < 1e-14);
  }
}

TEST_CASE("projector sandwich components at a reference orientation") {
  const double theta = 0.7, phi = 1.1;
  const double st = std::sin(theta), ct = std::cos(theta);
  const SphericalTensor d = transverse_projector(theta, phi);
  const Complex dpp = d(sph_index(+1), sph_index(+1));
  const Complex dpm = d(sph_index(+1), sph_index(-1));
  const Complex dp0 = d(sph_index(+1), sph_index(0));
  const Complex d00 = d(sph_index(0), sph_index(0));
  REQUIRE(std::abs(dpp - (-0.5 * st * st * std::polar(1.0, 2.0 * phi))) < 1e-15);
  REQUIRE(std::abs(dpm - Complex(-1.0 + 0.5 * st * st)) < 1e-15);
  REQUIRE(std::abs(dp0 - st * ct / std::sqrt(2.0) * std::polar(1.0, phi)) < 1e-15);
  REQUIRE(std::abs(d00 - Complex(st * st)) < 1e-15);
}

TEST_CASE("radiated coupling amplitude") {
  SECTION("unit modulus where the envelope crosses one") {
    REQUIRE(std::abs(std::abs(coupling_constant(1.0, 1.5)) - 1.0) < 1e-15);
  }
  SECTION("far-field magnitude and phase") {
    const double x = 2.0 * kPi * 1e3;
    const Complex g = coupling_constant(1.0, x);
    REQUIRE(std::abs(std::abs(g) - 1.5 / x) < 1e-18);
    REQUIRE(std::abs(g - kImag * (1.5 / x)) < 1e-15);  // whole turns: pure quarter phase
  }
  SECTION("wavenumber and separation enter through the product") {
    REQUIRE(std::abs(coupling_constant(2.0, 5.0) - coupling_constant(1.0, 10.0)) < 1e-15);
  }
  SECTION("rejects non-positive or non-finite separations") {
    REQUIRE_THROWS_AS(coupling_constant(0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(coupling_constant(1.0, -2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(coupling_constant(1.0, std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
  }
}

TEST_CASE("orientation averages of projector components") {
  // Quadrature done by hand here, independent of configuration_average.
  std::vector<double> xs, ws;
  gauss_legendre(24, xs, ws);
  const int nphi = 24;
  struct Entry {
    int qa, qb;
    double expected;
  };
  for (const Entry e : {Entry{+1, +1, 2.0 / 15.0}, Entry{+1, -1, 7.0 / 15.0},
                        Entry{+1, 0, 1.0 / 15.0}, Entry{0, 0, 8.0 / 15.0}}) {
    double acc = 0.0;
    for (int i = 0; i < 24; ++i)
      for (int j = 0; j < nphi; ++j) {
        const SphericalTensor d = transverse_projector(std::acos(xs[i]), 2.0 * kPi * j / nphi);
        acc += ws[i] / 2.0 / nphi * std::norm(d(sph_index(e.qa), sph_index(e.qb)));
      }
    REQUIRE(std::abs(acc - e.expected) < 1e-12);
  }
}

TEST_CASE("pair geometry bundles axis, coupling and projector") {
  const PairGeometry geom(0.6, 2.0, 25.0);
  REQUIRE((geom.nhat - unit_vector(0.6, 2.0)).norm() < 1e-15);
  REQUIRE(std::abs(geom.nhat_cartesian.norm() - 1.0) < 1e-15);
  REQUIRE(std::abs(geom.g - coupling_constant(1.0, 25.0)) < 1e-15);
  REQUIRE((geom.projector * geom.nhat).norm() < 1e-14);
}
