#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cbs/algebra.hpp"
#include "cbs/liouvillian.hpp"
#include "cbs/spherical.hpp"
#include "cbs/steady_state.hpp"

using namespace cbs;

namespace {

LiouvilleSystem reference_system(double s, double delta, double theta,
                                 double phi, double r12,
                                 InteractionFrame frame) {
  const DriveParams drive =
      DriveParams::from_saturation(s, delta, spherical_unit(+1));
  const PairGeometry geom(theta, phi, r12);
  return build_pair_system(drive, geom, CartesianVec::UnitZ(), frame);
}

}  // namespace

TEST_CASE("Green's matrix inverts the drift generator") {
  const auto sys = reference_system(0.9, -0.3, 0.8, 1.9, 12.0,
                                    InteractionFrame::LaserPhases);
  FactorizedGenerator fact(sys.drift);
  const Eigen::MatrixXcd greens = greens_matrix(sys.drift);
  const Eigen::MatrixXcd residual =
      sys.drift * greens +
      Eigen::MatrixXcd::Identity(kTruncatedSize, kTruncatedSize);
  REQUIRE(residual.cwiseAbs().maxCoeff() < 1e-10);

  // Transposed solves must satisfy the transposed linear system.
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(kTruncatedSize);
  rhs(3) = Complex(0.7, -0.2);
  rhs(200) = Complex(-1.1, 0.4);
  const Eigen::VectorXcd y = fact.solve_transposed(rhs);
  REQUIRE((sys.drift.transpose() * y - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("First interaction order reproduces the weak-coupling coherence") {
  const double s = 0.7;
  const double delta = 0.4;
  const double theta = 0.8;
  const double phi = 1.9;
  const double r12 = 15.0;

  const auto sys = reference_system(s, delta, theta, phi, r12,
                                    InteractionFrame::LaserPhases);
  FactorizedGenerator fact(sys.drift);
  const auto orders = perturbative_orders(fact, sys.exchange, sys.source, 1);

  const PairGeometry geom(theta, phi, r12);
  const SphericalTensor delta_t = geom.projector;
  const Complex dpp = delta_t(sph_index(+1), sph_index(+1));
  const double omega = std::sqrt(2.0 * s * (delta * delta + 1.0));
  const double v = sys.laser_phase_difference;

  // Coherence of one atom driven through the field scattered by its partner:
  // the Rabi phase entering is the partner's.
  const Complex denom =
      2.0 * std::pow(Complex(1.0, -delta), 2) * std::pow(1.0 + s, 2);
  auto expected = [&](double partner_phase) {
    const Complex omega_partner = omega * std::exp(kImag * partner_phase);
    return kImag * std::conj(geom.g) * dpp * omega_partner / denom;
  };

  const auto coh1 = observable_coordinates(sigma(1, 2), 1);
  const auto coh2 = observable_coordinates(sigma(1, 2), 2);
  const Complex got1 = coh1(orders[1]);
  const Complex got2 = coh2(orders[1]);
  const Complex want1 = expected(-v / 2.0);
  const Complex want2 = expected(+v / 2.0);
  REQUIRE(std::abs(got1 - want1) < 1e-12 * std::abs(want1));
  REQUIRE(std::abs(got2 - want2) < 1e-12 * std::abs(want2));
}

TEST_CASE("Cross-implementation reference values at second order") {
  // Frozen from an independent implementation of the same model
  // (same drive, geometry, and frame conventions).
  const auto sys = reference_system(0.7, 0.4, 0.8, 1.9, 15.0,
                                    InteractionFrame::LaserPhases);
  FactorizedGenerator fact(sys.drift);
  const auto orders = perturbative_orders(fact, sys.exchange, sys.source, 2);

  Mat4 pop_sum = sigma(2, 2);
  const auto pop = observable_coordinates(lift(pop_sum, 1) + lift(pop_sum, 2));
  // The constant term carries the conserved identity component, which lives
  // entirely in the zeroth order; higher orders contract with the weights.
  const Complex pop2 = (pop.weights * orders[2]).value();
  REQUIRE(std::abs(pop2.real() - 1.26563494244337596e-04) < 1e-15);
  REQUIRE(std::abs(pop2.imag()) < 1e-15);

  const auto cross = observable_coordinates(kron(sigma(2, 1), sigma(1, 2)));
  const Complex cv = cross(orders[2]);
  const Complex want(-2.64753057253186300e-05, -4.36734418505207306e-05);
  REQUIRE(std::abs(cv - want) < 1e-15);
}

TEST_CASE("Interaction orders scale homogeneously with the coupling") {
  const auto sys = reference_system(1.3, 0.0, 1.1, 0.4, 9.0,
                                    InteractionFrame::LaserPhases);
  FactorizedGenerator fact(sys.drift);
  const auto base = perturbative_orders(fact, sys.exchange, sys.source, 2);
  const auto half =
      perturbative_orders(fact, 0.5 * sys.exchange, sys.source, 2);

  REQUIRE((half[0] - base[0]).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((half[1] - 0.5 * base[1]).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((half[2] - 0.25 * base[2]).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Truncated expansion error falls off as the cube of the coupling") {
  const double theta = std::acos(0.35);
  const double phi = 0.9;
  const double s = 1.0;

  auto residual_at = [&](double r12) {
    const auto sys =
        reference_system(s, 0.0, theta, phi, r12, InteractionFrame::LaserPhases);
    FactorizedGenerator fact(sys.drift);
    const auto orders =
        perturbative_orders(fact, sys.exchange, sys.source, 2);
    const Eigen::VectorXcd truncated = orders[0] + orders[1] + orders[2];
    const Eigen::VectorXcd full =
        full_steady_state(sys.drift, sys.exchange, sys.source);
    return (full - truncated).cwiseAbs().maxCoeff();
  };

  // |g| ~ 1.5/r: increasing r tenfold shrinks the residual ~ a thousandfold.
  const double r0 = residual_at(150.0);
  const double r1 = residual_at(1500.0);
  const double exponent = std::log10(r0 / r1);
  REQUIRE(exponent > 2.7);
  REQUIRE(exponent < 3.3);
}

TEST_CASE("Full steady state yields a physical density matrix") {
  const auto sys = reference_system(1.0, 0.0, 0.7, 2.3, 10.0,
                                    InteractionFrame::LaserPhases);
  const Eigen::VectorXcd x =
      full_steady_state(sys.drift, sys.exchange, sys.source);
  const Mat16 rho = reconstruct_pair_density(x);

  REQUIRE(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-12);
  REQUIRE((rho - rho.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::SelfAdjointEigenSolver<Mat16> es(rho);
  REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("Singular generators are rejected with a conditioning estimate") {
  Eigen::MatrixXcd zero =
      Eigen::MatrixXcd::Zero(kTruncatedSize, kTruncatedSize);
  bool threw = false;
  try {
    FactorizedGenerator fact(zero);
  } catch (const SingularGeneratorError& e) {
    threw = true;
    REQUIRE(e.rcond() < 1e-12);
  }
  REQUIRE(threw);
}
