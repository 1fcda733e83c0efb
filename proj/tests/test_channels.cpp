#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "cbs/channels.hpp"
#include "cbs/spherical.hpp"

using namespace cbs;

namespace {

PairGeometry test_geometry() { return PairGeometry(0.9, 2.1, 11.0); }

}  // namespace

TEST_CASE("Channel traits encode the detected operators") {
  // Preserved helicity analyzes the opposite circular unit, which couples
  // to the m = -1 transition; flipped helicity analyzes the driven one.
  const auto& par = channel_traits(Channel::HelicityPreserving);
  const auto& perp = channel_traits(Channel::HelicityFlipped);
  REQUIRE((par.detected_lowering - (-sigma(1, 2))).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((perp.detected_lowering - (-sigma(1, 4))).cwiseAbs().maxCoeff() < 1e-15);

  // Linear-parallel analyzes along the quantization axis (pi transition).
  const auto& lin = channel_traits(Channel::LinearParallel);
  REQUIRE((lin.detected_lowering - sigma(1, 3)).cwiseAbs().maxCoeff() < 1e-15);

  // Round-trip on names.
  for (Channel c : kAllChannels) REQUIRE(parse_channel(channel_name(c)) == c);
  REQUIRE_THROWS_AS(parse_channel("bogus"), std::invalid_argument);

  // Beam and offset axes are orthonormal for every channel.
  for (Channel c : kAllChannels) {
    const auto& t = channel_traits(c);
    REQUIRE(std::abs(t.k_laser.norm() - 1.0) < 1e-15);
    REQUIRE(std::abs(t.offset_axis.norm() - 1.0) < 1e-15);
    REQUIRE(std::abs(t.k_laser.dot(t.offset_axis)) < 1e-15);
  }
}

TEST_CASE("Scalar reference masks all but the circular exchange components") {
  const PairGeometry geom = test_geometry();
  const auto& traits = channel_traits(Channel::ScalarTwoLevel);
  const SphericalTensor masked = channel_projector(traits, geom.projector);

  REQUIRE(std::abs(masked(sph_index(+1), sph_index(-1)) -
                   geom.projector(sph_index(+1), sph_index(-1))) < 1e-15);
  REQUIRE(std::abs(masked(sph_index(-1), sph_index(+1)) -
                   geom.projector(sph_index(-1), sph_index(+1))) < 1e-15);
  double rest = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (!((a == 2 && b == 0) || (a == 0 && b == 2)))
        rest += std::abs(masked(a, b));
  REQUIRE(rest == 0.0);

  // Unmasked channels pass the projector through untouched.
  const auto& open = channel_traits(Channel::HelicityFlipped);
  REQUIRE((channel_projector(open, geom.projector) - geom.projector)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("Backscattered detection direction and interference phase") {
  const PairGeometry geom = test_geometry();
  const auto& traits = channel_traits(Channel::HelicityPreserving);

  const CartesianVec exact = backscattered_direction(traits, 0.0);
  REQUIRE((exact + traits.k_laser).norm() < 1e-15);
  const CartesianVec tilted = backscattered_direction(traits, 0.3);
  REQUIRE(std::abs(tilted.norm() - 1.0) < 1e-15);
  REQUIRE(std::abs(tilted.dot(traits.offset_axis) - std::sin(0.3)) < 1e-15);

  const Complex phase = detection_phase(traits, geom, 0.0);
  REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-15);
  const double expected = -geom.r12 * geom.nhat_cartesian.z();
  REQUIRE(std::abs(phase - std::polar(1.0, expected)) < 1e-14);
}

TEST_CASE("Undriven atoms scatter nothing in any order") {
  const DriveParams drive = DriveParams::from_saturation(0.0, 0.5, spherical_unit(+1));
  const PairGeometry geom = test_geometry();
  const auto res = order_resolved_intensity(Channel::HelicityFlipped, drive, geom, 2);
  for (int n = 0; n <= 2; ++n) {
    REQUIRE(std::abs(res.population[n]) < 1e-14);
    REQUIRE(std::abs(res.pair_coherence[n]) < 1e-14);
    REQUIRE(std::abs(res.amplitude[0][n]) < 1e-14);
    REQUIRE(std::abs(res.amplitude[1][n]) < 1e-14);
  }
}

TEST_CASE("Independent-atom order matches the single-atom reference") {
  const double s = 1.3;
  const DriveParams drive = DriveParams::from_saturation(s, 0.5, spherical_unit(+1));
  const PairGeometry geom = test_geometry();
  const auto ref = single_atom_reference(s);

  // Detector aligned with the driven transition sees both atoms at order 0.
  const auto flipped = order_resolved_intensity(Channel::HelicityFlipped, drive, geom, 0);
  REQUIRE(std::abs(flipped.population[0] - ref.total) < 1e-12);
  const double coherent = std::norm(flipped.amplitude[0][0]) + std::norm(flipped.amplitude[1][0]);
  REQUIRE(std::abs(coherent - ref.elastic) < 1e-12);
  REQUIRE(std::abs(std::abs(flipped.amplitude[0][0]) - std::abs(flipped.amplitude[1][0])) < 1e-13);

  // The crossed-polarized detector is dark without exchange.
  const auto preserved = order_resolved_intensity(Channel::HelicityPreserving, drive, geom, 0);
  REQUIRE(std::abs(preserved.population[0]) < 1e-14);
  REQUIRE(std::abs(preserved.amplitude[0][0]) < 1e-14);

  REQUIRE_THROWS_AS(single_atom_reference(-0.1), std::invalid_argument);
}

TEST_CASE("Physical expectation values are frame independent") {
  const DriveParams drive = DriveParams::from_saturation(0.9, 0.7, spherical_unit(+1));
  const PairGeometry geom = test_geometry();

  for (Channel c : kAllChannels) {
    const auto lab = order_resolved_intensity(c, drive, geom, 2, InteractionFrame::LaserPhases);
    const auto rot = order_resolved_intensity(c, drive, geom, 2, InteractionFrame::PhaseRotated);
    REQUIRE(lab.laser_phase_difference == Catch::Approx(rot.laser_phase_difference));
    for (int n = 0; n <= 2; ++n) {
      REQUIRE(std::abs(lab.population[n] - rot.population[n]) < 1e-12);
      REQUIRE(std::abs(lab.pair_coherence[n] - rot.pair_coherence[n]) < 1e-12);
      REQUIRE(std::abs(lab.amplitude[0][n] - rot.amplitude[0][n]) < 1e-12);
      REQUIRE(std::abs(lab.amplitude[1][n] - rot.amplitude[1][n]) < 1e-12);
    }
  }
}

TEST_CASE("Detected populations are real at every order") {
  const DriveParams drive = DriveParams::from_saturation(2.0, -0.8, spherical_unit(+1));
  const PairGeometry geom(1.2, 0.4, 9.0);
  const auto res = order_resolved_intensity(Channel::HelicityPreserving, drive, geom, 2);
  for (int n = 0; n <= 2; ++n) REQUIRE(std::abs(res.population[n].imag()) < 1e-13);
}
