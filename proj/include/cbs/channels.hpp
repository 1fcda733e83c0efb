#pragma once

// Polarization channels of the backscattering geometry and the
// order-resolved detected intensity at a fixed pair configuration.
//
// A channel fixes the injected polarization, the analyzed polarization
// behind the detector, and with them the detected lowering operator
// d = eps_detect^* . D of each atom.  The detected far-field intensity
// along direction k splits into
//   same-atom terms     sum_alpha <d+_alpha d_alpha>
//   interference terms  2 Re{ <d+_1 d_2> e^{i k . r12} }
// and each factor expands order by order in the radiative exchange.
//
// Channel conventions (quantization axis z):
//   helicity channels   beam along +z, circular polarization eps_+1;
//                       preserved helicity analyzes eps_-1, flipped
//                       helicity analyzes eps_+1; detector deviations tilt
//                       the outgoing direction towards x.
//   linear channels     beam along +x, polarization eps_0 (i.e. z);
//                       parallel analysis keeps eps_0, perpendicular
//                       analysis takes y; deviations tilt towards y.
//   scalar reference    an isotropic two-level reduction of the flipped
//                       helicity channel: only the exchange components
//                       that return to the driven transition are kept.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cbs/algebra.hpp"
#include "cbs/liouvillian.hpp"
#include "cbs/spherical.hpp"
#include "cbs/steady_state.hpp"

namespace cbs {

enum class Channel {
  HelicityPreserving,    ///< h || h
  HelicityFlipped,       ///< h perp h
  LinearParallel,        ///< lin || lin
  LinearPerpendicular,   ///< lin perp lin
  ScalarTwoLevel,        ///< isotropic two-level reference
};

inline constexpr std::array<Channel, 5> kAllChannels = {
    Channel::HelicityPreserving, Channel::HelicityFlipped, Channel::LinearParallel,
    Channel::LinearPerpendicular, Channel::ScalarTwoLevel};

inline const char* channel_name(Channel c) {
  switch (c) {
    case Channel::HelicityPreserving: return "hparh";
    case Channel::HelicityFlipped: return "hperph";
    case Channel::LinearParallel: return "linparlin";
    case Channel::LinearPerpendicular: return "linperplin";
    case Channel::ScalarTwoLevel: return "scalar";
  }
  throw std::invalid_argument("channel_name: unknown channel");
}

inline Channel parse_channel(std::string_view name) {
  for (Channel c : kAllChannels)
    if (name == channel_name(c)) return c;
  throw std::invalid_argument("parse_channel: unknown channel '" + std::string(name) + "'");
}

struct ChannelTraits {
  Channel id;
  SphericalVec eps_laser;        ///< injected polarization
  SphericalVec eps_detect;       ///< analyzed polarization
  Mat4 detected_lowering;        ///< d = eps_detect^* . D
  bool masked_exchange;          ///< keep only the +-1 exchange components
  bool background;               ///< order-0 light passes the analyzer
  CartesianVec k_laser;          ///< beam direction
  CartesianVec offset_axis;      ///< detector deviation direction (unit, perp to beam)
};

inline const ChannelTraits& channel_traits(Channel c) {
  static const std::array<ChannelTraits, 5> traits = [] {
    std::array<ChannelTraits, 5> t;
    const auto& low = dipole_lowering_components();
    auto detected = [&low](const SphericalVec& eps) {
      return contract_bilinear(conjugate_coefficients(eps), low);
    };
    const SphericalVec ep = spherical_unit(+1), em = spherical_unit(-1), e0 = spherical_unit(0);
    const SphericalVec ey = from_cartesian(Eigen::Vector3cd{0.0, 1.0, 0.0});
    const CartesianVec z{0.0, 0.0, 1.0}, x{1.0, 0.0, 0.0}, y{0.0, 1.0, 0.0};

    t[0] = {Channel::HelicityPreserving, ep, em, detected(em), false, false, z, x};
    t[1] = {Channel::HelicityFlipped, ep, ep, detected(ep), false, true, z, x};
    t[2] = {Channel::LinearParallel, e0, e0, detected(e0), false, true, x, y};
    t[3] = {Channel::LinearPerpendicular, e0, ey, detected(ey), false, false, x, y};
    t[4] = {Channel::ScalarTwoLevel, ep, ep, detected(ep), true, true, z, x};
    return t;
  }();
  return traits[static_cast<size_t>(c)];
}

/// Transverse-projector sandwich components seen by a channel: the scalar
/// reference keeps only the components coupling the +-1 polarizations.
inline SphericalTensor channel_projector(const ChannelTraits& traits,
                                         const SphericalTensor& projector) {
  if (!traits.masked_exchange) return projector;
  SphericalTensor masked = SphericalTensor::Zero();
  masked(sph_index(+1), sph_index(-1)) = projector(sph_index(+1), sph_index(-1));
  masked(sph_index(-1), sph_index(+1)) = projector(sph_index(-1), sph_index(+1));
  return masked;
}

/// Outgoing direction analyzed at deviation angle theta from exact
/// backscattering, rotated from -k_laser towards the channel offset axis.
inline CartesianVec backscattered_direction(const ChannelTraits& traits, double theta) {
  return -std::cos(theta) * traits.k_laser + std::sin(theta) * traits.offset_axis;
}

/// Interference phase factor e^{i k . r12} for detection along the
/// deviated backscattering direction.
inline Complex detection_phase(const ChannelTraits& traits, const PairGeometry& geom,
                               double theta) {
  const double kr = geom.k0 * geom.r12 * backscattered_direction(traits, theta).dot(geom.nhat_cartesian);
  return std::polar(1.0, kr);
}

/// First-order intensity of the two atoms without exchange, per unit
/// saturated intensity: total s/(1+s) and elastically scattered part
/// s/(1+s)^2.  Whether this light reaches the detector of a given channel
/// is decided by ChannelTraits::background.
struct SingleAtomIntensities {
  double total;
  double elastic;
};

inline SingleAtomIntensities single_atom_reference(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("single_atom_reference: s must be >= 0");
  const double one = 1.0 + s;
  return {s / one, s / (one * one)};
}

/// Expectation values of the detected operators, resolved by perturbative
/// order in the exchange coupling; entries are physical (frame
/// compensation applied internally when the system is built in the
/// phase-rotated frame).
struct OrderResolved {
  std::vector<Complex> population;               ///< sum_alpha <d+_alpha d_alpha> per order
  std::vector<Complex> pair_coherence;           ///< <d+_1 d_2> per order
  std::array<std::vector<Complex>, 2> amplitude; ///< <d_alpha> per order
  double laser_phase_difference = 0.0;
};

inline OrderResolved order_resolved_intensity(Channel channel, const DriveParams& drive,
                                              const PairGeometry& geom, int max_order,
                                              InteractionFrame frame = InteractionFrame::LaserPhases,
                                              double rcond_floor = 1e-12) {
  const ChannelTraits& traits = channel_traits(channel);
  DriveParams dp = drive;
  dp.eps_laser = traits.eps_laser;

  PairGeometry g = geom;
  g.projector = channel_projector(traits, geom.projector);
  LiouvilleSystem sys = build_pair_system(dp, g, traits.k_laser, frame);

  FactorizedGenerator fact(sys.drift, rcond_floor);
  const std::vector<Eigen::VectorXcd> orders =
      perturbative_orders(fact, sys.exchange, sys.source, max_order);

  const Mat4& d = traits.detected_lowering;
  const Mat4 dd = d.adjoint() * d;
  const ObservableCoordinates pop = observable_coordinates(lift(dd, 1) + lift(dd, 2));
  const ObservableCoordinates cross = observable_coordinates(kron(d.adjoint(), d));
  const ObservableCoordinates amp1 = observable_coordinates(d, 1);
  const ObservableCoordinates amp2 = observable_coordinates(d, 2);

  // Phase factors restoring physical expectation values from the
  // phase-rotated frame: one lowering operator on atom alpha picks up
  // e^{i phi_alpha} with phi_1 = +v/2, phi_2 = -v/2.
  const double v = sys.laser_phase_difference;
  Complex reph_cross{1.0, 0.0}, reph_a1{1.0, 0.0}, reph_a2{1.0, 0.0};
  if (frame == InteractionFrame::PhaseRotated) {
    reph_cross = std::polar(1.0, -v);
    reph_a1 = std::polar(1.0, +0.5 * v);
    reph_a2 = std::polar(1.0, -0.5 * v);
  }

  OrderResolved out;
  out.laser_phase_difference = v;
  for (const auto& x : orders) {
    const bool zeroth = out.population.empty();
    // The conserved-component constants belong to order 0 only.
    auto value = [zeroth](const ObservableCoordinates& f, const Eigen::VectorXcd& coords) {
      Complex val = (f.weights * coords).value();
      if (zeroth) val += f.constant;
      return val;
    };
    out.population.push_back(value(pop, x));
    out.pair_coherence.push_back(reph_cross * value(cross, x));
    out.amplitude[0].push_back(reph_a1 * value(amp1, x));
    out.amplitude[1].push_back(reph_a2 * value(amp2, x));
  }
  return out;
}

}  // namespace cbs
