#pragma once

// Spherical-basis vector algebra for near-resonant dipole radiation.
//
// Complex 3-vectors are stored by their expansion coefficients a_q in the
// spherical unit basis
//
//   e_{-1} = (x - i y)/sqrt(2),   e_0 = z,   e_{+1} = -(x + i y)/sqrt(2),
//
// indexed q+1 for q in {-1, 0, +1}.  The basis is orthonormal under the
// *bilinear* pairing e_q . e_{q'} = (-1)^q delta_{q,-q'} (no complex
// conjugation), which is the natural contraction when field amplitudes
// rather than intensities are combined.  Conjugation acts on coefficients
// as (a*)_q = (-1)^q conj(a_{-q}).

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace cbs {

using Complex = std::complex<double>;

inline constexpr Complex kImag{0.0, 1.0};

/// Expansion coefficients (a_{-1}, a_0, a_{+1}) of a vector in the
/// spherical basis; component q lives at index q+1.
using SphericalVec = Eigen::Vector3cd;

/// Sandwich components S_{q q'} = e_q . S . e_{q'} of a rank-2 tensor,
/// rows indexed by q+1 and columns by q'+1.  Contracting a tensor with
/// vectors given by expansion coefficients is then a plain matrix
/// sandwich, see contract().
using SphericalTensor = Eigen::Matrix3cd;

using CartesianVec = Eigen::Vector3d;

/// Storage index of spherical component q in {-1, 0, +1}.
constexpr int sph_index(int q) noexcept { return q + 1; }

/// Coefficient vector of the spherical unit vector e_q.
inline SphericalVec spherical_unit(int q) {
  if (q < -1 || q > 1) throw std::invalid_argument("spherical_unit: q must be -1, 0 or +1");
  SphericalVec v = SphericalVec::Zero();
  v[sph_index(q)] = 1.0;
  return v;
}

/// Bilinear dot product a . b = sum_q (-1)^q a_q b_{-q}.
inline Complex bilinear_dot(const SphericalVec& a, const SphericalVec& b) {
  return -a[sph_index(-1)] * b[sph_index(+1)] + a[sph_index(0)] * b[sph_index(0)] -
         a[sph_index(+1)] * b[sph_index(-1)];
}

/// Coefficients of the complex-conjugate vector, (a*)_q = (-1)^q conj(a_{-q}).
inline SphericalVec conjugate_coefficients(const SphericalVec& a) {
  SphericalVec out;
  out[sph_index(-1)] = -std::conj(a[sph_index(+1)]);
  out[sph_index(0)] = std::conj(a[sph_index(0)]);
  out[sph_index(+1)] = -std::conj(a[sph_index(-1)]);
  return out;
}

/// Cartesian components of a vector given by spherical expansion coefficients.
inline Eigen::Vector3cd to_cartesian(const SphericalVec& a) {
  const Complex am = a[sph_index(-1)], a0 = a[sph_index(0)], ap = a[sph_index(+1)];
  const double r = 1.0 / std::sqrt(2.0);
  return {(am - ap) * r, -kImag * (am + ap) * r, a0};
}

/// Spherical expansion coefficients of a (possibly complex) cartesian vector.
inline SphericalVec from_cartesian(const Eigen::Vector3cd& v) {
  const double r = 1.0 / std::sqrt(2.0);
  SphericalVec out;
  out[sph_index(-1)] = (v.x() + kImag * v.y()) * r;
  out[sph_index(0)] = v.z();
  out[sph_index(+1)] = (-v.x() + kImag * v.y()) * r;
  return out;
}

/// Real unit vector with polar angle theta and azimuth phi, as spherical
/// expansion coefficients:
///   c_{-1} = e^{+i phi} sin(theta)/sqrt(2),  c_0 = cos(theta),
///   c_{+1} = -e^{-i phi} sin(theta)/sqrt(2).
inline SphericalVec unit_vector(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double r = 1.0 / std::sqrt(2.0);
  SphericalVec c;
  c[sph_index(-1)] = std::polar(st * r, phi);
  c[sph_index(0)] = ct;
  c[sph_index(+1)] = -std::polar(st * r, -phi);
  return c;
}

inline CartesianVec cartesian_unit_vector(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

/// Bilinear metric eta_{q q'} = e_q . e_{q'}.
inline SphericalTensor metric_tensor() {
  SphericalTensor eta = SphericalTensor::Zero();
  eta(sph_index(-1), sph_index(+1)) = -1.0;
  eta(sph_index(+1), sph_index(-1)) = -1.0;
  eta(sph_index(0), sph_index(0)) = 1.0;
  return eta;
}

/// Sandwich components nu_q = e_q . n of a direction n given by its
/// spherical expansion coefficients.
inline SphericalVec axis_overlaps(const SphericalVec& nhat) {
  SphericalVec nu;
  nu[sph_index(-1)] = -nhat[sph_index(+1)];
  nu[sph_index(0)] = nhat[sph_index(0)];
  nu[sph_index(+1)] = -nhat[sph_index(-1)];
  return nu;
}

/// Transverse projector Delta = 1 - n n for a unit axis n, returned as
/// sandwich components Delta_{q q'} = eta_{q q'} - nu_q nu_{q'}.  It
/// removes the longitudinal part of a field propagating along n:
/// Delta . n = 0 and Delta . Delta = Delta.
inline SphericalTensor transverse_projector(const SphericalVec& nhat) {
  const SphericalVec nu = axis_overlaps(nhat);
  return metric_tensor() - nu * nu.transpose();
}

inline SphericalTensor transverse_projector(double theta, double phi) {
  return transverse_projector(unit_vector(theta, phi));
}

/// Contraction u . S . w of a rank-2 tensor in sandwich components with two
/// vectors given by expansion coefficients.
inline Complex contract(const SphericalTensor& S, const SphericalVec& u, const SphericalVec& w) {
  return u.transpose() * S * w;
}

/// Amplitude of the retarded field that one oscillating dipole radiates
/// onto another at distance r12, in units where the single-atom linewidth
/// is 1:  g = (3i / 2 k0 r12) exp(i k0 r12).  The modulus decays as the
/// inverse distance in wavelength units; the phase winds with k0 r12.
///
/// Throws std::invalid_argument unless k0 * r12 is positive and finite.
inline Complex coupling_constant(double k0, double r12) {
  const double x = k0 * r12;
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::invalid_argument("coupling_constant: k0 * r12 must be positive and finite");
  return (1.5 / x) * Complex{-std::sin(x), std::cos(x)};
}

/// Relative configuration of an atom pair: direction (theta, phi) of the
/// interatomic axis in the quantization frame and separation r12 in units
/// of 1/k0.  Atom 1 sits at +r12/2 along the axis, atom 2 at -r12/2.
struct PairGeometry {
  double theta = 0.0;
  double phi = 0.0;
  double r12 = 1.0;
  double k0 = 1.0;

  SphericalVec nhat;            ///< axis coefficients in the spherical basis
  CartesianVec nhat_cartesian;  ///< the same axis in cartesian components
  Complex g;                    ///< radiative coupling at this separation
  SphericalTensor projector;    ///< transverse projector across the axis

  PairGeometry(double theta_, double phi_, double r12_, double k0_ = 1.0)
      : theta(theta_), phi(phi_), r12(r12_), k0(k0_) {
    nhat = unit_vector(theta, phi);
    nhat_cartesian = cartesian_unit_vector(theta, phi);
    g = coupling_constant(k0, r12);
    projector = transverse_projector(nhat);
  }
};

}  // namespace cbs
