#pragma once

// Closed-form reference curves for the configuration-averaged intensities
// at resonant drive (delta = 0), obtained by adiabatically eliminating the
// fast optical phases and performing the orientation average analytically.
// All are exact to second order in the radiative coupling; the common
// factor |g|^2 of the double-scattering terms is passed in explicitly as
// `gt2`.  Detunings enter only where noted.  Units: gamma = 1.

#include <cmath>
#include <stdexcept>

#include "cbs/channels.hpp"

namespace cbs {
namespace analytic {

/// Numerator polynomial of the interference peak (helicity-preserving).
inline double R1(double s) {
  return (2.0 / 9.0) * (6912.0 * s + 3168.0 * s * s + 264.0 * s * s * s + 20.0 * s * s * s * s +
                        s * s * s * s * s);
}

/// Numerator polynomial of the ladder term (helicity-preserving).
inline double R2(double s) {
  return (1.0 / 3.0) *
         (1152.0 * s + 528.0 * s * s + 132.0 * s * s * s + 7.0 * s * s * s * s);
}

/// Shared denominator polynomial.
inline double P(double s) {
  return (1.0 + s) * (1.0 + s) * (12.0 + s) * (32.0 + 20.0 * s + s * s);
}

inline double F1(double s) {
  const double u = 1.0 + s;
  return (36.0 * s + 3.0 * s * s - 27.0 * s * s * s - 19.0 * s * s * s * s -
          s * s * s * s * s) /
         (12.0 * std::pow(u, 5) * (3.0 + s));
}

inline double F2(double s) {
  return -4.0 * s * s * (288.0 + 132.0 * s + 23.0 * s * s + s * s * s) /
         (3.0 * (1.0 + s) * P(s));
}

inline double F3(double s) {
  const double u = 1.0 + s;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s, s6 = s5 * s, s7 = s6 * s;
  return (324.0 * s + 540.0 * s2 + 450.0 * s3 + 219.0 * s4 + 85.0 * s5 + 29.0 * s6 + s7) /
         (36.0 * std::pow(u, 6) * (3.0 + s) * (3.0 + s));
}

inline double F4(double s) {
  const double u = 1.0 + s;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  return (-36.0 * s2 - 39.0 * s3 - 14.0 * s4 + s5) / (3.0 * std::pow(u, 6) * (3.0 + s));
}

inline double F5(double s) {
  const double u = 1.0 + s;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s, s6 = s5 * s;
  return (-72.0 * s2 - 51.0 * s3 - s4 + 3.0 * s5 + s6) / (12.0 * std::pow(u, 6) * (3.0 + s));
}

/// Enhancement factor of the helicity-preserving channel at delta = 0.
inline double alpha_closed(double s) { return 1.0 + R1(s) / ((4.0 + s) * R2(s)); }

/// Angular profile of the helicity-preserving interference term: the
/// leading parabola in the scaled deviation k l theta.
inline constexpr double kCrossedIntercept = 2.0 / 15.0;
inline constexpr double kCrossedCurvature = -1.0 / 35.0;

/// Helicity-preserving interference term at deviation angle theta
/// (kl_theta = k l theta), valid to O((kl_theta)^2).
inline double hparh_crossed(double s, double kl_theta, double gt2) {
  return gt2 * R1(s) / ((4.0 + s) * P(s)) *
         (kCrossedIntercept + kCrossedCurvature * kl_theta * kl_theta);
}

/// Elastic double-scattering intensity of the helicity-preserving channel;
/// ladder and interference parts coincide at every s and detuning.
inline double hparh_elastic(double s, double delta, double gt2) {
  const double u = 1.0 + s;
  return (2.0 / 15.0) * gt2 / (1.0 + delta * delta) * s / (u * u * u * u);
}

struct SecondOrderCurves {
  double L2_tot;
  double C2_tot0;
  double L2_el;
  double C2_el0;
};

/// Resonant (delta = 0) reference curves for all five channels.
inline SecondOrderCurves channel_curves(Channel c, double s, double gt2) {
  const double u = 1.0 + s;
  const double el_base = (s + s * s * s) / std::pow(u, 6);
  const double cr_base = s / std::pow(u, 6);
  SecondOrderCurves out{};
  switch (c) {
    case Channel::HelicityPreserving:
      out.L2_tot = 2.0 * gt2 * R2(s) / (15.0 * P(s));
      out.C2_tot0 = (2.0 / 15.0) * gt2 * R1(s) / ((4.0 + s) * P(s));
      out.L2_el = hparh_elastic(s, 0.0, gt2);
      out.C2_el0 = out.L2_el;
      return out;
    case Channel::LinearPerpendicular: {
      SecondOrderCurves h = channel_curves(Channel::HelicityPreserving, s, gt2);
      return {0.5 * h.L2_tot, 0.5 * h.C2_tot0, 0.5 * h.L2_el, 0.5 * h.C2_el0};
    }
    case Channel::HelicityFlipped:
      out.L2_tot = (gt2 / 15.0) * (7.0 * F1(s) + 3.0 * F2(s));
      out.C2_tot0 = (7.0 / 15.0) * gt2 * F3(s);
      out.L2_el = (7.0 / 15.0) * gt2 * (el_base + F4(s) + (6.0 / 7.0) * F2(s) / u);
      out.C2_el0 = (7.0 / 15.0) * gt2 * (cr_base + F5(s));
      return out;
    case Channel::LinearParallel:
      out.L2_tot = (gt2 / 15.0) * (8.0 * F1(s) + 2.0 * F2(s));
      out.C2_tot0 = (8.0 / 15.0) * gt2 * F3(s);
      out.L2_el = (8.0 / 15.0) * gt2 * (el_base + F2(s) / (2.0 * u) + F4(s));
      out.C2_el0 = (8.0 / 15.0) * gt2 * (cr_base + F5(s));
      return out;
    case Channel::ScalarTwoLevel:
      out.L2_tot = (7.0 / 15.0) * gt2 * F1(s);
      out.C2_tot0 = (7.0 / 15.0) * gt2 * F3(s);
      out.L2_el = (7.0 / 15.0) * gt2 * (el_base + F4(s));
      out.C2_el0 = (7.0 / 15.0) * gt2 * (cr_base + F5(s));
      return out;
  }
  throw std::domain_error("channel_curves: unknown channel");
}

/// Known weak-saturation expansions I ~ A s (1 - r s): returns the ratio r
/// of the quadratic to the linear coefficient.  Available for the
/// helicity-preserving totals and the scalar model's totals and elastic
/// parts; other combinations have no tabulated expansion.
inline double small_s_quadratic_ratio(Channel c, bool elastic, bool crossed) {
  if (c == Channel::HelicityPreserving && !elastic) return crossed ? 5.0 / 2.0 : 9.0 / 4.0;
  if (c == Channel::ScalarTwoLevel && !elastic) return crossed ? 5.0 : 21.0 / 4.0;
  if (c == Channel::ScalarTwoLevel && elastic) return crossed ? 8.0 : 10.0;
  throw std::domain_error("small_s_quadratic_ratio: no tabulated expansion");
}

}  // namespace analytic
}  // namespace cbs
