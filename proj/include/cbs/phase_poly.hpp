#pragma once

// Laurent polynomials in the two fast geometry phases of an atom pair:
// u = k0 r12 (phase of the radiated field between the atoms) and
// v = k_L . r12 (beam phase difference between the atom positions).
//
// Every perturbative term of the pair state is, for fixed orientation, a
// finite sum of monomials e^{i(a u + b v)} with |a|, |b| <= 2 through
// second order in the exchange.  Tracking the coefficients of these
// monomials exactly lets configuration averages over many wavelengths be
// evaluated by harmonic selection instead of brute-force quadrature.

#include <array>
#include <complex>
#include <stdexcept>

#include "cbs/spherical.hpp"

namespace cbs {

class PhasePoly {
 public:
  static constexpr int kMaxHarmonic = 2;
  static constexpr int kSide = 2 * kMaxHarmonic + 1;

  PhasePoly() = default;

  static PhasePoly monomial(int du, int dv, Complex coeff) {
    PhasePoly p;
    p.at(du, dv) = coeff;
    return p;
  }

  Complex& at(int du, int dv) { return c_[index(du, dv)]; }
  Complex get(int du, int dv) const { return c_[index(du, dv)]; }

  void add(int du, int dv, Complex coeff) { c_[index(du, dv)] += coeff; }

  /// Coefficient-wise complex conjugate; flips both harmonic indices.
  PhasePoly conjugated() const {
    PhasePoly out;
    for (int a = -kMaxHarmonic; a <= kMaxHarmonic; ++a)
      for (int b = -kMaxHarmonic; b <= kMaxHarmonic; ++b)
        out.at(-a, -b) = std::conj(get(a, b));
    return out;
  }

  PhasePoly& operator+=(const PhasePoly& o) {
    for (int i = 0; i < kSide * kSide; ++i) c_[i] += o.c_[i];
    return *this;
  }

  PhasePoly operator*(Complex s) const {
    PhasePoly out = *this;
    for (auto& c : out.c_) c *= s;
    return out;
  }

  /// Product; throws if a nonzero coefficient would leave the tracked
  /// harmonic range.
  PhasePoly operator*(const PhasePoly& o) const {
    PhasePoly out;
    for (int a = -kMaxHarmonic; a <= kMaxHarmonic; ++a)
      for (int b = -kMaxHarmonic; b <= kMaxHarmonic; ++b) {
        const Complex ca = get(a, b);
        if (ca == Complex{0.0, 0.0}) continue;
        for (int e = -kMaxHarmonic; e <= kMaxHarmonic; ++e)
          for (int f = -kMaxHarmonic; f <= kMaxHarmonic; ++f) {
            const Complex cb = o.get(e, f);
            if (cb == Complex{0.0, 0.0}) continue;
            const int na = a + e, nb = b + f;
            if (na < -kMaxHarmonic || na > kMaxHarmonic || nb < -kMaxHarmonic ||
                nb > kMaxHarmonic)
              throw std::logic_error("PhasePoly: product leaves tracked harmonic range");
            out.at(na, nb) += ca * cb;
          }
      }
    return out;
  }

  /// Value at concrete phases.
  Complex eval(double u, double v) const {
    Complex out{0.0, 0.0};
    for (int a = -kMaxHarmonic; a <= kMaxHarmonic; ++a)
      for (int b = -kMaxHarmonic; b <= kMaxHarmonic; ++b) {
        const Complex c = get(a, b);
        if (c != Complex{0.0, 0.0}) out += c * std::polar(1.0, a * u + b * v);
      }
    return out;
  }

  /// Correlation sum_m conj(this_m) * other_{m + (du, dv)}; equals the
  /// (du, dv) coefficient of conjugated() * other without range checks.
  Complex correlate(const PhasePoly& other, int du, int dv) const {
    Complex out{0.0, 0.0};
    for (int a = -kMaxHarmonic; a <= kMaxHarmonic; ++a)
      for (int b = -kMaxHarmonic; b <= kMaxHarmonic; ++b) {
        const int na = a + du, nb = b + dv;
        if (na < -kMaxHarmonic || na > kMaxHarmonic || nb < -kMaxHarmonic || nb > kMaxHarmonic)
          continue;
        const Complex ca = get(a, b);
        if (ca != Complex{0.0, 0.0}) out += std::conj(ca) * other.get(na, nb);
      }
    return out;
  }

 private:
  static int index(int du, int dv) {
    if (du < -kMaxHarmonic || du > kMaxHarmonic || dv < -kMaxHarmonic || dv > kMaxHarmonic)
      throw std::out_of_range("PhasePoly: harmonic index out of range");
    return (du + kMaxHarmonic) * kSide + (dv + kMaxHarmonic);
  }

  std::array<Complex, kSide * kSide> c_{};
};

}  // namespace cbs
