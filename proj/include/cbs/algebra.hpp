#pragma once

// Orthonormal operator bases for a four-level atom and for a pair of such
// atoms.
//
// The level scheme is a closed dipole transition from one ground state |1>
// to three excited magnetic sublevels |2>, |3>, |4> (m = -1, 0, +1).  All
// 16 single-atom operators are expanded over a basis that is orthonormal
// under the bilinear trace pairing <<A, B>> = Tr[A B^T]:
//
//   index 0..3 :  1/2, mu_1/2, mu_2/2, mu_3/2   (diagonal combinations)
//   index 4..15:  the twelve off-diagonal |k><l| in lexicographic order
//
// Pair operators are tensor products of single-atom basis elements,
// flattened atom-1-major: N = 16*n1 + n2.  Index 0 is the pair identity
// over 4, whose expectation value is a constant of motion (1/4 for a
// unit-trace state); dynamical calculations therefore work with the 255
// remaining coordinates, called "truncated" below.

#include <array>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "cbs/spherical.hpp"

namespace cbs {

using Mat4 = Eigen::Matrix4cd;
using Mat16 = Eigen::Matrix<Complex, 16, 16>;
using Vec16 = Eigen::Matrix<Complex, 16, 1>;
using Vec256 = Eigen::Matrix<Complex, 256, 1>;

inline constexpr int kSingleBasisSize = 16;
inline constexpr int kPairBasisSize = 256;
inline constexpr int kTruncatedSize = 255;

/// Matrix unit sigma_kl = |k><l| on the four atomic levels, 1-based.
inline Mat4 sigma(int k, int l) {
  if (k < 1 || k > 4 || l < 1 || l > 4) throw std::invalid_argument("sigma: level out of range");
  Mat4 m = Mat4::Zero();
  m(k - 1, l - 1) = 1.0;
  return m;
}

/// Traceless diagonal combinations completing the single-atom basis:
///   mu_1 = sigma_22 - sigma_33 + sigma_44 - sigma_11
///   mu_2 = sigma_22 - sigma_33 - sigma_44 + sigma_11
///   mu_3 = sigma_22 + sigma_33 - sigma_44 - sigma_11
inline Mat4 mu(int i) {
  Mat4 m = Mat4::Zero();
  switch (i) {
    case 1: m.diagonal() << -1, 1, -1, 1; break;
    case 2: m.diagonal() << 1, 1, -1, -1; break;
    case 3: m.diagonal() << -1, 1, 1, -1; break;
    default: throw std::invalid_argument("mu: index must be 1, 2 or 3");
  }
  return m;
}

/// Bilinear trace pairing <<A, B>> = Tr[A B^T] = sum_ij A_ij B_ij.
template <typename DerivedA, typename DerivedB>
Complex trace_pairing(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b).sum();
}

/// The 16 single-atom basis operators (see file comment for ordering).
inline const std::array<Mat4, kSingleBasisSize>& single_atom_basis() {
  static const std::array<Mat4, kSingleBasisSize> basis = [] {
    std::array<Mat4, kSingleBasisSize> b;
    b[0] = 0.5 * Mat4::Identity();
    for (int i = 1; i <= 3; ++i) b[i] = 0.5 * mu(i);
    int n = 4;
    for (int k = 1; k <= 4; ++k)
      for (int l = 1; l <= 4; ++l)
        if (k != l) b[n++] = sigma(k, l);
    return b;
  }();
  return basis;
}

/// Index m such that Q_n^T = Q_m in the single-atom basis (diagonal
/// elements are their own partners, |k><l| pairs with |l><k|).
inline int transpose_partner(int n) {
  static const std::array<int, kSingleBasisSize> table = [] {
    std::array<int, kSingleBasisSize> t{};
    const auto& basis = single_atom_basis();
    for (int i = 0; i < kSingleBasisSize; ++i) {
      const Mat4 target = basis[i].transpose();
      int match = -1;
      for (int j = 0; j < kSingleBasisSize; ++j)
        if ((basis[j] - target).cwiseAbs().maxCoeff() < 1e-14) { match = j; break; }
      if (match < 0) throw std::logic_error("transpose_partner: basis is not transpose-closed");
      t[i] = match;
    }
    return t;
  }();
  if (n < 0 || n >= kSingleBasisSize) throw std::invalid_argument("transpose_partner: bad index");
  return table[n];
}

/// Expansion coefficients c_n = <<op, Q_n>> of a single-atom operator.
inline Vec16 single_coefficients(const Mat4& op) {
  const auto& basis = single_atom_basis();
  Vec16 c;
  for (int n = 0; n < kSingleBasisSize; ++n) c[n] = trace_pairing(op, basis[n]);
  return c;
}

inline Mat4 from_single_coefficients(const Vec16& c) {
  const auto& basis = single_atom_basis();
  Mat4 op = Mat4::Zero();
  for (int n = 0; n < kSingleBasisSize; ++n) op += c[n] * basis[n];
  return op;
}

/// Kronecker product with atom 1 as the left (major) factor.
inline Mat16 kron(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

/// Embed a single-atom operator into the pair space on the given atom (1 or 2).
inline Mat16 lift(const Mat4& op, int atom) {
  if (atom == 1) return kron(op, Mat4::Identity());
  if (atom == 2) return kron(Mat4::Identity(), op);
  throw std::invalid_argument("lift: atom must be 1 or 2");
}

/// Flattened pair-basis index, atom-1-major.
constexpr int pair_index(int n1, int n2) noexcept { return kSingleBasisSize * n1 + n2; }

constexpr std::pair<int, int> pair_unindex(int N) noexcept {
  return {N / kSingleBasisSize, N % kSingleBasisSize};
}

/// The 256 pair basis operators P_N = Q_{n1} (x) Q_{n2}.
inline const std::array<Mat16, kPairBasisSize>& pair_basis() {
  static const std::array<Mat16, kPairBasisSize> basis = [] {
    std::array<Mat16, kPairBasisSize> b;
    const auto& single = single_atom_basis();
    for (int n1 = 0; n1 < kSingleBasisSize; ++n1)
      for (int n2 = 0; n2 < kSingleBasisSize; ++n2)
        b[pair_index(n1, n2)] = kron(single[n1], single[n2]);
    return b;
  }();
  return basis;
}

/// Expansion coefficients of a pair operator over the 256-element basis.
inline Vec256 pair_coefficients(const Mat16& op) {
  const auto& basis = pair_basis();
  Vec256 c;
  for (int N = 0; N < kPairBasisSize; ++N) c[N] = trace_pairing(op, basis[N]);
  return c;
}

/// Linear functional evaluating an operator expectation value from the 255
/// truncated pair coordinates x_N = <P_{N+1}>.  The conserved identity
/// component contributes the state-independent `constant`.
struct ObservableCoordinates {
  Complex constant{0.0, 0.0};
  Eigen::Matrix<Complex, 1, Eigen::Dynamic> weights;  // size 255

  Complex operator()(const Eigen::VectorXcd& x) const {
    if (x.size() != kTruncatedSize)
      throw std::invalid_argument("ObservableCoordinates: expected 255 coordinates");
    return constant + (weights * x).value();
  }
};

/// Functional for an arbitrary pair operator.
inline ObservableCoordinates observable_coordinates(const Mat16& op) {
  const Vec256 c = pair_coefficients(op);
  ObservableCoordinates f;
  f.constant = 0.25 * c[0];
  f.weights = c.tail(kTruncatedSize).transpose();
  return f;
}

/// Functional for a single-atom operator acting on the given atom (1 or 2).
inline ObservableCoordinates observable_coordinates(const Mat4& op, int atom) {
  return observable_coordinates(lift(op, atom));
}

/// Rebuild the pair density matrix from the truncated coordinates.  Uses
/// rho = sum_N <P_N^T> P_N, where the transpose partner of each basis
/// element supplies the expansion coefficient.
inline Mat16 reconstruct_pair_density(const Eigen::VectorXcd& x) {
  if (x.size() != kTruncatedSize)
    throw std::invalid_argument("reconstruct_pair_density: expected 255 coordinates");
  const auto& basis = pair_basis();
  Mat16 rho = Mat16::Zero();
  for (int N = 0; N < kPairBasisSize; ++N) {
    const auto [n1, n2] = pair_unindex(N);
    const int M = pair_index(transpose_partner(n1), transpose_partner(n2));
    const Complex coeff = (M == 0) ? Complex{0.25, 0.0} : x[M - 1];
    rho += coeff * basis[N];
  }
  return rho;
}

}  // namespace cbs
