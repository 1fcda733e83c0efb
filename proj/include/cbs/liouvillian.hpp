#pragma once

// Generators of the driven-dissipative dynamics, written in the adjoint
// (observable) picture: for any operator Q, d<Q>/dt = <L(Q)>.
//
// Single atom: a monochromatic laser of Rabi frequency Omega and detuning
// delta drives the closed |1> -> {|2>,|3>,|4>} dipole transition; decay at
// rate gamma returns all excited population to the ground state through
// the three polarization components of the dipole operator.
//
// Atom pair: two identical atoms additionally exchange photons.  The
// exchange generator is linear in the radiative coupling g(k0 r12) and in
// the transverse projector across the interatomic axis, and splits into
// four structural parts, two proportional to g and two to conj(g).  For
// efficiency the parts are precomputed once per process as 255x255
// matrices for each of the nine projector components; assembling the
// exchange generator for a concrete geometry is then a weighted sum.
//
// Two equivalent frames are supported for the laser phases. In
// `LaserPhases` each atom is driven with the phase the beam accumulates at
// its position (+-v/2 for v = k_L . r12); expectation values are the
// physical ones.  In `PhaseRotated` both atoms see the same drive phase
// and the exchange parts carry e^{-+iv} instead; observables involving an
// odd number of raising/lowering operators per atom must be rephased by
// the caller (see channels.hpp helpers).

#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "cbs/algebra.hpp"
#include "cbs/spherical.hpp"

namespace cbs {

/// Spherical components of the lowering part of the atomic dipole:
/// D_{-1} = -sigma_12, D_0 = sigma_13, D_{+1} = -sigma_14.
inline const std::array<Mat4, 3>& dipole_lowering_components() {
  static const std::array<Mat4, 3> d = {-sigma(1, 2), sigma(1, 3), -sigma(1, 4)};
  return d;
}

/// Raising components (D+)_q = (-1)^q (D_{-q})^dagger:
/// (D+)_{-1} = sigma_41, (D+)_0 = sigma_31, (D+)_{+1} = sigma_21.
inline const std::array<Mat4, 3>& dipole_raising_components() {
  static const std::array<Mat4, 3> d = {sigma(4, 1), sigma(3, 1), sigma(2, 1)};
  return d;
}

/// Bilinear contraction of a coefficient vector with a triple of operator
/// components: sum_q (-1)^q a_q ops_{-q}.
inline Mat4 contract_bilinear(const SphericalVec& a, const std::array<Mat4, 3>& ops) {
  return -a[sph_index(-1)] * ops[sph_index(+1)] + a[sph_index(0)] * ops[sph_index(0)] -
         a[sph_index(+1)] * ops[sph_index(-1)];
}

/// Projector on the excited manifold, sigma_22 + sigma_33 + sigma_44.
inline Mat4 excited_projector() { return sigma(2, 2) + sigma(3, 3) + sigma(4, 4); }

/// Laser drive parameters.  Omega may be complex to carry a position-
/// dependent beam phase; the saturation parameter only sees its modulus.
struct DriveParams {
  Complex omega{0.0, 0.0};
  double delta = 0.0;
  double gamma = 1.0;
  SphericalVec eps_laser = spherical_unit(+1);

  double saturation() const {
    return std::norm(omega) / (2.0 * (delta * delta + gamma * gamma));
  }

  /// Build parameters with a real Rabi frequency reproducing the given
  /// saturation parameter s = |Omega|^2 / 2(delta^2 + gamma^2).
  static DriveParams from_saturation(double s, double delta, const SphericalVec& eps_laser,
                                     double gamma = 1.0) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::invalid_argument("from_saturation: s must be finite and >= 0");
    DriveParams p;
    p.omega = std::sqrt(2.0 * s * (delta * delta + gamma * gamma));
    p.delta = delta;
    p.gamma = gamma;
    p.eps_laser = eps_laser;
    return p;
  }
};

/// Adjoint generator of one driven atom applied to an operator Q.
inline Mat4 apply_single(const Mat4& Q, const DriveParams& p) {
  const auto& low = dipole_lowering_components();
  const auto& high = dipole_raising_components();
  const Mat4 nhat_op = excited_projector();

  const Mat4 H = p.omega * contract_bilinear(p.eps_laser, high) +
                 std::conj(p.omega) * contract_bilinear(conjugate_coefficients(p.eps_laser), low);

  Mat4 out = -kImag * p.delta * (nhat_op * Q - Q * nhat_op);
  out += 0.5 * kImag * (H * Q - Q * H);
  for (int q = -1; q <= 1; ++q) {
    const double sign = (q == 0) ? 1.0 : -1.0;
    const Mat4& a = high[sph_index(q)];
    const Mat4& b = low[sph_index(-q)];
    out += p.gamma * sign * (a * (Q * b - b * Q) + (a * Q - Q * a) * b);
  }
  return out;
}

/// Equations of motion of one atom over the 16-operator basis:
/// d<Q_n>/dt = sum_m matrix(n, m) <Q_m>.  Row 0 vanishes (the identity is
/// conserved); `source` is the inhomogeneity column 0 contributes once the
/// identity expectation is fixed, source_n = matrix(n, 0) / 2.
struct SingleGenerator {
  Eigen::Matrix<Complex, 16, 16> matrix;
  Vec16 source;
};

inline SingleGenerator build_single_generator(const DriveParams& p) {
  const auto& basis = single_atom_basis();
  SingleGenerator g;
  for (int n = 0; n < kSingleBasisSize; ++n) {
    const Mat4 image = apply_single(basis[n], p);
    for (int m = 0; m < kSingleBasisSize; ++m) g.matrix(n, m) = trace_pairing(image, basis[m]);
  }
  g.source = 0.5 * g.matrix.col(0);
  return g;
}

namespace detail {

/// Coefficient-space map of left multiplication: A Q_n = sum_m L(n,m) Q_m.
inline Eigen::Matrix<Complex, 16, 16> left_mult_map(const Mat4& a) {
  const auto& basis = single_atom_basis();
  Eigen::Matrix<Complex, 16, 16> map;
  for (int n = 0; n < kSingleBasisSize; ++n) {
    const Mat4 image = a * basis[n];
    for (int m = 0; m < kSingleBasisSize; ++m) map(n, m) = trace_pairing(image, basis[m]);
  }
  return map;
}

/// Coefficient-space map of right multiplication: Q_n A = sum_m R(n,m) Q_m.
inline Eigen::Matrix<Complex, 16, 16> right_mult_map(const Mat4& a) {
  const auto& basis = single_atom_basis();
  Eigen::Matrix<Complex, 16, 16> map;
  for (int n = 0; n < kSingleBasisSize; ++n) {
    const Mat4 image = basis[n] * a;
    for (int m = 0; m < kSingleBasisSize; ++m) map(n, m) = trace_pairing(image, basis[m]);
  }
  return map;
}

}  // namespace detail

/// One structural part of the photon-exchange generator applied directly
/// to a pair operator, for raising component qa and lowering component qb:
///   part 0:  D1+_qa (Q D2_qb - D2_qb Q)        (goes with g and e^{-iv})
///   part 1:  D2+_qa (Q D1_qb - D1_qb Q)        (goes with g and e^{+iv})
///   part 2:  (D2+_qa Q - Q D2+_qa) D1_qb       (goes with g* and e^{+iv})
///   part 3:  (D1+_qa Q - Q D1+_qa) D2_qb       (goes with g* and e^{-iv})
inline Mat16 apply_exchange_part(const Mat16& Q, int part, int qa, int qb) {
  const Mat4& A = dipole_raising_components()[sph_index(qa)];
  const Mat4& B = dipole_lowering_components()[sph_index(qb)];
  const Mat16 a1 = lift(A, 1), a2 = lift(A, 2);
  const Mat16 b1 = lift(B, 1), b2 = lift(B, 2);
  switch (part) {
    case 0: return a1 * (Q * b2 - b2 * Q);
    case 1: return a2 * (Q * b1 - b1 * Q);
    case 2: return (a2 * Q - Q * a2) * b1;
    case 3: return (a1 * Q - Q * a1) * b2;
    default: throw std::invalid_argument("apply_exchange_part: part must be 0..3");
  }
}

/// Flattened index of the projector component pair (qa, qb).
constexpr int component_index(int qa, int qb) noexcept {
  return 3 * sph_index(qa) + sph_index(qb);
}

/// Geometry-independent structural matrices of the exchange generator over
/// the truncated pair coordinates: X[part][component_index(qa,qb)] is the
/// 255x255 coefficient map of apply_exchange_part.  Built once per process
/// (~37 MB) and shared; thread-safe through static initialization.
struct ExchangeStructure {
  std::array<std::array<Eigen::MatrixXcd, 9>, 4> X;
};

inline const ExchangeStructure& exchange_structure() {
  static const ExchangeStructure cached = [] {
    ExchangeStructure s;
    using Map16 = Eigen::Matrix<Complex, 16, 16>;
    const Mat4 eye = Mat4::Identity();
    for (int qa = -1; qa <= 1; ++qa) {
      const Mat4& A = dipole_raising_components()[sph_index(qa)];
      const Map16 la = detail::left_mult_map(A);
      const Map16 ra = detail::right_mult_map(A);
      for (int qb = -1; qb <= 1; ++qb) {
        const Mat4& B = dipole_lowering_components()[sph_index(qb)];
        const Map16 lb = detail::left_mult_map(B);
        const Map16 rb = detail::right_mult_map(B);
        const int iq = component_index(qa, qb);
        // The pair map factorizes over the two atoms; assemble the 256x256
        // matrices as Kronecker products of 16x16 coefficient maps, then
        // truncate.  Atom 1 is the major index throughout.
        const std::array<std::pair<Map16, Map16>, 4> factors = {{
            {la, rb - lb},        // part 0
            {rb - lb, la},        // part 1
            {rb, la - ra},        // part 2
            {la - ra, rb},        // part 3
        }};
        for (int p = 0; p < 4; ++p) {
          Eigen::MatrixXcd full(kPairBasisSize, kPairBasisSize);
          const auto& [f1, f2] = factors[p];
          for (int i = 0; i < kSingleBasisSize; ++i)
            for (int j = 0; j < kSingleBasisSize; ++j)
              full.block(kSingleBasisSize * i, kSingleBasisSize * j, kSingleBasisSize,
                         kSingleBasisSize) = f1(i, j) * f2;
          const double edge = std::max(full.row(0).cwiseAbs().maxCoeff(),
                                       full.col(0).cwiseAbs().maxCoeff());
          if (edge > 1e-13)
            throw std::logic_error("exchange_structure: identity component not conserved");
          s.X[p][iq] = full.bottomRightCorner(kTruncatedSize, kTruncatedSize);
        }
      }
      (void)eye;
    }
    return s;
  }();
  return cached;
}

/// Weighted assembly of the exchange generator for concrete geometry data.
/// `delta_comp` holds the transverse-projector sandwich components,
/// `phase_minus`/`phase_plus` the frame phases multiplying the e^{-+iv}
/// part pairs, and `asymmetry_hook` scales part 2 by (1 + hook) --
/// a validation aid that deliberately breaks the g / g* pairing.
inline Eigen::MatrixXcd assemble_exchange(const SphericalTensor& delta_comp, Complex g,
                                          Complex phase_minus, Complex phase_plus,
                                          double gamma = 1.0, double asymmetry_hook = 0.0) {
  const ExchangeStructure& s = exchange_structure();
  const std::array<Complex, 4> pre = {
      gamma * g * phase_minus,
      gamma * g * phase_plus,
      gamma * std::conj(g) * phase_plus * (1.0 + asymmetry_hook),
      gamma * std::conj(g) * phase_minus,
  };
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(kTruncatedSize, kTruncatedSize);
  for (int qa = -1; qa <= 1; ++qa)
    for (int qb = -1; qb <= 1; ++qb) {
      const Complex d = delta_comp(sph_index(qa), sph_index(qb));
      if (d == Complex{0.0, 0.0}) continue;
      const int iq = component_index(qa, qb);
      for (int p = 0; p < 4; ++p) V.noalias() += (pre[p] * d) * s.X[p][iq];
    }
  return V;
}

enum class InteractionFrame {
  LaserPhases,   ///< beam phases on the atomic drives; physical observables
  PhaseRotated,  ///< common drive phase; exchange parts carry e^{-+iv}
};

/// Pair equations of motion over the truncated coordinates:
/// dx/dt = (drift + exchange) x + source.
struct LiouvilleSystem {
  Eigen::MatrixXcd drift;     ///< 255x255, drive + independent decay
  Eigen::MatrixXcd exchange;  ///< 255x255, photon exchange between the atoms
  Eigen::VectorXcd source;    ///< 255, inhomogeneity from the conserved component
  double laser_phase_difference = 0.0;  ///< v = k_L . r12
  InteractionFrame frame = InteractionFrame::LaserPhases;
};

/// Kronecker sum of two single-atom generators over the full pair basis,
/// truncated, together with the matching source vector.
inline void kron_sum_truncated(const SingleGenerator& g1, const SingleGenerator& g2,
                               Eigen::MatrixXcd& drift, Eigen::VectorXcd& source) {
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(kPairBasisSize, kPairBasisSize);
  for (int n1 = 0; n1 < kSingleBasisSize; ++n1)
    for (int m1 = 0; m1 < kSingleBasisSize; ++m1) {
      const Complex c = g1.matrix(n1, m1);
      if (c == Complex{0.0, 0.0}) continue;
      for (int n2 = 0; n2 < kSingleBasisSize; ++n2)
        full(pair_index(n1, n2), pair_index(m1, n2)) += c;
    }
  for (int n2 = 0; n2 < kSingleBasisSize; ++n2)
    for (int m2 = 0; m2 < kSingleBasisSize; ++m2) {
      const Complex c = g2.matrix(n2, m2);
      if (c == Complex{0.0, 0.0}) continue;
      for (int n1 = 0; n1 < kSingleBasisSize; ++n1)
        full(pair_index(n1, n2), pair_index(n1, m2)) += c;
    }
  drift = full.bottomRightCorner(kTruncatedSize, kTruncatedSize);
  source = 0.25 * full.block(1, 0, kTruncatedSize, 1);
}

/// Build the complete pair system for a drive, a geometry and a beam
/// direction, in the requested frame.  The drive's Omega is the common
/// amplitude; in the LaserPhases frame the atoms at +-r12/2 receive the
/// additional phases e^{+-iv/2}.
inline LiouvilleSystem build_pair_system(const DriveParams& drive, const PairGeometry& geom,
                                         const CartesianVec& k_laser_dir,
                                         InteractionFrame frame = InteractionFrame::LaserPhases,
                                         double asymmetry_hook = 0.0) {
  LiouvilleSystem sys;
  sys.frame = frame;
  const double v = geom.k0 * geom.r12 * k_laser_dir.dot(geom.nhat_cartesian);
  sys.laser_phase_difference = v;

  DriveParams d1 = drive, d2 = drive;
  Complex phase_minus{1.0, 0.0}, phase_plus{1.0, 0.0};
  if (frame == InteractionFrame::LaserPhases) {
    d1.omega *= std::polar(1.0, +0.5 * v);
    d2.omega *= std::polar(1.0, -0.5 * v);
  } else {
    phase_minus = std::polar(1.0, -v);
    phase_plus = std::polar(1.0, +v);
  }
  const SingleGenerator g1 = build_single_generator(d1);
  const SingleGenerator g2 = build_single_generator(d2);
  kron_sum_truncated(g1, g2, sys.drift, sys.source);
  sys.exchange = assemble_exchange(geom.projector, geom.g, phase_minus, phase_plus, drive.gamma,
                                   asymmetry_hook);
  return sys;
}

/// Plain-text dump of the structurally nonzero entries, one entry per
/// line: `<name> <row> <col> <re> <im>` with zero-based indices; the
/// source vector uses column 0.
inline void dump_system(std::ostream& os, const LiouvilleSystem& sys) {
  os.precision(17);
  auto dump_matrix = [&os](const char* name, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(i, j) != Complex{0.0, 0.0})
          os << name << ' ' << i << ' ' << j << ' ' << m(i, j).real() << ' ' << m(i, j).imag()
             << '\n';
  };
  dump_matrix("A", sys.drift);
  dump_matrix("V", sys.exchange);
  for (Eigen::Index i = 0; i < sys.source.size(); ++i)
    if (sys.source[i] != Complex{0.0, 0.0})
      os << "j " << i << " 0 " << sys.source[i].real() << ' ' << sys.source[i].imag() << '\n';
}

}  // namespace cbs
