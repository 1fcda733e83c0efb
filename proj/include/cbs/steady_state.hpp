#pragma once

// Steady-state solvers for the truncated pair equations of motion
// dx/dt = A x + j (optionally with an exchange term V added to A), plus
// the perturbative expansion of the stationary state in powers of the
// radiative coupling.
//
// The stationary condition (A + V) x + j = 0 is expanded with the
// resolvent G0 = -A^{-1}:
//   x^(0) = G0 j,    x^(n+1) = G0 V x^(n),
// so that the full state is the sum over all orders when the series
// converges (|g| well below 1).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbs/algebra.hpp"

namespace cbs {

/// The generator could not be factorized to working accuracy.
class SingularGeneratorError : public std::runtime_error {
 public:
  SingularGeneratorError(double rcond, double floor)
      : std::runtime_error("generator numerically singular: rcond " + std::to_string(rcond) +
                           " below floor " + std::to_string(floor)),
        rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// LU factorization of a (dense, complex) generator with a one-norm
/// reciprocal-condition estimate.  Construction throws
/// SingularGeneratorError when the estimate falls below `rcond_floor`.
class FactorizedGenerator {
 public:
  explicit FactorizedGenerator(const Eigen::MatrixXcd& a, double rcond_floor = 1e-12)
      : lu_(a), n_(a.rows()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("FactorizedGenerator: matrix not square");
    const double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
    rcond_ = estimate_rcond(anorm);
    if (!(rcond_ >= rcond_floor)) throw SingularGeneratorError(rcond_, rcond_floor);
  }

  double rcond() const noexcept { return rcond_; }

  template <typename Derived>
  auto solve(const Eigen::MatrixBase<Derived>& b) const {
    return lu_.solve(b).eval();
  }

  /// Solve A^T x = b (plain transpose, no conjugation).
  Eigen::VectorXcd solve_transposed(const Eigen::VectorXcd& b) const {
    return lu_.transpose().solve(b);
  }

 private:
  // Hager-style power iteration on A^{-1} in the one norm, using a handful
  // of solves with A and its adjoint.
  double estimate_rcond(double anorm) const {
    if (!(anorm > 0.0) || !std::isfinite(anorm)) return 0.0;
    const Eigen::Index n = n_;
    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, Complex{1.0 / double(n), 0.0});
    double est = 0.0;
    Eigen::Index last_j = -1;
    for (int iter = 0; iter < 5; ++iter) {
      const Eigen::VectorXcd y = lu_.solve(x);
      if (!y.allFinite()) return 0.0;
      est = y.template lpNorm<1>();
      Eigen::VectorXcd xi(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = std::abs(y[i]);
        xi[i] = (m > 0.0) ? y[i] / m : Complex{1.0, 0.0};
      }
      const Eigen::VectorXcd z = lu_.adjoint().solve(xi);
      Eigen::Index j = 0;
      const double zmax = z.cwiseAbs().maxCoeff(&j);
      if (j == last_j || zmax <= std::abs(z.dot(x))) break;
      last_j = j;
      x.setZero();
      x[j] = 1.0;
    }
    const double inv_norm = est;
    return (inv_norm > 0.0) ? 1.0 / (anorm * inv_norm) : 0.0;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  Eigen::Index n_;
  double rcond_ = 0.0;
};

/// Resolvent G0 = -A^{-1}, formed explicitly.  Intended for diagnostics
/// and small studies; production paths keep the factorization instead.
inline Eigen::MatrixXcd greens_matrix(const Eigen::MatrixXcd& a, double rcond_floor = 1e-12) {
  FactorizedGenerator f(a, rcond_floor);
  return -f.solve(Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
}

/// Stationary state of dx/dt = A x + j alone (no exchange): x = G0 j.
inline Eigen::VectorXcd zeroth_order(const FactorizedGenerator& a, const Eigen::VectorXcd& j) {
  return -a.solve(j);
}

/// Successive orders of the stationary state in the exchange coupling:
/// returns {x^(0), ..., x^(max_order)} with x^(n+1) = -A^{-1} V x^(n).
inline std::vector<Eigen::VectorXcd> perturbative_orders(const FactorizedGenerator& a,
                                                         const Eigen::MatrixXcd& v,
                                                         const Eigen::VectorXcd& j, int max_order) {
  if (max_order < 0) throw std::invalid_argument("perturbative_orders: max_order must be >= 0");
  std::vector<Eigen::VectorXcd> orders;
  orders.reserve(static_cast<size_t>(max_order) + 1);
  orders.push_back(-a.solve(j));
  for (int n = 0; n < max_order; ++n) orders.push_back(-a.solve(v * orders.back()));
  return orders;
}

/// Stationary state of the complete pair dynamics, (A + V) x = -j.
inline Eigen::VectorXcd full_steady_state(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& v,
                                          const Eigen::VectorXcd& j, double rcond_floor = 1e-12) {
  FactorizedGenerator f(a + v, rcond_floor);
  return -f.solve(j);
}

}  // namespace cbs
