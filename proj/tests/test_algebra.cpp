#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cbs/algebra.hpp"

using namespace cbs;

TEST_CASE("single-atom basis is orthonormal under the bilinear trace pairing") {
  const auto& basis = single_atom_basis();
  for (int m = 0; m < kSingleBasisSize; ++m)
    for (int n = 0; n < kSingleBasisSize; ++n) {
      const Complex p = trace_pairing(basis[m], basis[n]);
      const Complex expected = m == n ? 1.0 : 0.0;
      REQUIRE(std::abs(p - expected) < 1e-14);
    }
}

TEST_CASE("diagonal basis members have the expected matrix forms") {
  REQUIRE((mu(2) - Eigen::Vector4cd(1, 1, -1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  REQUIRE((mu(1) - Eigen::Vector4cd(-1, 1, -1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  REQUIRE((mu(3) - Eigen::Vector4cd(-1, 1, 1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  // the ground projector decomposes over the diagonal members
  const Mat4 s11 = sigma(1, 1);
  const Mat4 rebuilt = 0.25 * (Mat4::Identity() - mu(1) + mu(2) - mu(3));
  REQUIRE((s11 - rebuilt).norm() < 1e-15);
  REQUIRE_THROWS_AS(mu(0), std::invalid_argument);
  REQUIRE_THROWS_AS(sigma(0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(sigma(2, 5), std::invalid_argument);
}

TEST_CASE("coefficient round trips reproduce arbitrary operators") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat4 a, b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = Complex(u(rng), u(rng));
      b(i, j) = Complex(u(rng), u(rng));
    }
  REQUIRE((from_single_coefficients(single_coefficients(a)) - a).norm() < 1e-14);

  const Mat16 ab = kron(a, b);
  const Vec256 c = pair_coefficients(ab);
  Mat16 rebuilt = Mat16::Zero();
  const auto& basis2 = pair_basis();
  for (int n = 0; n < kPairBasisSize; ++n) rebuilt += c[n] * basis2[n];
  REQUIRE((rebuilt - ab).norm() < 1e-13);
}

TEST_CASE("transpose of a basis member is another basis member") {
  const auto& basis = single_atom_basis();
  for (int n = 0; n < kSingleBasisSize; ++n) {
    const int m = transpose_partner(n);
    REQUIRE((basis[n].transpose() - basis[m]).norm() < 1e-15);
  }
}

TEST_CASE("lifting embeds an operator on one atom") {
  const Mat4 op = sigma(1, 3);
  REQUIRE((lift(op, 1) - kron(op, Mat4::Identity())).norm() < 1e-15);
  REQUIRE((lift(op, 2) - kron(Mat4::Identity(), op)).norm() < 1e-15);
  REQUIRE_THROWS_AS(lift(op, 0), std::invalid_argument);
  // commuting embeddings: [A x 1, 1 x B] = 0
  const Mat4 other = sigma(2, 4);
  const Mat16 l1 = lift(op, 1), l2 = lift(other, 2);
  REQUIRE((l1 * l2 - l2 * l1).norm() < 1e-14);
}

TEST_CASE("pair indexing is atom-1 major") {
  REQUIRE(pair_index(0, 0) == 0);
  REQUIRE(pair_index(0, 5) == 5);
  REQUIRE(pair_index(1, 0) == 16);
  REQUIRE(pair_unindex(37) == std::pair<int, int>(2, 5));
  const auto& basis2 = pair_basis();
  const auto& basis = single_atom_basis();
  REQUIRE((basis2[pair_index(3, 7)] - kron(basis[3], basis[7])).norm() < 1e-15);
}

TEST_CASE("observable functionals evaluate expectation values from coordinates") {
  // Build a valid product state: ground state of both atoms.
  const Mat16 rho = kron(sigma(1, 1), sigma(1, 1));
  const Vec256 c = pair_coefficients(rho);
  // Coordinates x_M hold the expectations of the transposed basis members.
  Eigen::VectorXcd x(kTruncatedSize);
  const auto& basis2 = pair_basis();
  for (int n = 1; n < kPairBasisSize; ++n) {
    const auto [n1, n2] = pair_unindex(n);
    const int m = pair_index(transpose_partner(n1), transpose_partner(n2));
    x[n - 1] = trace_pairing(rho, basis2[m]);
  }
  const ObservableCoordinates pop = observable_coordinates(sigma(1, 1), 1);
  REQUIRE(std::abs(pop(x) - Complex(1.0)) < 1e-14);
  const ObservableCoordinates coh = observable_coordinates(sigma(1, 4), 2);
  REQUIRE(std::abs(coh(x)) < 1e-14);

  const Mat16 rebuilt = reconstruct_pair_density(x);
  REQUIRE((rebuilt - rho).norm() < 1e-13);
  REQUIRE(std::abs(rebuilt.trace() - Complex(1.0)) < 1e-14);

  Eigen::VectorXcd wrong(3);
  wrong.setZero();
  REQUIRE_THROWS_AS(pop(wrong), std::invalid_argument);
  (void)c;
}
