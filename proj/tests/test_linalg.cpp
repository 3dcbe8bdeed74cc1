#include <gtest/gtest.h>

#include <array>
#include <random>

#include "oracles.hpp"
#include "qmoney/errors.hpp"
#include "qmoney/linalg.hpp"

using namespace qmoney;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Kron, MatchesIndexLoopOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_matrix(1 + trial % 3, 1 + trial % 4, rng);
    const auto b = oracle::random_matrix(2 + trial % 2, 1 + trial % 3, rng);
    EXPECT_LT(max_abs(kron(a, b) - oracle::kron_loop(a, b)), 1e-14);
  }
}

TEST(Kron, ListFoldsLeftAndEmptyIsScalarOne) {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_matrix(2, 2, rng);
  const auto b = oracle::random_matrix(3, 3, rng);
  const auto c = oracle::random_matrix(2, 2, rng);
  EXPECT_LT(max_abs(kron({a, b, c}) - oracle::kron_loop(oracle::kron_loop(a, b), c)), 1e-13);
  const ComplexMatrix one = kron(std::initializer_list<ComplexMatrix>{});
  ASSERT_EQ(one.rows(), 1);
  EXPECT_EQ(one(0, 0), Complex(1.0, 0.0));
}

TEST(Kron, MixedProductProperty) {
  std::mt19937_64 rng(3);
  const auto a = oracle::random_matrix(2, 2, rng), b = oracle::random_matrix(3, 3, rng);
  const auto c = oracle::random_matrix(2, 2, rng), d = oracle::random_matrix(3, 3, rng);
  EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(SubsystemDims, RejectsZeroAndEmpty) {
  EXPECT_THROW(SubsystemDims({2, 0}), DimensionError);
  EXPECT_THROW(SubsystemDims(std::vector<std::size_t>{}), DimensionError);
  EXPECT_EQ(SubsystemDims({2, 3, 4}).total(), 24u);
}

TEST(PartialTrace, MatchesSummationOracleForEveryFactor) {
  std::mt19937_64 rng(5);
  const std::vector<std::size_t> dims{2, 3, 2};
  const auto m = oracle::random_matrix(12, 12, rng);
  const SubsystemDims sd{2, 3, 2};
  const std::array<std::array<std::size_t, 2>, 3> keeps{{{1, 2}, {0, 2}, {0, 1}}};
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_LT(max_abs(partial_trace(m, sd, keeps[t]) - oracle::partial_trace_sum(m, dims, t)), 1e-12)
        << "traced factor " << t;
  }
}

TEST(PartialTrace, ProductStateAndFullTrace) {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_density(3, rng);
  const auto b = oracle::random_density(2, rng);
  const ComplexMatrix ab = kron(a, b);
  EXPECT_LT(max_abs(partial_trace(ab, {3, 2}, {0}) - a), 1e-13);
  EXPECT_LT(max_abs(partial_trace(ab, {3, 2}, {1}) - b), 1e-13);
  const ComplexMatrix all = partial_trace(ab, {3, 2}, {});
  EXPECT_NEAR(all(0, 0).real(), 1.0, 1e-13);
}

TEST(PartialTrace, RejectsMismatchedDims) {
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(5, 5), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(6, 6), {2, 3}, {2}), DimensionError);
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(6, 6), {2, 3}, {0, 0}), DimensionError);
}

TEST(PermuteSubsystems, SwapsProductFactors) {
  std::mt19937_64 rng(7);
  const auto a = oracle::random_matrix(2, 2, rng);
  const auto b = oracle::random_matrix(3, 3, rng);
  const auto c = oracle::random_matrix(2, 2, rng);
  const std::array<std::size_t, 3> order{2, 0, 1};
  EXPECT_LT(max_abs(permute_subsystems(kron({a, b, c}), {2, 3, 2}, order) - kron({c, a, b})), 1e-13);
  const std::array<std::size_t, 3> bad{0, 0, 1};
  EXPECT_THROW(permute_subsystems(kron({a, b, c}), {2, 3, 2}, bad), DimensionError);
}

TEST(PermuteSubsystems, InverseRoundTrip) {
  std::mt19937_64 rng(8);
  const auto m = oracle::random_matrix(24, 24, rng);
  const SubsystemDims dims{2, 3, 4};
  const std::array<std::size_t, 3> order{1, 2, 0};
  const ComplexMatrix p = permute_subsystems(m, dims, order);
  const std::array<std::size_t, 3> inverse{2, 0, 1};
  EXPECT_LT(max_abs(permute_subsystems(p, {3, 4, 2}, inverse) - m), 1e-15);
}

TEST(Eigenvalues, MatchJacobiOracle) {
  std::mt19937_64 rng(9);
  for (int d : {1, 2, 4, 7}) {
    const auto h = oracle::random_hermitian(d, rng);
    const RealVector ev = eigenvalues(h);
    const auto ref = oracle::hermitian_eigenvalues(h);
    for (int i = 0; i < d; ++i) EXPECT_NEAR(ev(i), ref[static_cast<std::size_t>(i)], 1e-10);
    EXPECT_NEAR(min_eigenvalue(h), ref.front(), 1e-10);
    EXPECT_NEAR(max_eigenvalue(h), ref.back(), 1e-10);
  }
}

TEST(Eigenvalues, RejectNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(min_eigenvalue(m), ContractViolation);
  EXPECT_THROW(eigenvalues(ComplexMatrix(2, 3)), ContractViolation);
}

TEST(Realify, SpectrumDoublesAndProductsCommute) {
  std::mt19937_64 rng(10);
  const auto h = oracle::random_hermitian(4, rng);
  const auto g = oracle::random_hermitian(4, rng);
  const RealMatrix rh = realify(h);
  ASSERT_EQ(rh.rows(), 8);
  EXPECT_NEAR(min_eigenvalue(rh), min_eigenvalue(h), 1e-10);
  EXPECT_NEAR((rh * realify(g)).trace(), 2.0 * trace_product(h, g), 1e-10);
}

TEST(IsHermitian, ToleranceScalesWithMagnitude) {
  ComplexMatrix m = 1e6 * ComplexMatrix::Identity(2, 2);
  m(0, 1) = 1e-5;
  EXPECT_TRUE(is_hermitian(m, 1e-10));
  m(0, 1) = 1.0;
  EXPECT_FALSE(is_hermitian(m, 1e-10));
}

TEST(TraceProduct, MatchesExplicitTrace) {
  std::mt19937_64 rng(12);
  const auto a = oracle::random_matrix(3, 3, rng);
  const auto b = oracle::random_matrix(3, 3, rng);
  EXPECT_NEAR(trace_product(a, b), (a * b).trace().real(), 1e-12);
  EXPECT_THROW(trace_product(a, ComplexMatrix(2, 2)), DimensionError);
}
