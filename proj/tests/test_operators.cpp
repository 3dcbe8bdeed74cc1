#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "oracles.hpp"
#include "qmoney/errors.hpp"
#include "qmoney/operators.hpp"

using namespace qmoney;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Sum over strings with j ones, factors taken most-significant bit first,
// enumerated independently as vectors of choices.
ComplexMatrix p_oracle(std::size_t n, std::size_t j, const std::vector<ComplexMatrix>& c) {
  ComplexMatrix acc;
  std::vector<int> s(n, 0);
  for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<int>((code / (std::size_t{1} << (n - 1 - i))) % 2);
      ones += static_cast<std::size_t>(s[i]);
    }
    if (ones != j) continue;
    oracle::Mat term = oracle::Mat::Ones(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const oracle::Mat f = s[i] ? c[i] : oracle::Mat(oracle::Mat::Identity(c[i].rows(), c[i].cols()) - c[i]);
      term = oracle::kron_loop(term, f);
    }
    if (acc.size() == 0) acc = term; else acc += term;
  }
  return acc;
}

void expect_valid_ops(const OperatorSet& ops) {
  for (const ComplexMatrix* m : {&ops.e1, &ops.e2, &ops.l1, &ops.l2}) {
    ASSERT_EQ(static_cast<std::size_t>(m->rows()), ops.dim());
    EXPECT_TRUE(is_hermitian(*m, 1e-12));
    EXPECT_GE(min_eigenvalue(*m), -1e-12);
  }
}

}  // namespace

TEST(Choi, MatchesEntrywiseOracle) {
  std::mt19937_64 rng(21);
  const auto kraus = oracle::random_kraus(3, 2, 3, rng);
  const std::vector<ComplexMatrix> k(kraus.begin(), kraus.end());
  EXPECT_LT(max_abs(choi_matrix(k) - oracle::choi_entries(kraus)), 1e-13);
}

TEST(Choi, TracePreservingChannelHasIdentityMarginal) {
  std::mt19937_64 rng(22);
  const auto kraus = oracle::random_kraus(4, 3, 2, rng);
  const std::vector<ComplexMatrix> k(kraus.begin(), kraus.end());
  const ComplexMatrix j = choi_matrix(k);
  EXPECT_LT(max_abs(partial_trace(j, {3, 4}, {1}) - identity(4)), 1e-12);
  EXPECT_GE(min_eigenvalue(j), -1e-12);
}

TEST(ChoiIdentity, RandomInstances) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const int d_in = 1 + t % 4, d_out = 1 + (t / 4) % 4;
    const int rank = std::max(1, (d_in + d_out - 1) / d_out) + t % 2;
    const auto kraus = oracle::random_kraus(d_in, d_out, rank, rng);
    const std::vector<ComplexMatrix> k(kraus.begin(), kraus.end());
    const auto r = choi_identity_check(k, oracle::random_unit(d_in, rng), oracle::random_unit(d_out, rng));
    EXPECT_NEAR(r.lhs, r.rhs, 1e-12);
  }
}

TEST(ChoiIdentity, RejectsNonTracePreservingAndUnnormalized) {
  std::mt19937_64 rng(24);
  const std::vector<ComplexMatrix> k{2.0 * identity(2)};
  EXPECT_THROW(choi_identity_check(k, oracle::random_unit(2, rng), oracle::random_unit(2, rng)),
               ContractViolation);
  const std::vector<ComplexMatrix> id{identity(2)};
  EXPECT_THROW(choi_identity_check(id, 2.0 * oracle::random_unit(2, rng), oracle::random_unit(2, rng)),
               ContractViolation);
}

class OperatorFamilies : public ::testing::TestWithParam<std::tuple<Terminal, bool>> {};

TEST_P(OperatorFamilies, HermitianPsdAndSwapSymmetric) {
  const auto [terminal, randomized] = GetParam();
  const OperatorSet ops = build_ops(build_states(0.6, randomized), terminal);
  expect_valid_ops(ops);
  EXPECT_LT(max_abs(swap_clones(ops.e1, ops) - ops.e2), 1e-13);
  EXPECT_LT(max_abs(swap_clones(ops.l1, ops) - ops.l2), 1e-13);
}

TEST_P(OperatorFamilies, LossOperatorTracesOutToVacuumWeight) {
  // Tr over the mint side of L1 leaves |vac><vac| x 1 weighted by the state
  // traces, so Tr(L1 J) for the channel that always outputs vac on clone 1 is 1.
  const auto [terminal, randomized] = GetParam();
  const OperatorSet ops = build_ops(build_states(0.6, randomized), terminal);
  const ComplexMatrix vac = projector(basis_vector(3, 2));
  const ComplexMatrix rho_out = kron(vac, vac);
  const ComplexMatrix j = kron(rho_out, identity(ops.in_dim));
  EXPECT_NEAR(trace_product(ops.l1, j), 1.0, 1e-12);
  EXPECT_NEAR(trace_product(ops.e1, j), 0.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(All, OperatorFamilies,
                         ::testing::Combine(::testing::Values(Terminal::kTrusted, Terminal::kUntrusted),
                                            ::testing::Bool()));

TEST(TrustedOperators, ConstantCloneErrorIsQuarter) {
  // Output a fixed maximally mixed qubit on each clone: every check fails half
  // the time, weighted by 1/2.
  const OperatorSet ops = build_trusted_ops(build_states(0.5, false));
  ComplexMatrix mixed = ComplexMatrix::Zero(3, 3);
  mixed(0, 0) = mixed(1, 1) = 0.5;
  const ComplexMatrix j = kron({mixed, mixed, identity(ops.in_dim)});
  EXPECT_NEAR(trace_product(ops.e1, j), 0.25, 1e-12);
  EXPECT_NEAR(trace_product(ops.l1, j), 0.0, 1e-12);
}

TEST(UntrustedOperators, AnswerBasisRules) {
  EXPECT_EQ(AnswerBasis::correct_answer(0, 0), 0);
  EXPECT_EQ(AnswerBasis::correct_answer(0, 2), 1);
  EXPECT_EQ(AnswerBasis::correct_answer(1, 1), 0);
  EXPECT_EQ(AnswerBasis::correct_answer(1, 3), 1);
  EXPECT_THROW(AnswerBasis::correct_answer(0, 1), DomainError);
  const auto& ab = answer_basis();
  EXPECT_NEAR(std::abs(ab.correct(0, 0).dot(ab.wrong(0, 0))), 0.0, 1e-15);
}

TEST(ProjectorP, MatchesStringEnumerationOracle) {
  std::mt19937_64 rng(25);
  for (std::size_t n : {1u, 2u, 3u}) {
    std::vector<ComplexMatrix> c;
    for (std::size_t i = 0; i < n; ++i) {
      const auto rho = oracle::random_density(2, rng);  // 0 <= rho <= 1
      c.push_back(rho);
    }
    ComplexMatrix total;
    for (std::size_t j = 0; j <= n; ++j) {
      const ComplexMatrix p = projector_P(n, j, c);
      EXPECT_LT(max_abs(p - p_oracle(n, j, c)), 1e-13) << "n=" << n << " j=" << j;
      if (total.size() == 0) total = p; else total += p;
    }
    EXPECT_LT(max_abs(total - identity(static_cast<std::size_t>(total.rows()))), 1e-12);
  }
}

TEST(ProjectorP, Preconditions) {
  const std::vector<ComplexMatrix> c{identity(2), identity(2)};
  EXPECT_THROW(projector_P(2, 3, c), DomainError);
  EXPECT_THROW(projector_P(3, 1, c), DimensionError);
  const std::vector<ComplexMatrix> bad{2.0 * identity(2)};
  EXPECT_THROW(projector_P(1, 1, bad), ContractViolation);
}

TEST(NStateOperators, SingleRepetitionEqualsTrusted) {
  const StateFamily f = build_states(0.3, false);
  const OperatorSet a = build_n_state_ops(f, 1, Terminal::kTrusted);
  const OperatorSet b = build_trusted_ops(f);
  EXPECT_LT(max_abs(a.e1 - b.e1), 1e-13);
  EXPECT_LT(max_abs(a.e2 - b.e2), 1e-13);
  EXPECT_LT(max_abs(a.l1 - b.l1), 1e-13);
  EXPECT_LT(max_abs(a.l2 - b.l2), 1e-13);
}

TEST(NStateOperators, TwoRepetitionsValidAndBudgeted) {
  const StateFamily f = build_states(0.3, false);
  const OperatorSet ops = build_n_state_ops(f, 2, Terminal::kTrusted);
  EXPECT_EQ(ops.dim(), 1296u);
  EXPECT_TRUE(is_hermitian(ops.e1, 1e-12));
  EXPECT_LT(max_abs(swap_clones(ops.e1, ops) - ops.e2), 1e-13);
  EXPECT_THROW(build_n_state_ops(f, 3, Terminal::kTrusted), CapacityError);
  EXPECT_THROW(build_n_state_ops(f, 2, Terminal::kUntrusted), DomainError);
}

TEST(NStateOperators, ProductChannelAveragesPerPositionErrors) {
  // For J (x) J the weighted count operator gives the mean of the two
  // single-position values.
  const StateFamily f = build_states(0.5, false);
  const OperatorSet one = build_trusted_ops(f);
  const OperatorSet two = build_n_state_ops(f, 2, Terminal::kTrusted);
  std::mt19937_64 rng(26);
  const auto kraus = oracle::random_kraus(4, 9, 3, rng);
  const ComplexMatrix j = choi_matrix(std::vector<ComplexMatrix>(kraus.begin(), kraus.end()));
  const std::array<std::size_t, 6> order{0, 3, 1, 4, 2, 5};
  const ComplexMatrix jj = permute_subsystems(kron(j, j), {3, 3, 4, 3, 3, 4}, order);
  EXPECT_NEAR(trace_product(two.e1, jj), trace_product(one.e1, j), 1e-12);
  EXPECT_NEAR(trace_product(two.l1, jj), trace_product(one.l1, j), 1e-12);
}
