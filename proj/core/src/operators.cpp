#include "qmoney/operators.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qmoney/errors.hpp"

namespace qmoney {

const AnswerBasis& answer_basis() {
  static const AnswerBasis basis = [] {
    AnswerBasis b;
    b.answers = {basis_vector(3, 0), basis_vector(3, 1)};
    b.vacuum = basis_vector(3, 2);
    b.challenges = {basis_vector(2, 0), basis_vector(2, 1)};
    return b;
  }();
  return basis;
}

int AnswerBasis::correct_answer(int challenge, int state) {
  if (challenge < 0 || challenge > 1 || state < 0 || state > 3 ||
      state % 2 != challenge) {
    throw DomainError("correct_answer: state " + std::to_string(state) +
                      " is not answerable under challenge " +
                      std::to_string(challenge));
  }
  return state < 2 ? 0 : 1;
}

const ComplexVector& AnswerBasis::correct(int challenge, int state) const {
  return answers[correct_answer(challenge, state)];
}

const ComplexVector& AnswerBasis::wrong(int challenge, int state) const {
  return answers[1 - correct_answer(challenge, state)];
}

namespace {

void check_kraus(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw ContractViolation("channel has no Kraus operators");
  const auto rows = kraus.front().rows();
  const auto cols = kraus.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(cols, cols);
  for (const auto& k : kraus) {
    if (k.rows() != rows || k.cols() != cols) {
      throw DimensionError("Kraus operators have inconsistent shapes");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - ComplexMatrix::Identity(cols, cols)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractViolation("channel is not trace preserving");
  }
}

}  // namespace

ComplexMatrix choi_matrix(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw ContractViolation("channel has no Kraus operators");
  const auto d_out = kraus.front().rows();
  const auto d_in = kraus.front().cols();
  ComplexMatrix j = ComplexMatrix::Zero(d_out * d_in, d_out * d_in);
  ComplexVector v(d_out * d_in);
  for (const auto& k : kraus) {
    // J[(o,i),(o',i')] = sum_a K_a[o,i] conj(K_a[o',i']).
    for (Eigen::Index o = 0; o < d_out; ++o) {
      for (Eigen::Index i = 0; i < d_in; ++i) v(o * d_in + i) = k(o, i);
    }
    j.noalias() += v * v.adjoint();
  }
  return j;
}

ChoiIdentity choi_identity_check(std::span<const ComplexMatrix> kraus,
                                 const ComplexVector& psi1,
                                 const ComplexVector& psi3) {
  check_kraus(kraus);
  if (psi1.size() != kraus.front().cols() || psi3.size() != kraus.front().rows()) {
    throw DimensionError("choi_identity_check: vector dimension mismatch");
  }
  if (std::abs(psi1.norm() - 1.0) > 1e-10 || std::abs(psi3.norm() - 1.0) > 1e-10) {
    throw ContractViolation("choi_identity_check: vectors must be normalized");
  }

  double lhs = 0.0;
  for (const auto& k : kraus) lhs += std::norm(psi3.dot(k * psi1));

  const ComplexMatrix j = choi_matrix(kraus);
  const ComplexVector probe = kron(ComplexMatrix(psi3), ComplexMatrix(psi1.conjugate()));
  const double rhs = probe.dot(j * probe).real();
  return {lhs, rhs};
}

OperatorSet build_trusted_ops(const StateFamily& f) {
  const auto& sq = squashed_basis();
  const ComplexMatrix id = identity(kCloneDim);
  const ComplexMatrix vac = projector(sq.vacuum);

  OperatorSet ops{.e1 = {}, .e2 = {}, .l1 = {}, .l2 = {},
                  .dims = SubsystemDims{kCloneDim, kCloneDim, f.mint_dim},
                  .out_dim = kCloneDim * kCloneDim,
                  .in_dim = f.mint_dim,
                  .terminal = Terminal::kTrusted,
                  .n = 1};
  const auto d = static_cast<Eigen::Index>(ops.dim());
  ops.e1 = ops.e2 = ops.l1 = ops.l2 = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < 4; ++k) {
    const ComplexMatrix& rho = f.conjugate_states[k];
    const ComplexMatrix err = 0.5 * projector(sq.beta_perp[k]);
    ops.e1 += 0.25 * kron({err, id, rho});
    ops.e2 += 0.25 * kron({id, err, rho});
    ops.l1 += 0.25 * kron({vac, id, rho});
    ops.l2 += 0.25 * kron({id, vac, rho});
  }
  return ops;
}

OperatorSet build_untrusted_ops(const StateFamily& f) {
  const auto& ab = answer_basis();
  const ComplexMatrix id = identity(kCloneDim);
  const ComplexMatrix vac = projector(ab.vacuum);

  OperatorSet ops{.e1 = {}, .e2 = {}, .l1 = {}, .l2 = {},
                  .dims = SubsystemDims{kCloneDim, kCloneDim, 2, 2, f.mint_dim},
                  .out_dim = kCloneDim * kCloneDim,
                  .in_dim = 4 * f.mint_dim,
                  .terminal = Terminal::kUntrusted,
                  .n = 1};
  const auto d = static_cast<Eigen::Index>(ops.dim());
  ops.e1 = ops.e2 = ops.l1 = ops.l2 = ComplexMatrix::Zero(d, d);
  constexpr double w = 1.0 / 16.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 4; ++k) {
        const ComplexMatrix input =
            kron({projector(ab.challenges[i]), projector(ab.challenges[j]),
                  f.conjugate_states[k]});
        if (k % 2 == i) ops.e1 += w * kron({projector(ab.wrong(i, k)), id, input});
        if (k % 2 == j) ops.e2 += w * kron({id, projector(ab.wrong(j, k)), input});
        ops.l1 += w * kron({vac, id, input});
        ops.l2 += w * kron({id, vac, input});
      }
    }
  }
  return ops;
}

OperatorSet build_ops(const StateFamily& f, Terminal terminal) {
  return terminal == Terminal::kTrusted ? build_trusted_ops(f)
                                        : build_untrusted_ops(f);
}

ComplexMatrix projector_P(std::size_t n, std::size_t j,
                          std::span<const ComplexMatrix> c) {
  if (j > n) throw DomainError("projector_P: j > n");
  if (c.size() != n || n == 0) {
    throw DimensionError("projector_P: expected exactly n >= 1 operators");
  }
  if (n > 20) throw CapacityError("projector_P: n too large to enumerate");
  for (const auto& ci : c) {
    if (!is_hermitian(ci, 1e-10)) throw ContractViolation("projector_P: C_i not Hermitian");
    const RealVector ev = eigenvalues(ci);
    if (ev(0) < -1e-10 || ev(ev.size() - 1) > 1.0 + 1e-10) {
      throw ContractViolation("projector_P: C_i must satisfy 0 <= C_i <= 1");
    }
  }

  std::size_t total = 1;
  for (const auto& ci : c) total *= static_cast<std::size_t>(ci.rows());
  const auto d = static_cast<Eigen::Index>(total);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);

  // Bit i of `s` selects C_i (1) or its complement (0).
  for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) != j) continue;
    ComplexMatrix term = ComplexMatrix::Ones(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const ComplexMatrix& ci = c[i];
      const bool pick = (s >> (n - 1 - i)) & 1U;
      term = kron(term, pick ? ci : ComplexMatrix(identity(ci.rows()) - ci));
    }
    out += term;
  }
  return out;
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// sum_{j=1..n} (j/n) P(n, j, C)
ComplexMatrix weighted_count(std::span<const ComplexMatrix> c) {
  const std::size_t n = c.size();
  ComplexMatrix acc;
  for (std::size_t j = 1; j <= n; ++j) {
    ComplexMatrix p = projector_P(n, j, c);
    p *= static_cast<double>(j) / static_cast<double>(n);
    if (acc.size() == 0) acc = std::move(p); else acc += p;
  }
  return acc;
}

}  // namespace

OperatorSet build_n_state_ops(const StateFamily& f, std::size_t n,
                              Terminal terminal, std::size_t max_dim) {
  if (n < 1) throw DomainError("build_n_state_ops: n must be >= 1");
  if (terminal != Terminal::kTrusted) {
    throw DomainError("build_n_state_ops: n-state operators are defined for the "
                      "trusted terminal only");
  }
  const std::size_t clone = ipow(kCloneDim, n);
  const std::size_t mint = ipow(f.mint_dim, n);
  if (clone * clone * mint > max_dim) {
    throw CapacityError("build_n_state_ops: dimension " +
                        std::to_string(clone * clone * mint) +
                        " exceeds the size budget " + std::to_string(max_dim));
  }

  const auto& sq = squashed_basis();
  const ComplexMatrix id = identity(clone);
  OperatorSet ops{.e1 = {}, .e2 = {}, .l1 = {}, .l2 = {},
                  .dims = SubsystemDims{clone, clone, mint},
                  .out_dim = clone * clone,
                  .in_dim = mint,
                  .terminal = terminal,
                  .n = n};
  const auto d = static_cast<Eigen::Index>(ops.dim());
  ops.e1 = ops.e2 = ComplexMatrix::Zero(d, d);
  ComplexMatrix mint_sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(mint),
                                               static_cast<Eigen::Index>(mint));
  const double weight = 1.0 / static_cast<double>(ipow(4, n));

  std::vector<ComplexMatrix> c(n);
  std::vector<int> ks(n, 0);
  for (std::size_t idx = 0; idx < ipow(4, n); ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      ks[i] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    ComplexMatrix mint_state = ComplexMatrix::Ones(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = 0.5 * projector(sq.beta_perp[ks[i]]);
      mint_state = kron(mint_state, f.conjugate_states[ks[i]]);
    }
    const ComplexMatrix count = weighted_count(c);
    ops.e1 += weight * kron({count, id, mint_state});
    ops.e2 += weight * kron({id, count, mint_state});
    mint_sum += weight * mint_state;
  }

  const std::vector<ComplexMatrix> vac(n, projector(sq.vacuum));
  const ComplexMatrix loss_count = weighted_count(vac);
  ops.l1 = kron({loss_count, id, mint_sum});
  ops.l2 = kron({id, loss_count, mint_sum});
  return ops;
}

ComplexMatrix swap_clones(const ComplexMatrix& m, const OperatorSet& ops) {
  if (ops.terminal == Terminal::kUntrusted) {
    const std::array<std::size_t, 5> order{1, 0, 3, 2, 4};
    return permute_subsystems(m, ops.dims, order);
  }
  const std::array<std::size_t, 3> order{1, 0, 2};
  return permute_subsystems(m, ops.dims, order);
}

}  // namespace qmoney
