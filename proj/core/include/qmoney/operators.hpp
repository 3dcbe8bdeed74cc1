#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qmoney/linalg.hpp"
#include "qmoney/scenario.hpp"
#include "qmoney/states.hpp"

namespace qmoney {

// Error and loss operators of one attack scenario. They act on
// out (clone-1 x clone-2) x in (mint side), so that Tr(E1 J) is the card-1
// error probability of the channel with Choi matrix J.
struct OperatorSet {
  ComplexMatrix e1, e2, l1, l2;
  SubsystemDims dims;  // (clone-1, clone-2, mint-side factors...)
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
  Terminal terminal = Terminal::kTrusted;
  std::size_t n = 1;

  std::size_t dim() const { return out_dim * in_dim; }
};

// Classical answers of an untrusted terminal, {a0, a1, vac}, and the bank's
// challenges {c0, c1}. Challenge c_i concerns states k in {i, i+2}; k < 2 maps
// to a0 and k >= 2 to a1 (the beta_k ordering |+>, |+i>, |->, |-i>).
struct AnswerBasis {
  std::array<ComplexVector, 2> answers;
  ComplexVector vacuum;
  std::array<ComplexVector, 2> challenges;

  // Index of the correct answer to challenge i for state k. Requires
  // k % 2 == i.
  static int correct_answer(int challenge, int state);
  const ComplexVector& correct(int challenge, int state) const;
  const ComplexVector& wrong(int challenge, int state) const;
};

const AnswerBasis& answer_basis();

// Unnormalized Choi matrix J = sum_ij L(|i><j|) (x) |i><j| (output factor
// first) of the channel with the given Kraus operators.
ComplexMatrix choi_matrix(std::span<const ComplexMatrix> kraus);

struct ChoiIdentity {
  double lhs;  // <psi3| L(|psi1><psi1|) |psi3>
  double rhs;  // <psi3, conj psi1| J |psi3, conj psi1>
};

// Evaluates both sides independently. Throws ContractViolation when the
// channel is not trace preserving to 1e-10 or the vectors are not unit.
ChoiIdentity choi_identity_check(std::span<const ComplexMatrix> kraus,
                                 const ComplexVector& psi1,
                                 const ComplexVector& psi3);

OperatorSet build_trusted_ops(const StateFamily& f);
OperatorSet build_untrusted_ops(const StateFamily& f);

// Sum over binary strings s of length n with j ones of
// (x)_i [s_i C_i + (1 - s_i)(1 - C_i)].
ComplexMatrix projector_P(std::size_t n, std::size_t j,
                          std::span<const ComplexMatrix> c);

inline constexpr std::size_t kDefaultMaxOperatorDim = 1296;

// n-repetition operators on clone(3^n) x clone(3^n) x mint(d^n), weighted by
// j/n. Only the trusted terminal has an n-state form.
OperatorSet build_n_state_ops(const StateFamily& f, std::size_t n,
                              Terminal terminal,
                              std::size_t max_dim = kDefaultMaxOperatorDim);

OperatorSet build_ops(const StateFamily& f, Terminal terminal);

// Swaps the two clone factors (and, for the untrusted terminal, the two
// challenge factors), mapping E1 <-> E2 and L1 <-> L2.
ComplexMatrix swap_clones(const ComplexMatrix& m, const OperatorSet& ops);

}  // namespace qmoney
