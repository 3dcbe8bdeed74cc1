#pragma once

#include <array>
#include <cstddef>

#include "qmoney/linalg.hpp"
#include "qmoney/scenario.hpp"

namespace qmoney {

inline constexpr std::size_t kPureMintDim = 4;
inline constexpr std::size_t kRandomizedMintDim = 7;
inline constexpr std::size_t kCloneDim = 3;

// The four mint signal states |alpha_k> = |i^k alpha / sqrt(2)>, k = 0..3.
//
// Pure family: coefficient vectors in the orthonormal basis {phi_0..phi_3}
// of span{|alpha_k>}, with alpha real and positive so that the coefficients
// are real. Randomized family: density matrices on {v, q0, q1, m0..m3}
// (vacuum, single-photon qubit, four orthogonal multiphoton flags).
//
// Conjugation is entrywise in the stored basis. This is the convention under
// which <psi3| L(|psi1><psi1|) |psi3> = <psi3, conj(psi1)| J |psi3, conj(psi1)>
// holds for the operators built from these states.
struct StateFamily {
  double mu = 0.0;
  bool phase_randomized = false;
  std::size_t mint_dim = kPureMintDim;
  std::array<ComplexMatrix, 4> states;
  std::array<ComplexMatrix, 4> conjugate_states;
};

struct PoissonWeights {
  double vacuum;       // e^-mu
  double single;       // mu e^-mu
  double multiphoton;  // 1 - (1 + mu) e^-mu
};

PoissonWeights poisson_weights(double mu);

// <a|b> for coherent states with complex amplitudes a, b.
Complex coherent_overlap(Complex a, Complex b);

// (C0, C1, C2, C3) with |alpha_0> = sum_i C_i |phi_i>. Throws DomainError for
// mu < 0.
std::array<double, 4> basis_coefficients(double mu);

// Coefficient vector of |alpha_k> in the phi basis: (C0, i^k C1, (-1)^k C2, (-i)^k C3).
ComplexVector pure_state_vector(double mu, int k);

StateFamily build_states(double mu, bool phase_randomized);
StateFamily build_states(const ScenarioConfig& config);

std::array<ComplexMatrix, 4> conjugate_family(const StateFamily& f);

// Squashed qubit references in the clone space spanned by {|0>, |1>, |vac>}.
struct SquashedBasis {
  std::array<ComplexVector, 4> beta;       // |+>, |+i>, |->, |-i>
  std::array<ComplexVector, 4> beta_perp;  // |->, |-i>, |+>, |+i>
  ComplexVector vacuum;                    // no-click flag
};

const SquashedBasis& squashed_basis();

// |+>, |+i>, |->, |-i> as plain 2-dimensional qubit vectors.
ComplexVector qubit_state(int k);

}  // namespace qmoney
