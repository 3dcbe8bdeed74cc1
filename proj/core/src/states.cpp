#include "qmoney/states.hpp"

#include <cmath>
#include <string>

#include "qmoney/errors.hpp"

namespace qmoney {

std::string_view to_string(Terminal t) {
  return t == Terminal::kTrusted ? "trusted" : "untrusted";
}

Terminal parse_terminal(std::string_view name) {
  if (name == "trusted") return Terminal::kTrusted;
  if (name == "untrusted") return Terminal::kUntrusted;
  throw DomainError("unknown terminal '" + std::string(name) +
                    "' (expected trusted or untrusted)");
}

double MemoryModel::retrieval_efficiency(double t_us) const {
  return eta_m0 * std::exp(-(t_us * t_us) / (tau_us * tau_us));
}

void ScenarioConfig::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be >= 0");
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw DomainError("eta_d must lie in (0, 1]");
  if (!(error_target >= 0.0 && error_target <= 0.5)) {
    throw DomainError("error target e must lie in [0, 0.5]");
  }
  if (n < 1) throw DomainError("repetition count n must be >= 1");
  if (memory) {
    if (!(memory->eta_m0 > 0.0 && memory->eta_m0 <= 1.0)) {
      throw DomainError("memory eta_m0 must lie in (0, 1]");
    }
    if (!(memory->tau_us > 0.0)) throw DomainError("memory tau must be > 0");
  }
}

PoissonWeights poisson_weights(double mu) {
  if (!(mu >= 0.0)) throw DomainError("poisson_weights: mu must be >= 0");
  const double p0 = std::exp(-mu);
  const double p1 = mu * p0;
  if (mu >= 0.5) return {p0, p1, 1.0 - p0 - p1};
  // 1 - (1 + mu) e^-mu cancels badly for small mu; sum the n >= 2 tail.
  double term = 0.5 * mu * mu;
  double tail = 0.0;
  for (int n = 2; n < 40 && term > 0.0; ++n) {
    tail += term;
    term *= mu / (n + 1);
  }
  return {p0, p1, p0 * tail};
}

Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

namespace {

// 2 * sum_k x^(4k+r) / (4k+r)!, i.e. cosh x - cos x (r = 2) or
// sinh x - sin x (r = 3), without cancellation for small x.
double alternating_gap(double x, int r) {
  if (x >= 1.0) {
    return r == 2 ? std::cosh(x) - std::cos(x) : std::sinh(x) - std::sin(x);
  }
  double term = 1.0;
  for (int i = 1; i <= r; ++i) term *= x / i;
  double sum = 0.0;
  for (int k = 0; k < 12; ++k) {
    sum += term;
    const int p = 4 * k + r;
    term *= x * x * x * x / ((p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0));
  }
  return 2.0 * sum;
}

}  // namespace

std::array<double, 4> basis_coefficients(double mu) {
  if (!(mu >= 0.0)) throw DomainError("basis_coefficients: mu must be >= 0");
  const double x = 0.5 * mu;  // alpha^2 / 2 with alpha real
  const double pre = std::exp(-0.25 * mu) / std::sqrt(2.0);
  return {pre * std::sqrt(std::cosh(x) + std::cos(x)),
          pre * std::sqrt(std::sinh(x) + std::sin(x)),
          pre * std::sqrt(alternating_gap(x, 2)),
          pre * std::sqrt(alternating_gap(x, 3))};
}

namespace {

Complex i_power(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

ComplexVector pure_state_vector(double mu, int k) {
  const auto c = basis_coefficients(mu);
  ComplexVector v(4);
  for (int j = 0; j < 4; ++j) v(j) = i_power(k * j) * c[j];
  return v;
}

ComplexVector qubit_state(int k) {
  ComplexVector v(2);
  v(0) = 1.0 / std::sqrt(2.0);
  v(1) = i_power(k) / std::sqrt(2.0);
  return v;
}

const SquashedBasis& squashed_basis() {
  static const SquashedBasis basis = [] {
    SquashedBasis b;
    for (int k = 0; k < 4; ++k) {
      const ComplexVector q = qubit_state(k);
      b.beta[k] = ComplexVector::Zero(3);
      b.beta[k].head(2) = q;
    }
    for (int k = 0; k < 4; ++k) b.beta_perp[k] = b.beta[(k + 2) % 4];
    b.vacuum = basis_vector(3, 2);
    return b;
  }();
  return basis;
}

StateFamily build_states(double mu, bool phase_randomized) {
  if (!(mu >= 0.0)) throw DomainError("build_states: mu must be >= 0");
  StateFamily f;
  f.mu = mu;
  f.phase_randomized = phase_randomized;
  if (!phase_randomized) {
    f.mint_dim = kPureMintDim;
    for (int k = 0; k < 4; ++k) f.states[k] = projector(pure_state_vector(mu, k));
  } else {
    f.mint_dim = kRandomizedMintDim;
    const PoissonWeights w = poisson_weights(mu);
    for (int k = 0; k < 4; ++k) {
      ComplexMatrix rho = ComplexMatrix::Zero(7, 7);
      rho(0, 0) = w.vacuum;
      rho.block(1, 1, 2, 2) = w.single * projector(qubit_state(k));
      rho(3 + k, 3 + k) = w.multiphoton;
      f.states[k] = rho;
    }
  }
  f.conjugate_states = conjugate_family(f);
  return f;
}

StateFamily build_states(const ScenarioConfig& config) {
  return build_states(config.mu, config.phase_randomized);
}

std::array<ComplexMatrix, 4> conjugate_family(const StateFamily& f) {
  std::array<ComplexMatrix, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = f.states[k].conjugate();
  return out;
}

}  // namespace qmoney
