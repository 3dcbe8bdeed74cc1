#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmoney/operators.hpp"
#include "qmoney/scenario.hpp"
#include "qmoney/sdp.hpp"

namespace qmoney {

// exp(-mu * eta_d * eta_m(t)); eta_m = 1 without a memory. Throws DomainError
// for t < 0 or t > 0 without a memory model.
double honest_loss(double mu, double eta_d, double t_us = 0.0,
                   const std::optional<MemoryModel>& memory = std::nullopt);

// Tolerated count window rate*n +- kappa*sqrt(rate(1-rate)n).
struct CountWindow {
  double expected = 0.0;
  double half_width = 0.0;

  bool contains(double count) const;
};

CountWindow count_window(double rate, std::size_t n, double kappa = 4.0);

struct DualConditions {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double max_off_diagonal = 0.0;  // max |D_ij|, i != j
  double trace_d = 0.0;
  double trace_residual = 0.0;    // |Tr D - (s_p - (d1 + d2) e)|
  double lmi_max_eigenvalue = 0.0;
  double gap = 0.0;
  double gap_tolerance = 0.0;
  bool valid = false;
  std::vector<std::string> failures;
};

struct SecurityReport {
  ScenarioConfig config;
  double f_h = 0.0;
  std::optional<double> f_d;     // minimal adversarial loss (loss minimization)
  std::optional<double> e_star;  // minimal adversarial error (error minimization)
  // Loss minimization: f_d > f_h. Error minimization: e_star > e, i.e. the
  // target error is out of reach within the honest loss budget.
  bool secure = false;
  double gap = 0.0;
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;
  std::optional<DualConditions> dual_conditions;
  std::optional<CountWindow> error_window;
  std::optional<CountWindow> loss_window;
};

OperatorSet build_scenario_ops(const ScenarioConfig& config);

enum class LossForm {
  kOrdered,      // Tr(E1 J) = e, Tr(E1 J) >= Tr(E2 J), Tr(L1 J) >= Tr(L2 J)
  kSymmetrized,  // Tr(E1 J) = Tr(E2 J) = e, Tr(L1 J) = Tr(L2 J)
};

// Loss minimization over trace-preserving channels. For e = 0 in the ordered
// form the variable is restricted to ker(E1 + E2).
SdpProblem loss_minimization_problem(const OperatorSet& ops, double e,
                                     LossForm form = LossForm::kOrdered);
// Error minimization with both card losses capped at loss_budget.
SdpProblem error_minimization_problem(const OperatorSet& ops, double loss_budget);

SecurityReport min_loss_sdp(const ScenarioConfig& config,
                            const SolverOptions& options = {});
SecurityReport min_error_sdp(const ScenarioConfig& config,
                             const SolverOptions& options = {});

// Qubit, loss-free: 1 - max joint success probability of both clones
// (trusted) or both classical answer sets (untrusted).
double qubit_baseline(Terminal terminal, const SolverOptions& options = {});

struct QubitStrategy {
  double equal_challenges = 0.0;
  double unequal_challenges = 0.0;
  double total = 0.0;
};

// Case analysis of the measure-and-duplicate strategy for two untrusted
// terminals.
QubitStrategy strategy_untrusted_qubit();

// Joint success of that strategy evaluated from its channel (measurement in
// the matching or a random basis) against the SDP success operator.
double strategy_untrusted_qubit_channel_value();

// Expects a solution of loss_minimization_problem(ops, e, kSymmetrized):
// dual_equality = (d1, d2, d3), trace_preserving_dual = coordinates of D.
DualConditions check_dual_certificate(const OperatorSet& ops, double e,
                                      const SdpSolution& solution);

struct Certificate {
  ScenarioConfig config;
  SdpSolution solution;
  DualConditions conditions;
};

Certificate certify(const ScenarioConfig& config, const SolverOptions& options = {});

struct ParallelCheck {
  double f_d1 = 0.0;              // n = 1 optimum
  double tensor_objective = 0.0;  // Tr(L1^(2) J (x) J)
  double trace_residual = 0.0;
  double error_residual = 0.0;
  double ordering_violation = 0.0;
  double min_eigenvalue = 0.0;
  double max_residual = 0.0;
  std::optional<double> f_d2;  // full n = 2 optimum
  std::optional<SolveStatus> full_status;
};

// Requires config.n == 2, trusted terminal, pure states.
ParallelCheck tensor_parallel_check(const ScenarioConfig& config, bool full_solve = false,
                                    const SolverOptions& options = {});

// Largest t with honest_loss(t) < f_d, to 1e-3 us; 0 when insecure at t = 0.
double secure_lifetime(const ScenarioConfig& config, double f_d);
double secure_lifetime(const ScenarioConfig& config, const SolverOptions& options = {});

enum class SweepMode { kMinLoss, kMinError };

struct SweepGrid {
  std::vector<Terminal> terminals{Terminal::kTrusted};
  std::vector<bool> phase_randomized{false};
  std::vector<double> eta_d{1.0};
  std::vector<double> e{0.0};
  std::vector<double> mu;
};

struct SweepOptions {
  SweepMode mode = SweepMode::kMinLoss;
  std::size_t workers = 1;
  std::optional<MemoryModel> memory;
  bool lifetimes = false;  // min-loss only
  std::size_t card_length = 0;
  SolverOptions solver;
};

struct SweepRow {
  std::size_t index = 0;
  ScenarioConfig config;
  std::optional<SecurityReport> report;
  std::optional<double> t_star;
  std::string error;  // empty on success

  bool failed() const;
};

// Row order: terminal, phase_randomized, eta_d, e, mu (mu fastest).
std::vector<ScenarioConfig> expand_grid(const SweepGrid& grid);
std::vector<SweepRow> sweep(const SweepGrid& grid, const SweepOptions& options);
std::vector<SweepRow> sweep(const std::vector<ScenarioConfig>& points,
                            const SweepOptions& options);

}  // namespace qmoney
