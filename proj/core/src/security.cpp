#include "qmoney/security.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "qmoney/errors.hpp"

namespace qmoney {

double honest_loss(double mu, double eta_d, double t_us,
                   const std::optional<MemoryModel>& memory) {
  if (!(t_us >= 0.0)) throw DomainError("honest_loss: t must be >= 0");
  if (t_us > 0.0 && !memory) throw DomainError("honest_loss: t > 0 requires a memory model");
  if (std::isinf(t_us)) return 1.0;
  const double eta_m = memory ? memory->retrieval_efficiency(t_us) : 1.0;
  return std::exp(-mu * eta_d * eta_m);
}

bool CountWindow::contains(double count) const {
  return std::abs(count - expected) <= half_width;
}

CountWindow count_window(double rate, std::size_t n, double kappa) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("count_window: rate must lie in [0, 1]");
  const double nn = static_cast<double>(n);
  return {rate * nn, kappa * std::sqrt(rate * (1.0 - rate) * nn)};
}

OperatorSet build_scenario_ops(const ScenarioConfig& config) {
  config.validate();
  const StateFamily f = build_states(config);
  if (config.n == 1) return build_ops(f, config.terminal);
  return build_n_state_ops(f, config.n, config.terminal);
}

namespace {

// Orthonormal basis of ker(m) for m >= 0.
ComplexMatrix kernel_basis(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  const RealVector& ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::Index k = 0;
  while (k < ev.size() && ev(k) <= cutoff) ++k;
  return es.eigenvectors().leftCols(k);
}

PartialTraceIdentity tp_of(const OperatorSet& ops) {
  return PartialTraceIdentity{ops.out_dim, ops.in_dim};
}

void require_optimal(const SdpSolution& sol, const char* what) {
  if (sol.optimal()) return;
  std::ostringstream msg;
  msg << what << ": solver status " << to_string(sol.status) << " after " << sol.iterations
      << " iterations (gap " << sol.gap << ", primal infeasibility "
      << sol.primal_infeasibility << ", dual infeasibility " << sol.dual_infeasibility << ")";
  throw SolverError(msg.str());
}

void attach_windows(SecurityReport& r) {
  if (r.config.card_length == 0) return;
  r.error_window = count_window(r.config.error_target, r.config.card_length);
  if (r.f_d) r.loss_window = count_window(*r.f_d, r.config.card_length);
}

}  // namespace

SdpProblem loss_minimization_problem(const OperatorSet& ops, double e, LossForm form) {
  if (!(e >= 0.0 && e <= 0.5)) throw DomainError("error target e must lie in [0, 0.5]");
  SdpProblem p;
  p.objective = ops.l1;
  p.goal = Goal::kMinimize;
  p.trace_preserving = tp_of(ops);
  const ComplexMatrix dl = ops.l1 - ops.l2;

  if (e == 0.0) {
    // Tr(E1 J) = 0 forces Tr(E2 J) = 0 as well, so J lives on ker(E1 + E2).
    p.face = kernel_basis(ops.e1 + ops.e2);
    if (p.face->cols() == 0) throw SolverError("error-free channels do not exist for these operators");
    if (form == LossForm::kOrdered) {
      p.inequalities.push_back({dl, 0.0, InequalitySense::kGreaterEqual});
    } else {
      p.equalities.push_back({dl, 0.0});
    }
    return p;
  }

  if (form == LossForm::kOrdered) {
    p.equalities.push_back({ops.e1, e});
    p.inequalities.push_back({ops.e1 - ops.e2, 0.0, InequalitySense::kGreaterEqual});
    p.inequalities.push_back({dl, 0.0, InequalitySense::kGreaterEqual});
  } else {
    p.equalities.push_back({ops.e1, e});
    p.equalities.push_back({ops.e2, e});
    p.equalities.push_back({dl, 0.0});
  }
  return p;
}

SdpProblem error_minimization_problem(const OperatorSet& ops, double loss_budget) {
  if (!(loss_budget >= 0.0 && loss_budget <= 1.0)) {
    throw DomainError("loss budget must lie in [0, 1]");
  }
  SdpProblem p;
  p.objective = ops.e1;
  p.goal = Goal::kMinimize;
  p.trace_preserving = tp_of(ops);
  p.inequalities.push_back({ops.e1 - ops.e2, 0.0, InequalitySense::kGreaterEqual});
  p.inequalities.push_back({ops.l1, loss_budget, InequalitySense::kLessEqual});
  p.inequalities.push_back({ops.l2, loss_budget, InequalitySense::kLessEqual});
  return p;
}

SecurityReport min_loss_sdp(const ScenarioConfig& config, const SolverOptions& options) {
  const OperatorSet ops = build_scenario_ops(config);
  const SdpSolution sol = solve(loss_minimization_problem(ops, config.error_target), options);
  require_optimal(sol, "min_loss_sdp");

  SecurityReport r;
  r.config = config;
  r.f_h = honest_loss(config.mu, config.eta_d, 0.0, config.memory);
  r.f_d = std::clamp(sol.primal_value, 0.0, 1.0);
  r.secure = *r.f_d > r.f_h;
  r.gap = sol.gap;
  r.status = sol.status;
  r.iterations = sol.iterations;
  attach_windows(r);
  return r;
}

SecurityReport min_error_sdp(const ScenarioConfig& config, const SolverOptions& options) {
  const OperatorSet ops = build_scenario_ops(config);
  const double f_h = honest_loss(config.mu, config.eta_d, 0.0, config.memory);
  const SdpSolution sol = solve(error_minimization_problem(ops, f_h), options);
  require_optimal(sol, "min_error_sdp");

  SecurityReport r;
  r.config = config;
  r.f_h = f_h;
  r.e_star = std::clamp(sol.primal_value, 0.0, 1.0);
  r.secure = *r.e_star > config.error_target;
  r.gap = sol.gap;
  r.status = sol.status;
  r.iterations = sol.iterations;
  attach_windows(r);
  return r;
}

namespace {

ComplexMatrix qubit_projector(int k) { return projector(qubit_state(k)); }

ComplexMatrix conj_qubit_projector(int k) { return qubit_projector(k).conjugate(); }

// Joint success operator for two untrusted answer sets on
// (answer-1, answer-2) x (challenge-1, challenge-2, qubit).
ComplexMatrix untrusted_qubit_success() {
  const ComplexMatrix id = identity(2);
  const std::array<ComplexMatrix, 2> a{projector(basis_vector(2, 0)),
                                       projector(basis_vector(2, 1))};
  ComplexMatrix f = ComplexMatrix::Zero(32, 32);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 4; ++k) {
        const int answer = k < 2 ? 0 : 1;
        const ComplexMatrix& a1 = k % 2 == i ? a[answer] : id;
        const ComplexMatrix& a2 = k % 2 == j ? a[answer] : id;
        f += kron({a1, a2, a[i], a[j], conj_qubit_projector(k)}) / 16.0;
      }
    }
  }
  return f;
}

ComplexMatrix trusted_qubit_success() {
  ComplexMatrix f = ComplexMatrix::Zero(8, 8);
  for (int k = 0; k < 4; ++k) {
    f += 0.25 * kron({qubit_projector(k), qubit_projector(k), conj_qubit_projector(k)});
  }
  return f;
}

}  // namespace

double qubit_baseline(Terminal terminal, const SolverOptions& options) {
  SdpProblem p;
  p.goal = Goal::kMaximize;
  if (terminal == Terminal::kTrusted) {
    p.objective = trusted_qubit_success();
    p.trace_preserving = PartialTraceIdentity{4, 2};
  } else {
    p.objective = untrusted_qubit_success();
    p.trace_preserving = PartialTraceIdentity{4, 8};
  }
  const SdpSolution sol = solve(p, options);
  require_optimal(sol, "qubit_baseline");
  return 1.0 - sol.primal_value;
}

QubitStrategy strategy_untrusted_qubit() {
  QubitStrategy s;
  s.equal_challenges = 1.0;
  s.unequal_challenges = 0.5 * 1.0 + 0.5 * 0.5;
  s.total = 0.5 * s.equal_challenges + 0.5 * s.unequal_challenges;
  return s;
}

double strategy_untrusted_qubit_channel_value() {
  // Choi matrix of the classical-input measurement channel:
  // sum_{i,j} sum_{a1,a2} |a1 a2><a1 a2| (x) |c_i c_j><c_i c_j| (x) P_{a1 a2|ij}^T.
  const std::array<ComplexMatrix, 2> a{projector(basis_vector(2, 0)),
                                       projector(basis_vector(2, 1))};
  ComplexMatrix j_choi = ComplexMatrix::Zero(32, 32);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 2; ++a2) {
          ComplexMatrix povm = ComplexMatrix::Zero(2, 2);
          if (i == j) {
            if (a1 == a2) povm = qubit_projector(i + 2 * a1);
          } else {
            povm = 0.25 * qubit_projector(i + 2 * a1) + 0.25 * qubit_projector(j + 2 * a2);
          }
          j_choi += kron({a[a1], a[a2], a[i], a[j], ComplexMatrix(povm.transpose())});
        }
      }
    }
  }
  return trace_product(untrusted_qubit_success(), j_choi);
}

DualConditions check_dual_certificate(const OperatorSet& ops, double e,
                                      const SdpSolution& solution) {
  if (solution.dual_equality.size() != 3) {
    throw ContractViolation("check_dual_certificate: expected three equality multipliers");
  }
  if (solution.trace_preserving_dual.size() != ops.in_dim * ops.in_dim) {
    throw ContractViolation("check_dual_certificate: trace-preserving multipliers missing");
  }
  DualConditions c;
  c.d1 = solution.dual_equality[0];
  c.d2 = solution.dual_equality[1];
  c.d3 = solution.dual_equality[2];
  const ComplexMatrix d = hermitian_from_coordinates(solution.trace_preserving_dual, ops.in_dim);
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    for (Eigen::Index col = 0; col < d.cols(); ++col) {
      if (r != col) c.max_off_diagonal = std::max(c.max_off_diagonal, std::abs(d(r, col)));
    }
  }
  c.trace_d = d.trace().real();
  c.trace_residual = std::abs(c.trace_d - (solution.primal_value - (c.d1 + c.d2) * e));

  const ComplexMatrix lmi = c.d1 * ops.e1 + c.d2 * ops.e2 + c.d3 * (ops.l1 - ops.l2) +
                            kron(identity(ops.out_dim), d) - ops.l1;
  c.lmi_max_eigenvalue = max_eigenvalue(hermitian_part(lmi));
  c.gap = solution.gap;
  c.gap_tolerance = e < 1e-6 ? 1e-4 : 1e-6;

  if (!(c.d1 < 0.0)) c.failures.push_back("d1 is not negative");
  if (!(c.d2 < 0.0)) c.failures.push_back("d2 is not negative");
  if (!(std::abs(c.d3 - 0.5) <= 1e-3)) c.failures.push_back("d3 differs from 0.5");
  if (!(c.max_off_diagonal <= 1e-6)) c.failures.push_back("D has off-diagonal entries");
  if (!(c.trace_residual <= 1e-4)) c.failures.push_back("Tr(D) identity violated");
  if (!(c.lmi_max_eigenvalue <= 1e-8)) c.failures.push_back("dual LMI violated");
  if (!(c.gap <= c.gap_tolerance)) c.failures.push_back("duality gap too large");
  c.valid = c.failures.empty();
  return c;
}

Certificate certify(const ScenarioConfig& config, const SolverOptions& options) {
  const OperatorSet ops = build_scenario_ops(config);
  if (config.error_target == 0.0) {
    throw DomainError("certify: e = 0 has no strictly feasible primal; use e > 0");
  }
  Certificate cert;
  cert.config = config;
  cert.solution = solve(loss_minimization_problem(ops, config.error_target,
                                                  LossForm::kSymmetrized),
                        options);
  require_optimal(cert.solution, "certify");
  cert.conditions = check_dual_certificate(ops, config.error_target, cert.solution);
  return cert;
}

ParallelCheck tensor_parallel_check(const ScenarioConfig& config, bool full_solve,
                                    const SolverOptions& options) {
  config.validate();
  if (config.n != 2) throw DomainError("tensor_parallel_check: requires n = 2");
  if (config.terminal != Terminal::kTrusted || config.phase_randomized) {
    throw DomainError("tensor_parallel_check: defined for trusted, pure states");
  }
  const StateFamily f = build_states(config);
  const OperatorSet ops2 = build_n_state_ops(f, 2, Terminal::kTrusted);
  const OperatorSet ops1 = build_trusted_ops(f);

  const SdpSolution sol1 = solve(loss_minimization_problem(ops1, config.error_target), options);
  require_optimal(sol1, "tensor_parallel_check");

  ParallelCheck out;
  out.f_d1 = sol1.primal_value;

  // (c1 c2 m) (x) (c1 c2 m) -> (c1 c1', c2 c2', m m')
  const std::size_t m = ops1.in_dim;
  const SubsystemDims pair{kCloneDim, kCloneDim, m, kCloneDim, kCloneDim, m};
  const std::array<std::size_t, 6> order{0, 3, 1, 4, 2, 5};
  const ComplexMatrix jj = permute_subsystems(kron(sol1.x, sol1.x), pair, order);

  const SubsystemDims split{ops2.out_dim, ops2.in_dim};
  const ComplexMatrix tr = partial_trace(jj, split, {1});
  out.trace_residual = (tr - identity(ops2.in_dim)).cwiseAbs().maxCoeff();
  const double err1 = trace_product(ops2.e1, jj);
  const double err2 = trace_product(ops2.e2, jj);
  const double loss1 = trace_product(ops2.l1, jj);
  const double loss2 = trace_product(ops2.l2, jj);
  out.error_residual = std::abs(err1 - config.error_target);
  out.ordering_violation = std::max({0.0, err2 - err1, loss2 - loss1});
  out.min_eigenvalue = min_eigenvalue(hermitian_part(jj));
  out.tensor_objective = loss1;
  out.max_residual = std::max({out.trace_residual, out.error_residual, out.ordering_violation,
                               std::max(0.0, -out.min_eigenvalue)});

  if (full_solve) {
    const SdpSolution sol2 = solve(loss_minimization_problem(ops2, config.error_target), options);
    out.full_status = sol2.status;
    if (sol2.optimal()) out.f_d2 = sol2.primal_value;
  }
  return out;
}

double secure_lifetime(const ScenarioConfig& config, double f_d) {
  config.validate();
  if (!config.memory) throw DomainError("secure_lifetime: a memory model is required");
  auto f_h = [&](double t) { return honest_loss(config.mu, config.eta_d, t, config.memory); };
  if (f_h(0.0) >= f_d) return 0.0;
  if (f_d >= 1.0) return std::numeric_limits<double>::infinity();

  double lo = 0.0;
  double hi = config.memory->tau_us;
  while (f_h(hi) < f_d) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (f_h(mid) < f_d ? lo : hi) = mid;
  }
  return lo;
}

double secure_lifetime(const ScenarioConfig& config, const SolverOptions& options) {
  const SecurityReport r = min_loss_sdp(config, options);
  return secure_lifetime(config, *r.f_d);
}

bool SweepRow::failed() const { return !error.empty(); }

std::vector<ScenarioConfig> expand_grid(const SweepGrid& grid) {
  std::vector<ScenarioConfig> out;
  for (Terminal t : grid.terminals) {
    for (bool pr : grid.phase_randomized) {
      for (double eta : grid.eta_d) {
        for (double e : grid.e) {
          for (double mu : grid.mu) {
            ScenarioConfig c;
            c.terminal = t;
            c.phase_randomized = pr;
            c.eta_d = eta;
            c.error_target = e;
            c.mu = mu;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

std::vector<SweepRow> sweep(const SweepGrid& grid, const SweepOptions& options) {
  return sweep(expand_grid(grid), options);
}

std::vector<SweepRow> sweep(const std::vector<ScenarioConfig>& points,
                            const SweepOptions& options) {
  std::vector<SweepRow> rows(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    rows[i].index = i;
    rows[i].config = points[i];
    if (options.memory) rows[i].config.memory = options.memory;
    if (options.card_length > 0) rows[i].config.card_length = options.card_length;
  }

  auto run_point = [&](SweepRow& row) {
    try {
      if (options.mode == SweepMode::kMinLoss) {
        row.report = min_loss_sdp(row.config, options.solver);
        if (options.lifetimes && row.config.memory) {
          row.t_star = secure_lifetime(row.config, *row.report->f_d);
        }
      } else {
        row.report = min_error_sdp(row.config, options.solver);
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, rows.size()));
  if (workers <= 1) {
    for (auto& row : rows) run_point(row);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run_point(rows[i]);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace qmoney
