#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qmoney/linalg.hpp"

namespace qmoney {

enum class Goal { kMinimize, kMaximize };
enum class InequalitySense { kLessEqual, kGreaterEqual };

struct TraceEquality {
  ComplexMatrix a;
  double rhs = 0.0;
};

struct TraceInequality {
  ComplexMatrix g;
  double rhs = 0.0;
  InequalitySense sense = InequalitySense::kLessEqual;
};

// Tr_out(X) = 1_in for X on out (x) in, i.e. X is the Choi matrix of a
// trace-preserving map. Encoded as in_dim^2 real constraints, one per element
// of the Hermitian basis returned by hermitian_basis_element().
struct PartialTraceIdentity {
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
};

// Minimize or maximize Re Tr(C X) over Hermitian X >= 0 subject to trace
// equalities and inequalities. Inequalities are turned into equalities with
// nonnegative slack scalars.
struct SdpProblem {
  ComplexMatrix objective;
  Goal goal = Goal::kMinimize;
  std::optional<PartialTraceIdentity> trace_preserving;
  std::vector<TraceEquality> equalities;
  std::vector<TraceInequality> inequalities;
  // Orthonormal columns V; when present X is restricted to V K V^dagger with
  // K >= 0 (facial reduction).
  std::optional<ComplexMatrix> face;

  std::size_t variable_dim() const { return static_cast<std::size_t>(objective.rows()); }
  std::size_t equality_count() const;
  // Throws DimensionError / ContractViolation on malformed data.
  void validate() const;
};

enum class SolveStatus { kOptimal, kMaxIterations, kInfeasible, kNumericalFailure };

std::string_view to_string(SolveStatus s);

struct SdpSolution {
  ComplexMatrix x;  // primal optimum in the full space
  // Dual multipliers: trace-preserving block (Hermitian-basis coordinates),
  // then the explicit equalities in input order.
  std::vector<double> trace_preserving_dual;
  std::vector<double> dual_equality;
  // Nonnegative multiplier and slack of each inequality.
  std::vector<double> dual_inequality;
  std::vector<double> inequality_slack;

  double primal_value = 0.0;  // in the problem's own goal sense
  double dual_value = 0.0;
  double gap = 0.0;           // |primal - dual|
  double relative_gap = 0.0;  // gap / (1 + |primal| + |dual|)
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  SolveStatus status = SolveStatus::kNumericalFailure;
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

struct IterationLog {
  int iteration;
  double primal_value;
  double dual_value;
  double complementarity;  // <X, Z> + x.z, always >= 0
  double primal_infeasibility;
  double dual_infeasibility;
  double step_primal;
  double step_dual;
};

struct SolverOptions {
  double gap_tolerance = 1e-7;
  double feasibility_tolerance = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.98;
  std::function<void(const IterationLog&)> log;
};

// Primal-dual path-following interior-point method (HKM direction, Mehrotra
// predictor-corrector). Deterministic for identical inputs.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

// Orthonormal Hermitian basis of d x d matrices indexed row-major by (a, b):
// E_aa on the diagonal, (E_ab + E_ba)/sqrt2 for a < b and
// i(E_ab - E_ba)/sqrt2 for a > b.
ComplexMatrix hermitian_basis_element(std::size_t d, std::size_t a, std::size_t b);
// Coordinates Re Tr(B_p H) in that basis, and the inverse map.
std::vector<double> hermitian_coordinates(const ComplexMatrix& h);
ComplexMatrix hermitian_from_coordinates(std::span<const double> coords, std::size_t d);

// Dense form of Tr_out(X) = 1_in for dims = (out, in): the d_in^2 constraints
// (1_out (x) B_p, delta_p) with delta_p the coordinates of 1_in.
std::vector<TraceEquality> vectorize_constraints(const SubsystemDims& dims);

}  // namespace qmoney
