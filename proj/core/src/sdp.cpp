#include "qmoney/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qmoney/errors.hpp"

namespace qmoney {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct BasisTerm {
  Eigen::Index row;
  Eigen::Index col;
  Complex coef;
};

// Nonzero entries of hermitian basis element (a, b); at most two.
std::array<BasisTerm, 2> basis_terms(Eigen::Index a, Eigen::Index b, int& count) {
  if (a == b) {
    count = 1;
    return {BasisTerm{a, a, {1.0, 0.0}}, BasisTerm{0, 0, {0.0, 0.0}}};
  }
  count = 2;
  if (a < b) {
    return {BasisTerm{a, b, {kInvSqrt2, 0.0}}, BasisTerm{b, a, {kInvSqrt2, 0.0}}};
  }
  return {BasisTerm{a, b, {0.0, kInvSqrt2}}, BasisTerm{b, a, {0.0, -kInvSqrt2}}};
}

// Re Tr(B_(a,b) P) for arbitrary square P.
double basis_pairing(Eigen::Index a, Eigen::Index b, const ComplexMatrix& p) {
  int count = 0;
  const auto terms = basis_terms(a, b, count);
  Complex acc{0.0, 0.0};
  for (int t = 0; t < count; ++t) acc += terms[t].coef * p(terms[t].col, terms[t].row);
  return acc.real();
}

}  // namespace

ComplexMatrix hermitian_basis_element(std::size_t d, std::size_t a, std::size_t b) {
  if (a >= d || b >= d) throw DimensionError("hermitian_basis_element: index out of range");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  int count = 0;
  const auto terms = basis_terms(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b), count);
  for (int t = 0; t < count; ++t) out(terms[t].row, terms[t].col) += terms[t].coef;
  return out;
}

std::vector<double> hermitian_coordinates(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionError("hermitian_coordinates: not square");
  const auto d = h.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) out.push_back(basis_pairing(a, b, h));
  }
  return out;
}

ComplexMatrix hermitian_from_coordinates(std::span<const double> coords, std::size_t d) {
  if (coords.size() != d * d) throw DimensionError("hermitian_from_coordinates: size mismatch");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  std::size_t p = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b, ++p) {
      int count = 0;
      const auto terms = basis_terms(a, b, count);
      for (int t = 0; t < count; ++t) {
        out(terms[t].row, terms[t].col) += coords[p] * terms[t].coef;
      }
    }
  }
  return out;
}

std::vector<TraceEquality> vectorize_constraints(const SubsystemDims& dims) {
  if (dims.size() != 2) {
    throw DimensionError("vectorize_constraints: expected (out, in) dims");
  }
  const std::size_t d_out = dims[0];
  const std::size_t d_in = dims[1];
  const ComplexMatrix id_out = identity(d_out);
  std::vector<TraceEquality> out;
  out.reserve(d_in * d_in);
  for (std::size_t a = 0; a < d_in; ++a) {
    for (std::size_t b = 0; b < d_in; ++b) {
      out.push_back({kron(id_out, hermitian_basis_element(d_in, a, b)), a == b ? 1.0 : 0.0});
    }
  }
  return out;
}

std::size_t SdpProblem::equality_count() const {
  const std::size_t tp = trace_preserving ? trace_preserving->in_dim * trace_preserving->in_dim : 0;
  return tp + equalities.size();
}

void SdpProblem::validate() const {
  const auto n = objective.rows();
  if (n == 0 || objective.cols() != n) throw DimensionError("SDP objective must be square");
  if (!is_hermitian(objective, 1e-10)) throw ContractViolation("SDP objective not Hermitian");
  for (const auto& eq : equalities) {
    if (eq.a.rows() != n || eq.a.cols() != n) throw DimensionError("equality matrix dimension mismatch");
    if (!is_hermitian(eq.a, 1e-10)) throw ContractViolation("equality matrix not Hermitian");
  }
  for (const auto& in : inequalities) {
    if (in.g.rows() != n || in.g.cols() != n) throw DimensionError("inequality matrix dimension mismatch");
    if (!is_hermitian(in.g, 1e-10)) throw ContractViolation("inequality matrix not Hermitian");
  }
  if (trace_preserving) {
    if (trace_preserving->out_dim * trace_preserving->in_dim != static_cast<std::size_t>(n)) {
      throw DimensionError("trace-preserving block does not match the variable dimension");
    }
  }
  if (face) {
    if (face->rows() != n || face->cols() == 0 || face->cols() > n) {
      throw DimensionError("face basis has the wrong shape");
    }
    const auto r = face->cols();
    if (((face->adjoint() * *face) - ComplexMatrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10) {
      throw ContractViolation("face basis columns must be orthonormal");
    }
  }
  if (equality_count() == 0 && inequalities.empty()) {
    throw ContractViolation("SDP has no constraints");
  }
}

namespace {

// Constraint rows in order: trace-preserving coordinates, explicit
// equalities, inequalities. Everything is stored in the reduced space of the
// face (or the full space without one) and in minimization sense.
class ConstraintModel {
 public:
  explicit ConstraintModel(const SdpProblem& p) {
    face_ = p.face;
    if (p.trace_preserving) {
      out_ = static_cast<Eigen::Index>(p.trace_preserving->out_dim);
      in_ = static_cast<Eigen::Index>(p.trace_preserving->in_dim);
      tp_rows_ = in_ * in_;
    }
    const double sign = p.goal == Goal::kMinimize ? 1.0 : -1.0;
    c_ = reduce(sign * p.objective);
    for (const auto& eq : p.equalities) dense_.push_back(reduce(eq.a));
    for (const auto& in : p.inequalities) {
      dense_.push_back(reduce(in.g));
      lp_sign_.push_back(in.sense == InequalitySense::kLessEqual ? 1.0 : -1.0);
    }
    n_eq_ = static_cast<Eigen::Index>(p.equalities.size());
    m_ = tp_rows_ + static_cast<Eigen::Index>(dense_.size());
    b_ = RealVector::Zero(m_);
    for (Eigen::Index a = 0; a < in_; ++a) b_(a * in_ + a) = 1.0;
    for (std::size_t i = 0; i < p.equalities.size(); ++i) b_(tp_rows_ + i) = p.equalities[i].rhs;
    for (std::size_t j = 0; j < p.inequalities.size(); ++j) {
      b_(tp_rows_ + n_eq_ + j) = p.inequalities[j].rhs;
    }
    n_ = c_.rows();
  }

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Eigen::Index tp_rows() const { return tp_rows_; }
  Eigen::Index n_eq() const { return n_eq_; }
  Eigen::Index n_ineq() const { return static_cast<Eigen::Index>(lp_sign_.size()); }
  Eigen::Index ineq_row(Eigen::Index j) const { return tp_rows_ + n_eq_ + j; }
  double lp_sign(Eigen::Index j) const { return lp_sign_[static_cast<std::size_t>(j)]; }
  const ComplexMatrix& c() const { return c_; }
  const RealVector& b() const { return b_; }

  ComplexMatrix lift(const ComplexMatrix& k) const {
    if (!face_) return k;
    return (*face_) * k * face_->adjoint();
  }

  ComplexMatrix reduce(const ComplexMatrix& full) const {
    if (!face_) return full;
    return face_->adjoint() * full * (*face_);
  }

  // Re Tr(A_i G) for every row.
  RealVector apply(const ComplexMatrix& g) const {
    RealVector out(m_);
    if (tp_rows_ > 0) {
      const ComplexMatrix p = trace_out(lift(g));
      for (Eigen::Index a = 0; a < in_; ++a) {
        for (Eigen::Index b = 0; b < in_; ++b) out(a * in_ + b) = basis_pairing(a, b, p);
      }
    }
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      out(tp_rows_ + static_cast<Eigen::Index>(i)) = trace_product(dense_[i], g);
    }
    return out;
  }

  // sum_i y_i A_i
  ComplexMatrix adjoint(const RealVector& y) const {
    ComplexMatrix out;
    if (tp_rows_ > 0) {
      const std::vector<double> coords(y.data(), y.data() + tp_rows_);
      const ComplexMatrix h = hermitian_from_coordinates(coords, static_cast<std::size_t>(in_));
      out = reduce(identity_kron(h));
    } else {
      out = ComplexMatrix::Zero(n_, n_);
    }
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      out += y(tp_rows_ + static_cast<Eigen::Index>(i)) * dense_[i];
    }
    return out;
  }

  // M_ij = Re Tr(A_i X A_j W).
  RealMatrix schur(const ComplexMatrix& x, const ComplexMatrix& w) const {
    RealMatrix s = RealMatrix::Zero(m_, m_);
    if (tp_rows_ > 0) fill_trace_block(lift(x), lift(w), s);
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      const Eigen::Index col = tp_rows_ + static_cast<Eigen::Index>(i);
      const RealVector v = apply(w * dense_[i] * x);
      s.col(col) = v;
      s.row(col) = v.transpose();
    }
    return 0.5 * (s + s.transpose());
  }

 private:
  ComplexMatrix trace_out(const ComplexMatrix& full) const {
    ComplexMatrix p = ComplexMatrix::Zero(in_, in_);
    for (Eigen::Index o = 0; o < out_; ++o) p += full.block(o * in_, o * in_, in_, in_);
    return p;
  }

  ComplexMatrix identity_kron(const ComplexMatrix& h) const {
    ComplexMatrix full = ComplexMatrix::Zero(out_ * in_, out_ * in_);
    for (Eigen::Index o = 0; o < out_; ++o) full.block(o * in_, o * in_, in_, in_) = h;
    return full;
  }

  // K[(b,c),(d,a)] = Tr((1 x E_ab) X (1 x E_cd) W)
  //               = sum_{o,o'} X[(o,b),(o',c)] W[(o',d),(o,a)],
  // assembled as one GEMM, then contracted with the basis coefficients.
  void fill_trace_block(const ComplexMatrix& x, const ComplexMatrix& w, RealMatrix& s) const {
    const Eigen::Index pairs = in_ * in_;
    const Eigen::Index blocks = out_ * out_;
    ComplexMatrix px(pairs, blocks);
    ComplexMatrix qw(pairs, blocks);
    for (Eigen::Index o = 0; o < out_; ++o) {
      for (Eigen::Index op = 0; op < out_; ++op) {
        const Eigen::Index col = o * out_ + op;
        for (Eigen::Index b = 0; b < in_; ++b) {
          for (Eigen::Index c = 0; c < in_; ++c) {
            px(b * in_ + c, col) = x(o * in_ + b, op * in_ + c);
            qw(b * in_ + c, col) = w(op * in_ + b, o * in_ + c);
          }
        }
      }
    }
    const ComplexMatrix k = px * qw.transpose();
    for (Eigen::Index p = 0; p < pairs; ++p) {
      int cp = 0;
      const auto tp = basis_terms(p / in_, p % in_, cp);
      for (Eigen::Index q = 0; q <= p; ++q) {
        int cq = 0;
        const auto tq = basis_terms(q / in_, q % in_, cq);
        Complex acc{0.0, 0.0};
        for (int i = 0; i < cp; ++i) {
          for (int j = 0; j < cq; ++j) {
            // E_ab with (a,b) = tp[i], E_cd with (c,d) = tq[j].
            acc += tp[i].coef * tq[j].coef *
                   k(tp[i].col * in_ + tq[j].row, tq[j].col * in_ + tp[i].row);
          }
        }
        s(p, q) = acc.real();
        s(q, p) = acc.real();
      }
    }
  }

  std::optional<ComplexMatrix> face_;
  Eigen::Index out_ = 0;
  Eigen::Index in_ = 0;
  Eigen::Index tp_rows_ = 0;
  Eigen::Index n_eq_ = 0;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  ComplexMatrix c_;
  RealVector b_;
  std::vector<ComplexMatrix> dense_;
  std::vector<double> lp_sign_;
};

// Largest alpha with M + alpha dM >= 0, given the Cholesky factor of M.
double max_psd_step(const Eigen::LLT<ComplexMatrix>& chol, const ComplexMatrix& dm) {
  const auto& l = chol.matrixL();
  ComplexMatrix s = l.solve(dm);
  s = l.solve(s.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(s), Eigen::EigenvaluesOnly);
  const double lambda = es.eigenvalues()(0);
  return lambda >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lambda;
}

double max_orthant_step(const RealVector& v, const RealVector& dv) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

double inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

struct Direction {
  ComplexMatrix dx, dz;
  RealVector dy, dxl, dzl;
};

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();

  // Normalize a large objective; values are scaled back at the end.
  double scale = 1.0;
  {
    const double norm = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(
                            hermitian_part(problem.objective), Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
    if (norm > 1e3) scale = norm;
  }
  SdpProblem scaled_copy;
  const SdpProblem* work = &problem;
  if (scale != 1.0) {
    scaled_copy = problem;
    scaled_copy.objective /= scale;
    work = &scaled_copy;
  }

  const ConstraintModel model(*work);
  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();
  const Eigen::Index p = model.n_ineq();
  const RealVector& b = model.b();
  const ComplexMatrix& c = model.c();

  const double tau = std::max(1.0, b.cwiseAbs().maxCoeff());
  ComplexMatrix x = tau * ComplexMatrix::Identity(n, n);
  ComplexMatrix z = tau * ComplexMatrix::Identity(n, n);
  RealVector xl = RealVector::Constant(p, tau);
  RealVector zl = RealVector::Constant(p, tau);
  RealVector y = RealVector::Zero(m);

  const double b_norm = 1.0 + b.norm();
  const double c_norm = 1.0 + c.norm();
  const double cone_dim = static_cast<double>(n + p);

  SdpSolution sol;
  sol.status = SolveStatus::kMaxIterations;

  auto lp_apply = [&](const RealVector& v) {  // B v
    RealVector out = RealVector::Zero(m);
    for (Eigen::Index j = 0; j < p; ++j) out(model.ineq_row(j)) = model.lp_sign(j) * v(j);
    return out;
  };
  auto lp_adjoint = [&](const RealVector& v) {  // B^T v
    RealVector out(p);
    for (Eigen::Index j = 0; j < p; ++j) out(j) = model.lp_sign(j) * v(model.ineq_row(j));
    return out;
  };

  double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0;
  int iter = 0;
  for (; iter <= options.max_iterations; ++iter) {
    const RealVector rp = b - model.apply(x) - lp_apply(xl);
    const ComplexMatrix rd = c - model.adjoint(y) - z;
    const RealVector rdl = -lp_adjoint(y) - zl;

    pobj = trace_product(c, x);
    dobj = b.dot(y);
    const double compl_ = inner(x, z) + xl.dot(zl);
    const double mu = compl_ / cone_dim;
    pinf = rp.norm() / b_norm;
    dinf = std::sqrt(rd.squaredNorm() + rdl.squaredNorm()) / c_norm;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (pinf <= options.feasibility_tolerance && dinf <= options.feasibility_tolerance &&
        rel_gap <= options.gap_tolerance) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    if (y.cwiseAbs().maxCoeff() > 1e10 * c_norm || x.cwiseAbs().maxCoeff() > 1e10 * b_norm) {
      sol.status = SolveStatus::kInfeasible;
      break;
    }
    if (iter == options.max_iterations) break;

    const Eigen::LLT<ComplexMatrix> chol_x(x);
    const Eigen::LLT<ComplexMatrix> chol_z(z);
    if (chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) {
      sol.status = SolveStatus::kNumericalFailure;
      break;
    }
    const ComplexMatrix w = hermitian_part(chol_z.solve(ComplexMatrix::Identity(n, n)));

    RealMatrix schur = model.schur(x, w);
    for (Eigen::Index j = 0; j < p; ++j) {
      schur(model.ineq_row(j), model.ineq_row(j)) += xl(j) / zl(j);
    }
    Eigen::LLT<RealMatrix> chol_m(schur);
    if (chol_m.info() != Eigen::Success) {
      const double diag = schur.diagonal().cwiseAbs().maxCoeff();
      for (double ridge = 1e-14; ridge <= 1e-6; ridge *= 100.0) {
        RealMatrix reg = schur;
        reg.diagonal().array() += ridge * diag;
        chol_m.compute(reg);
        if (chol_m.info() == Eigen::Success) break;
      }
      if (chol_m.info() != Eigen::Success) {
        sol.status = SolveStatus::kNumericalFailure;
        break;
      }
    }

    const ComplexMatrix x_rd_w = x * rd * w;
    const RealVector a_x_rd_w = model.apply(x_rd_w);

    // Newton direction for X Z -> target I with second-order term `corr`.
    auto direction = [&](double target, const ComplexMatrix* corr, const RealVector* corrl) {
      ComplexMatrix rc_w = target * w - x;
      if (corr) rc_w -= (*corr) * w;
      RealVector rcl = RealVector::Constant(p, target) - xl.cwiseProduct(zl);
      if (corrl) rcl -= *corrl;
      const RealVector lp_rhs = (rcl - xl.cwiseProduct(rdl)).cwiseQuotient(zl);
      const RealVector rhs = rp - model.apply(rc_w) + a_x_rd_w - lp_apply(lp_rhs);

      Direction d;
      d.dy = chol_m.solve(rhs);
      d.dz = hermitian_part(rd - model.adjoint(d.dy));
      d.dx = hermitian_part(rc_w - x * d.dz * w);
      d.dzl = rdl - lp_adjoint(d.dy);
      d.dxl = (rcl - xl.cwiseProduct(d.dzl)).cwiseQuotient(zl);
      return d;
    };
    auto steps = [&](const Direction& d) {
      const double ap = std::min(max_psd_step(chol_x, d.dx), max_orthant_step(xl, d.dxl));
      const double ad = std::min(max_psd_step(chol_z, d.dz), max_orthant_step(zl, d.dzl));
      return std::pair{std::min(1.0, options.step_fraction * ap),
                       std::min(1.0, options.step_fraction * ad)};
    };

    const Direction pred = direction(0.0, nullptr, nullptr);
    const auto [ap_aff, ad_aff] = steps(pred);
    const double mu_aff =
        (inner(x + ap_aff * pred.dx, z + ad_aff * pred.dz) +
         (xl + ap_aff * pred.dxl).dot(zl + ad_aff * pred.dzl)) / cone_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const ComplexMatrix corr = pred.dx * pred.dz;
    const RealVector corrl = pred.dxl.cwiseProduct(pred.dzl);
    const Direction dir = direction(sigma * mu, &corr, &corrl);
    const auto [ap, ad] = steps(dir);

    x = hermitian_part(x + ap * dir.dx);
    xl += ap * dir.dxl;
    y += ad * dir.dy;
    z = hermitian_part(z + ad * dir.dz);
    zl += ad * dir.dzl;

    if (options.log) {
      options.log({iter, pobj * scale, dobj * scale, compl_ * scale, pinf, dinf, ap, ad});
    }
  }

  const double sign = problem.goal == Goal::kMinimize ? 1.0 : -1.0;
  sol.iterations = iter;
  sol.x = model.lift(x);
  sol.primal_value = sign * pobj * scale;
  sol.dual_value = sign * dobj * scale;
  sol.gap = std::abs(pobj - dobj) * scale;
  sol.relative_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  sol.primal_infeasibility = pinf;
  sol.dual_infeasibility = dinf;

  const RealVector y_out = sign * scale * y;
  sol.trace_preserving_dual.assign(y_out.data(), y_out.data() + model.tp_rows());
  sol.dual_equality.assign(y_out.data() + model.tp_rows(),
                           y_out.data() + model.tp_rows() + model.n_eq());
  for (Eigen::Index j = 0; j < p; ++j) {
    sol.dual_inequality.push_back(zl(j) * scale);
    sol.inequality_slack.push_back(xl(j));
  }
  return sol;
}

}  // namespace qmoney
