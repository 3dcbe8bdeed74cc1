#include "qmoney/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qmoney/errors.hpp"

namespace qmoney {

SubsystemDims::SubsystemDims(std::initializer_list<std::size_t> factors)
    : SubsystemDims(std::vector<std::size_t>(factors)) {}

SubsystemDims::SubsystemDims(std::vector<std::size_t> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) {
    throw DimensionError("SubsystemDims: at least one factor required");
  }
  for (std::size_t f : factors_) {
    if (f == 0) throw DimensionError("SubsystemDims: factor dimension 0");
    total_ *= f;
  }
}

void SubsystemDims::check_matches(std::size_t dim) const {
  if (dim != total_) {
    throw DimensionError("subsystem dims multiply to " +
                         std::to_string(total_) + " but matrix has dimension " +
                         std::to_string(dim));
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rb = b.rows();
  const Eigen::Index cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * rb, j * cb, rb, cb).noalias() = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
  if (factors.size() == 0) return ComplexMatrix::Ones(1, 1);
  auto it = factors.begin();
  ComplexMatrix out = *it++;
  for (; it != factors.end(); ++it) out = kron(out, *it);
  return out;
}

namespace {

std::vector<std::size_t> strides_of(const SubsystemDims& dims) {
  std::vector<std::size_t> strides(dims.size());
  std::size_t s = 1;
  for (std::size_t f = dims.size(); f-- > 0;) {
    strides[f] = s;
    s *= dims[f];
  }
  return strides;
}

// Flat offsets of every joint index over `factors` (row-major in the order
// given), measured with the full-space strides.
std::vector<std::size_t> offsets_over(const SubsystemDims& dims,
                                      const std::vector<std::size_t>& strides,
                                      const std::vector<std::size_t>& factors) {
  std::vector<std::size_t> offsets{0};
  for (std::size_t f : factors) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * dims[f]);
    for (std::size_t base : offsets) {
      for (std::size_t d = 0; d < dims[f]; ++d) next.push_back(base + d * strides[f]);
    }
    offsets = std::move(next);
  }
  return offsets;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims,
                            std::span<const std::size_t> keep) {
  if (m.rows() != m.cols()) throw DimensionError("partial_trace: matrix not square");
  dims.check_matches(static_cast<std::size_t>(m.rows()));

  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DimensionError("partial_trace: keep index out of range");
    if (kept[k]) throw DimensionError("partial_trace: duplicate keep index");
    kept[k] = true;
  }
  std::vector<std::size_t> keep_factors, traced_factors;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    (kept[f] ? keep_factors : traced_factors).push_back(f);
  }

  const auto strides = strides_of(dims);
  const auto keep_off = offsets_over(dims, strides, keep_factors);
  const auto trace_off = offsets_over(dims, strides, traced_factors);

  const auto dk = static_cast<Eigen::Index>(keep_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t t : trace_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[r] + t),
                 static_cast<Eigen::Index>(keep_off[c] + t));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims,
                            std::initializer_list<std::size_t> keep) {
  std::vector<std::size_t> k(keep);
  return partial_trace(m, dims, std::span<const std::size_t>(k));
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const SubsystemDims& dims,
                                 std::span<const std::size_t> order) {
  if (m.rows() != m.cols()) throw DimensionError("permute_subsystems: matrix not square");
  dims.check_matches(static_cast<std::size_t>(m.rows()));
  if (order.size() != dims.size()) {
    throw DimensionError("permute_subsystems: order has wrong length");
  }
  std::vector<bool> seen(dims.size(), false);
  for (std::size_t f : order) {
    if (f >= dims.size() || seen[f]) {
      throw DimensionError("permute_subsystems: order is not a permutation");
    }
    seen[f] = true;
  }
  const auto strides = strides_of(dims);
  const std::vector<std::size_t> ordered(order.begin(), order.end());
  // Enumerating the old strides in the new factor order yields, for each new
  // flat index, the matching old flat index.
  const auto old_index = offsets_over(dims, strides, ordered);

  const auto n = m.rows();
  ComplexMatrix out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto oc = static_cast<Eigen::Index>(old_index[c]);
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, c) = m(static_cast<Eigen::Index>(old_index[r]), oc);
    }
  }
  return out;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

namespace {

void require_hermitian(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ContractViolation(std::string(who) + ": expected a non-empty square matrix");
  }
  if (!is_hermitian(m, 1e-10)) {
    throw ContractViolation(std::string(who) + ": matrix is not Hermitian");
  }
}

}  // namespace

RealVector eigenvalues(const ComplexMatrix& m) {
  require_hermitian(m, "eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& m) { return eigenvalues(m)(0); }

double max_eigenvalue(const ComplexMatrix& m) {
  const RealVector ev = eigenvalues(m);
  return ev(ev.size() - 1);
}

double min_eigenvalue(const RealMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ContractViolation("min_eigenvalue: expected a non-empty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ContractViolation("min_eigenvalue: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

RealMatrix realify(const ComplexMatrix& m) {
  require_hermitian(m, "realify");
  const auto d = m.rows();
  RealMatrix out(2 * d, 2 * d);
  const RealMatrix re = m.real();
  const RealMatrix im = m.imag();
  out.topLeftCorner(d, d) = re;
  out.topRightCorner(d, d) = -im;
  out.bottomLeftCorner(d, d) = im;
  out.bottomRightCorner(d, d) = re;
  return out;
}

ComplexMatrix identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return ComplexMatrix::Identity(n, n);
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

ComplexVector basis_vector(std::size_t d, std::size_t i) {
  if (i >= d) throw DimensionError("basis_vector: index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    throw DimensionError("trace_product: shape mismatch");
  }
  return a.transpose().cwiseProduct(b).sum().real();
}

}  // namespace qmoney
