#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qmoney {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;

// Ordered tensor factors of a composite Hilbert space. The global
// convention is (clone-1, clone-2, mint-side factors...).
class SubsystemDims {
 public:
  SubsystemDims(std::initializer_list<std::size_t> factors);
  explicit SubsystemDims(std::vector<std::size_t> factors);

  std::size_t total() const { return total_; }
  std::size_t size() const { return factors_.size(); }
  std::size_t operator[](std::size_t i) const { return factors_[i]; }
  const std::vector<std::size_t>& factors() const { return factors_; }

  // Throws DimensionError unless total() == dim.
  void check_matches(std::size_t dim) const;

  bool operator==(const SubsystemDims&) const = default;

 private:
  std::vector<std::size_t> factors_;
  std::size_t total_ = 1;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors);

// Reduced matrix on the factors listed in `keep` (any order; duplicates are
// rejected). The kept factors appear in ascending index order.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims,
                            std::span<const std::size_t> keep);
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemDims& dims,
                            std::initializer_list<std::size_t> keep);

// Reorders tensor factors: factor `order[p]` of the input becomes factor p of
// the output.
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 const SubsystemDims& dims,
                                 std::span<const std::size_t> order);

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance);
// (M + M^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// Ascending eigenvalues. Throw ContractViolation on non-Hermitian input.
RealVector eigenvalues(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);
double max_eigenvalue(const ComplexMatrix& m);
double min_eigenvalue(const RealMatrix& m);

// Real symmetric image [[Re M, -Im M], [Im M, Re M]] of a Hermitian matrix.
RealMatrix realify(const ComplexMatrix& m);

ComplexMatrix identity(std::size_t d);
ComplexMatrix projector(const ComplexVector& v);
ComplexVector basis_vector(std::size_t d, std::size_t i);

// Re Tr(A B) for Hermitian A and arbitrary B.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qmoney
