#pragma once

#include <stdexcept>
#include <string>

namespace qmoney {

// Matrix shapes or subsystem splittings that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar parameter outside its physical range (negative mu, j > n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller broke a documented precondition (non-Hermitian input,
// non-trace-preserving channel, length mismatch).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Requested problem exceeds the configured size budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The SDP solver did not reach an optimal point.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmoney
