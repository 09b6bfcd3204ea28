#pragma once

#include <stdexcept>
#include <string>

namespace qmetro {

/// Raised when a Fock-space cutoff cannot hold a state or operator to the
/// required tail tolerance. Never silently renormalized away.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form basis collapsed (e.g. the displaced branch coincides with vacuum).
class DegenerateBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmetro
