#pragma once

#include <stdexcept>
#include <string>

namespace projgen {

/// An input violates the documented precondition of an operation
/// (wrong shape, parameter outside its admissible range, ...).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: no convergence, or a computed quantity
/// missed an identity it must satisfy.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Span closure grew past its dimension cap.
class closure_cap_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

/// Malformed textual input (JSON documents, supernatural numbers, queries).
class parse_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace projgen
