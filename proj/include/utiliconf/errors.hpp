#pragma once

#include <stdexcept>
#include <string>

namespace utiliconf {

// Argument outside the mathematical domain of an operation (negative time,
// probability outside [0,1], m = 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature or a root search failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (runtime matrix, utility table, synthetic spec).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A finite run source ran out of instances.
class ExhaustedStreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that make a procedure meaningless, e.g. Naive with u(kappa) >= epsilon.
class InfeasibleInputsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The adversarial construction was asked for a pair that passes the check.
class NoCounterexampleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace utiliconf
