#pragma once

#include <stdexcept>

namespace dyson {

// Argument outside the mathematical domain of a formula (t <= 0, unordered input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Configuration bound exceeded (kernel order, invalid experiment parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedKindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The h-transform density was asked for a start on the chamber boundary (h(x) = 0).
class BoundaryStartError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Degenerate anchor for the interlacing cone (zero-length interval).
class BoundaryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalInstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Substep halving of the Euler scheme fell below the minimum step.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Rejection sampler acceptance rate collapsed.
class EnvelopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied callable broke its contract (e.g. non-monotone CDF).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dyson
