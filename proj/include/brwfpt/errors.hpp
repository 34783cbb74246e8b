#pragma once

#include <stdexcept>
#include <string>

namespace brwfpt {

/// Invalid model or run configuration (bad pmf, wrong dimension, missing sampler).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where a function is finite.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solver failed to converge or a numeric invariant broke.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No parameter value satisfies the requested equation or constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many replicates hit the population cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace brwfpt
