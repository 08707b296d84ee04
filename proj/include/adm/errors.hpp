#pragma once

#include <stdexcept>
#include <string>

namespace adm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ParameterError : Error {
  using Error::Error;
};

// Factorization rejected the input (non-SPD matrix, singular system).
struct FactorizationError : Error {
  using Error::Error;
};

// Iterative routine hit its iteration cap; carries the last estimate.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double estimate)
      : Error(what), last_estimate(estimate) {}
  double last_estimate;
};

// The requested solver cannot handle this loss/regularizer combination.
struct CapabilityError : Error {
  using Error::Error;
};

// Argument outside the domain of the generator function (e.g. KL off the simplex).
struct DomainError : Error {
  using Error::Error;
};

struct InvariantError : Error {
  using Error::Error;
};

}  // namespace adm
