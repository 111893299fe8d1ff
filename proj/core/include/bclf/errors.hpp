#ifndef BCLF_ERRORS_HPP
#define BCLF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bclf {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or invalid array dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid value domain (non-positive variance, non-finite input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Symmetric matrix failed a positivity requirement during factorization.
class NotPositiveDefiniteError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// DLM filtering produced a non-positive or non-finite scale at time t.
class FilterDivergenceError : public Error {
 public:
  FilterDivergenceError(const std::string& what, long t) : Error(what), t(t) {}
  long t;
};

/// Every candidate discount pair diverged during a grid search.
class GridSearchError : public Error {
 public:
  using Error::Error;
};

/// Operation called out of order (e.g. smoothing before filtering).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Transfer function singular at a specific (t, omega).
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, long t, double omega)
      : Error(what), t(t), omega(omega) {}
  long t;
  double omega;
};

/// Series too short for the requested model order.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input data (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace bclf

#endif  // BCLF_ERRORS_HPP
