#pragma once

#include <stdexcept>
#include <string>

namespace imdyn {

/// Precondition violation on a caller-supplied argument (dimension mismatch,
/// non-positive parameter, time before t0, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bracketed scalar minimization ended on the bracket boundary.
class SearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation does not apply to this configuration, e.g. the beta > 0
/// right-hand side requested for an undamped (beta = 0) schedule.
class ConfigurationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace imdyn
