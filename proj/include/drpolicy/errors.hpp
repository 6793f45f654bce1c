#pragma once

#include <stdexcept>
#include <string>

namespace drpolicy {

// Invalid arguments or data that violate an operation's preconditions.
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

// A conditional feature covariance that cannot be inverted even after ridging.
class SingularCovarianceError : public std::runtime_error {
 public:
  explicit SingularCovarianceError(const std::string& what, long row = -1)
      : std::runtime_error(what), row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

// Logging policy with (near-)zero action variance; propensities cannot be estimated.
class DegenerateLoggingError : public std::runtime_error {
 public:
  explicit DegenerateLoggingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace drpolicy
