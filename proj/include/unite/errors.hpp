#pragma once

#include <stdexcept>
#include <string>

namespace unite {

// Precondition violated by a caller-supplied argument.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Treatment probability outside (0, 1).
class PositivityViolation : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// An estimator needs both arms populated and one of them is empty
// (or its self-normalizer vanished).
class DegenerateAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment / CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ArgumentError(msg);
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": size " + std::to_string(a) +
                            " != " + std::to_string(b));
  }
}

}  // namespace detail
}  // namespace unite
