#pragma once

#include <stdexcept>
#include <string>

namespace vwpinn {

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MissingBindingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a scalar was required (e.g. differentiating a non-scalar output).
struct RankError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonFiniteGradientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroBandwidthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace vwpinn
