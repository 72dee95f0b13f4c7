#pragma once

#include <stdexcept>
#include <string>

namespace pporpe {

// Shape or precondition violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hyperparameters that make the objective ill-defined.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value that should be finite was not (gradient, loss, coefficient).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by environments stepped after the episode ended.
class EpisodeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pporpe
