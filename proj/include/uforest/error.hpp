#pragma once

#include <stdexcept>
#include <string>

namespace uforest {

// Invalid hyperparameters, settings or fractions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input shape problems, e.g. a query vector of the wrong dimension.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Model fitting failed (empty sets, fewer than two classes, ...).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable data files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uforest
