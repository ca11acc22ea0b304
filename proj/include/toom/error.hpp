#pragma once

#include <stdexcept>
#include <string>

namespace toom {

/// Argument outside the mathematical domain of an operation (bad lambda, |mu| >= 1,
/// degenerate scaling).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid run or lattice configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed checkpoint blob or data file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough samples / lags / batches for the requested statistic.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace toom
