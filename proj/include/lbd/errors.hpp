#pragma once

#include <stdexcept>
#include <string>

namespace lbd {

/// Invalid or out-of-support input data (nonpositive observation, empty sample, ...).
class DataError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a density or transform (e.g. y <= 0).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Malformed configuration, descriptor, grid or bandwidth.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Sampler failure: degenerate conditional or truncation guard exceeded.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Process exit codes used by the CLI.
enum class ExitCode : int
{
  ok = 0,
  data = 1,
  config = 2,
  numerical = 3
};

} // namespace lbd
