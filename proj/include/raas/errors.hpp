#pragma once

#include <stdexcept>
#include <string>

namespace raas {

// Invalid user-supplied configuration or parameter combination.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed to converge or produced a non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity left its proven domain (e.g. alpha outside (0,1)).
struct InvariantError : std::runtime_error {
  InvariantError(const std::string& what, long trial = -1)
      : std::runtime_error(what), trial(trial) {}
  long trial;
};

// Oracle queried past the end of its noise tape.
struct TapeExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output file or directory could not be written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace raas
