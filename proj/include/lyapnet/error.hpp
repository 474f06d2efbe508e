#pragma once

#include <stdexcept>
#include <string>

namespace lyapnet {

// Bad user input: unparsable expressions, unknown config keys, systems that
// violate the equilibrium requirement, non-finite right-hand sides.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or gradient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lyapnet
