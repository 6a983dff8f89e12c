#pragma once

#include <stdexcept>
#include <string>

namespace wbsg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad graph files, graphs that are not strongly connected,
// out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Some node has 1 - w_i * d_i^out <= 0, so its own estimate would enter the
// next round with a non-positive coefficient.
class InitializationError : public Error {
 public:
  using Error::Error;
};

// A visited subgradient exceeded the declared bound L.
class SubgradientBoundError : public Error {
 public:
  using Error::Error;
};

// A node received a missing, duplicate or stale message.
class SynchronyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbsg
