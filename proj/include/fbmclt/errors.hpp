#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbmclt {

/// Base of every error raised by the library. `kind()` names the error class
/// and is what the command line tool prints on the diagnostic stream.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept = 0;
};

/// Invalid parameter or inconsistent configuration (bad H, d < q, reps = 0...).
class ConfigError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "configuration"; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "domain"; }
};

/// Floating point breakdown: failed factorisation, non-finite sample.
class NumericalError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "numerical"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "io"; }
};

}  // namespace fbmclt
