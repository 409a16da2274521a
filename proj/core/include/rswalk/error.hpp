#pragma once

#include <stdexcept>
#include <string>

namespace rswalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: a model, environment spec or config that fails
/// validation before any computation starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy answer.
class NumericError : public Error {
 public:
  enum class Kind { Singular, NoConvergence, RankDeficient, Overflow };

  NumericError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A read or walk left the realized part of a non-regenerable environment.
class WindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace rswalk
