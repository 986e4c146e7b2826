#pragma once

#include <stdexcept>
#include <string>

namespace glocal {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid family parameters or config values.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A value lies outside the range of the branch or table it was passed to.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A first-hit search exceeded its iteration cap.
class NotFound : public Error {
 public:
  NotFound(const std::string& what, long cap) : Error(what), cap_(cap) {}
  long cap() const noexcept { return cap_; }

 private:
  long cap_;
};

/// Geometry of the first-hit structure is not what the construction expects.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed to reach their target.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An error from one stage of an experiment, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace glocal
