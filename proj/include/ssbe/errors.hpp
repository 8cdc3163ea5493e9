#pragma once

#include <stdexcept>
#include <string>

namespace ssbe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArchitecture : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfChart : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure. `field()` holds the JSON path
/// of the offending entry, e.g. "optimizer.total_steps".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Raised by the training loop when a loss term stops being finite.
class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(long step, std::string term)
      : Error("non-finite loss at step " + std::to_string(step) +
              " (term: " + term + ")"),
        step_(step),
        term_(std::move(term)) {}
  long step() const { return step_; }
  const std::string& term() const { return term_; }

 private:
  long step_;
  std::string term_;
};

}  // namespace ssbe
