#pragma once

#include <stdexcept>
#include <string>

namespace flockspc {

/// Non-finite positions or out-of-domain parameters handed to the model.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cohesion weight of zero: the two-agent separation has no finite minimum.
class NoEquilibrium : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Candidate set requested along a zero-length gradient.
class DegenerateGradient : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario / sweep file problems. `field()` names the offending key path
/// (e.g. "controller.epsilon"), empty when the error is not field-specific.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace flockspc
