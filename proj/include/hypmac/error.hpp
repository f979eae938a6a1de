#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypmac {

enum class ErrorCode {
  WellDepthMismatch,
  NonCriticalWell,
  DegenerateWell,
  NegativePotential,
  InvalidDamping,
  InvalidParameter,
  QuadratureFailure,
  SingularQuadrature,
  NoSolution,
  BracketFailure,
  InadmissibleLayers,
  NoRoot,
  UnstableStep,
  StepFailure,
  WindowMismatch,
  InsufficientSamples,
  SchemaError,
  ConsistencyError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Configuration errors name the offending key.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string key, const std::string& what)
      : Error(code, key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hypmac
