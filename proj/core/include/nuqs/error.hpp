#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace nuqs {

enum class ErrorCode {
  NonFiniteField,
  NegativeMagnitude,
  InvalidMedium,
  NegativePhotonNumber,
  NonPositiveVariance,
  IntegrationDidNotConverge,
  BoundaryOptimum,
  NoConvergence,
  InvalidGrid,
  InsufficientColumn,
  InvalidConfig,
  IoError,
  BracketExcludesOptimum,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An error that carries the best partial result computed before failing,
/// e.g. an optimum that escaped the search box.
template <typename Payload>
class ErrorWith : public Error {
 public:
  ErrorWith(ErrorCode code, const std::string& what, Payload payload)
      : Error(code, what), payload_(std::move(payload)) {}

  const Payload& payload() const noexcept { return payload_; }

 private:
  Payload payload_;
};

}  // namespace nuqs
