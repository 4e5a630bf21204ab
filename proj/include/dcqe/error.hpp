#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcqe {

enum class ErrorKind {
  InvalidSpace,
  NegativeMass,
  NotNormalized,
  ZeroConditioningMass,
  ShapeMismatch,
  AllMassLost,
  InsufficientOutcomes,
  UnmappedLabel,
  InvalidCoarseGraining,
  EmptyLog,
  InvalidLog,
  InvalidModel,
  InvalidChoiceProbability,
  UnbalancedPorts,
  InfeasibleLossRate,
  NoLossOutcome,
  DegenerateLossMass,
  InvalidMask,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures caused by malformed files or unreadable paths, as
/// opposed to violations of a domain precondition.
bool is_io_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dcqe
