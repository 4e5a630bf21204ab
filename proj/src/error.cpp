#include "dcqe/error.hpp"

namespace dcqe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZeroConditioningMass: return "ZeroConditioningMass";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::AllMassLost: return "AllMassLost";
    case ErrorKind::InsufficientOutcomes: return "InsufficientOutcomes";
    case ErrorKind::UnmappedLabel: return "UnmappedLabel";
    case ErrorKind::InvalidCoarseGraining: return "InvalidCoarseGraining";
    case ErrorKind::EmptyLog: return "EmptyLog";
    case ErrorKind::InvalidLog: return "InvalidLog";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidChoiceProbability: return "InvalidChoiceProbability";
    case ErrorKind::UnbalancedPorts: return "UnbalancedPorts";
    case ErrorKind::InfeasibleLossRate: return "InfeasibleLossRate";
    case ErrorKind::NoLossOutcome: return "NoLossOutcome";
    case ErrorKind::DegenerateLossMass: return "DegenerateLossMass";
    case ErrorKind::InvalidMask: return "InvalidMask";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_io_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::ParseError || kind == ErrorKind::IoError;
}

}  // namespace dcqe
