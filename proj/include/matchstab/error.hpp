#pragma once

#include <stdexcept>
#include <string>

namespace matchstab {

// Every failure the library reports, as a stable machine-checkable code.
enum class Errc {
  // model
  DisconnectedMatchingGraph,
  IsolatedArrivalVertex,
  DanglingEdge,
  DuplicateLabel,
  BadLabel,
  UnknownClass,
  NotADistribution,
  MeasureSupportMismatch,
  // facets
  NotAFacet,
  MixedEmptiness,
  TooLarge,
  // states & policies
  InvalidState,
  UnequalTotals,
  MissingPriorities,
  BadPriorities,
  BufferOverflow,
  // analysis
  NCondViolated,
  NotStronglyConnected,
  ZeroFacet,
  UnstableStructure,
  // chains
  NotNNModel,
  NotPositiveRecurrent,
  StateSpaceTooLarge,
  // arithmetic & io
  Overflow,
  ParseError,
  BadInput,
  Internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DisconnectedMatchingGraph: return "DisconnectedMatchingGraph";
    case Errc::IsolatedArrivalVertex: return "IsolatedArrivalVertex";
    case Errc::DanglingEdge: return "DanglingEdge";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::BadLabel: return "BadLabel";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::NotADistribution: return "NotADistribution";
    case Errc::MeasureSupportMismatch: return "MeasureSupportMismatch";
    case Errc::NotAFacet: return "NotAFacet";
    case Errc::MixedEmptiness: return "MixedEmptiness";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidState: return "InvalidState";
    case Errc::UnequalTotals: return "UnequalTotals";
    case Errc::MissingPriorities: return "MissingPriorities";
    case Errc::BadPriorities: return "BadPriorities";
    case Errc::BufferOverflow: return "BufferOverflow";
    case Errc::NCondViolated: return "NCondViolated";
    case Errc::NotStronglyConnected: return "NotStronglyConnected";
    case Errc::ZeroFacet: return "ZeroFacet";
    case Errc::UnstableStructure: return "UnstableStructure";
    case Errc::NotNNModel: return "NotNNModel";
    case Errc::NotPositiveRecurrent: return "NotPositiveRecurrent";
    case Errc::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case Errc::Overflow: return "Overflow";
    case Errc::ParseError: return "ParseError";
    case Errc::BadInput: return "BadInput";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace matchstab
