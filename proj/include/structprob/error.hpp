// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace structprob {

enum class ErrorKind {
  EmptyOutcomeSpace,
  ProbabilitySumMismatch,
  NegativeProbability,
  ProbabilityOutOfRange,
  DuplicateLabel,
  UnknownLabel,
  ZeroTrials,
  NonRandomEvent,
  DegenerateLabel,
  InvalidSchedule,
  TooFewTrials,
  InvalidConfidence,
  InvalidPrior,
  EmptyUrn,
  AngleOutOfRange,
  InvalidGeometry,
  ZeroPhotons,
  LengthMismatch,
  AllBinsPooled,
  InvalidCounts,
  TooFewPeaks,
  InvalidTime,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyOutcomeSpace: return "EmptyOutcomeSpace";
    case ErrorKind::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::ZeroTrials: return "ZeroTrials";
    case ErrorKind::NonRandomEvent: return "NonRandomEvent";
    case ErrorKind::DegenerateLabel: return "DegenerateLabel";
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    case ErrorKind::TooFewTrials: return "TooFewTrials";
    case ErrorKind::InvalidConfidence: return "InvalidConfidence";
    case ErrorKind::InvalidPrior: return "InvalidPrior";
    case ErrorKind::EmptyUrn: return "EmptyUrn";
    case ErrorKind::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::ZeroPhotons: return "ZeroPhotons";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AllBinsPooled: return "AllBinsPooled";
    case ErrorKind::InvalidCounts: return "InvalidCounts";
    case ErrorKind::TooFewPeaks: return "TooFewPeaks";
    case ErrorKind::InvalidTime: return "InvalidTime";
  }
  return "Unknown";
}

/// Every precondition violation in the library is reported through this type.
/// `kind()` is stable and machine-readable; `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace structprob
