#include "twofold/error.hpp"

namespace twofold {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSlidingRegion: return "NotSlidingRegion";
    case ErrorCode::DivisionDegeneracy: return "DivisionDegeneracy";
    case ErrorCode::DegenerateTangency: return "DegenerateTangency";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::NoHitWithinHorizon: return "NoHitWithinHorizon";
    case ErrorCode::GrazingHit: return "GrazingHit";
    case ErrorCode::NonDeterministicEscape: return "NonDeterministicEscape";
    case ErrorCode::TooManyEvents: return "TooManyEvents";
    case ErrorCode::HypothesisH1Violated: return "HypothesisH1Violated";
    case ErrorCode::ZeroCountMismatch: return "ZeroCountMismatch";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::DegenerateSlope: return "DegenerateSlope";
    case ErrorCode::SingularFundamentalMatrix: return "SingularFundamentalMatrix";
    case ErrorCode::NoZeros: return "NoZeros";
    case ErrorCode::NonSimpleZero: return "NonSimpleZero";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::PositiveTau: return "PositiveTau";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::NoSlidingSegment: return "NoSlidingSegment";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

bool is_hypothesis_violation(ErrorCode code) {
  return code == ErrorCode::HypothesisH1Violated || code == ErrorCode::ZeroCountMismatch ||
         code == ErrorCode::GrazingHit;
}

}  // namespace twofold
