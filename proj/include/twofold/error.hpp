#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twofold {

enum class ErrorCode {
  // fields
  NotSlidingRegion,
  DivisionDegeneracy,
  DegenerateTangency,
  // flow
  StepSizeUnderflow,
  DomainEscape,
  NoHitWithinHorizon,
  GrazingHit,
  NonDeterministicEscape,
  TooManyEvents,
  // annulus
  HypothesisH1Violated,
  ZeroCountMismatch,
  NotInRange,
  DegenerateSlope,
  // melnikov / predictor
  SingularFundamentalMatrix,
  NoZeros,
  NonSimpleZero,
  Inconclusive,
  PositiveTau,
  OutOfDomain,
  OutOfRange,
  // verify
  NewtonDiverged,
  NoSlidingSegment,
  // cli
  ConfigInvalid,
};

std::string_view to_string(ErrorCode code);

/// True for failures of the structural hypotheses on the unperturbed system
/// (fold pattern and transversal return); the CLI maps these to exit code 3.
bool is_hypothesis_violation(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twofold
