#pragma once

#include <stdexcept>
#include <string>

namespace sph {

enum class ErrorCode {
  NotHurwitz,
  IllConditioned,
  NotSymmetric,
  NotPD,
  NegativeEntry,
  Overflow,
  NoConvergence,
  InvalidSpec,
  SingularA22,
  SuppliedDataInvalid,
  NotScalarTwoMode,
  EpsilonOutOfRange,
  Infeasible,
  EpsilonAboveThreshold,
  NoFeasibleA,
  ScheduleIncompatible,
  DimensionMismatch,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sph
