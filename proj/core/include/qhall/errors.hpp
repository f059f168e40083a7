#pragma once

#include <stdexcept>
#include <string>

namespace qhall {

// Every failure mode the library can signal maps to one process exit code so
// scripted runs can branch on the cause.  Code 1 is reserved for "a verified
// quantity missed its tolerance"; codes below are hard errors.
enum class ErrorCode : int {
  CriterionFailure = 1,
  ConfigError = 2,
  NonCommensurateTorus = 3,
  FlagViolation = 4,
  SolverFailure = 5,
  NoGap = 6,
  FermiOnSpectrum = 7,
  EnclosureFailure = 8,
  QuadratureDivergence = 9,
  GapTooSmall = 10,
  MissingGenerator = 11,
  DegenerateFit = 12,
  ZTooCloseToSpectrum = 13,
  InsufficientData = 14,
  GaplessAtFilling = 15,
  IoError = 16,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

#define QHALL_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string& what)                    \
        : Error(ErrorCode::Name, std::string(#Name ": ") + what) {} \
  }

QHALL_DEFINE_ERROR(ConfigError);
QHALL_DEFINE_ERROR(NonCommensurateTorus);
QHALL_DEFINE_ERROR(FlagViolation);
QHALL_DEFINE_ERROR(SolverFailure);
QHALL_DEFINE_ERROR(NoGap);
QHALL_DEFINE_ERROR(FermiOnSpectrum);
QHALL_DEFINE_ERROR(EnclosureFailure);
QHALL_DEFINE_ERROR(QuadratureDivergence);
QHALL_DEFINE_ERROR(GapTooSmall);
QHALL_DEFINE_ERROR(MissingGenerator);
QHALL_DEFINE_ERROR(DegenerateFit);
QHALL_DEFINE_ERROR(ZTooCloseToSpectrum);
QHALL_DEFINE_ERROR(InsufficientData);
QHALL_DEFINE_ERROR(GaplessAtFilling);
QHALL_DEFINE_ERROR(IoError);

#undef QHALL_DEFINE_ERROR

}  // namespace qhall
