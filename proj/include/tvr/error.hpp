#pragma once

#include <stdexcept>
#include <string>

namespace tvr {

enum class ErrorCode {
  MalformedInput,
  NonInvolutiveGluing,
  SelfGluedFace,
  UngluedFace,
  NotClosedManifoldLike,
  MoveNotApplicable,
  InsufficientSamples,
  DegenerateEstimate,
  InadmissibleTriple,
  InadmissibleFace,
  PrecisionCapExceeded,
  EvenOrderUnsupported,
  MissingTarget,
  InsufficientPoints,
  DegenerateFit,
  ConventionViolation,
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tvr
