#pragma once

#include <stdexcept>
#include <string>

namespace ergopipe {

enum class ErrorCode {
  // validation
  WrongKeypointCount,
  NonFiniteCoordinate,
  ConfidenceOutOfRange,
  NonOrthonormalRotation,
  DegenerateIntrinsics,
  // geometry
  BehindCamera,
  NoConvergence,
  CoincidentCenters,
  FewerThanTwoCameras,
  InsufficientViews,
  DegenerateGeometry,
  GroupTooSmall,
  // reba
  MissingCoreJoints,
  NonFiniteAngle,
  IndexOutOfRange,
  // metrics
  NoLabeledKeypoints,
  NonPositiveArea,
  ShapeMismatch,
  ImageTooSmall,
  // training
  FailedToConverge,
  NonFiniteLoss,
  // io
  IoFailure,
  ParseError,
  MissingFile,
  SchemaVersionMismatch,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ergopipe
