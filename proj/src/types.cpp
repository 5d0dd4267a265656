#include "ergopipe/error.hpp"

namespace ergopipe {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::WrongKeypointCount: return "WrongKeypointCount";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::DegenerateIntrinsics: return "DegenerateIntrinsics";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::FewerThanTwoCameras: return "FewerThanTwoCameras";
    case ErrorCode::InsufficientViews: return "InsufficientViews";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::MissingCoreJoints: return "MissingCoreJoints";
    case ErrorCode::NonFiniteAngle: return "NonFiniteAngle";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoLabeledKeypoints: return "NoLabeledKeypoints";
    case ErrorCode::NonPositiveArea: return "NonPositiveArea";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::FailedToConverge: return "FailedToConverge";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
  }
  return "UnknownError";
}

}  // namespace ergopipe
