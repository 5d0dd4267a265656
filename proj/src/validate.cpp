#include "ergopipe/validate.hpp"

#include <cmath>

#include "ergopipe/error.hpp"

namespace ergopipe {

const Pose2D& validate_pose(const Pose2D& pose, int expected_k) {
  if (static_cast<int>(pose.keypoints.size()) != expected_k) {
    throw Error(ErrorCode::WrongKeypointCount,
                "expected " + std::to_string(expected_k) + " keypoints, got " +
                    std::to_string(pose.keypoints.size()));
  }
  for (std::size_t i = 0; i < pose.keypoints.size(); ++i) {
    const auto& kp = pose.keypoints[i];
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "keypoint " + std::to_string(i) + " has non-finite x/y");
    }
    if (!(kp.conf >= 0.0 && kp.conf <= 1.0)) {
      throw Error(ErrorCode::ConfidenceOutOfRange,
                  "keypoint " + std::to_string(i) + " conf " +
                      std::to_string(kp.conf) + " outside [0,1]");
    }
  }
  if (!(pose.detection_score >= 0.0 && pose.detection_score <= 1.0)) {
    throw Error(ErrorCode::ConfidenceOutOfRange,
                "detection_score outside [0,1]");
  }
  return pose;
}

const CameraParams& validate_camera(const CameraParams& cam) {
  const Eigen::Matrix3d residual =
      cam.R.transpose() * cam.R - Eigen::Matrix3d::Identity();
  if (residual.cwiseAbs().maxCoeff() > 1e-9 || cam.R.determinant() < 0.0) {
    throw Error(ErrorCode::NonOrthonormalRotation,
                "R is not a proper rotation (camera " + cam.camera_id + ")");
  }
  const bool upper_triangular = std::abs(cam.K(1, 0)) <= 1e-12 &&
                                std::abs(cam.K(2, 0)) <= 1e-12 &&
                                std::abs(cam.K(2, 1)) <= 1e-12 &&
                                std::abs(cam.K(2, 2) - 1.0) <= 1e-12;
  if (!upper_triangular || cam.K(0, 0) <= 0.0 || cam.K(1, 1) <= 0.0 ||
      !cam.K.allFinite()) {
    throw Error(ErrorCode::DegenerateIntrinsics,
                "K must be upper-triangular with positive focal entries "
                "(camera " + cam.camera_id + ")");
  }
  if (!cam.t.allFinite() || !cam.dist.allFinite()) {
    throw Error(ErrorCode::DegenerateIntrinsics,
                "non-finite extrinsics or distortion (camera " +
                    cam.camera_id + ")");
  }
  return cam;
}

const GroundTruthPose& validate_ground_truth(const GroundTruthPose& gt,
                                             int expected_k) {
  if (static_cast<int>(gt.keypoints.size()) != expected_k) {
    throw Error(ErrorCode::WrongKeypointCount,
                "expected " + std::to_string(expected_k) + " keypoints, got " +
                    std::to_string(gt.keypoints.size()));
  }
  for (std::size_t i = 0; i < gt.keypoints.size(); ++i) {
    const auto& kp = gt.keypoints[i];
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      throw Error(ErrorCode::NonFiniteCoordinate,
                  "gt keypoint " + std::to_string(i) + " has non-finite x/y");
    }
  }
  if (gt.labeled_count() > 0 && !(gt.segment_area > 0.0)) {
    throw Error(ErrorCode::NonPositiveArea,
                "segment_area must be positive when keypoints are labeled");
  }
  return gt;
}

}  // namespace ergopipe
