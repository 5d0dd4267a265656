#pragma once

#include "ergopipe/types.hpp"

namespace ergopipe {

// Checks keypoint count, finiteness and confidence range; returns its
// argument untouched so call sites can validate inline.
const Pose2D& validate_pose(const Pose2D& pose, int expected_k);

// Checks R for orthonormality (det +1, |R^T R - I| <= 1e-9) and K for an
// upper-triangular form with positive focal entries.
const CameraParams& validate_camera(const CameraParams& cam);

const GroundTruthPose& validate_ground_truth(const GroundTruthPose& gt,
                                             int expected_k);

}  // namespace ergopipe
