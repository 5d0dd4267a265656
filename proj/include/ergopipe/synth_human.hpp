#pragma once

#include <cstdint>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::synth {

// Posture parameters in degrees; heading rotates the body about the
// world up-axis.
struct Posture {
  double trunk_flexion = 0.0;
  double trunk_side = 0.0;
  double neck_flexion = 0.0;
  double knee_flexion = 0.0;
  double upper_arm_left = 0.0;
  double upper_arm_right = 0.0;
  double elbow_left = 0.0;
  double elbow_right = 0.0;
  double heading = 0.0;
};

struct BodyDims {
  double hip_half = 0.11;
  double shoulder_half = 0.19;
  double trunk_len = 0.48;
  double neck_len = 0.11;
  double ear_half = 0.07;
  double nose_forward = 0.09;
  double eye_forward = 0.08;
  double eye_half = 0.032;
  double thigh_len = 0.42;
  double shank_len = 0.41;
  double upper_arm_len = 0.29;
  double forearm_len = 0.26;
};

// Articulated COCO-17 skeleton whose joint angles equal the posture by
// construction (all joints valid).
Skeleton3D build_skeleton(const Posture& posture,
                          const Eigen::Vector3d& pelvis,
                          const BodyDims& dims = {});

// Cameras on a ring looking at `target`; ids cam0..cam{n-1}.
std::vector<CameraParams> camera_ring(int n_cams, double radius, double height,
                                      const Eigen::Vector3d& target,
                                      double focal_px, int width, int height_px);

// Projects a skeleton into one view with Gaussian pixel noise; joints behind
// the camera or outside the frame get confidence 0.
Pose2D project_skeleton(const Skeleton3D& skel, const CameraParams& cam,
                        double noise_px, std::uint64_t noise_seed);

// One canned posture per risk band, jittered away from scoring boundaries.
Posture sample_posture(std::uint64_t seed, std::uint64_t frame_index);

}  // namespace ergopipe::synth
