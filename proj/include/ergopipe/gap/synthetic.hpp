#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::gap {

constexpr int kSceneSize = 48;
constexpr int kSceneKeypoints = 13;

// Stick-figure joint order used by the desk-scale task.
enum SceneJoint : int {
  kHead = 0,
  kShoulderL = 1,
  kShoulderR = 2,
  kElbowL = 3,
  kElbowR = 4,
  kWristL = 5,
  kWristR = 6,
  kHipL = 7,
  kHipR = 8,
  kKneeL = 9,
  kKneeR = 10,
  kAnkleL = 11,
  kAnkleR = 12,
};

struct PatchRegion {
  int x = 0, y = 0, w = 0, h = 0;
};

// One rendered figure with exact keypoint annotations and an
// identity-specific texture patch.
struct SyntheticScene {
  ImageBuffer image;  // grayscale kSceneSize x kSceneSize
  std::array<std::array<double, 2>, kSceneKeypoints> keypoints;  // in [0,1]
  int identity_id = 0;
  PatchRegion patch;
};

// Deterministic per (seed, index); identity cycles over n_identities.
std::vector<SyntheticScene> generate_dataset(int n, int n_identities,
                                             std::uint64_t seed);

}  // namespace ergopipe::gap
