#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ergopipe {

// Canonical COCO-17 keypoint layout. Every module indexes keypoints
// through this table; no other file hardcodes joint indices.
namespace coco {

inline constexpr int kKeypointCount = 17;

enum Index : int {
  kNose = 0,
  kLeftEye = 1,
  kRightEye = 2,
  kLeftEar = 3,
  kRightEar = 4,
  kLeftShoulder = 5,
  kRightShoulder = 6,
  kLeftElbow = 7,
  kRightElbow = 8,
  kLeftWrist = 9,
  kRightWrist = 10,
  kLeftHip = 11,
  kRightHip = 12,
  kLeftKnee = 13,
  kRightKnee = 14,
  kLeftAnkle = 15,
  kRightAnkle = 16,
};

inline constexpr std::array<const char*, kKeypointCount> kKeypointNames = {
    "nose",           "left_eye",       "right_eye",   "left_ear",
    "right_ear",      "left_shoulder",  "right_shoulder", "left_elbow",
    "right_elbow",    "left_wrist",     "right_wrist", "left_hip",
    "right_hip",      "left_knee",      "right_knee",  "left_ankle",
    "right_ankle"};

}  // namespace coco

struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  double conf = 0.0;
};

// One person's detected 2D keypoints in one camera view.
struct Pose2D {
  std::vector<Keypoint2D> keypoints;
  double detection_score = 0.0;
  std::optional<double> bbox_area;
  std::string camera_id;
  std::string frame_id;

  // A keypoint counts as visible once its confidence clears c_min.
  bool visible(int i, double c_min) const { return keypoints[i].conf >= c_min; }
};

struct GtKeypoint {
  double x = 0.0;
  double y = 0.0;
  int v = 0;  // 0 = unlabeled, >0 = labeled
};

// Annotated pose with explicit visibility flags and a segment area that
// defines the object scale for OKS.
struct GroundTruthPose {
  std::vector<GtKeypoint> keypoints;
  double segment_area = 0.0;
  std::string camera_id;
  std::string frame_id;

  int labeled_count() const {
    int n = 0;
    for (const auto& k : keypoints) n += (k.v > 0) ? 1 : 0;
    return n;
  }
};

// Pinhole camera: x = K (R X + t), with optional radial-tangential
// distortion (k1,k2,p1,p2,k3) applied in normalized coordinates.
struct CameraParams {
  std::string camera_id;
  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // world -> camera
  Eigen::Vector3d t = Eigen::Vector3d::Zero();      // meters
  Eigen::Matrix<double, 5, 1> dist = Eigen::Matrix<double, 5, 1>::Zero();
  int width = 0;
  int height = 0;

  Eigen::Vector3d center() const { return -R.transpose() * t; }
  bool has_distortion() const { return dist.cwiseAbs().maxCoeff() > 0.0; }
};

struct Joint3D {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters
  bool valid = false;
  double reproj_rms = 0.0;  // pixels
  int n_views = 0;
};

struct Skeleton3D {
  std::vector<Joint3D> joints;
  std::string person_id;
  std::string frame_id;
};

// 8-bit raster, row-major, channel-interleaved.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  static ImageBuffer make(int width, int height, int channels,
                          std::uint8_t fill = 0) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return img;
  }

  std::size_t sample_count() const { return data.size(); }

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const ImageBuffer& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }
};

// Gravity reference for joint-angle computation. Lengths are meters
// throughout.
struct WorldConvention {
  Eigen::Vector3d up_axis = Eigen::Vector3d(0.0, 0.0, 1.0);
};

// Default calibration thresholds, exposed in run configs.
struct Thresholds {
  double c_min = 0.3;        // keypoint confidence floor
  double tau_epi = 10.0;     // px, cross-view match acceptance
  double tau_reproj = 8.0;   // px, joint validity
  int n_min_shared = 5;      // keypoints needed to compare two poses
  double oks_threshold = 0.5;
};

}  // namespace ergopipe
