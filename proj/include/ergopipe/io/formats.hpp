#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::io {

inline constexpr const char* kSchemaVersion = "1.0";

// Rejects files whose schema major differs from ours.
void check_schema_version(const std::string& version,
                          const std::string& context);

// ---- keypoints file -------------------------------------------------------

// One detection; ground-truth files additionally carry visibility flags and
// a segment area.
struct Detection {
  Pose2D pose;
  std::optional<std::vector<int>> visibility;
  std::optional<double> segment_area;

  bool is_ground_truth() const { return visibility.has_value(); }
  GroundTruthPose to_ground_truth() const;
};

struct CameraDetections {
  std::string camera_id;
  std::vector<Detection> detections;
};

struct KeypointFrame {
  std::string frame_id;
  std::vector<CameraDetections> cameras;
};

struct KeypointsFile {
  std::string keypoint_format = "coco17";
  int keypoint_count = 17;
  std::vector<KeypointFrame> frames;
};

KeypointsFile read_keypoints_file(const std::filesystem::path& path);
void write_keypoints_file(const std::filesystem::path& path,
                          const KeypointsFile& file);

// ---- calibration file -----------------------------------------------------

struct CalibrationFile {
  WorldConvention world;
  std::vector<CameraParams> cameras;
};

CalibrationFile read_calibration_file(const std::filesystem::path& path);
void write_calibration_file(const std::filesystem::path& path,
                            const CalibrationFile& file);

// ---- skeleton file --------------------------------------------------------

struct SkeletonFrame {
  std::string frame_id;
  std::vector<Skeleton3D> people;
};

struct SkeletonFile {
  std::vector<SkeletonFrame> frames;
  std::optional<double> unmatched_fraction;
};

SkeletonFile read_skeleton_file(const std::filesystem::path& path);
void write_skeleton_file(const std::filesystem::path& path,
                         const SkeletonFile& file);

}  // namespace ergopipe::io
