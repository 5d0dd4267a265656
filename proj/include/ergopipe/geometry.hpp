#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::geom {

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;  // camera-frame depth, meters
};

// World point -> pixel through the full model (extrinsics, distortion,
// intrinsics). Throws BehindCamera when the camera-frame depth is <= 0.
PixelPoint project(const Eigen::Vector3d& point, const CameraParams& cam);

// Forward distortion: normalized coordinates -> pixel.
Eigen::Vector2d distort_to_pixel(const Eigen::Vector2d& normalized,
                                 const CameraParams& cam);

// Inverts the radial-tangential model iteratively; returns normalized image
// coordinates. Throws NoConvergence if 20 iterations leave the redistorted
// point more than 1e-6 px away.
Eigen::Vector2d undistort_point(const Eigen::Vector2d& pixel,
                                const CameraParams& cam);

// Pixel coordinates of the ideal (distortion-free) pinhole model. Identity
// for cameras without distortion.
Eigen::Vector2d ideal_pixel(const Eigen::Vector2d& pixel,
                            const CameraParams& cam);

struct FundamentalMatrix {
  Eigen::Matrix3d F = Eigen::Matrix3d::Zero();  // x_b^T F x_a = 0
  std::string camera_a;
  std::string camera_b;
};

// F from calibrated relative pose, scaled to unit Frobenius norm with a
// deterministic sign. Throws CoincidentCenters.
FundamentalMatrix fundamental_from_cameras(const CameraParams& cam_a,
                                           const CameraParams& cam_b);

// Mean of the two point-to-epipolar-line distances, in pixels.
double symmetric_epipolar_distance(const Eigen::Vector2d& point_a,
                                   const Eigen::Vector2d& point_b,
                                   const Eigen::Matrix3d& f);

// Confidence-weighted mean epipolar distance over keypoints confident in
// both views (weight = min of the two confidences). Empty when fewer than
// n_min keypoints qualify.
std::optional<double> pose_affinity(const Pose2D& pose_a, const Pose2D& pose_b,
                                    const CameraParams& cam_a,
                                    const CameraParams& cam_b,
                                    const Eigen::Matrix3d& f, double c_min,
                                    int n_min = 5);

// One person hypothesis: camera_id -> index into that camera's detections.
struct MatchGroup {
  std::map<std::string, int> members;
  double mean_epi_dist = 0.0;

  int size() const { return static_cast<int>(members.size()); }
};

struct MatchResult {
  std::vector<MatchGroup> groups;
  int n_detections = 0;
  int n_unmatched = 0;  // detections left in singleton groups

  double unmatched_fraction() const {
    return n_detections == 0 ? 0.0
                             : static_cast<double>(n_unmatched) / n_detections;
  }
};

// Greedy agglomerative cross-view grouping: merge the lowest-affinity pair
// first, subject to at most one detection per camera and affinity <= tau_epi.
// Deterministic for any input ordering; ties broken by (camera_id, index).
MatchResult match_across_views(
    const std::vector<std::vector<Pose2D>>& detections_per_camera,
    const std::vector<CameraParams>& cams, double tau_epi, double c_min,
    int n_min = 5);

struct Observation {
  int camera_index = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double conf = 1.0;
};

struct TriangulatedPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double reproj_rms = 0.0;  // px over contributing views
  int n_views = 0;
};

// DLT: undistort, Hartley-normalize, solve the stacked 2n x 4 system by SVD.
// Throws InsufficientViews (< 2 confident observations) or
// DegenerateGeometry (near-parallel rays).
TriangulatedPoint triangulate_point(std::span<const Observation> observations,
                                    const std::vector<CameraParams>& cams,
                                    double c_min);

// Per-keypoint triangulation of a matched group. Joints with fewer than two
// confident views or reprojection RMS above tau_reproj are marked invalid.
Skeleton3D triangulate_skeleton(
    const MatchGroup& group,
    const std::vector<std::vector<Pose2D>>& detections_per_camera,
    const std::vector<CameraParams>& cams, double tau_reproj, double c_min);

}  // namespace ergopipe::geom
