#include "ergopipe/synth_human.hpp"

#include <cmath>

#include "ergopipe/error.hpp"
#include "ergopipe/gap/rng.hpp"
#include "ergopipe/geometry.hpp"

namespace ergopipe::synth {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

Eigen::Matrix3d rot(const Eigen::Vector3d& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * kDegToRad, axis.normalized())
      .toRotationMatrix();
}

Joint3D solid(const Eigen::Vector3d& p) {
  Joint3D j;
  j.position = p;
  j.valid = true;
  j.n_views = 4;
  return j;
}

}  // namespace

Skeleton3D build_skeleton(const Posture& posture, const Eigen::Vector3d& pelvis,
                          const BodyDims& dims) {
  using namespace coco;
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  const double psi = posture.heading * kDegToRad;
  const Eigen::Vector3d forward(std::cos(psi), std::sin(psi), 0.0);
  const Eigen::Vector3d lateral(-std::sin(psi), std::cos(psi), 0.0);

  // Trunk frame: flex forward about the lateral axis, then lean sideways
  // about the forward axis.
  const Eigen::Matrix3d trunk_rot =
      rot(forward, posture.trunk_side) * rot(lateral, posture.trunk_flexion);
  const Eigen::Vector3d trunk_dir = trunk_rot * up;
  const Eigen::Vector3d trunk_lat = trunk_rot * lateral;
  const Eigen::Vector3d trunk_fwd = trunk_rot * forward;

  const Eigen::Vector3d mid_shoulder = pelvis + dims.trunk_len * trunk_dir;
  const Eigen::Vector3d neck_dir = rot(trunk_lat, posture.neck_flexion) *
                                   trunk_dir;
  const Eigen::Vector3d head_center = mid_shoulder + dims.neck_len * neck_dir;

  Skeleton3D skel;
  skel.joints.resize(kKeypointCount);
  skel.joints[kLeftHip] = solid(pelvis - dims.hip_half * lateral);
  skel.joints[kRightHip] = solid(pelvis + dims.hip_half * lateral);
  skel.joints[kLeftShoulder] =
      solid(mid_shoulder - dims.shoulder_half * trunk_lat);
  skel.joints[kRightShoulder] =
      solid(mid_shoulder + dims.shoulder_half * trunk_lat);
  skel.joints[kLeftEar] = solid(head_center - dims.ear_half * trunk_lat);
  skel.joints[kRightEar] = solid(head_center + dims.ear_half * trunk_lat);
  skel.joints[kNose] = solid(head_center + dims.nose_forward * trunk_fwd);
  skel.joints[kLeftEye] = solid(head_center + dims.eye_forward * trunk_fwd -
                                dims.eye_half * trunk_lat +
                                0.02 * neck_dir);
  skel.joints[kRightEye] = solid(head_center + dims.eye_forward * trunk_fwd +
                                 dims.eye_half * trunk_lat +
                                 0.02 * neck_dir);

  // Arms hang from the shoulders; flexion raises them toward the body
  // forward direction, the elbow bends in the same plane.
  const auto arm = [&](int shoulder, int elbow, int wrist, double ua_deg,
                       double elbow_deg) {
    const Eigen::Vector3d ua_dir = rot(trunk_lat, ua_deg) * (-trunk_dir);
    const Eigen::Vector3d fa_dir =
        rot(trunk_lat, ua_deg + elbow_deg) * (-trunk_dir);
    skel.joints[elbow] =
        solid(skel.joints[shoulder].position + dims.upper_arm_len * ua_dir);
    skel.joints[wrist] =
        solid(skel.joints[elbow].position + dims.forearm_len * fa_dir);
  };
  arm(kLeftShoulder, kLeftElbow, kLeftWrist, posture.upper_arm_left,
      posture.elbow_left);
  arm(kRightShoulder, kRightElbow, kRightWrist, posture.upper_arm_right,
      posture.elbow_right);

  // Thighs straight down, shanks bent backward by the knee flexion.
  const auto leg = [&](int hip, int knee, int ankle) {
    const Eigen::Vector3d down = -up;
    skel.joints[knee] =
        solid(skel.joints[hip].position + dims.thigh_len * down);
    const Eigen::Vector3d shank_dir =
        rot(lateral, -posture.knee_flexion) * down;
    skel.joints[ankle] =
        solid(skel.joints[knee].position + dims.shank_len * shank_dir);
  };
  leg(kLeftHip, kLeftKnee, kLeftAnkle);
  leg(kRightHip, kRightKnee, kRightAnkle);
  return skel;
}

std::vector<CameraParams> camera_ring(int n_cams, double radius, double height,
                                      const Eigen::Vector3d& target,
                                      double focal_px, int width,
                                      int height_px) {
  std::vector<CameraParams> cams;
  cams.reserve(n_cams);
  for (int i = 0; i < n_cams; ++i) {
    const double angle = 2.0 * 3.14159265358979323846 * i / n_cams;
    const Eigen::Vector3d center(radius * std::cos(angle),
                                 radius * std::sin(angle), height);
    const Eigen::Vector3d z = (target - center).normalized();
    const Eigen::Vector3d x = z.cross(Eigen::Vector3d(0, 0, 1)).normalized();
    const Eigen::Vector3d y = z.cross(x);

    CameraParams cam;
    cam.camera_id = "cam" + std::to_string(i);
    cam.R.row(0) = x;
    cam.R.row(1) = y;
    cam.R.row(2) = z;
    cam.t = -cam.R * center;
    cam.K << focal_px, 0.0, width / 2.0,
             0.0, focal_px, height_px / 2.0,
             0.0, 0.0, 1.0;
    cam.width = width;
    cam.height = height_px;
    cams.push_back(std::move(cam));
  }
  return cams;
}

Pose2D project_skeleton(const Skeleton3D& skel, const CameraParams& cam,
                        double noise_px, std::uint64_t noise_seed) {
  gap::Rng rng = gap::rng_for(noise_seed, 0);
  Pose2D pose;
  pose.camera_id = cam.camera_id;
  pose.frame_id = skel.frame_id;
  pose.keypoints.reserve(skel.joints.size());
  double conf_sum = 0.0;
  for (const auto& joint : skel.joints) {
    Keypoint2D kp;
    // Noise and confidence draws happen for every joint so the stream
    // stays aligned regardless of visibility.
    const double nx = rng.normal();
    const double ny = rng.normal();
    const double conf = 0.86 + 0.12 * rng.uniform();
    bool ok = joint.valid;
    if (ok) {
      try {
        const auto px = geom::project(joint.position, cam);
        kp.x = px.x + noise_px * nx;
        kp.y = px.y + noise_px * ny;
        ok = kp.x >= 0.0 && kp.x < cam.width && kp.y >= 0.0 &&
             kp.y < cam.height;
      } catch (const Error&) {
        ok = false;
      }
    }
    kp.conf = ok ? conf : 0.0;
    conf_sum += kp.conf;
    pose.keypoints.push_back(kp);
  }
  pose.detection_score =
      pose.keypoints.empty() ? 0.0 : conf_sum / pose.keypoints.size();
  return pose;
}

Posture sample_posture(std::uint64_t seed, std::uint64_t frame_index) {
  // Canonical postures per risk band; nominal angles sit away from the
  // scoring boundaries so small reconstruction noise cannot flip bands.
  static const Posture kPresets[] = {
      // neutral stand
      {2.0, 0.0, 8.0, 3.0, 8.0, 8.0, 10.0, 10.0, 0.0},
      // light lean
      {12.0, 0.0, 15.0, 10.0, 30.0, 28.0, 75.0, 72.0, 0.0},
      // moderate bend
      {40.0, 0.0, 28.0, 45.0, 60.0, 55.0, 80.0, 78.0, 0.0},
      // deep bend
      {72.0, 0.0, 27.0, 70.0, 97.0, 95.0, 15.0, 14.0, 0.0},
      // overhead reach
      {8.0, 0.0, 26.0, 5.0, 120.0, 115.0, 40.0, 38.0, 0.0},
  };
  gap::Rng rng = gap::rng_for(seed, frame_index);
  Posture p = kPresets[rng.uniform_int(5)];
  const auto jitter = [&](double& v, double amount) {
    v += rng.uniform(-amount, amount);
  };
  jitter(p.trunk_flexion, 2.0);
  jitter(p.trunk_side, 1.0);
  jitter(p.neck_flexion, 2.0);
  jitter(p.knee_flexion, 2.0);
  jitter(p.upper_arm_left, 2.0);
  jitter(p.upper_arm_right, 2.0);
  jitter(p.elbow_left, 2.0);
  jitter(p.elbow_right, 2.0);
  p.heading = rng.uniform(0.0, 360.0);
  return p;
}

}  // namespace ergopipe::synth
