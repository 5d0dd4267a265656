#include "ergopipe/reba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergopipe/error.hpp"

namespace ergopipe::reba {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

double angle_between_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) return kNaN;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

bool joints_valid(const Skeleton3D& s, std::initializer_list<int> idx) {
  for (int i : idx) {
    if (i >= static_cast<int>(s.joints.size()) || !s.joints[i].valid) {
      return false;
    }
  }
  return true;
}

// Angle of `v` out of the plane orthogonal to `lateral`, i.e. the lateral
// lean component.
double lateral_deviation_deg(const Eigen::Vector3d& v,
                             const Eigen::Vector3d& lateral) {
  const double nv = v.norm();
  const double nl = lateral.norm();
  if (nv < 1e-12 || nl < 1e-12) return kNaN;
  const double s = std::clamp(v.dot(lateral) / (nv * nl), -1.0, 1.0);
  return std::abs(std::asin(s)) * kRadToDeg;
}

double flexion_from_interior(const Skeleton3D& s, int proximal, int joint,
                             int distal) {
  if (!joints_valid(s, {proximal, joint, distal})) return kNaN;
  const double interior =
      angle_between_deg(s.joints[proximal].position - s.joints[joint].position,
                        s.joints[distal].position - s.joints[joint].position);
  return 180.0 - interior;
}

}  // namespace

const char* risk_category_name(RiskCategory category) {
  switch (category) {
    case RiskCategory::Negligible: return "negligible";
    case RiskCategory::Low: return "low";
    case RiskCategory::Medium: return "medium";
    case RiskCategory::High: return "high";
    case RiskCategory::VeryHigh: return "very_high";
  }
  return "unknown";
}

JointAngles joint_angles(const Skeleton3D& skel, const WorldConvention& world) {
  using namespace coco;
  if (!joints_valid(skel, {kLeftHip, kRightHip, kLeftShoulder, kRightShoulder})) {
    throw Error(ErrorCode::MissingCoreJoints,
                "hips and shoulders must be valid to measure trunk angles");
  }
  const Eigen::Vector3d up = world.up_axis.normalized();
  const auto pos = [&](int i) { return skel.joints[i].position; };

  const Eigen::Vector3d mid_hip = 0.5 * (pos(kLeftHip) + pos(kRightHip));
  const Eigen::Vector3d mid_shoulder =
      0.5 * (pos(kLeftShoulder) + pos(kRightShoulder));
  const Eigen::Vector3d trunk = mid_shoulder - mid_hip;

  JointAngles a;
  a.trunk_flexion = angle_between_deg(trunk, up);

  // Lateral axis from the hip line, orthogonalized against the reference
  // direction of each measurement.
  const Eigen::Vector3d hip_line = pos(kRightHip) - pos(kLeftHip);
  const Eigen::Vector3d lateral_world = hip_line - hip_line.dot(up) * up;
  a.side_bend = lateral_deviation_deg(trunk, lateral_world);

  // Head point: ear midpoint when both ears resolved, else nose.
  Eigen::Vector3d head;
  bool have_head = false;
  if (joints_valid(skel, {kLeftEar, kRightEar})) {
    head = 0.5 * (pos(kLeftEar) + pos(kRightEar));
    have_head = true;
  } else if (joints_valid(skel, {kNose})) {
    head = pos(kNose);
    have_head = true;
  }
  if (have_head) {
    const Eigen::Vector3d neck = head - mid_shoulder;
    a.neck_flexion = angle_between_deg(neck, trunk);
    const Eigen::Vector3d trunk_dir = trunk.normalized();
    const Eigen::Vector3d lateral_trunk =
        hip_line - hip_line.dot(trunk_dir) * trunk_dir;
    a.neck_side_bend = lateral_deviation_deg(neck, lateral_trunk);
  } else {
    a.neck_flexion = kNaN;
    a.neck_side_bend = kNaN;
  }

  a.knee_flexion_left = flexion_from_interior(skel, kLeftHip, kLeftKnee,
                                              kLeftAnkle);
  a.knee_flexion_right = flexion_from_interior(skel, kRightHip, kRightKnee,
                                               kRightAnkle);
  a.elbow_flexion_left = flexion_from_interior(skel, kLeftShoulder, kLeftElbow,
                                               kLeftWrist);
  a.elbow_flexion_right = flexion_from_interior(skel, kRightShoulder,
                                                kRightElbow, kRightWrist);

  const Eigen::Vector3d trunk_down = -trunk;
  a.upper_arm_flexion_left =
      joints_valid(skel, {kLeftShoulder, kLeftElbow})
          ? angle_between_deg(pos(kLeftElbow) - pos(kLeftShoulder), trunk_down)
          : kNaN;
  a.upper_arm_flexion_right =
      joints_valid(skel, {kRightShoulder, kRightElbow})
          ? angle_between_deg(pos(kRightElbow) - pos(kRightShoulder),
                              trunk_down)
          : kNaN;
  return a;
}

namespace {

// Worse (higher-scoring) side of a bilateral measurement; NaN sides are
// skipped, both missing yields NaN.
double worse_side(double left, double right) {
  const bool l = std::isfinite(left);
  const bool r = std::isfinite(right);
  if (l && r) return std::max(left, right);
  if (l) return left;
  if (r) return right;
  return kNaN;
}

int trunk_score(double flexion, double side_bend) {
  int score;
  if (flexion < 5.0) score = 1;
  else if (flexion <= 20.0) score = 2;
  else if (flexion <= 60.0) score = 3;
  else score = 4;
  if (std::isfinite(side_bend) && side_bend > 10.0) ++score;
  return std::min(score, 5);
}

int neck_score(double flexion, double side_bend) {
  int score = flexion <= 20.0 ? 1 : 2;
  if (std::isfinite(side_bend) && side_bend > 10.0) ++score;
  return std::min(score, 3);
}

int legs_score(double worse_knee) {
  int score = 1;  // bilateral stance assumed
  if (std::isfinite(worse_knee)) {
    if (worse_knee > 60.0) score += 2;
    else if (worse_knee > 30.0) score += 1;
  }
  return score;
}

int upper_arm_score(double flexion) {
  if (!std::isfinite(flexion)) return 1;
  if (flexion <= 20.0) return 1;
  if (flexion <= 45.0) return 2;
  if (flexion <= 90.0) return 3;
  return 4;  // abduction/shoulder-raise adjustments not measurable here
}

int lower_arm_score(double flexion) {
  if (!std::isfinite(flexion)) return 1;
  return (flexion >= 60.0 && flexion <= 100.0) ? 1 : 2;
}

}  // namespace

PartialScores partial_scores(const JointAngles& angles,
                             const RebaParams& params) {
  if (!std::isfinite(angles.trunk_flexion) ||
      !std::isfinite(angles.neck_flexion)) {
    throw Error(ErrorCode::NonFiniteAngle,
                "trunk and neck flexion must be finite");
  }
  PartialScores s;
  s.trunk = trunk_score(angles.trunk_flexion, angles.side_bend);
  s.neck = neck_score(angles.neck_flexion, angles.neck_side_bend);
  s.legs = legs_score(
      worse_side(angles.knee_flexion_left, angles.knee_flexion_right));
  const double ua = worse_side(angles.upper_arm_flexion_left,
                               angles.upper_arm_flexion_right);
  s.upper_arm = upper_arm_score(ua);
  s.lower_arm = std::max(lower_arm_score(angles.elbow_flexion_left),
                         lower_arm_score(angles.elbow_flexion_right));
  s.wrist = std::clamp(params.wrist_default, 1, 3);
  return s;
}

RiskCategory risk_category(int reba) {
  if (reba <= 1) return RiskCategory::Negligible;
  if (reba <= 3) return RiskCategory::Low;
  if (reba <= 7) return RiskCategory::Medium;
  if (reba <= 10) return RiskCategory::High;
  return RiskCategory::VeryHigh;
}

int risk_category_floor(RiskCategory category) {
  switch (category) {
    case RiskCategory::Negligible: return 1;
    case RiskCategory::Low: return 2;
    case RiskCategory::Medium: return 4;
    case RiskCategory::High: return 8;
    case RiskCategory::VeryHigh: return 11;
  }
  return 1;
}

RebaBreakdown reba_score(const Skeleton3D& skel, const RebaParams& params,
                         const WorldConvention& world) {
  const JointAngles angles = joint_angles(skel, world);
  RebaBreakdown b;
  b.parts = partial_scores(angles, params);
  b.table_a = table_a(b.parts.trunk, b.parts.neck, b.parts.legs);
  b.table_b = table_b(b.parts.upper_arm, b.parts.lower_arm, b.parts.wrist);
  b.score_a = b.table_a + params.force_load;
  b.score_b = b.table_b + params.coupling;
  b.table_c = table_c(std::min(b.score_a, 12), std::min(b.score_b, 12));
  b.activity = params.activity;
  b.reba = b.table_c + b.activity;
  b.category = risk_category(b.reba);
  b.person_id = skel.person_id;
  b.frame_id = skel.frame_id;
  return b;
}

double ScoreDistribution::score_fraction(int score) const {
  const auto it = score_counts.find(score);
  if (it == score_counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / total;
}

double ScoreDistribution::category_fraction(RiskCategory category) const {
  const auto it = category_counts.find(category);
  if (it == category_counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / total;
}

ScoreDistribution score_distribution(
    std::span<const RebaBreakdown> breakdowns) {
  ScoreDistribution dist;
  for (const auto& b : breakdowns) {
    ++dist.score_counts[b.reba];
    ++dist.category_counts[b.category];
    ++dist.total;
  }
  return dist;
}

CompareReport compare_breakdowns(std::span<const RebaBreakdown> original,
                                 std::span<const RebaBreakdown> obfuscated) {
  std::map<std::pair<std::string, std::string>, const RebaBreakdown*> by_key;
  for (const auto& b : obfuscated) {
    by_key[{b.frame_id, b.person_id}] = &b;
  }
  CompareReport report;
  int exact = 0;
  int same_category = 0;
  for (const auto& orig : original) {
    const auto it = by_key.find({orig.frame_id, orig.person_id});
    if (it == by_key.end()) {
      ++report.n_unmatched;
      continue;
    }
    const RebaBreakdown& obf = *it->second;
    ++report.n_compared;
    ++report.part_delta_counts["trunk"][obf.parts.trunk - orig.parts.trunk];
    ++report.part_delta_counts["neck"][obf.parts.neck - orig.parts.neck];
    ++report.part_delta_counts["legs"][obf.parts.legs - orig.parts.legs];
    ++report.part_delta_counts["upper_arm"]
                              [obf.parts.upper_arm - orig.parts.upper_arm];
    ++report.part_delta_counts["lower_arm"]
                              [obf.parts.lower_arm - orig.parts.lower_arm];
    ++report.part_delta_counts["wrist"][obf.parts.wrist - orig.parts.wrist];
    ++report.part_delta_counts["reba"][obf.reba - orig.reba];
    if (obf.reba == orig.reba) ++exact;
    if (obf.category == orig.category) ++same_category;
  }
  if (report.n_compared > 0) {
    report.exact_match_rate =
        static_cast<double>(exact) / report.n_compared;
    report.same_category_rate =
        static_cast<double>(same_category) / report.n_compared;
  }
  return report;
}

}  // namespace ergopipe::reba
