#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::reba {

// All angles in degrees. Fields are NaN when the joints needed to measure
// them are invalid; trunk and neck are required downstream.
struct JointAngles {
  double trunk_flexion = 0.0;      // trunk vs. world up-axis
  double neck_flexion = 0.0;       // neck vs. trunk
  double knee_flexion_left = 0.0;  // 180 - interior knee angle
  double knee_flexion_right = 0.0;
  double upper_arm_flexion_left = 0.0;  // upper arm vs. downward trunk
  double upper_arm_flexion_right = 0.0;
  double elbow_flexion_left = 0.0;  // 180 - interior elbow angle
  double elbow_flexion_right = 0.0;
  double side_bend = 0.0;       // lateral trunk deviation
  double neck_side_bend = 0.0;  // lateral head deviation relative to trunk
};

struct RebaParams {
  int force_load = 0;
  int coupling = 0;
  int activity = 0;
  int wrist_default = 1;  // COCO-17 carries no hand keypoints
};

enum class RiskCategory { Negligible, Low, Medium, High, VeryHigh };

const char* risk_category_name(RiskCategory category);

struct PartialScores {
  int trunk = 1;      // 1..5
  int neck = 1;       // 1..3
  int legs = 1;       // 1..4
  int upper_arm = 1;  // 1..6
  int lower_arm = 1;  // 1..2
  int wrist = 1;      // 1..3
};

struct RebaBreakdown {
  PartialScores parts;
  int table_a = 1;
  int table_b = 1;
  int score_a = 1;  // table_a + force/load
  int score_b = 1;  // table_b + coupling
  int table_c = 1;
  int activity = 0;
  int reba = 1;
  RiskCategory category = RiskCategory::Negligible;
  std::string person_id;
  std::string frame_id;
};

// Lookup tables transcribed from the published REBA worksheet. Each throws
// IndexOutOfRange outside its declared domain.
int table_a(int trunk, int neck, int legs);
int table_b(int upper_arm, int lower_arm, int wrist);
int table_c(int score_a, int score_b);

// Self-check run by the tests: every table is non-decreasing in each
// argument; a violation means a transcription error.
bool tables_monotonic();

// Requires valid hips and shoulders (throws MissingCoreJoints). Other
// joints are optional and yield NaN angles when missing.
JointAngles joint_angles(const Skeleton3D& skel, const WorldConvention& world);

// Maps angles onto partial scores. Bilateral limbs use the worse side;
// non-finite optional angles contribute the minimal score. Throws
// NonFiniteAngle when trunk or neck flexion is not finite.
PartialScores partial_scores(const JointAngles& angles,
                             const RebaParams& params);

int risk_category_floor(RiskCategory category);
RiskCategory risk_category(int reba);

RebaBreakdown reba_score(const Skeleton3D& skel, const RebaParams& params,
                         const WorldConvention& world);

struct ScoreDistribution {
  std::map<int, int> score_counts;
  std::map<RiskCategory, int> category_counts;
  int total = 0;

  double score_fraction(int score) const;
  double category_fraction(RiskCategory category) const;
};

ScoreDistribution score_distribution(std::span<const RebaBreakdown> breakdowns);

// Signed per-part deltas (obfuscated minus original) over entries aligned
// by (frame_id, person_id). Original entries without a counterpart count
// as unmatched.
struct CompareReport {
  std::map<std::string, std::map<int, int>> part_delta_counts;
  int n_compared = 0;
  int n_unmatched = 0;
  double exact_match_rate = 0.0;    // identical final REBA
  double same_category_rate = 0.0;

  double unmatched_fraction() const {
    const int total = n_compared + n_unmatched;
    return total == 0 ? 0.0 : static_cast<double>(n_unmatched) / total;
  }
};

CompareReport compare_breakdowns(std::span<const RebaBreakdown> original,
                                 std::span<const RebaBreakdown> obfuscated);

}  // namespace ergopipe::reba
