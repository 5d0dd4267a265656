#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::metrics {

// Per-keypoint scale factors for the OKS kernel; defaults follow the COCO
// evaluation convention.
struct OksConstants {
  std::vector<double> kappa;

  static OksConstants coco17();
};

// Gaussian keypoint similarity in [0,1], averaged over labeled keypoints.
// Throws NoLabeledKeypoints / NonPositiveArea / ShapeMismatch.
double oks(const Pose2D& pred, const GroundTruthPose& gt,
           const OksConstants& consts);

// Promotes a detection to a ground-truth record: visibility from the
// confidence floor, segment area from the 0.53 * bbox_area fallback.
GroundTruthPose pose_to_ground_truth(const Pose2D& pose, double c_min);

struct MatchLabel {
  int pred_index = -1;     // into the original prediction list
  double score = 0.0;      // detection score, for PR ordering
  bool tp = false;
  double best_oks = 0.0;
  int matched_gt = -1;
};

// Greedy matching in descending detection-score order: each prediction takes
// the unmatched ground truth with the highest OKS; TP iff that OKS clears
// the threshold. Returned in match order.
std::vector<MatchLabel> match_and_score(std::span<const Pose2D> preds,
                                        std::span<const GroundTruthPose> gts,
                                        const OksConstants& consts,
                                        double threshold);

struct EvalResult {
  double ap = 0.0;
  double threshold = 0.5;
  int n_gt = 0;
  int n_pred = 0;
  std::vector<std::pair<double, double>> pr_curve;  // (recall, precision)
};

// 101-point interpolated average precision over one detection set.
EvalResult average_precision(std::span<const Pose2D> preds,
                             std::span<const GroundTruthPose> gts,
                             const OksConstants& consts, double threshold);

// Corpus evaluation: matching runs per frame, the PR curve pools all
// predictions globally.
struct FrameDetections {
  std::vector<Pose2D> preds;
  std::vector<GroundTruthPose> gts;
};

EvalResult evaluate_corpus(std::span<const FrameDetections> frames,
                           const OksConstants& consts, double threshold);

}  // namespace ergopipe::metrics
