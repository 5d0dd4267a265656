#include "ergopipe/keypoint_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergopipe/error.hpp"

namespace ergopipe::metrics {

OksConstants OksConstants::coco17() {
  return {{0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
           0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089}};
}

double oks(const Pose2D& pred, const GroundTruthPose& gt,
           const OksConstants& consts) {
  if (pred.keypoints.size() != gt.keypoints.size() ||
      consts.kappa.size() != gt.keypoints.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "prediction, ground truth and kappa must share one layout");
  }
  if (!(gt.segment_area > 0.0)) {
    throw Error(ErrorCode::NonPositiveArea, "segment_area must be positive");
  }
  const double s2 = gt.segment_area;  // s = sqrt(area)
  double sum = 0.0;
  int labeled = 0;
  for (std::size_t i = 0; i < gt.keypoints.size(); ++i) {
    if (gt.keypoints[i].v <= 0) continue;
    const double dx = pred.keypoints[i].x - gt.keypoints[i].x;
    const double dy = pred.keypoints[i].y - gt.keypoints[i].y;
    const double kappa = consts.kappa[i];
    sum += std::exp(-(dx * dx + dy * dy) / (2.0 * s2 * kappa * kappa));
    ++labeled;
  }
  if (labeled == 0) {
    throw Error(ErrorCode::NoLabeledKeypoints,
                "OKS needs at least one labeled keypoint");
  }
  return sum / labeled;
}

GroundTruthPose pose_to_ground_truth(const Pose2D& pose, double c_min) {
  GroundTruthPose gt;
  gt.camera_id = pose.camera_id;
  gt.frame_id = pose.frame_id;
  gt.keypoints.reserve(pose.keypoints.size());
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  bool first = true;
  for (const auto& kp : pose.keypoints) {
    gt.keypoints.push_back({kp.x, kp.y, kp.conf >= c_min ? 2 : 0});
    if (kp.conf >= c_min) {
      if (first) {
        min_x = max_x = kp.x;
        min_y = max_y = kp.y;
        first = false;
      } else {
        min_x = std::min(min_x, kp.x);
        max_x = std::max(max_x, kp.x);
        min_y = std::min(min_y, kp.y);
        max_y = std::max(max_y, kp.y);
      }
    }
  }
  const double bbox = pose.bbox_area
                          ? *pose.bbox_area
                          : (max_x - min_x) * (max_y - min_y);
  gt.segment_area = bbox * 0.53;
  return gt;
}

std::vector<MatchLabel> match_and_score(std::span<const Pose2D> preds,
                                        std::span<const GroundTruthPose> gts,
                                        const OksConstants& consts,
                                        double threshold) {
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].detection_score > preds[b].detection_score;
  });

  std::vector<bool> gt_taken(gts.size(), false);
  std::vector<MatchLabel> labels;
  labels.reserve(preds.size());
  for (int pi : order) {
    MatchLabel label;
    label.pred_index = pi;
    label.score = preds[pi].detection_score;
    double best = -1.0;
    int best_gt = -1;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double v = oks(preds[pi], gts[gi], consts);
      if (v > best) {
        best = v;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0) {
      label.best_oks = best;
      if (best >= threshold) {
        label.tp = true;
        label.matched_gt = best_gt;
        gt_taken[best_gt] = true;
      }
    }
    labels.push_back(label);
  }
  return labels;
}

namespace {

EvalResult ap_from_labels(std::vector<MatchLabel> labels, int n_gt,
                          double threshold) {
  EvalResult result;
  result.threshold = threshold;
  result.n_gt = n_gt;
  result.n_pred = static_cast<int>(labels.size());
  if (n_gt == 0) {
    // No annotations: empty predictions are vacuously perfect, anything
    // else scores zero.
    result.ap = labels.empty() ? 1.0 : 0.0;
    return result;
  }
  if (labels.empty()) {
    result.ap = 0.0;
    return result;
  }
  std::stable_sort(labels.begin(), labels.end(),
                   [](const MatchLabel& a, const MatchLabel& b) {
                     return a.score > b.score;
                   });
  int tp = 0;
  std::vector<double> precision(labels.size());
  std::vector<double> recall(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].tp) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / n_gt;
    result.pr_curve.emplace_back(recall[i], precision[i]);
  }
  // Interpolated precision: running max from the high-recall end.
  std::vector<double> interp(precision);
  for (int i = static_cast<int>(interp.size()) - 2; i >= 0; --i) {
    interp[i] = std::max(interp[i], interp[i + 1]);
  }
  double sum = 0.0;
  std::size_t j = 0;
  for (int r = 0; r <= 100; ++r) {
    const double target = r / 100.0;
    while (j < recall.size() && recall[j] < target) ++j;
    if (j < recall.size()) sum += interp[j];
  }
  result.ap = sum / 101.0;
  return result;
}

}  // namespace

EvalResult average_precision(std::span<const Pose2D> preds,
                             std::span<const GroundTruthPose> gts,
                             const OksConstants& consts, double threshold) {
  return ap_from_labels(match_and_score(preds, gts, consts, threshold),
                        static_cast<int>(gts.size()), threshold);
}

EvalResult evaluate_corpus(std::span<const FrameDetections> frames,
                           const OksConstants& consts, double threshold) {
  std::vector<MatchLabel> pooled;
  int n_gt = 0;
  for (const auto& frame : frames) {
    auto labels = match_and_score(frame.preds, frame.gts, consts, threshold);
    pooled.insert(pooled.end(), labels.begin(), labels.end());
    n_gt += static_cast<int>(frame.gts.size());
  }
  return ap_from_labels(std::move(pooled), n_gt, threshold);
}

}  // namespace ergopipe::metrics
