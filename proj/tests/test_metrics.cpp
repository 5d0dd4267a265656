#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ergopipe/error.hpp"
#include "ergopipe/gap/rng.hpp"
#include "ergopipe/image_metrics.hpp"
#include "ergopipe/keypoint_metrics.hpp"

using namespace ergopipe;
using namespace ergopipe::metrics;

namespace {

GroundTruthPose single_gt(double x, double y, double area) {
  GroundTruthPose gt;
  gt.keypoints.push_back({x, y, 2});
  gt.segment_area = area;
  return gt;
}

Pose2D single_pred(double x, double y, double score) {
  Pose2D pose;
  pose.keypoints.push_back({x, y, 1.0});
  pose.detection_score = score;
  return pose;
}

// Distance that produces a target OKS for a single labeled keypoint.
double distance_for_oks(double target, double area, double kappa) {
  return std::sqrt(-2.0 * area * kappa * kappa * std::log(target));
}

}  // namespace

TEST_CASE("oks identity is exactly one") {
  OksConstants consts = OksConstants::coco17();
  GroundTruthPose gt;
  Pose2D pred;
  gap::Rng rng(3);
  for (int i = 0; i < 17; ++i) {
    const double x = rng.uniform(0.0, 640.0);
    const double y = rng.uniform(0.0, 480.0);
    gt.keypoints.push_back({x, y, 2});
    pred.keypoints.push_back({x, y, 0.9});
  }
  gt.segment_area = 5000.0;
  CHECK(oks(pred, gt, consts) == 1.0);
}

TEST_CASE("oks single keypoint at d = s*kappa*sqrt(2) is exp(-1)") {
  const double area = 3721.0;  // s = 61
  const double kappa = 0.079;
  OksConstants consts{{kappa}};
  const double d = std::sqrt(area) * kappa * std::sqrt(2.0);
  const auto gt = single_gt(100.0, 100.0, area);
  const auto pred = single_pred(100.0 + d, 100.0, 0.9);
  CHECK(oks(pred, gt, consts) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("oks three keypoints match the closed form") {
  const double area = 2500.0;  // s = 50
  const double kappa = 0.1;
  OksConstants consts{{kappa, kappa, kappa}};
  const double sk = std::sqrt(area) * kappa;
  GroundTruthPose gt;
  gt.keypoints = {{0.0, 0.0, 2}, {100.0, 0.0, 1}, {0.0, 100.0, 2}};
  gt.segment_area = area;
  Pose2D pred;
  pred.keypoints = {{0.0, 0.0, 1.0},
                    {100.0 + sk, 0.0, 1.0},
                    {0.0, 100.0 + 2.0 * sk, 1.0}};
  const double expected =
      (1.0 + std::exp(-0.5) + std::exp(-2.0)) / 3.0;
  CHECK(oks(pred, gt, consts) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oks ignores unlabeled keypoints and validates inputs") {
  OksConstants consts{{0.1, 0.1}};
  GroundTruthPose gt;
  gt.keypoints = {{0.0, 0.0, 0}, {10.0, 10.0, 0}};
  gt.segment_area = 100.0;
  Pose2D pred;
  pred.keypoints = {{5.0, 5.0, 1.0}, {10.0, 10.0, 1.0}};
  try {
    oks(pred, gt, consts);
    FAIL("expected NoLabeledKeypoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoLabeledKeypoints);
  }
  gt.keypoints[0].v = 2;
  gt.segment_area = 0.0;
  try {
    oks(pred, gt, consts);
    FAIL("expected NonPositiveArea");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveArea);
  }
}

TEST_CASE("oks is symmetric under keypoint relabeling") {
  OksConstants consts{{0.05, 0.08, 0.11}};
  GroundTruthPose gt;
  gt.keypoints = {{0.0, 0.0, 2}, {50.0, 0.0, 2}, {0.0, 50.0, 1}};
  gt.segment_area = 900.0;
  Pose2D pred;
  pred.keypoints = {{3.0, 1.0, 1.0}, {52.0, -1.0, 1.0}, {2.0, 55.0, 1.0}};
  const double base = oks(pred, gt, consts);

  const std::vector<int> perm = {2, 0, 1};
  OksConstants consts_p{{consts.kappa[2], consts.kappa[0], consts.kappa[1]}};
  GroundTruthPose gt_p = gt;
  Pose2D pred_p = pred;
  for (int i = 0; i < 3; ++i) {
    gt_p.keypoints[i] = gt.keypoints[perm[i]];
    pred_p.keypoints[i] = pred.keypoints[perm[i]];
  }
  CHECK(oks(pred_p, gt_p, consts_p) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("oks strictly decreases as one distance grows") {
  OksConstants consts{{0.1, 0.1, 0.1}};
  GroundTruthPose gt;
  gt.keypoints = {{0.0, 0.0, 2}, {50.0, 0.0, 2}, {0.0, 50.0, 2}};
  gt.segment_area = 900.0;
  double previous = 2.0;
  for (double offset : {0.0, 5.0, 10.0, 20.0, 40.0}) {
    Pose2D pred;
    pred.keypoints = {{offset, 0.0, 1.0}, {50.0, 0.0, 1.0}, {0.0, 50.0, 1.0}};
    const double v = oks(pred, gt, consts);
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("match_and_score basics") {
  OksConstants consts{{0.1}};
  const double area = 2500.0;

  SUBCASE("one prediction on one ground truth") {
    std::vector<GroundTruthPose> gts = {single_gt(100, 100, area)};
    std::vector<Pose2D> preds = {single_pred(101, 100, 0.9)};
    const auto labels = match_and_score(preds, gts, consts, 0.5);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].tp);
    CHECK(labels[0].matched_gt == 0);
  }

  SUBCASE("two predictions on one ground truth") {
    std::vector<GroundTruthPose> gts = {single_gt(100, 100, area)};
    std::vector<Pose2D> preds = {single_pred(102, 100, 0.6),
                                 single_pred(101, 100, 0.9)};
    const auto labels = match_and_score(preds, gts, consts, 0.5);
    REQUIRE(labels.size() == 2);
    // Higher score goes first and takes the ground truth.
    CHECK(labels[0].pred_index == 1);
    CHECK(labels[0].tp);
    CHECK_FALSE(labels[1].tp);
  }
}

// Independent re-implementation of the greedy matcher used as an oracle.
namespace {

struct OracleLabel {
  double score;
  bool tp;
};

std::vector<OracleLabel> oracle_match(const std::vector<Pose2D>& preds,
                                      const std::vector<GroundTruthPose>& gts,
                                      const OksConstants& consts,
                                      double threshold) {
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].detection_score > preds[b].detection_score;
  });
  std::vector<bool> taken(gts.size(), false);
  std::vector<OracleLabel> labels;
  for (int pi : order) {
    double best = -1.0;
    int best_gt = -1;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (taken[gi]) continue;
      const double v = oks(preds[pi], gts[gi], consts);
      if (v > best) {
        best = v;
        best_gt = static_cast<int>(gi);
      }
    }
    const bool tp = best_gt >= 0 && best >= threshold;
    if (tp) taken[best_gt] = true;
    labels.push_back({preds[pi].detection_score, tp});
  }
  return labels;
}

// Brute-force 101-point PR integration: for every recall threshold scan
// all prefixes for the best precision at recall >= r.
double oracle_ap(const std::vector<OracleLabel>& labels, int n_gt) {
  if (n_gt == 0) return labels.empty() ? 1.0 : 0.0;
  if (labels.empty()) return 0.0;
  std::vector<OracleLabel> sorted = labels;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const OracleLabel& a, const OracleLabel& b) {
                     return a.score > b.score;
                   });
  std::vector<double> precision, recall;
  int tp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].tp) ++tp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / n_gt);
  }
  double sum = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double target = r / 100.0;
    double best = 0.0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
      if (recall[i] >= target) best = std::max(best, precision[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

}  // namespace

TEST_CASE("greedy matching agrees with brute force over assignment orders") {
  // 3 predictions / 2 ground truths with controlled OKS values.
  const double area = 2500.0;
  const double kappa = 0.1;
  OksConstants consts{{kappa}};
  std::vector<GroundTruthPose> gts = {single_gt(0, 0, area),
                                      single_gt(500, 0, area)};
  std::vector<Pose2D> preds = {
      single_pred(distance_for_oks(0.9, area, kappa), 0, 0.95),
      single_pred(500 + distance_for_oks(0.7, area, kappa), 0, 0.85),
      single_pred(distance_for_oks(0.6, area, kappa), 0, 0.75),
  };
  const auto labels = match_and_score(preds, gts, consts, 0.5);
  const auto oracle = oracle_match(preds, gts, consts, 0.5);
  REQUIRE(labels.size() == oracle.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(labels[i].tp == oracle[i].tp);
    CHECK(labels[i].score == oracle[i].score);
  }
}

TEST_CASE("average precision edge cases") {
  OksConstants consts{{0.1}};
  const double area = 2500.0;

  SUBCASE("all true positives covering all ground truths") {
    std::vector<GroundTruthPose> gts = {single_gt(0, 0, area),
                                        single_gt(300, 0, area)};
    std::vector<Pose2D> preds = {single_pred(1, 0, 0.9),
                                 single_pred(301, 0, 0.8)};
    CHECK(average_precision(preds, gts, consts, 0.5).ap == 1.0);
  }

  SUBCASE("no predictions with ground truth present") {
    std::vector<GroundTruthPose> gts = {single_gt(0, 0, area)};
    CHECK(average_precision({}, gts, consts, 0.5).ap == 0.0);
  }

  SUBCASE("predictions with no ground truth") {
    std::vector<Pose2D> preds = {single_pred(0, 0, 0.9)};
    CHECK(average_precision(preds, {}, consts, 0.5).ap == 0.0);
  }

  SUBCASE("both empty is defined as perfect") {
    CHECK(average_precision({}, {}, consts, 0.5).ap == 1.0);
  }
}

TEST_CASE("five predictions and three ground truths match the oracle") {
  const double area = 2500.0;
  const double kappa = 0.1;
  OksConstants consts{{kappa}};
  std::vector<GroundTruthPose> gts = {single_gt(0, 0, area),
                                      single_gt(500, 0, area),
                                      single_gt(1000, 0, area)};
  std::vector<Pose2D> preds = {
      single_pred(distance_for_oks(0.8, area, kappa), 0, 0.99),
      single_pred(400, 0, 0.9),  // far from everything
      single_pred(500 + distance_for_oks(0.55, area, kappa), 0, 0.8),
      single_pred(1000 + distance_for_oks(0.95, area, kappa), 0, 0.7),
      single_pred(2.0 * distance_for_oks(0.8, area, kappa), 0, 0.6),
  };
  const auto result = average_precision(preds, gts, consts, 0.5);
  const double expected = oracle_ap(oracle_match(preds, gts, consts, 0.5), 3);
  CHECK(result.ap == expected);
  CHECK(result.n_gt == 3);
  CHECK(result.n_pred == 5);
  // recall never decreases along the curve
  for (std::size_t i = 1; i < result.pr_curve.size(); ++i) {
    CHECK(result.pr_curve[i].first >= result.pr_curve[i - 1].first);
  }
}

TEST_CASE("ap only depends on score ranks") {
  const double area = 2500.0;
  const double kappa = 0.1;
  OksConstants consts{{kappa}};
  gap::Rng rng(11);
  std::vector<GroundTruthPose> gts = {single_gt(0, 0, area),
                                      single_gt(400, 0, area)};
  std::vector<Pose2D> preds;
  for (int i = 0; i < 4; ++i) {
    preds.push_back(single_pred(rng.uniform(-50.0, 450.0), 0,
                                0.9 - 0.2 * i));
  }
  const double base = average_precision(preds, gts, consts, 0.5).ap;
  // Strictly monotone remap of the scores.
  for (auto& p : preds) {
    p.detection_score = 1.0 / (1.0 + std::exp(-6.0 * p.detection_score));
  }
  CHECK(average_precision(preds, gts, consts, 0.5).ap == base);
}

TEST_CASE("corpus evaluation pools frames") {
  const double area = 2500.0;
  OksConstants consts{{0.1}};
  std::vector<FrameDetections> frames(2);
  frames[0].gts = {single_gt(0, 0, area)};
  frames[0].preds = {single_pred(1, 0, 0.9)};
  frames[1].gts = {single_gt(0, 0, area)};
  frames[1].preds = {single_pred(300, 0, 0.95)};  // miss
  const auto result = evaluate_corpus(frames, consts, 0.5);
  CHECK(result.n_gt == 2);
  CHECK(result.n_pred == 2);
  // Pooled curve: FP at rank 1, TP at rank 2.
  const double expected =
      oracle_ap({{0.95, false}, {0.9, true}}, 2);
  CHECK(result.ap == expected);
}

// ---- image metrics ---------------------------------------------------------

namespace {

ImageBuffer noise_image(int w, int h, int ch, std::uint64_t seed) {
  ImageBuffer img = ImageBuffer::make(w, h, ch);
  gap::Rng rng(seed);
  for (auto& v : img.data) {
    v = static_cast<std::uint8_t>(rng.uniform_int(256));
  }
  return img;
}

// Smooth-ish texture so SSIM sees structure rather than pure noise.
ImageBuffer texture_image(int w, int h, std::uint64_t seed) {
  ImageBuffer img = ImageBuffer::make(w, h, 1);
  gap::Rng rng(seed);
  const double fx = rng.uniform(0.05, 0.2), fy = rng.uniform(0.05, 0.2);
  const double px = rng.uniform(0.0, 6.28), py = rng.uniform(0.0, 6.28);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = 128.0 + 60.0 * std::sin(fx * x + px) *
                                   std::cos(fy * y + py) +
                       20.0 * rng.uniform(-1.0, 1.0);
      img.at(x, y, 0) =
          static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

// Direct windowed SSIM: explicit 11x11 weighted statistics per valid
// center, no separable shortcuts.
double ssim_oracle(const ImageBuffer& a, const ImageBuffer& b) {
  constexpr int kWin = 11, kRad = 5;
  constexpr double kC1 = 6.5025, kC2 = 58.5225;
  double weights[kWin][kWin];
  double wsum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      const double di = i - kRad, dj = j - kRad;
      weights[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
      wsum += weights[i][j];
    }
  }
  for (auto& row : weights)
    for (double& w : row) w /= wsum;

  double channel_sum = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    double map_sum = 0.0;
    int count = 0;
    for (int cy = kRad; cy < a.height - kRad; ++cy) {
      for (int cx = kRad; cx < a.width - kRad; ++cx) {
        double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
        for (int i = 0; i < kWin; ++i) {
          for (int j = 0; j < kWin; ++j) {
            const double w = weights[i][j];
            const double xv = a.at(cx + j - kRad, cy + i - kRad, c);
            const double yv = b.at(cx + j - kRad, cy + i - kRad, c);
            mx += w * xv;
            my += w * yv;
            mxx += w * xv * xv;
            myy += w * yv * yv;
            mxy += w * xv * yv;
          }
        }
        const double vx = mxx - mx * mx;
        const double vy = myy - my * my;
        const double cov = mxy - mx * my;
        map_sum += ((2 * mx * my + kC1) * (2 * cov + kC2)) /
                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
        ++count;
      }
    }
    channel_sum += map_sum / count;
  }
  return channel_sum / a.channels;
}

}  // namespace

TEST_CASE("psnr analytic cases") {
  const ImageBuffer a = noise_image(40, 30, 3, 1);

  SUBCASE("identical images give infinity") {
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, a) > 0);
  }

  SUBCASE("full-range difference gives 0 dB") {
    ImageBuffer lo = ImageBuffer::make(16, 16, 1, 0);
    ImageBuffer hi = ImageBuffer::make(16, 16, 1, 255);
    CHECK(psnr(lo, hi) == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("unit difference everywhere") {
    ImageBuffer b = a;
    for (auto& v : b.data) {
      v = static_cast<std::uint8_t>(v < 255 ? v + 1 : v - 1);
    }
    CHECK(psnr(a, b) ==
          doctest::Approx(10.0 * std::log10(255.0 * 255.0)).epsilon(1e-9));
  }

  SUBCASE("shape mismatch") {
    const ImageBuffer b = noise_image(41, 30, 3, 1);
    CHECK_THROWS_AS(psnr(a, b), Error);
  }
}

TEST_CASE("psnr is symmetric") {
  const ImageBuffer a = noise_image(32, 32, 1, 5);
  const ImageBuffer b = noise_image(32, 32, 1, 6);
  CHECK(psnr(a, b) == psnr(b, a));
}

TEST_CASE("ssim identity and degenerate contrast") {
  const ImageBuffer a = texture_image(48, 40, 2);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  // Constant versus constant offset by 255: variances vanish and the
  // closed form reduces to C1 / (255^2 + C1).
  ImageBuffer lo = ImageBuffer::make(24, 24, 1, 0);
  ImageBuffer hi = ImageBuffer::make(24, 24, 1, 255);
  const double expected = 6.5025 / (255.0 * 255.0 + 6.5025);
  CHECK(metrics::ssim(lo, hi) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ssim rejects mismatched shapes") {
  const ImageBuffer a = noise_image(24, 24, 1, 3);
  const ImageBuffer b = noise_image(24, 20, 1, 3);
  CHECK_THROWS_AS(ssim(a, b), Error);
}

TEST_CASE("ssim rejects tiny images") {
  const ImageBuffer a = noise_image(10, 10, 1, 1);
  try {
    ssim(a, a);
    FAIL("expected ImageTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ImageTooSmall);
  }
}

TEST_CASE("ssim matches the direct windowed oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ImageBuffer a = texture_image(36, 30, 100 + seed);
    ImageBuffer b = a;
    gap::Rng rng(200 + seed);
    for (auto& v : b.data) {
      const double noisy = v + 25.0 * rng.normal();
      v = static_cast<std::uint8_t>(std::clamp(noisy, 0.0, 255.0));
    }
    const double fast = ssim(a, b);
    const double slow = ssim_oracle(a, b);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    CHECK(fast == doctest::Approx(ssim(b, a)).epsilon(1e-12));
    CHECK(fast < 1.0);
    CHECK(fast > -1.0);
  }
}

TEST_CASE("ssim averages channels") {
  const ImageBuffer a = noise_image(24, 24, 3, 9);
  ImageBuffer b = a;
  for (std::size_t i = 0; i < b.data.size(); i += 3) {
    b.data[i] = static_cast<std::uint8_t>(255 - b.data[i]);
  }
  const double v = ssim(a, b);
  CHECK(v == doctest::Approx(ssim_oracle(a, b)).epsilon(1e-9));
}
