// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero on any
// failure. Takes the pipeline CLI binary as argv[1] for the end-to-end
// and determinism criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergopipe/filters.hpp"
#include "ergopipe/gap/nn.hpp"
#include "ergopipe/gap/rng.hpp"
#include "ergopipe/gap/synthetic.hpp"
#include "ergopipe/gap/train.hpp"
#include "ergopipe/geometry.hpp"
#include "ergopipe/image_metrics.hpp"
#include "ergopipe/io/image_io.hpp"
#include "ergopipe/keypoint_metrics.hpp"
#include "ergopipe/reba.hpp"
#include "ergopipe/synth_human.hpp"

namespace fs = std::filesystem;
using namespace ergopipe;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
fs::path g_work;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int g_failures = 0;

void run_criterion(int number, const std::string& name, double time_limit_s,
                   const std::function<void(Check&)>& body) {
  Check check;
  const auto start = Clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();
  check.expect(elapsed < time_limit_s,
               "runtime " + std::to_string(elapsed) + "s exceeds " +
                   std::to_string(time_limit_s) + "s");
  if (check.ok) {
    std::printf("[PASS] criterion %2d: %s (%.1fs)\n", number, name.c_str(),
                elapsed);
  } else {
    std::printf("[FAIL] criterion %2d: %s (%.1fs) -- %s\n", number,
                name.c_str(), elapsed, check.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

int run_cli(const std::string& args) {
  const std::string cmd =
      g_cli + " " + args + " 2>" + (g_work / "cli_stderr.txt").string();
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), dir).generic_string()] =
          slurp(entry.path());
    }
  }
  return files;
}

// ---- criterion 1: OKS exactness -------------------------------------------

void criterion_oks(Check& check) {
  const auto consts = metrics::OksConstants::coco17();
  gap::Rng rng(101);

  GroundTruthPose gt;
  Pose2D pred;
  for (int i = 0; i < coco::kKeypointCount; ++i) {
    const double x = rng.uniform(0.0, 2000.0);
    const double y = rng.uniform(0.0, 1500.0);
    gt.keypoints.push_back({x, y, 2});
    pred.keypoints.push_back({x, y, 0.9});
  }
  gt.segment_area = 40000.0;
  check.expect(metrics::oks(pred, gt, consts) == 1.0, "identity OKS not 1.0");

  {
    const double area = 5329.0;
    const double kappa = 0.062;
    metrics::OksConstants single{{kappa}};
    GroundTruthPose g1;
    g1.keypoints.push_back({300.0, 200.0, 2});
    g1.segment_area = area;
    Pose2D p1;
    const double d = std::sqrt(area) * kappa * std::sqrt(2.0);
    p1.keypoints.push_back({300.0 + d, 200.0, 1.0});
    check.expect(
        std::abs(metrics::oks(p1, g1, single) - std::exp(-1.0)) < 1e-12,
        "d = s*kappa*sqrt(2) case not exp(-1)");
  }

  // Randomized multi-keypoint cases against a direct scalar evaluation.
  for (int n = 0; n < 20; ++n) {
    GroundTruthPose g;
    Pose2D p;
    g.segment_area = rng.uniform(500.0, 90000.0);
    int labeled = 0;
    for (int i = 0; i < coco::kKeypointCount; ++i) {
      const double x = rng.uniform(0.0, 2000.0);
      const double y = rng.uniform(0.0, 1500.0);
      const int v = rng.uniform_int(3);
      labeled += v > 0 ? 1 : 0;
      g.keypoints.push_back({x, y, v});
      p.keypoints.push_back(
          {x + rng.uniform(-80.0, 80.0), y + rng.uniform(-80.0, 80.0), 0.9});
    }
    if (labeled == 0) {
      g.keypoints[0].v = 2;
    }
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < coco::kKeypointCount; ++i) {
      if (g.keypoints[i].v <= 0) continue;
      const double dx = p.keypoints[i].x - g.keypoints[i].x;
      const double dy = p.keypoints[i].y - g.keypoints[i].y;
      sum += std::exp(-(dx * dx + dy * dy) /
                      (2.0 * g.segment_area * consts.kappa[i] *
                       consts.kappa[i]));
      ++count;
    }
    const double expected = sum / count;
    check.expect(std::abs(metrics::oks(p, g, consts) - expected) < 1e-12,
                 "random case " + std::to_string(n) + " mismatch");
  }
}

// ---- criterion 2: AP oracle equivalence ------------------------------------

struct OracleLabel {
  double score;
  bool tp;
};

std::vector<OracleLabel> oracle_match(
    const std::vector<Pose2D>& preds,
    const std::vector<GroundTruthPose>& gts,
    const metrics::OksConstants& consts, double threshold) {
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
      const double v = metrics::oks(preds[pi], gts[gi], consts);
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

// Brute-force PR integration: scan all prefixes per recall threshold.
double oracle_ap(std::vector<OracleLabel> labels, int n_gt) {
  if (n_gt == 0) return labels.empty() ? 1.0 : 0.0;
  if (labels.empty()) return 0.0;
  std::stable_sort(labels.begin(), labels.end(),
                   [](const OracleLabel& a, const OracleLabel& b) {
                     return a.score > b.score;
                   });
  std::vector<double> precision, recall;
  int tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].tp) ++tp;
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

void criterion_ap(Check& check) {
  const double area = 2500.0;
  const double kappa = 0.1;
  const metrics::OksConstants consts{{kappa}};
  gap::Rng rng(202);
  int cases = 0;
  for (int n_gt = 0; n_gt <= 3; ++n_gt) {
    for (int n_pred = 0; n_pred <= 5; ++n_pred) {
      for (int variant = 0; variant < 10; ++variant) {
        std::vector<GroundTruthPose> gts;
        for (int g = 0; g < n_gt; ++g) {
          GroundTruthPose gt;
          gt.keypoints.push_back({g * 400.0, 0.0, 2});
          gt.segment_area = area;
          gts.push_back(gt);
        }
        std::vector<Pose2D> preds;
        for (int p = 0; p < n_pred; ++p) {
          Pose2D pred;
          // Place near a random ground truth (or nowhere) with a random
          // miss distance spanning both sides of the 0.5 threshold.
          const double anchor =
              n_gt > 0 ? rng.uniform_int(n_gt + 1) * 400.0 : 5000.0;
          pred.keypoints.push_back(
              {anchor + rng.uniform(0.0, 120.0), rng.uniform(-30.0, 30.0),
               1.0});
          pred.detection_score = rng.uniform(0.05, 0.99);
          preds.push_back(pred);
        }
        const double got =
            metrics::average_precision(preds, gts, consts, 0.5).ap;
        const double expected =
            oracle_ap(oracle_match(preds, gts, consts, 0.5),
                      static_cast<int>(gts.size()));
        if (got != expected) {
          check.expect(false,
                       "mismatch at n_gt=" + std::to_string(n_gt) +
                           " n_pred=" + std::to_string(n_pred) + " variant=" +
                           std::to_string(variant));
          return;
        }
        ++cases;
      }
    }
  }
  check.expect(cases >= 200, "only " + std::to_string(cases) + " cases");
}

// ---- criterion 3: image metrics ---------------------------------------------

ImageBuffer texture(int w, int h, std::uint64_t seed) {
  ImageBuffer img = ImageBuffer::make(w, h, 1);
  gap::Rng rng(seed);
  const double fx = rng.uniform(0.05, 0.25), fy = rng.uniform(0.05, 0.25);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(
          128.0 + 70.0 * std::sin(fx * x) * std::cos(fy * y) +
              15.0 * rng.uniform(-1.0, 1.0),
          0.0, 255.0));
  return img;
}

// Direct 11x11 windowed SSIM reference, no separable shortcut.
double ssim_reference(const ImageBuffer& a, const ImageBuffer& b) {
  constexpr int kWin = 11, kRad = 5;
  constexpr double kC1 = 6.5025, kC2 = 58.5225;
  double weights[kWin][kWin];
  double wsum = 0.0;
  for (int i = 0; i < kWin; ++i)
    for (int j = 0; j < kWin; ++j) {
      const double di = i - kRad, dj = j - kRad;
      weights[i][j] = std::exp(-(di * di + dj * dj) / 4.5);
      wsum += weights[i][j];
    }
  for (auto& row : weights)
    for (double& w : row) w /= wsum;
  double channel_sum = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    double map_sum = 0.0;
    int count = 0;
    for (int cy = kRad; cy < a.height - kRad; ++cy)
      for (int cx = kRad; cx < a.width - kRad; ++cx) {
        double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
        for (int i = 0; i < kWin; ++i)
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
        const double vx = mxx - mx * mx, vy = myy - my * my,
                     cov = mxy - mx * my;
        map_sum += ((2 * mx * my + kC1) * (2 * cov + kC2)) /
                   ((mx * mx + my * my + kC1) * (vx + vy + kC2));
        ++count;
      }
    channel_sum += map_sum / count;
  }
  return channel_sum / a.channels;
}

void criterion_image_metrics(Check& check) {
  ImageBuffer lo = ImageBuffer::make(24, 24, 1, 0);
  ImageBuffer hi = ImageBuffer::make(24, 24, 1, 255);
  check.expect(std::abs(metrics::psnr(lo, hi) - 0.0) < 1e-6,
               "255-difference PSNR not 0 dB");

  ImageBuffer base = texture(32, 32, 7);
  ImageBuffer off = base;
  for (auto& v : off.data) v = static_cast<std::uint8_t>(v < 255 ? v + 1 : 254);
  check.expect(std::abs(metrics::psnr(base, off) -
                        10.0 * std::log10(255.0 * 255.0)) < 1e-6,
               "unit-difference PSNR not 48.1308 dB");

  check.expect(std::abs(metrics::ssim(base, base) - 1.0) < 1e-9,
               "SSIM identity not 1");

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ImageBuffer a = texture(40, 34, 300 + seed);
    ImageBuffer b = a;
    gap::Rng rng(400 + seed);
    if (seed % 2 == 0) {
      b = filters::gaussian_blur(a, 1.0 + seed);
    } else {
      for (auto& v : b.data) {
        v = static_cast<std::uint8_t>(
            std::clamp(v + 20.0 * rng.normal(), 0.0, 255.0));
      }
    }
    const double fast = metrics::ssim(a, b);
    const double ref = ssim_reference(a, b);
    check.expect(std::abs(fast - ref) < 1e-3,
                 "SSIM pair " + std::to_string(seed) + " off by " +
                     std::to_string(std::abs(fast - ref)));
  }
}

// ---- criterion 4: geometry round trip ---------------------------------------

void criterion_geometry(Check& check) {
  const auto cams =
      synth::camera_ring(4, 3.0, 1.6, {0.0, 0.0, 1.0}, 1500.0, 2448, 2048);
  gap::Rng rng(404);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d x(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                            rng.uniform(0.3, 1.9));
    std::vector<geom::Observation> obs;
    for (std::size_t c = 0; c < cams.size(); ++c) {
      const auto px = geom::project(x, cams[c]);
      obs.push_back({static_cast<int>(c), {px.x, px.y}, 0.9});
    }
    const auto tp = geom::triangulate_point(obs, cams, 0.3);
    if ((tp.position - x).norm() >= 1e-6) {
      check.expect(false, "noiseless recovery above 1e-6 m");
      return;
    }
  }

  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Skeleton3D skel = synth::build_skeleton(
        synth::sample_posture(777, seed), {0.0, 0.0, 0.95});
    skel.frame_id = "f";
    std::vector<std::vector<Pose2D>> detections(cams.size());
    for (std::size_t c = 0; c < cams.size(); ++c) {
      detections[c].push_back(synth::project_skeleton(
          skel, cams[c], 0.5, 999000 + 97 * seed + c));
    }
    const auto match = geom::match_across_views(detections, cams, 10.0, 0.3);
    if (match.groups.size() != 1) {
      check.expect(false, "matching failed");
      return;
    }
    const auto out = geom::triangulate_skeleton(match.groups[0], detections,
                                                cams, 8.0, 0.3);
    for (std::size_t j = 0; j < out.joints.size(); ++j) {
      if (!out.joints[j].valid) {
        check.expect(false, "invalid joint under 0.5 px noise");
        return;
      }
      worst = std::max(
          worst, (out.joints[j].position - skel.joints[j].position).norm());
    }
  }
  check.expect(worst < 0.02,
               "per-joint error " + std::to_string(worst) + " m >= 2 cm");
}

// ---- criterion 5: REBA correctness -------------------------------------------

void criterion_reba(Check& check) {
  check.expect(reba::tables_monotonic(), "tables not monotonic");

  const WorldConvention world;
  const auto neutral = synth::build_skeleton({}, {0.0, 0.0, 0.95});
  const auto nb = reba::reba_score(neutral, {}, world);
  check.expect(nb.reba == 1 && nb.category == reba::RiskCategory::Negligible,
               "neutral skeleton not REBA 1");

  synth::Posture deep;
  deep.trunk_flexion = 70.0;
  deep.neck_flexion = 25.0;
  deep.knee_flexion = 70.0;
  deep.upper_arm_left = 100.0;
  deep.upper_arm_right = 100.0;
  deep.elbow_left = 10.0;
  deep.elbow_right = 10.0;
  const auto db =
      reba::reba_score(synth::build_skeleton(deep, {0.0, 0.0, 0.95}), {}, world);
  check.expect(db.reba >= 8 && db.category == reba::RiskCategory::High,
               "deep bend scored " + std::to_string(db.reba));

  gap::Rng rng(505);
  int worst = 0;
  for (int i = 0; i < 100000; ++i) {
    synth::Posture p;
    p.trunk_flexion = rng.uniform(0.0, 115.0);
    p.trunk_side = rng.uniform(-25.0, 25.0);
    p.neck_flexion = rng.uniform(0.0, 60.0);
    p.knee_flexion = rng.uniform(0.0, 120.0);
    p.upper_arm_left = rng.uniform(0.0, 160.0);
    p.upper_arm_right = rng.uniform(0.0, 160.0);
    p.elbow_left = rng.uniform(0.0, 150.0);
    p.elbow_right = rng.uniform(0.0, 150.0);
    p.heading = rng.uniform(0.0, 360.0);
    const auto b =
        reba::reba_score(synth::build_skeleton(p, {0.0, 0.0, 0.95}), {}, world);
    worst = std::max(worst, b.reba);
  }
  check.expect(worst <= 10, "random skeleton reached REBA " +
                                std::to_string(worst));
}

// ---- criterion 6: end-to-end demo-synth --------------------------------------

void criterion_demo(Check& check) {
  const fs::path out = g_work / "acc_demo";
  fs::remove_all(out);
  check.expect(run_cli("demo-synth --seed 1 --frames 50 --noise-px 0.5 --out " +
                       out.string()) == 0,
               "demo-synth failed");
  const auto agreement = nlohmann::json::parse(slurp(out / "agreement.json"));
  const double reba_rate = agreement["reba_match_rate"].get<double>();
  const double cat_rate = agreement["category_match_rate"].get<double>();
  check.expect(reba_rate >= 0.95,
               "REBA match rate " + std::to_string(reba_rate));
  check.expect(cat_rate >= 0.98,
               "category match rate " + std::to_string(cat_rate));
}

// ---- criterion 7: GAP gradients ----------------------------------------------

void criterion_gradients(Check& check) {
  const auto scenes = gap::generate_dataset(4, 2, 31);
  std::vector<int> idx = {0, 1, 2, 3};
  const gap::Tensor images = gap::scenes_to_images(scenes, idx);
  const gap::Tensor keypoints = gap::scenes_to_keypoints(scenes, idx);

  gap::Rng r1(41);
  gap::ConvAutoencoder obfuscator(r1);
  gap::Rng r2(43);
  gap::ConvAutoencoder deobfuscator(r2);
  gap::Rng r3(47);
  gap::TaskNetwork task(gap::kSceneSize, gap::kSceneKeypoints, r3);

  {
    const auto build = [&](gap::Tape& tape) {
      const gap::Var x = tape.constant(images);
      return gap::deobf_loss(tape, x, deobfuscator.forward(tape, x));
    };
    const double err =
        gap::gradient_check(deobfuscator.parameters(), build, 200, 1e-6, 2);
    check.expect(err < 1e-4, "deobfuscator gradients at " + std::to_string(err));
  }
  {
    const auto build = [&](gap::Tape& tape) {
      const gap::Var x = tape.constant(images);
      return gap::pose_task_loss(tape, task.forward(tape, x),
                                 tape.constant(keypoints));
    };
    const double err =
        gap::gradient_check(task.parameters(), build, 200, 1e-6, 3);
    check.expect(err < 1e-4, "task gradients at " + std::to_string(err));
  }
  {
    deobfuscator.set_trainable(false);
    task.set_trainable(false);
    const auto build = [&](gap::Tape& tape) {
      const gap::Var x = tape.constant(images);
      const gap::Var gt = tape.constant(keypoints);
      return gap::obf_loss(tape, x, gt, obfuscator, deobfuscator, task, 1.0)
          .total;
    };
    const double err =
        gap::gradient_check(obfuscator.parameters(), build, 200, 1e-6, 4);
    check.expect(err < 1e-4, "obfuscator gradients at " + std::to_string(err));
  }
}

// ---- criterion 8: directional privacy ----------------------------------------

void criterion_gap_directional(Check& check) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto scenes = gap::generate_dataset(640, 16, 42 + seed);
    const std::span<const gap::SyntheticScene> all(scenes);
    const auto train = all.subspan(0, 512);
    const auto held = all.subspan(512);
    gap::GapConfig config;
    config.seed = seed;
    const auto task = gap::train_task_network(scenes, config);

    double recon[2] = {0.0, 0.0};
    double obf_rmse[2] = {0.0, 0.0};
    double clean = 0.0;
    for (int ai = 0; ai < 2; ++ai) {
      gap::GapConfig adv = config;
      adv.alpha = ai;
      adv.seed = seed * 31 + 7;
      const auto result = gap::train_adversarial(train, task.network, adv);
      const auto report = gap::evaluate_privacy_utility(result.obfuscator,
                                                        held, task.network,
                                                        adv);
      recon[ai] = report.adversary_recon_mse;
      obf_rmse[ai] = report.obf_task_rmse;
      clean = report.clean_task_rmse;
    }
    check.expect(recon[1] > recon[0],
                 "seed " + std::to_string(seed) + ": recon " +
                     std::to_string(recon[1]) + " !> " +
                     std::to_string(recon[0]));
    check.expect(obf_rmse[1] < 2.0 * clean,
                 "seed " + std::to_string(seed) + ": task rmse " +
                     std::to_string(obf_rmse[1]) + " >= 2x clean " +
                     std::to_string(clean));
  }
}

// ---- criterion 9: classic-filter tradeoff shape ------------------------------

void criterion_filter_shape(Check& check) {
  std::vector<ImageBuffer> corpus;
  for (std::uint64_t s = 0; s < 4; ++s) corpus.push_back(texture(64, 56, 600 + s));

  double last_psnr = std::numeric_limits<double>::infinity();
  for (double sigma : {10.0, 25.0, 50.0, 75.0, 100.0}) {
    double sum = 0.0;
    for (const auto& img : corpus) {
      sum += metrics::psnr(img, filters::additive_noise(img, sigma, 13));
    }
    const double mean = sum / corpus.size();
    check.expect(mean < last_psnr, "PSNR not strictly decreasing at sigma " +
                                       std::to_string(sigma));
    last_psnr = mean;
  }

  double last_ssim = 1.0 + 1e-12;
  for (double sigma : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    double sum = 0.0;
    for (const auto& img : corpus) {
      sum += metrics::ssim(img, filters::gaussian_blur(img, sigma));
    }
    const double mean = sum / corpus.size();
    check.expect(mean <= last_ssim, "blur SSIM increased at sigma " +
                                        std::to_string(sigma));
    last_ssim = mean;
  }

  last_ssim = 1.0 + 1e-12;
  for (int block : {2, 4, 8, 16, 32}) {
    double sum = 0.0;
    for (const auto& img : corpus) {
      sum += metrics::ssim(img, filters::pixelate(img, block));
    }
    const double mean = sum / corpus.size();
    check.expect(mean <= last_ssim, "pixelate SSIM increased at block " +
                                        std::to_string(block));
    last_ssim = mean;
  }
}

// ---- criterion 10: determinism ------------------------------------------------

void criterion_determinism(Check& check) {
  const fs::path corpus = g_work / "det_corpus";
  fs::create_directories(corpus);
  for (int i = 0; i < 2; ++i) {
    io::write_image(corpus / ("img" + std::to_string(i) + ".png"),
                    texture(48, 40, 700 + i));
  }

  const auto same_dir_run = [&](const std::string& args_template,
                                const std::string& what) {
    const fs::path a = g_work / (what + "_a");
    const fs::path b = g_work / (what + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    std::string cmd_a = args_template;
    std::string cmd_b = args_template;
    const std::string token = "{OUT}";
    cmd_a.replace(cmd_a.find(token), token.size(), a.string());
    cmd_b.replace(cmd_b.find(token), token.size(), b.string());
    if (run_cli(cmd_a) != 0 || run_cli(cmd_b) != 0) {
      check.expect(false, what + " failed to run");
      return;
    }
    auto snap_a = snapshot(a);
    auto snap_b = snapshot(b);
    snap_a.erase("manifest.csv");  // embeds the output path itself
    snap_b.erase("manifest.csv");
    check.expect(snap_a == snap_b, what + " outputs differ");
  };
  const auto same_file_run = [&](const std::string& args_template,
                                 const std::string& what) {
    const fs::path a = g_work / (what + "_a.out");
    const fs::path b = g_work / (what + "_b.out");
    std::string cmd_a = args_template;
    std::string cmd_b = args_template;
    const std::string token = "{OUT}";
    cmd_a.replace(cmd_a.find(token), token.size(), a.string());
    cmd_b.replace(cmd_b.find(token), token.size(), b.string());
    if (run_cli(cmd_a) != 0 || run_cli(cmd_b) != 0) {
      check.expect(false, what + " failed to run");
      return;
    }
    check.expect(slurp(a) == slurp(b), what + " outputs differ");
  };

  same_dir_run("demo-synth --seed 9 --frames 10 --noise-px 0.5 --out {OUT}",
               "demo");
  const fs::path demo = g_work / "demo_a";
  same_dir_run("obfuscate --method noise --intensity 25 --seed 4 --in " +
                   corpus.string() + " --out {OUT}",
               "obf");
  same_file_run("privacy-eval --orig " + corpus.string() + " --obf " +
                    (g_work / "obf_a").string() + " --out {OUT}",
                "priv");
  same_file_run("kp-eval --pred " + (demo / "keypoints.json").string() +
                    " --gt " + (demo / "keypoints.json").string() +
                    " --out {OUT}",
                "kp");
  same_file_run("triangulate --keypoints " +
                    (demo / "keypoints.json").string() + " --calib " +
                    (demo / "calib.json").string() +
                    " --tau-epi 10 --tau-reproj 8 --out {OUT}",
                "tri");
  same_file_run("reba --skeletons " +
                    (demo / "skeletons_triangulated.json").string() +
                    " --compare " + (demo / "skeletons_truth.json").string() +
                    " --out {OUT}",
                "reba");
  {
    std::ofstream config(g_work / "det_tradeoff.json");
    config << R"({"schema_version":"1.0","images":")"
           << corpus.generic_string()
           << R"(","seed":3,"grids":{"blur":[2],"noise":[25],"pixelate":[4]}})";
  }
  same_file_run("tradeoff --config " + (g_work / "det_tradeoff.json").string() +
                    " --out {OUT}",
                "trade");
  {
    std::ofstream config(g_work / "det_gap.json");
    config << R"({"schema_version":"1.0","seed":3,"alpha":1.0,"epochs":12,)"
           << R"("n_scenes":160,"n_identities":8})";
  }
  same_dir_run("gap-train --config " + (g_work / "det_gap.json").string() +
                   " --out {OUT}",
               "gap");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-ergopipe-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  g_work = fs::temp_directory_path() / "ergopipe_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  run_criterion(1, "OKS exactness", 1.0, criterion_oks);
  run_criterion(2, "AP matches the brute-force oracle", 10.0, criterion_ap);
  run_criterion(3, "PSNR/SSIM analytic and reference cases", 30.0,
                criterion_image_metrics);
  run_criterion(4, "geometry round trip and noise bound", 30.0,
                criterion_geometry);
  run_criterion(5, "REBA tables, anchors and score ceiling", 60.0,
                criterion_reba);
  run_criterion(6, "end-to-end synthetic pipeline agreement", 120.0,
                criterion_demo);
  run_criterion(7, "GAP gradient checks", 120.0, criterion_gradients);
  run_criterion(8, "directional privacy at preserved utility", 1200.0,
                criterion_gap_directional);
  run_criterion(9, "classic-filter tradeoff shape", 60.0,
                criterion_filter_shape);
  run_criterion(10, "byte-identical reruns of every subcommand", 300.0,
                criterion_determinism);

  fs::remove_all(g_work);
  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
