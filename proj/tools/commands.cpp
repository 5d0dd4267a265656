#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "ergopipe/csv.hpp"
#include "ergopipe/error.hpp"
#include "ergopipe/filters.hpp"
#include "ergopipe/gap/train.hpp"
#include "ergopipe/geometry.hpp"
#include "ergopipe/image_metrics.hpp"
#include "ergopipe/io/formats.hpp"
#include "ergopipe/io/image_io.hpp"
#include "ergopipe/io/report.hpp"
#include "ergopipe/keypoint_metrics.hpp"
#include "ergopipe/log.hpp"
#include "ergopipe/reba.hpp"
#include "ergopipe/synth_human.hpp"
#include "ergopipe/validate.hpp"

namespace ergopipe::cli {

namespace fs = std::filesystem;
using csv::format_double;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  }
}

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  }
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (config.contains("schema_version")) {
    io::check_schema_version(config["schema_version"].get<std::string>(),
                             path.string());
  }
  return config;
}

}  // namespace

// ---- obfuscate --------------------------------------------------------------

int run_obfuscate(const ObfuscateArgs& args) {
  filters::FilterSpec spec;
  spec.method = filters::method_from_name(args.method);
  spec.intensity = args.intensity;
  spec.seed = args.seed;
  if (spec.intensity < 0.0) {
    throw Error(ErrorCode::ParseError, "intensity must be non-negative");
  }

  const auto corpus = io::read_image_dir(args.in_dir);
  ensure_dir(args.out_dir);
  const auto entries = filters::sweep(corpus, {spec});

  std::ofstream manifest(fs::path(args.out_dir) / "manifest.csv");
  manifest << "image_id,method,intensity,seed,output_path\n";
  for (const auto& entry : entries) {
    const fs::path out_path =
        fs::path(args.out_dir) / (entry.image_id + ".png");
    io::write_image(out_path, entry.output);
    manifest << entry.image_id << ',' << filters::method_name(entry.spec.method)
             << ',' << format_double(entry.spec.intensity) << ','
             << entry.spec.seed << ',' << out_path.generic_string() << '\n';
  }
  log::info("obfuscate: wrote " + std::to_string(entries.size()) +
            " images to " + args.out_dir);
  return 0;
}

// ---- privacy-eval ------------------------------------------------------------

int run_privacy_eval(const PrivacyEvalArgs& args) {
  const auto orig = io::read_image_dir(args.orig_dir);
  const auto obf = io::read_image_dir(args.obf_dir);
  std::map<std::string, const ImageBuffer*> obf_by_id;
  for (const auto& [id, img] : obf) obf_by_id[id] = &img;

  std::ofstream out(args.out_csv);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + args.out_csv);
  }
  out << "image_id,ssim,psnr\n";
  double ssim_sum = 0.0, psnr_sum = 0.0;
  int n = 0;
  for (const auto& [id, img] : orig) {
    const auto it = obf_by_id.find(id);
    if (it == obf_by_id.end()) {
      log::warn("privacy-eval: no obfuscated image for '" + id + "'");
      continue;
    }
    const double s = metrics::ssim(img, *it->second);
    const double p = metrics::psnr(img, *it->second);
    out << id << ',' << format_double(s) << ',' << format_double(p) << '\n';
    ssim_sum += s;
    psnr_sum += p;
    ++n;
  }
  out << "# summary\n";
  out << "n_pairs," << n << '\n';
  out << "mean_ssim," << format_double(n > 0 ? ssim_sum / n : 0.0) << '\n';
  out << "mean_psnr," << format_double(n > 0 ? psnr_sum / n : 0.0) << '\n';
  return 0;
}

// ---- kp-eval -----------------------------------------------------------------

namespace {

std::vector<GroundTruthPose> detections_to_ground_truth(
    const std::vector<io::Detection>& detections, double c_min) {
  std::vector<GroundTruthPose> gts;
  gts.reserve(detections.size());
  for (const auto& det : detections) {
    if (det.segment_area) {
      gts.push_back(det.to_ground_truth());
    } else {
      gts.push_back(metrics::pose_to_ground_truth(det.pose, c_min));
    }
  }
  return gts;
}

}  // namespace

int run_kp_eval(const KpEvalArgs& args) {
  const auto pred_file = io::read_keypoints_file(args.pred_file);
  const auto gt_file = io::read_keypoints_file(args.gt_file);

  // Group by (frame, camera): matching runs per view, the curve pools all.
  std::map<std::pair<std::string, std::string>, metrics::FrameDetections>
      units;
  for (const auto& frame : gt_file.frames) {
    for (const auto& cam : frame.cameras) {
      units[{frame.frame_id, cam.camera_id}].gts =
          detections_to_ground_truth(cam.detections, args.c_min);
    }
  }
  for (const auto& frame : pred_file.frames) {
    for (const auto& cam : frame.cameras) {
      auto& unit = units[{frame.frame_id, cam.camera_id}];
      for (const auto& det : cam.detections) {
        unit.preds.push_back(det.pose);
      }
    }
  }
  std::vector<metrics::FrameDetections> frames;
  frames.reserve(units.size());
  for (auto& [_, unit] : units) frames.push_back(std::move(unit));

  const auto consts = metrics::OksConstants::coco17();
  const auto result =
      metrics::evaluate_corpus(frames, consts, args.oks_threshold);

  json out;
  out["schema_version"] = io::kSchemaVersion;
  out["ap"] = result.ap;
  out["threshold"] = result.threshold;
  out["n_gt"] = result.n_gt;
  out["n_pred"] = result.n_pred;
  json curve = json::array();
  for (const auto& [recall, precision] : result.pr_curve) {
    curve.push_back(json::array({recall, precision}));
  }
  out["pr_curve"] = std::move(curve);
  std::ofstream file(args.out_json);
  if (!file) {
    throw Error(ErrorCode::IoFailure, "cannot write " + args.out_json);
  }
  file << out.dump(2) << "\n";
  return 0;
}

// ---- triangulate -------------------------------------------------------------

namespace {

io::SkeletonFile triangulate_keypoint_file(const io::KeypointsFile& keypoints,
                                           const io::CalibrationFile& calib,
                                           double tau_epi, double tau_reproj,
                                           double c_min) {
  for (const auto& cam : calib.cameras) validate_camera(cam);
  std::map<std::string, int> cam_index;
  for (std::size_t i = 0; i < calib.cameras.size(); ++i) {
    cam_index[calib.cameras[i].camera_id] = static_cast<int>(i);
  }

  io::SkeletonFile out;
  long long total_detections = 0;
  long long total_unmatched = 0;
  for (const auto& frame : keypoints.frames) {
    std::vector<std::vector<Pose2D>> per_camera(calib.cameras.size());
    for (const auto& cam : frame.cameras) {
      const auto it = cam_index.find(cam.camera_id);
      if (it == cam_index.end()) {
        throw Error(ErrorCode::ParseError,
                    "keypoints reference unknown camera '" + cam.camera_id +
                        "' in frame " + frame.frame_id);
      }
      for (const auto& det : cam.detections) {
        per_camera[it->second].push_back(det.pose);
      }
    }
    const auto match =
        geom::match_across_views(per_camera, calib.cameras, tau_epi, c_min);
    total_detections += match.n_detections;
    total_unmatched += match.n_unmatched;

    io::SkeletonFrame out_frame;
    out_frame.frame_id = frame.frame_id;
    int person = 0;
    for (const auto& group : match.groups) {
      if (group.size() < 2) continue;
      Skeleton3D skel = geom::triangulate_skeleton(
          group, per_camera, calib.cameras, tau_reproj, c_min);
      skel.frame_id = frame.frame_id;
      skel.person_id = "p" + std::to_string(person++);
      out_frame.people.push_back(std::move(skel));
    }
    out.frames.push_back(std::move(out_frame));
  }
  out.unmatched_fraction =
      total_detections > 0
          ? static_cast<double>(total_unmatched) / total_detections
          : 0.0;
  return out;
}

}  // namespace

int run_triangulate(const TriangulateArgs& args) {
  const auto keypoints = io::read_keypoints_file(args.keypoints_file);
  const auto calib = io::read_calibration_file(args.calib_file);
  const auto skeletons = triangulate_keypoint_file(
      keypoints, calib, args.tau_epi, args.tau_reproj, args.c_min);
  io::write_skeleton_file(args.out_file, skeletons);
  log::info("triangulate: unmatched fraction " +
            format_double(skeletons.unmatched_fraction.value_or(0.0)));
  return 0;
}

// ---- reba --------------------------------------------------------------------

namespace {

std::vector<reba::RebaBreakdown> score_skeleton_file(
    const io::SkeletonFile& file, const reba::RebaParams& params,
    const WorldConvention& world, int* n_skipped) {
  std::vector<reba::RebaBreakdown> breakdowns;
  for (const auto& frame : file.frames) {
    for (const auto& skel : frame.people) {
      try {
        breakdowns.push_back(reba::reba_score(skel, params, world));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingCoreJoints &&
            e.code() != ErrorCode::NonFiniteAngle) {
          throw;
        }
        log::warn("reba: skipping " + frame.frame_id + "/" + skel.person_id +
                  " (" + e.what() + ")");
        if (n_skipped) ++(*n_skipped);
      }
    }
  }
  return breakdowns;
}

}  // namespace

int run_reba(const RebaArgs& args) {
  const auto file = io::read_skeleton_file(args.skeletons_file);
  reba::RebaParams params;
  params.force_load = args.force_load;
  params.coupling = args.coupling;
  params.activity = args.activity;
  params.wrist_default = args.wrist;
  const WorldConvention world;  // skeletons are stored in world units

  int skipped = 0;
  const auto breakdowns = score_skeleton_file(file, params, world, &skipped);
  io::write_reba_report(breakdowns, args.out_csv, file.unmatched_fraction,
                        skipped);

  if (!args.compare_file.empty()) {
    const auto other = io::read_skeleton_file(args.compare_file);
    int other_skipped = 0;
    const auto other_breakdowns =
        score_skeleton_file(other, params, world, &other_skipped);
    const auto report = reba::compare_breakdowns(breakdowns, other_breakdowns);
    io::append_comparison_block(report, args.out_csv);
  }
  return 0;
}

// ---- tradeoff ------------------------------------------------------------

int run_tradeoff(const TradeoffArgs& args) {
  const json config = load_config(args.config_file);
  if (!config.contains("images")) {
    throw Error(ErrorCode::ParseError,
                args.config_file + ": missing 'images' directory");
  }
  const auto corpus = io::read_image_dir(config["images"].get<std::string>());
  if (corpus.empty()) {
    throw Error(ErrorCode::MissingFile, "image corpus is empty");
  }
  const std::uint64_t seed = config.value("seed", 1ULL);
  const double oks_threshold = config.value("oks_threshold", 0.5);
  const double c_min = config.value("c_min", 0.3);

  std::vector<filters::FilterSpec> specs;
  if (config.contains("grids")) {
    const auto& grids = config["grids"];
    for (const auto& [name, values] : grids.items()) {
      const auto method = filters::method_from_name(name);
      for (const auto& v : values) {
        specs.push_back({method, v.get<double>(), seed});
      }
    }
  } else {
    specs = filters::default_sweep_specs(seed);
  }

  // Optional utility inputs: ground truth plus per-variant predictions
  // produced by an upstream detector.
  std::optional<io::KeypointsFile> gt_file;
  if (config.contains("gt_keypoints")) {
    gt_file = io::read_keypoints_file(config["gt_keypoints"].get<std::string>());
  }
  std::map<std::pair<std::string, double>, std::string> pred_files;
  if (config.contains("predictions")) {
    for (const auto& entry : config["predictions"]) {
      pred_files[{entry["method"].get<std::string>(),
                  entry["intensity"].get<double>()}] =
          entry["keypoints"].get<std::string>();
    }
  }

  const auto ap_for = [&](const filters::FilterSpec& spec) {
    const auto it = pred_files.find(
        {filters::method_name(spec.method), spec.intensity});
    if (it == pred_files.end() || !gt_file) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    KpEvalArgs eval;
    eval.pred_file = it->second;
    eval.oks_threshold = oks_threshold;
    eval.c_min = c_min;
    // Reuse the kp-eval pipeline in memory.
    const auto preds = io::read_keypoints_file(it->second);
    std::map<std::pair<std::string, std::string>, metrics::FrameDetections>
        units;
    for (const auto& frame : gt_file->frames) {
      for (const auto& cam : frame.cameras) {
        units[{frame.frame_id, cam.camera_id}].gts =
            detections_to_ground_truth(cam.detections, c_min);
      }
    }
    for (const auto& frame : preds.frames) {
      for (const auto& cam : frame.cameras) {
        auto& unit = units[{frame.frame_id, cam.camera_id}];
        for (const auto& det : cam.detections) unit.preds.push_back(det.pose);
      }
    }
    std::vector<metrics::FrameDetections> frames;
    for (auto& [_, unit] : units) frames.push_back(std::move(unit));
    return metrics::evaluate_corpus(frames, metrics::OksConstants::coco17(),
                                    oks_threshold)
        .ap;
  };

  std::sort(specs.begin(), specs.end(),
            [](const filters::FilterSpec& a, const filters::FilterSpec& b) {
              if (a.method != b.method) return a.method < b.method;
              return a.intensity < b.intensity;
            });

  std::ofstream out(args.out_csv);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + args.out_csv);
  }
  out << "method,intensity,ssim,psnr,ap,n_images\n";
  for (const auto& spec : specs) {
    double ssim_sum = 0.0, psnr_sum = 0.0;
    for (const auto& [id, img] : corpus) {
      const ImageBuffer variant = filters::apply(img, spec);
      ssim_sum += metrics::ssim(img, variant);
      psnr_sum += metrics::psnr(img, variant);
    }
    const int n = static_cast<int>(corpus.size());
    out << filters::method_name(spec.method) << ','
        << format_double(spec.intensity) << ',' << format_double(ssim_sum / n)
        << ',' << format_double(psnr_sum / n) << ','
        << format_double(ap_for(spec)) << ',' << n << '\n';
  }
  return 0;
}

// ---- gap-train -----------------------------------------------------------

int run_gap_train(const GapTrainArgs& args) {
  const json config = load_config(args.config_file);
  gap::GapConfig gc;
  gc.alpha = config.value("alpha", 1.0);
  gc.lr = config.value("lr", 1e-3);
  gc.lr_decay = config.value("lr_decay", 0.1);
  gc.lr_decay_every = config.value("lr_decay_every", 10);
  gc.epochs = config.value("epochs", 20);
  gc.batch = config.value("batch", 8);
  gc.seed = config.value("seed", 1ULL);
  if (config.contains("adamw")) {
    const auto& a = config["adamw"];
    gc.adamw.beta1 = a.value("beta1", 0.9);
    gc.adamw.beta2 = a.value("beta2", 0.999);
    gc.adamw.eps = a.value("eps", 1e-8);
    gc.adamw.weight_decay = a.value("weight_decay", 1e-2);
  }
  const int n_scenes = config.value("n_scenes", 640);
  const int n_identities = config.value("n_identities", 16);
  const double train_fraction = config.value("train_fraction", 0.8);
  const std::uint64_t data_seed = config.value("data_seed", gc.seed + 1000);

  ensure_dir(args.out_dir);
  const fs::path out_dir(args.out_dir);

  const auto scenes = gap::generate_dataset(n_scenes, n_identities, data_seed);
  const int n_train = std::max(
      1, static_cast<int>(scenes.size() * std::clamp(train_fraction, 0.1, 0.95)));
  const std::span<const gap::SyntheticScene> all(scenes);
  const auto train_split = all.subspan(0, n_train);
  const auto held_out = all.subspan(n_train);

  log::info("gap-train: task network on " + std::to_string(scenes.size()) +
            " scenes");
  auto task = gap::train_task_network(scenes, gc);

  log::info("gap-train: adversarial phase, alpha " + format_double(gc.alpha));
  auto result = gap::train_adversarial(train_split, task.network, gc);

  // Training log.
  {
    std::ofstream log_csv(out_dir / "training_log.csv");
    log_csv << "epoch,lr,L_obf,L_pose_term,L_deobf_term\n";
    for (const auto& entry : result.log) {
      log_csv << entry.epoch << ',' << format_double(entry.lr) << ','
              << format_double(entry.l_obf) << ','
              << format_double(entry.l_pose_term) << ','
              << format_double(entry.l_deobf_term) << '\n';
    }
  }

  // Checkpoints.
  {
    std::vector<std::pair<std::string, const gap::Parameter*>> tensors;
    for (auto& [name, param] : gap::named_parameters(result.obfuscator)) {
      tensors.emplace_back(name, param);
    }
    gap::save_checkpoint(out_dir / "obfuscator.bin", tensors);
    tensors.clear();
    for (auto& [name, param] : gap::named_parameters(task.network)) {
      tensors.emplace_back(name, param);
    }
    gap::save_checkpoint(out_dir / "task_network.bin", tensors);
  }

  const auto report = gap::evaluate_privacy_utility(
      result.obfuscator, held_out.empty() ? train_split : held_out,
      task.network, gc);

  {
    json jr;
    jr["schema_version"] = io::kSchemaVersion;
    jr["alpha"] = gc.alpha;
    jr["clean_task_rmse"] = report.clean_task_rmse;
    jr["obf_task_rmse"] = report.obf_task_rmse;
    jr["adversary_recon_mse"] = report.adversary_recon_mse;
    jr["adversary_recon_psnr"] =
        std::isfinite(report.adversary_recon_psnr)
            ? json(report.adversary_recon_psnr)
            : json("inf");
    jr["mean_ssim"] = report.mean_ssim;
    jr["n_train"] = n_train;
    jr["n_eval"] = static_cast<int>(held_out.size());
    std::ofstream jf(out_dir / "report.json");
    jf << jr.dump(2) << "\n";
  }

  // A few original/obfuscated pairs for visual inspection.
  {
    ensure_dir(out_dir / "samples");
    const int n_samples =
        std::min<int>(4, static_cast<int>(held_out.size()));
    std::vector<int> idx(n_samples);
    std::iota(idx.begin(), idx.end(), 0);
    if (n_samples > 0) {
      const gap::Tensor images = gap::scenes_to_images(held_out, idx);
      gap::Tape tape;
      const auto out_var =
          result.obfuscator.forward(tape, tape.constant(images));
      const gap::Tensor& obf_out = tape.value(out_var);
      for (int i = 0; i < n_samples; ++i) {
        io::write_image(out_dir / "samples" /
                            ("orig_" + std::to_string(i) + ".png"),
                        held_out[i].image);
        ImageBuffer img = ImageBuffer::make(gap::kSceneSize, gap::kSceneSize, 1);
        const std::int64_t plane =
            static_cast<std::int64_t>(gap::kSceneSize) * gap::kSceneSize;
        for (std::int64_t p = 0; p < plane; ++p) {
          img.data[p] = static_cast<std::uint8_t>(std::clamp(
              std::round(obf_out.v[i * plane + p] * 255.0), 0.0, 255.0));
        }
        io::write_image(out_dir / "samples" /
                            ("obf_" + std::to_string(i) + ".png"),
                        img);
      }
    }
  }
  return 0;
}

// ---- demo-synth ------------------------------------------------------------

namespace {

std::string frame_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "f%04d", i);
  return buf;
}

// Align triangulated people to truth people by total joint distance.
std::vector<int> align_people(const std::vector<Skeleton3D>& truth,
                              const std::vector<Skeleton3D>& estimated) {
  std::vector<int> assignment(estimated.size(), -1);
  std::vector<bool> taken(truth.size(), false);
  for (std::size_t e = 0; e < estimated.size(); ++e) {
    double best = std::numeric_limits<double>::infinity();
    int best_t = -1;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (taken[t]) continue;
      double total = 0.0;
      int n = 0;
      for (std::size_t j = 0;
           j < std::min(truth[t].joints.size(), estimated[e].joints.size());
           ++j) {
        if (truth[t].joints[j].valid && estimated[e].joints[j].valid) {
          total += (truth[t].joints[j].position -
                    estimated[e].joints[j].position)
                       .norm();
          ++n;
        }
      }
      const double mean = n > 0 ? total / n
                                : std::numeric_limits<double>::infinity();
      if (mean < best) {
        best = mean;
        best_t = static_cast<int>(t);
      }
    }
    if (best_t >= 0) {
      assignment[e] = best_t;
      taken[best_t] = true;
    }
  }
  return assignment;
}

}  // namespace

int run_demo_synth(const DemoSynthArgs& args) {
  ensure_dir(args.out_dir);
  const fs::path out_dir(args.out_dir);

  auto cams = synth::camera_ring(4, 3.0, 1.6, {0.0, 0.0, 1.0}, 1500.0, 2448,
                                 2048);
  // One camera with mild lens distortion so the undistortion path runs
  // end to end.
  cams[1].dist << -0.05, 0.01, 0.0, 0.0, 0.0;

  io::CalibrationFile calib;
  calib.world = WorldConvention{};
  calib.cameras = cams;
  io::write_calibration_file(out_dir / "calib.json", calib);

  io::KeypointsFile keypoints;
  io::SkeletonFile truth;
  for (int f = 0; f < args.frames; ++f) {
    io::KeypointFrame kframe;
    kframe.frame_id = frame_name(f);
    io::SkeletonFrame tframe;
    tframe.frame_id = kframe.frame_id;

    std::vector<Skeleton3D> people;
    for (int p = 0; p < args.people; ++p) {
      const auto posture = synth::sample_posture(
          args.seed + 7919ULL * p, static_cast<std::uint64_t>(f));
      gap::Rng pos_rng =
          gap::rng_for(args.seed + 104729ULL * p, 500000ULL + f);
      const Eigen::Vector3d pelvis(
          (p == 0 ? -0.5 : 0.5) * (args.people > 1 ? 1.0 : 0.0) +
              pos_rng.uniform(-0.2, 0.2),
          pos_rng.uniform(-0.2, 0.2), 0.95 + pos_rng.uniform(-0.03, 0.03));
      Skeleton3D skel = synth::build_skeleton(posture, pelvis);
      skel.frame_id = kframe.frame_id;
      skel.person_id = "p" + std::to_string(p);
      people.push_back(std::move(skel));
    }
    tframe.people = people;
    truth.frames.push_back(std::move(tframe));

    for (std::size_t c = 0; c < cams.size(); ++c) {
      io::CameraDetections cam_dets;
      cam_dets.camera_id = cams[c].camera_id;
      for (std::size_t p = 0; p < people.size(); ++p) {
        const std::uint64_t noise_seed =
            args.seed ^ (1000003ULL * f + 101ULL * c + p);
        io::Detection det;
        det.pose =
            synth::project_skeleton(people[p], cams[c], args.noise_px,
                                    noise_seed);
        cam_dets.detections.push_back(std::move(det));
      }
      kframe.cameras.push_back(std::move(cam_dets));
    }
    keypoints.frames.push_back(std::move(kframe));
  }
  io::write_keypoints_file(out_dir / "keypoints.json", keypoints);
  io::write_skeleton_file(out_dir / "skeletons_truth.json", truth);

  const auto estimated =
      triangulate_keypoint_file(keypoints, calib, 10.0, 8.0, 0.3);
  io::write_skeleton_file(out_dir / "skeletons_triangulated.json", estimated);

  // Score both sides and align people per frame.
  const reba::RebaParams params;
  const WorldConvention world;
  std::vector<reba::RebaBreakdown> truth_scores;
  std::vector<reba::RebaBreakdown> est_scores;
  int frames_scored = 0, reba_match = 0, category_match = 0, missing = 0;
  for (std::size_t f = 0; f < truth.frames.size(); ++f) {
    const auto& t_people = truth.frames[f].people;
    const auto& e_people = estimated.frames[f].people;
    const auto assignment = align_people(t_people, e_people);
    std::vector<bool> truth_covered(t_people.size(), false);
    for (std::size_t e = 0; e < e_people.size(); ++e) {
      if (assignment[e] < 0) continue;
      truth_covered[assignment[e]] = true;
      const auto& t_skel = t_people[assignment[e]];
      try {
        auto t_score = reba::reba_score(t_skel, params, world);
        Skeleton3D aligned = e_people[e];
        aligned.person_id = t_skel.person_id;
        auto e_score = reba::reba_score(aligned, params, world);
        ++frames_scored;
        if (t_score.reba == e_score.reba) ++reba_match;
        if (t_score.category == e_score.category) ++category_match;
        truth_scores.push_back(std::move(t_score));
        est_scores.push_back(std::move(e_score));
      } catch (const Error&) {
        ++missing;
      }
    }
    for (bool covered : truth_covered) {
      if (!covered) ++missing;
    }
  }
  io::write_reba_report(truth_scores, out_dir / "reba_truth.csv",
                        std::nullopt, 0);
  io::write_reba_report(est_scores, out_dir / "reba_triangulated.csv",
                        estimated.unmatched_fraction, missing);

  json agreement;
  agreement["schema_version"] = io::kSchemaVersion;
  agreement["frames"] = args.frames;
  agreement["people"] = args.people;
  agreement["n_scored"] = frames_scored;
  agreement["n_missing"] = missing;
  agreement["reba_match_rate"] =
      frames_scored > 0 ? static_cast<double>(reba_match) / frames_scored : 0.0;
  agreement["category_match_rate"] =
      frames_scored > 0 ? static_cast<double>(category_match) / frames_scored
                        : 0.0;
  agreement["unmatched_fraction"] = estimated.unmatched_fraction.value_or(0.0);
  std::ofstream af(out_dir / "agreement.json");
  af << agreement.dump(2) << "\n";

  log::info("demo-synth: reba match rate " +
            format_double(agreement["reba_match_rate"].get<double>()));
  return 0;
}

}  // namespace ergopipe::cli
