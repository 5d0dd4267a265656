#include <cstdio>
#include <exception>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "ergopipe/error.hpp"

namespace {

void print_error_record(const char* code, const std::string& message) {
  nlohmann::json record;
  record["error"] = code;
  record["message"] = message;
  std::fprintf(stderr, "%s\n", record.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Privacy-aware ergonomic assessment pipeline: obfuscation filters, "
      "multi-view triangulation, REBA scoring and privacy/utility metrics"};
  app.require_subcommand(1);

  ergopipe::cli::ObfuscateArgs obfuscate;
  auto* cmd = app.add_subcommand("obfuscate",
                                 "Apply a classic obfuscation filter to a "
                                 "directory of images");
  cmd->add_option("--method", obfuscate.method, "blur|noise|pixelate")
      ->required();
  cmd->add_option("--intensity", obfuscate.intensity,
                  "sigma (blur/noise) or block size (pixelate)")
      ->required();
  cmd->add_option("--seed", obfuscate.seed, "noise seed");
  cmd->add_option("--in", obfuscate.in_dir, "input image directory")
      ->required();
  cmd->add_option("--out", obfuscate.out_dir, "output directory")->required();
  cmd->callback([&]() { ergopipe::cli::run_obfuscate(obfuscate); });

  ergopipe::cli::PrivacyEvalArgs privacy;
  cmd = app.add_subcommand("privacy-eval",
                           "SSIM/PSNR between original and obfuscated images");
  cmd->add_option("--orig", privacy.orig_dir, "original image directory")
      ->required();
  cmd->add_option("--obf", privacy.obf_dir, "obfuscated image directory")
      ->required();
  cmd->add_option("--out", privacy.out_csv, "output CSV")->required();
  cmd->callback([&]() { ergopipe::cli::run_privacy_eval(privacy); });

  ergopipe::cli::KpEvalArgs kp_eval;
  cmd = app.add_subcommand("kp-eval",
                           "OKS average precision of predicted keypoints");
  cmd->add_option("--pred", kp_eval.pred_file, "predicted keypoints JSON")
      ->required();
  cmd->add_option("--gt", kp_eval.gt_file, "ground truth keypoints JSON")
      ->required();
  cmd->add_option("--oks-threshold", kp_eval.oks_threshold, "OKS threshold");
  cmd->add_option("--c-min", kp_eval.c_min, "confidence floor");
  cmd->add_option("--out", kp_eval.out_json, "output JSON")->required();
  cmd->callback([&]() { ergopipe::cli::run_kp_eval(kp_eval); });

  ergopipe::cli::TriangulateArgs triangulate;
  cmd = app.add_subcommand("triangulate",
                           "Match detections across views and triangulate "
                           "3D skeletons");
  cmd->add_option("--keypoints", triangulate.keypoints_file,
                  "keypoints JSON")
      ->required();
  cmd->add_option("--calib", triangulate.calib_file, "calibration JSON")
      ->required();
  cmd->add_option("--tau-epi", triangulate.tau_epi,
                  "epipolar match threshold, px");
  cmd->add_option("--tau-reproj", triangulate.tau_reproj,
                  "joint validity threshold, px");
  cmd->add_option("--c-min", triangulate.c_min, "confidence floor");
  cmd->add_option("--out", triangulate.out_file, "output skeleton JSON")
      ->required();
  cmd->callback([&]() { ergopipe::cli::run_triangulate(triangulate); });

  ergopipe::cli::RebaArgs reba;
  cmd = app.add_subcommand("reba", "REBA scores for a skeleton file");
  cmd->add_option("--skeletons", reba.skeletons_file, "skeleton JSON")
      ->required();
  cmd->add_option("--out", reba.out_csv, "output CSV")->required();
  cmd->add_option("--compare", reba.compare_file,
                  "second skeleton JSON to diff against");
  cmd->add_option("--force-load", reba.force_load, "force/load adjustment");
  cmd->add_option("--coupling", reba.coupling, "coupling adjustment");
  cmd->add_option("--activity", reba.activity, "activity adjustment");
  cmd->add_option("--wrist", reba.wrist, "wrist score (1..3)");
  cmd->callback([&]() { ergopipe::cli::run_reba(reba); });

  ergopipe::cli::TradeoffArgs tradeoff;
  cmd = app.add_subcommand("tradeoff",
                           "Privacy/utility sweep over filter grids");
  cmd->add_option("--config", tradeoff.config_file, "run config JSON")
      ->required();
  cmd->add_option("--out", tradeoff.out_csv, "output CSV")->required();
  cmd->callback([&]() { ergopipe::cli::run_tradeoff(tradeoff); });

  ergopipe::cli::GapTrainArgs gap_train;
  cmd = app.add_subcommand("gap-train",
                           "Train the adversarial obfuscator on synthetic "
                           "scenes");
  cmd->add_option("--config", gap_train.config_file, "run config JSON")
      ->required();
  cmd->add_option("--out", gap_train.out_dir, "output directory")->required();
  cmd->callback([&]() { ergopipe::cli::run_gap_train(gap_train); });

  ergopipe::cli::DemoSynthArgs demo;
  cmd = app.add_subcommand("demo-synth",
                           "End-to-end synthetic rig: project, triangulate "
                           "and score against ground truth");
  cmd->add_option("--seed", demo.seed, "rig seed");
  cmd->add_option("--frames", demo.frames, "number of frames");
  cmd->add_option("--noise-px", demo.noise_px, "observation noise, px");
  cmd->add_option("--people", demo.people, "people per frame");
  cmd->add_option("--out", demo.out_dir, "output directory")->required();
  cmd->callback([&]() { ergopipe::cli::run_demo_synth(demo); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const ergopipe::Error& e) {
    print_error_record(ergopipe::error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error_record("InternalError", e.what());
    return 1;
  }
  return 0;
}
