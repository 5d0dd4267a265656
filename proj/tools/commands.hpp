#pragma once

#include <cstdint>
#include <string>

namespace ergopipe::cli {

struct ObfuscateArgs {
  std::string method;
  double intensity = 0.0;
  std::uint64_t seed = 0;
  std::string in_dir;
  std::string out_dir;
};
int run_obfuscate(const ObfuscateArgs& args);

struct PrivacyEvalArgs {
  std::string orig_dir;
  std::string obf_dir;
  std::string out_csv;
};
int run_privacy_eval(const PrivacyEvalArgs& args);

struct KpEvalArgs {
  std::string pred_file;
  std::string gt_file;
  double oks_threshold = 0.5;
  double c_min = 0.3;
  std::string out_json;
};
int run_kp_eval(const KpEvalArgs& args);

struct TriangulateArgs {
  std::string keypoints_file;
  std::string calib_file;
  double tau_epi = 10.0;
  double tau_reproj = 8.0;
  double c_min = 0.3;
  std::string out_file;
};
int run_triangulate(const TriangulateArgs& args);

struct RebaArgs {
  std::string skeletons_file;
  std::string out_csv;
  std::string compare_file;  // optional
  int force_load = 0;
  int coupling = 0;
  int activity = 0;
  int wrist = 1;
};
int run_reba(const RebaArgs& args);

struct TradeoffArgs {
  std::string config_file;
  std::string out_csv;
};
int run_tradeoff(const TradeoffArgs& args);

struct GapTrainArgs {
  std::string config_file;
  std::string out_dir;
};
int run_gap_train(const GapTrainArgs& args);

struct DemoSynthArgs {
  std::uint64_t seed = 1;
  int frames = 50;
  double noise_px = 0.5;
  int people = 1;
  std::string out_dir;
};
int run_demo_synth(const DemoSynthArgs& args);

}  // namespace ergopipe::cli
