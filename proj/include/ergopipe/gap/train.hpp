#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ergopipe/gap/nn.hpp"
#include "ergopipe/gap/optim.hpp"
#include "ergopipe/gap/synthetic.hpp"
#include "ergopipe/gap/tensor.hpp"

namespace ergopipe::gap {

struct GapConfig {
  double alpha = 1.0;
  double lr = 1e-3;
  double lr_decay = 0.1;   // multiplier applied every lr_decay_every epochs
  int lr_decay_every = 10;
  int epochs = 20;
  int batch = 8;
  std::uint64_t seed = 1;
  AdamWConfig adamw{};

  double lr_at(int epoch) const;
};

// ---- batching -------------------------------------------------------------

Tensor scenes_to_images(std::span<const SyntheticScene> scenes,
                        std::span<const int> indices);
Tensor scenes_to_keypoints(std::span<const SyntheticScene> scenes,
                           std::span<const int> indices);

// ---- losses (tape builders) -----------------------------------------------

// Mean squared reconstruction error between the input batch and the
// deobfuscator output.
Var deobf_loss(Tape& tape, Var x, Var recon);

// Keypoint-regression surrogate for the pose loss: mean squared error over
// normalized coordinates.
Var pose_task_loss(Tape& tape, Var pred_kp, Var gt_kp);

struct ObfLossParts {
  Var total;       // pose term minus alpha times the reconstruction term
  Var pose_term;
  Var deobf_term;
};

// Adversarial obfuscator objective. Deobfuscator and task network must be
// frozen by the caller; gradients still flow through their forward passes
// into the obfuscator.
ObfLossParts obf_loss(Tape& tape, Var x, Var gt_kp,
                      const ConvAutoencoder& obfuscator,
                      const ConvAutoencoder& deobfuscator,
                      const TaskNetwork& task, double alpha);

// ---- training -------------------------------------------------------------

struct TaskTrainResult {
  TaskNetwork network;
  double clean_rmse = 0.0;  // on the validation split, clean images
};

// Trains the frozen task network on clean scenes until validation RMSE
// drops below `target_rmse` or the epoch cap; throws FailedToConverge when
// the cap leaves RMSE at or above `fail_rmse`.
TaskTrainResult train_task_network(std::span<const SyntheticScene> dataset,
                                   const GapConfig& config,
                                   double target_rmse = 0.05,
                                   double fail_rmse = 0.15);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double l_obf = 0.0;
  double l_pose_term = 0.0;
  double l_deobf_term = 0.0;
};

struct AdversarialResult {
  ConvAutoencoder obfuscator;
  std::vector<EpochLog> log;
};

// Alternating per-batch updates: deobfuscator first (obfuscator frozen),
// then obfuscator against the frozen deobfuscator and task network. The
// deobfuscator is discarded. Throws NonFiniteLoss on divergence.
AdversarialResult train_adversarial(std::span<const SyntheticScene> dataset,
                                    const TaskNetwork& task,
                                    const GapConfig& config);

// Trains a fresh adversary against a frozen obfuscator and reports its
// reconstruction MSE on the same scenes.
struct FreshAdversaryResult {
  ConvAutoencoder deobfuscator;
  double recon_mse = 0.0;
};

FreshAdversaryResult train_fresh_adversary(
    const ConvAutoencoder& obfuscator, std::span<const SyntheticScene> dataset,
    const GapConfig& config);

// ---- evaluation -----------------------------------------------------------

double task_rmse(const TaskNetwork& task, std::span<const SyntheticScene> scenes,
                 const ConvAutoencoder* obfuscator, int batch);

struct PrivacyUtilityReport {
  double clean_task_rmse = 0.0;
  double obf_task_rmse = 0.0;       // utility
  double adversary_recon_mse = 0.0; // privacy: fresh adversary on held-out
  double adversary_recon_psnr = 0.0;
  double mean_ssim = 0.0;           // SSIM(x, O(x))
};

PrivacyUtilityReport evaluate_privacy_utility(
    const ConvAutoencoder& obfuscator, std::span<const SyntheticScene> held_out,
    const TaskNetwork& task, const GapConfig& config);

// ---- verification ---------------------------------------------------------

// Central-difference check on up to `max_samples` randomly chosen
// parameters; returns the max relative error.
double gradient_check(std::vector<Parameter*> params,
                      const std::function<Var(Tape&)>& build_loss,
                      int max_samples = 200, double eps = 1e-5,
                      std::uint64_t seed = 7);

// ---- checkpoints ----------------------------------------------------------

// Flat binary layout: magic, tensor count, then per tensor a name, a shape
// prefix and little-endian 64-bit floats.
void save_checkpoint(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, const Parameter*>>& tensors);
void load_checkpoint(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, Parameter*>>& tensors);

std::vector<std::pair<std::string, Parameter*>> named_parameters(
    ConvAutoencoder& model);
std::vector<std::pair<std::string, Parameter*>> named_parameters(
    TaskNetwork& model);

}  // namespace ergopipe::gap
