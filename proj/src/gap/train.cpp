#include "ergopipe/gap/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "ergopipe/error.hpp"
#include "ergopipe/gap/rng.hpp"
#include "ergopipe/image_metrics.hpp"
#include "ergopipe/log.hpp"

namespace ergopipe::gap {

double GapConfig::lr_at(int epoch) const {
  const int steps = lr_decay_every > 0 ? epoch / lr_decay_every : 0;
  return lr * std::pow(lr_decay, steps);
}

Tensor scenes_to_images(std::span<const SyntheticScene> scenes,
                        std::span<const int> indices) {
  const int n = static_cast<int>(indices.size());
  Tensor t({n, 1, kSceneSize, kSceneSize});
  std::int64_t offset = 0;
  for (int idx : indices) {
    const auto& img = scenes[idx].image;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      t.v[offset + i] = img.data[i] / 255.0;
    }
    offset += static_cast<std::int64_t>(img.data.size());
  }
  return t;
}

Tensor scenes_to_keypoints(std::span<const SyntheticScene> scenes,
                           std::span<const int> indices) {
  const int n = static_cast<int>(indices.size());
  Tensor t({n, 2 * kSceneKeypoints});
  std::int64_t offset = 0;
  for (int idx : indices) {
    for (const auto& kp : scenes[idx].keypoints) {
      t.v[offset++] = kp[0];
      t.v[offset++] = kp[1];
    }
  }
  return t;
}

Var deobf_loss(Tape& tape, Var x, Var recon) { return tape.mse(x, recon); }

Var pose_task_loss(Tape& tape, Var pred_kp, Var gt_kp) {
  return tape.mse(pred_kp, gt_kp);
}

ObfLossParts obf_loss(Tape& tape, Var x, Var gt_kp,
                      const ConvAutoencoder& obfuscator,
                      const ConvAutoencoder& deobfuscator,
                      const TaskNetwork& task, double alpha) {
  const Var obfuscated = obfuscator.forward(tape, x);
  const Var pose_term =
      pose_task_loss(tape, task.forward(tape, obfuscated), gt_kp);
  const Var deobf_term =
      deobf_loss(tape, x, deobfuscator.forward(tape, obfuscated));
  const Var total = tape.sub(pose_term, tape.scale(deobf_term, alpha));
  return {total, pose_term, deobf_term};
}

namespace {

std::vector<int> shuffled_indices(int n, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
  }
  return idx;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteLoss, std::string(what) + " diverged");
  }
}

// Forward pass without gradient bookkeeping; returns the output tensor.
Tensor forward_only(const ConvAutoencoder& model, const Tensor& input) {
  Tape tape;
  const Var out = model.forward(tape, tape.constant(input));
  return tape.value(out);
}

}  // namespace

TaskTrainResult train_task_network(std::span<const SyntheticScene> dataset,
                                   const GapConfig& config, double target_rmse,
                                   double fail_rmse) {
  if (dataset.empty()) {
    throw Error(ErrorCode::FailedToConverge, "task training needs scenes");
  }
  const int n = static_cast<int>(dataset.size());
  const int n_train = std::max(1, n - std::max(1, n / 10));

  Rng init_rng = rng_for(config.seed, 11);
  TaskTrainResult result{TaskNetwork(kSceneSize, kSceneKeypoints, init_rng),
                         0.0};
  TaskNetwork& net = result.network;
  AdamW opt(net.parameters(), config.adamw);

  double val_rmse = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = rng_for(config.seed, 100 + epoch);
    const auto order = shuffled_indices(n_train, shuffle_rng);
    const double lr = config.lr_at(epoch);
    for (int start = 0; start < n_train; start += config.batch) {
      const int count = std::min(config.batch, n_train - start);
      const std::span<const int> batch(order.data() + start, count);
      Tape tape;
      const Var x = tape.constant(scenes_to_images(dataset, batch));
      const Var gt = tape.constant(scenes_to_keypoints(dataset, batch));
      const Var loss = pose_task_loss(tape, net.forward(tape, x), gt);
      require_finite(tape.value(loss).v[0], "task loss");
      opt.zero_grad();
      tape.backward(loss);
      opt.step(lr);
    }
    const auto val_split =
        n_train < n ? dataset.subspan(n_train) : dataset;  // tiny datasets
    val_rmse = task_rmse(net, val_split, nullptr, config.batch);
    log::debug("task epoch " + std::to_string(epoch) + " val rmse " +
               std::to_string(val_rmse));
    if (val_rmse < target_rmse) break;
  }
  if (val_rmse >= fail_rmse) {
    throw Error(ErrorCode::FailedToConverge,
                "task network stalled at validation RMSE " +
                    std::to_string(val_rmse));
  }
  result.clean_rmse = val_rmse;
  net.set_trainable(false);
  return result;
}

AdversarialResult train_adversarial(std::span<const SyntheticScene> dataset,
                                    const TaskNetwork& task,
                                    const GapConfig& config) {
  const int n = static_cast<int>(dataset.size());
  Rng init_rng = rng_for(config.seed, 21);
  AdversarialResult result{ConvAutoencoder(init_rng), {}};
  ConvAutoencoder& obfuscator = result.obfuscator;
  Rng deobf_rng = rng_for(config.seed, 22);
  ConvAutoencoder deobfuscator(deobf_rng);

  AdamW obf_opt(obfuscator.parameters(), config.adamw);
  AdamW deobf_opt(deobfuscator.parameters(), config.adamw);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = rng_for(config.seed, 200 + epoch);
    const auto order = shuffled_indices(n, shuffle_rng);
    const double lr = config.lr_at(epoch);
    EpochLog entry{epoch, lr, 0.0, 0.0, 0.0};
    int batches = 0;
    for (int start = 0; start < n; start += config.batch) {
      const int count = std::min(config.batch, n - start);
      const std::span<const int> batch(order.data() + start, count);
      const Tensor images = scenes_to_images(dataset, batch);

      // Deobfuscator step: obfuscator output treated as data.
      {
        const Tensor obf_out = forward_only(obfuscator, images);
        Tape tape;
        const Var x = tape.constant(images);
        const Var recon =
            deobfuscator.forward(tape, tape.constant(obf_out));
        const Var loss = deobf_loss(tape, x, recon);
        require_finite(tape.value(loss).v[0], "deobfuscator loss");
        deobf_opt.zero_grad();
        tape.backward(loss);
        deobf_opt.step(lr);
      }

      // Obfuscator step against the frozen adversary and task network.
      {
        deobfuscator.set_trainable(false);
        Tape tape;
        const Var x = tape.constant(images);
        const Var gt = tape.constant(scenes_to_keypoints(dataset, batch));
        const ObfLossParts parts =
            obf_loss(tape, x, gt, obfuscator, deobfuscator, task, config.alpha);
        require_finite(tape.value(parts.total).v[0], "obfuscator loss");
        obf_opt.zero_grad();
        tape.backward(parts.total);
        obf_opt.step(lr);
        deobfuscator.set_trainable(true);

        entry.l_obf += tape.value(parts.total).v[0];
        entry.l_pose_term += tape.value(parts.pose_term).v[0];
        entry.l_deobf_term += tape.value(parts.deobf_term).v[0];
        ++batches;
      }
    }
    entry.l_obf /= batches;
    entry.l_pose_term /= batches;
    entry.l_deobf_term /= batches;
    result.log.push_back(entry);
    log::debug("gap epoch " + std::to_string(epoch) + " L_obf " +
               std::to_string(entry.l_obf));
  }
  return result;
}

FreshAdversaryResult train_fresh_adversary(
    const ConvAutoencoder& obfuscator, std::span<const SyntheticScene> dataset,
    const GapConfig& config) {
  const int n = static_cast<int>(dataset.size());
  Rng init_rng = rng_for(config.seed, 31);
  FreshAdversaryResult result{ConvAutoencoder(init_rng), 0.0};
  ConvAutoencoder& adversary = result.deobfuscator;
  AdamW opt(adversary.parameters(), config.adamw);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = rng_for(config.seed, 300 + epoch);
    const auto order = shuffled_indices(n, shuffle_rng);
    const double lr = config.lr_at(epoch);
    for (int start = 0; start < n; start += config.batch) {
      const int count = std::min(config.batch, n - start);
      const std::span<const int> batch(order.data() + start, count);
      const Tensor images = scenes_to_images(dataset, batch);
      const Tensor obf_out = forward_only(obfuscator, images);
      Tape tape;
      const Var recon = adversary.forward(tape, tape.constant(obf_out));
      const Var loss = deobf_loss(tape, tape.constant(images), recon);
      require_finite(tape.value(loss).v[0], "fresh adversary loss");
      opt.zero_grad();
      tape.backward(loss);
      opt.step(lr);
    }
  }

  // Reconstruction error over the full set, batched.
  double sq_sum = 0.0;
  std::int64_t count = 0;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int start = 0; start < n; start += config.batch) {
    const int c = std::min(config.batch, n - start);
    const std::span<const int> batch(all.data() + start, c);
    const Tensor images = scenes_to_images(dataset, batch);
    const Tensor recon =
        forward_only(adversary, forward_only(obfuscator, images));
    for (std::size_t i = 0; i < images.v.size(); ++i) {
      const double d = images.v[i] - recon.v[i];
      sq_sum += d * d;
    }
    count += images.size();
  }
  result.recon_mse = sq_sum / static_cast<double>(count);
  return result;
}

double task_rmse(const TaskNetwork& task,
                 std::span<const SyntheticScene> scenes,
                 const ConvAutoencoder* obfuscator, int batch) {
  const int n = static_cast<int>(scenes.size());
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  double sq_sum = 0.0;
  std::int64_t count = 0;
  for (int start = 0; start < n; start += batch) {
    const int c = std::min(batch, n - start);
    const std::span<const int> idx(all.data() + start, c);
    Tensor images = scenes_to_images(scenes, idx);
    if (obfuscator) {
      images = forward_only(*obfuscator, images);
    }
    Tape tape;
    const Var pred = task.forward(tape, tape.constant(images));
    const Tensor& pv = tape.value(pred);
    const Tensor gt = scenes_to_keypoints(scenes, idx);
    for (std::size_t i = 0; i < pv.v.size(); ++i) {
      const double d = pv.v[i] - gt.v[i];
      sq_sum += d * d;
    }
    count += pv.size();
  }
  return std::sqrt(sq_sum / static_cast<double>(count));
}

namespace {

ImageBuffer tensor_slice_to_image(const Tensor& t, int index) {
  ImageBuffer img = ImageBuffer::make(kSceneSize, kSceneSize, 1);
  const std::int64_t plane = static_cast<std::int64_t>(kSceneSize) * kSceneSize;
  for (std::int64_t i = 0; i < plane; ++i) {
    const double v = t.v[index * plane + i] * 255.0;
    img.data[i] =
        static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
  }
  return img;
}

}  // namespace

PrivacyUtilityReport evaluate_privacy_utility(
    const ConvAutoencoder& obfuscator,
    std::span<const SyntheticScene> held_out, const TaskNetwork& task,
    const GapConfig& config) {
  PrivacyUtilityReport report;
  report.clean_task_rmse = task_rmse(task, held_out, nullptr, config.batch);
  report.obf_task_rmse = task_rmse(task, held_out, &obfuscator, config.batch);

  const FreshAdversaryResult adversary =
      train_fresh_adversary(obfuscator, held_out, config);
  report.adversary_recon_mse = adversary.recon_mse;
  // MSE is in [0,1] units; PSNR reported on the 8-bit scale.
  report.adversary_recon_psnr =
      adversary.recon_mse > 0.0
          ? 10.0 * std::log10(1.0 / adversary.recon_mse)
          : std::numeric_limits<double>::infinity();

  const int n = static_cast<int>(held_out.size());
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  double ssim_sum = 0.0;
  for (int start = 0; start < n; start += config.batch) {
    const int c = std::min(config.batch, n - start);
    const std::span<const int> idx(all.data() + start, c);
    const Tensor images = scenes_to_images(held_out, idx);
    const Tensor obf_out = forward_only(obfuscator, images);
    for (int i = 0; i < c; ++i) {
      ssim_sum += metrics::ssim(tensor_slice_to_image(images, i),
                                tensor_slice_to_image(obf_out, i));
    }
  }
  report.mean_ssim = n > 0 ? ssim_sum / n : 0.0;
  return report;
}

double gradient_check(std::vector<Parameter*> params,
                      const std::function<Var(Tape&)>& build_loss,
                      int max_samples, double eps, std::uint64_t seed) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    const Var loss = build_loss(tape);
    tape.backward(loss);
  }
  const auto eval = [&]() {
    Tape tape;
    return tape.value(build_loss(tape)).v[0];
  };

  std::vector<std::pair<Parameter*, std::int64_t>> coords;
  for (Parameter* p : params) {
    for (std::int64_t i = 0; i < p->value.size(); ++i) {
      coords.emplace_back(p, i);
    }
  }
  Rng rng = rng_for(seed, 0);
  std::vector<std::pair<Parameter*, std::int64_t>> chosen;
  if (static_cast<int>(coords.size()) <= max_samples) {
    chosen = coords;
  } else {
    for (int i = 0; i < max_samples; ++i) {
      chosen.push_back(coords[rng.uniform_int(static_cast<int>(coords.size()))]);
    }
  }

  // Floor the denominator at a fraction of the overall gradient scale:
  // coordinates whose gradient is orders of magnitude below the scale carry
  // only finite-difference roundoff, not signal.
  double grad_scale = 0.0;
  for (const Parameter* p : params) {
    for (double g : p->grad.v) grad_scale = std::max(grad_scale, std::abs(g));
  }
  const double floor = 1e-3 * grad_scale + 1e-12;

  double max_rel = 0.0;
  for (const auto& [param, i] : chosen) {
    const double saved = param->value.v[i];
    param->value.v[i] = saved + eps;
    const double plus = eval();
    param->value.v[i] = saved - eps;
    const double minus = eval();
    param->value.v[i] = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double analytic = param->grad.v[i];
    const double rel = std::abs(analytic - numeric) /
                       (std::abs(analytic) + std::abs(numeric) + floor);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

// ---- checkpoints ----------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'E', 'G', 'A', 'P', 'C', 'K', 'P', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw Error(ErrorCode::ParseError, "truncated checkpoint: " + path);
  }
  return value;
}

}  // namespace

void save_checkpoint(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, const Parameter*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_raw(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, param] : tensors) {
    write_raw(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_raw(out, static_cast<std::uint32_t>(param->value.shape.size()));
    for (int d : param->value.shape) {
      write_raw(out, static_cast<std::uint64_t>(d));
    }
    out.write(reinterpret_cast<const char*>(param->value.v.data()),
              static_cast<std::streamsize>(param->value.v.size() *
                                           sizeof(double)));
  }
  if (!out) {
    throw Error(ErrorCode::IoFailure, "checkpoint write failed: " +
                                          path.string());
  }
}

void load_checkpoint(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, Parameter*>>& tensors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCode::ParseError,
                "not a model checkpoint: " + path.string());
  }
  const auto count = read_raw<std::uint32_t>(in, path.string());
  if (count != tensors.size()) {
    throw Error(ErrorCode::ParseError,
                "checkpoint tensor count mismatch in " + path.string());
  }
  for (const auto& [expected_name, param] : tensors) {
    const auto name_len = read_raw<std::uint32_t>(in, path.string());
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto ndim = read_raw<std::uint32_t>(in, path.string());
    std::vector<int> shape(ndim);
    for (auto& d : shape) {
      d = static_cast<int>(read_raw<std::uint64_t>(in, path.string()));
    }
    if (!in || name != expected_name || shape != param->value.shape) {
      throw Error(ErrorCode::ParseError,
                  "checkpoint layout mismatch at tensor '" + name + "' in " +
                      path.string());
    }
    in.read(reinterpret_cast<char*>(param->value.v.data()),
            static_cast<std::streamsize>(param->value.v.size() *
                                         sizeof(double)));
    if (!in) {
      throw Error(ErrorCode::ParseError,
                  "truncated checkpoint: " + path.string());
    }
  }
}

namespace {

template <typename Model>
std::vector<std::pair<std::string, Parameter*>> name_params(Model& model) {
  static const char* kNames[] = {"w0", "b0", "w1", "b1", "w2",
                                 "b2", "w3", "b3"};
  std::vector<std::pair<std::string, Parameter*>> out;
  const auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    out.emplace_back(kNames[i], params[i]);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Parameter*>> named_parameters(
    ConvAutoencoder& model) {
  return name_params(model);
}

std::vector<std::pair<std::string, Parameter*>> named_parameters(
    TaskNetwork& model) {
  return name_params(model);
}

}  // namespace ergopipe::gap
