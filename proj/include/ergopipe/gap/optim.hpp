#pragma once

#include <span>
#include <vector>

#include "ergopipe/gap/tensor.hpp"

namespace ergopipe::gap {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
};

// One decoupled-weight-decay Adam update in place. The decay term is
// subtracted separately from the moment-based step.
void adamw_step(std::span<double> params, std::span<const double> grads,
                AdamWState& state, double lr, const AdamWConfig& config);

// Convenience wrapper holding one state per parameter tensor.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, AdamWConfig config);

  void step(double lr);
  void zero_grad();

 private:
  std::vector<Parameter*> params_;
  std::vector<AdamWState> states_;
  AdamWConfig config_;
};

}  // namespace ergopipe::gap
