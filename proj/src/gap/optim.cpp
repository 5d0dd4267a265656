#include "ergopipe/gap/optim.hpp"

#include <cmath>

#include "ergopipe/error.hpp"

namespace ergopipe::gap {

void adamw_step(std::span<double> params, std::span<const double> grads,
                AdamWState& state, double lr, const AdamWConfig& config) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::ShapeMismatch, "adamw_step: size mismatch");
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
    state.v[i] =
        config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    const double prev = params[i];
    params[i] = prev - lr * m_hat / (std::sqrt(v_hat) + config.eps) -
                lr * config.weight_decay * prev;
  }
}

AdamW::AdamW(std::vector<Parameter*> params, AdamWConfig config)
    : params_(std::move(params)), states_(params_.size()), config_(config) {}

void AdamW::step(double lr) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adamw_step(params_[i]->value.v, params_[i]->grad.v, states_[i], lr,
               config_);
  }
}

void AdamW::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace ergopipe::gap
