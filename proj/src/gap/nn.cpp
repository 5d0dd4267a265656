#include "ergopipe/gap/nn.hpp"

#include <cmath>

namespace ergopipe::gap {

namespace {

void he_init(Parameter& w, int fan_in, Rng& rng, double gain = 1.0) {
  const double scale = gain * std::sqrt(2.0 / fan_in);
  for (double& v : w.value.v) v = scale * rng.normal();
}

}  // namespace

Conv2dLayer::Conv2dLayer(int in_c, int out_c, int stride_, Rng& rng,
                         double bias_init, double gain)
    : w({out_c, in_c, 3, 3}), b({out_c}), stride(stride_) {
  he_init(w, in_c * 9, rng, gain);
  b.value.fill(bias_init);
}

Var Conv2dLayer::forward(Tape& tape, Var x) const {
  return tape.conv2d(x, tape.leaf(const_cast<Parameter&>(w)),
                     tape.leaf(const_cast<Parameter&>(b)), stride, 1);
}

LinearLayer::LinearLayer(int in_dim, int out_dim, Rng& rng)
    : w({out_dim, in_dim}), b({out_dim}) {
  he_init(w, in_dim, rng);
}

Var LinearLayer::forward(Tape& tape, Var x) const {
  return tape.linear(x, tape.leaf(const_cast<Parameter&>(w)),
                     tape.leaf(const_cast<Parameter&>(b)));
}

ConvAutoencoder::ConvAutoencoder(Rng& rng)
    : enc1_(1, 8, 2, rng),
      enc2_(8, 16, 2, rng),
      dec1_(16, 8, 1, rng),
      // Bias 0.5 keeps the initial output near the middle of the clamp
      // interval, where gradients are alive.
      dec2_(8, 1, 1, rng, 0.5, 1.0) {}

Var ConvAutoencoder::forward(Tape& tape, Var x) const {
  // Centering the [0,1] input keeps the random-init output offset small;
  // uncentered inputs can saturate the whole output at one clamp rail and
  // kill every gradient.
  Var h = tape.leaky_relu(enc1_.forward(tape, tape.shift(x, -0.5)),
                          kLeakySlope);
  h = tape.leaky_relu(enc2_.forward(tape, h), kLeakySlope);
  h = tape.upsample2(h);
  h = tape.leaky_relu(dec1_.forward(tape, h), kLeakySlope);
  h = tape.upsample2(h);
  h = dec2_.forward(tape, h);
  return tape.clamp01(h);
}

std::vector<Parameter*> ConvAutoencoder::parameters() {
  return {&enc1_.w, &enc1_.b, &enc2_.w, &enc2_.b,
          &dec1_.w, &dec1_.b, &dec2_.w, &dec2_.b};
}

void ConvAutoencoder::set_trainable(bool trainable) {
  for (Parameter* p : parameters()) p->trainable = trainable;
}

TaskNetwork::TaskNetwork(int image_size, int n_keypoints, Rng& rng)
    : image_size_(image_size),
      n_keypoints_(n_keypoints),
      flat_dim_(16 * (image_size / 4) * (image_size / 4)),
      conv1_(1, 8, 2, rng),
      conv2_(8, 16, 2, rng),
      fc_(flat_dim_, 2 * n_keypoints, rng) {}

Var TaskNetwork::forward(Tape& tape, Var x) const {
  Var h = tape.leaky_relu(conv1_.forward(tape, x), kLeakySlope);
  h = tape.leaky_relu(conv2_.forward(tape, h), kLeakySlope);
  const int n = tape.value(x).shape[0];
  h = tape.reshape(h, {n, flat_dim_});
  return fc_.forward(tape, h);
}

std::vector<Parameter*> TaskNetwork::parameters() {
  return {&conv1_.w, &conv1_.b, &conv2_.w, &conv2_.b, &fc_.w, &fc_.b};
}

void TaskNetwork::set_trainable(bool trainable) {
  for (Parameter* p : parameters()) p->trainable = trainable;
}

}  // namespace ergopipe::gap
