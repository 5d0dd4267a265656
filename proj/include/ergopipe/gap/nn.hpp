#pragma once

#include <vector>

#include "ergopipe/gap/rng.hpp"
#include "ergopipe/gap/tensor.hpp"

namespace ergopipe::gap {

constexpr double kLeakySlope = 0.01;

struct Conv2dLayer {
  Parameter w;  // [out_c, in_c, 3, 3]
  Parameter b;  // [out_c]
  int stride;

  Conv2dLayer(int in_c, int out_c, int stride_, Rng& rng,
              double bias_init = 0.0, double gain = 1.0);
  Var forward(Tape& tape, Var x) const;
};

struct LinearLayer {
  Parameter w;  // [out, in]
  Parameter b;  // [out]

  LinearLayer(int in_dim, int out_dim, Rng& rng);
  Var forward(Tape& tape, Var x) const;
};

// Shared encoder-decoder shape for the obfuscator and deobfuscator: two
// stride-2 convolutions (8 then 16 channels), two upsample+conv stages
// back to the input resolution, output clamped to [0,1].
class ConvAutoencoder {
 public:
  explicit ConvAutoencoder(Rng& rng);

  Var forward(Tape& tape, Var x) const;
  std::vector<Parameter*> parameters();
  void set_trainable(bool trainable);

 private:
  Conv2dLayer enc1_, enc2_, dec1_, dec2_;
};

// Keypoint regression head standing in for the full pose model: two
// stride-2 convolutions and a fully connected layer to 2*K outputs.
class TaskNetwork {
 public:
  TaskNetwork(int image_size, int n_keypoints, Rng& rng);

  Var forward(Tape& tape, Var x) const;
  std::vector<Parameter*> parameters();
  void set_trainable(bool trainable);

  int n_keypoints() const { return n_keypoints_; }
  int image_size() const { return image_size_; }

 private:
  int image_size_;
  int n_keypoints_;
  int flat_dim_;
  Conv2dLayer conv1_, conv2_;
  LinearLayer fc_;
};

}  // namespace ergopipe::gap
