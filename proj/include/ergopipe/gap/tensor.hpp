#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace ergopipe::gap {

// Dense double-precision tensor, row-major.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    v.assign(count(shape), 0.0);
  }

  static std::int64_t count(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(v.size()); }
  void fill(double value) { std::fill(v.begin(), v.end(), value); }
};

// Trainable leaf; persists across tape lifetimes. Gradients accumulate
// into `grad` during backward when `trainable` is set.
struct Parameter {
  Tensor value;
  Tensor grad;
  bool trainable = true;

  explicit Parameter(std::vector<int> shape)
      : value(shape), grad(std::move(shape)) {}
  void zero_grad() { grad.fill(0.0); }
};

// Handle to a node on the tape.
struct Var {
  int index = -1;
};

// Reverse-mode tape. Build the graph forward, call backward(loss) once;
// node order gives a deterministic backward schedule.
class Tape {
 public:
  Var constant(Tensor value);
  Var leaf(Parameter& param);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double factor);
  Var shift(Var a, double offset);

  // 3x3 convolution, zero padding `pad`, stride `stride`.
  // x: [n, c_in, h, w], w: [c_out, c_in, 3, 3], b: [c_out].
  Var conv2d(Var x, Var w, Var b, int stride, int pad);
  Var leaky_relu(Var x, double slope);
  Var upsample2(Var x);                 // nearest neighbor, x2
  Var reshape(Var x, std::vector<int> shape);
  Var linear(Var x, Var w, Var b);      // x: [n, in], w: [out, in]
  Var clamp01(Var x);
  Var mse(Var a, Var b);                // scalar mean squared difference

  const Tensor& value(Var v) const { return values_[v.index]; }
  Tensor& grad(Var v) { return grads_[v.index]; }

  // Seeds d(loss)/d(loss) = 1, runs the tape in reverse, then flushes
  // gradients into trainable parameters.
  void backward(Var loss);

 private:
  struct ParamBinding {
    int node;
    Parameter* param;
  };

  int push(Tensor value);

  std::vector<Tensor> values_;
  std::vector<Tensor> grads_;
  std::vector<std::function<void()>> backward_ops_;  // aligned with nodes
  std::vector<ParamBinding> bindings_;
};

}  // namespace ergopipe::gap
