#include "ergopipe/gap/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "ergopipe/error.hpp"

namespace ergopipe::gap {

namespace {

void require_same_size(const Tensor& a, const Tensor& b, const char* op) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": sizes differ");
  }
}

}  // namespace

int Tape::push(Tensor value) {
  const int index = static_cast<int>(values_.size());
  grads_.emplace_back(value.shape);
  values_.push_back(std::move(value));
  backward_ops_.emplace_back();
  return index;
}

Var Tape::constant(Tensor value) { return {push(std::move(value))}; }

Var Tape::leaf(Parameter& param) {
  const int index = push(param.value);
  if (param.trainable) {
    bindings_.push_back({index, &param});
  }
  return {index};
}

Var Tape::add(Var a, Var b) {
  require_same_size(values_[a.index], values_[b.index], "add");
  Tensor out = values_[a.index];
  for (std::int64_t i = 0; i < out.size(); ++i) out.v[i] += values_[b.index].v[i];
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, a, b]() {
    const auto& g = grads_[idx].v;
    for (std::size_t i = 0; i < g.size(); ++i) {
      grads_[a.index].v[i] += g[i];
      grads_[b.index].v[i] += g[i];
    }
  };
  return {idx};
}

Var Tape::sub(Var a, Var b) {
  require_same_size(values_[a.index], values_[b.index], "sub");
  Tensor out = values_[a.index];
  for (std::int64_t i = 0; i < out.size(); ++i) out.v[i] -= values_[b.index].v[i];
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, a, b]() {
    const auto& g = grads_[idx].v;
    for (std::size_t i = 0; i < g.size(); ++i) {
      grads_[a.index].v[i] += g[i];
      grads_[b.index].v[i] -= g[i];
    }
  };
  return {idx};
}

Var Tape::scale(Var a, double factor) {
  Tensor out = values_[a.index];
  for (double& v : out.v) v *= factor;
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, a, factor]() {
    const auto& g = grads_[idx].v;
    for (std::size_t i = 0; i < g.size(); ++i) {
      grads_[a.index].v[i] += factor * g[i];
    }
  };
  return {idx};
}

Var Tape::shift(Var a, double offset) {
  Tensor out = values_[a.index];
  for (double& v : out.v) v += offset;
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, a]() {
    const auto& g = grads_[idx].v;
    auto& ga = grads_[a.index].v;
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  };
  return {idx};
}

Var Tape::conv2d(Var x, Var w, Var b, int stride, int pad) {
  const Tensor& xv = values_[x.index];
  const Tensor& wv = values_[w.index];
  if (xv.shape.size() != 4 || wv.shape.size() != 4 || wv.shape[2] != 3 ||
      wv.shape[3] != 3 || xv.shape[1] != wv.shape[1]) {
    throw Error(ErrorCode::ShapeMismatch, "conv2d: bad operand shapes");
  }
  const int n = xv.shape[0], ci = xv.shape[1], h = xv.shape[2], wd = xv.shape[3];
  const int co = wv.shape[0];
  const int ho = (h + 2 * pad - 3) / stride + 1;
  const int wo = (wd + 2 * pad - 3) / stride + 1;

  Tensor out({n, co, ho, wo});
  const auto& xd = xv.v;
  const auto& wdata = wv.v;
  const auto& bdata = values_[b.index].v;
  for (int in = 0; in < n; ++in) {
    for (int oc = 0; oc < co; ++oc) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          double acc = bdata[oc];
          const int iy0 = oy * stride - pad;
          const int ix0 = ox * stride - pad;
          for (int ic = 0; ic < ci; ++ic) {
            const double* xplane =
                &xd[((static_cast<std::int64_t>(in) * ci + ic) * h) * wd];
            const double* wk = &wdata[((static_cast<std::int64_t>(oc) * ci + ic) * 3) * 3];
            for (int ky = 0; ky < 3; ++ky) {
              const int iy = iy0 + ky;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < 3; ++kx) {
                const int ix = ix0 + kx;
                if (ix < 0 || ix >= wd) continue;
                acc += wk[ky * 3 + kx] * xplane[iy * wd + ix];
              }
            }
          }
          out.v[(((static_cast<std::int64_t>(in) * co + oc) * ho) + oy) * wo + ox] = acc;
        }
      }
    }
  }
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x, w, b, stride, pad, n, ci, h, wd, co, ho,
                        wo]() {
    const auto& g = grads_[idx].v;
    auto& gx = grads_[x.index].v;
    auto& gw = grads_[w.index].v;
    auto& gb = grads_[b.index].v;
    const auto& xd = values_[x.index].v;
    const auto& wdata = values_[w.index].v;
    for (int in = 0; in < n; ++in) {
      for (int oc = 0; oc < co; ++oc) {
        for (int oy = 0; oy < ho; ++oy) {
          for (int ox = 0; ox < wo; ++ox) {
            const double go =
                g[(((static_cast<std::int64_t>(in) * co + oc) * ho) + oy) * wo + ox];
            if (go == 0.0) continue;
            gb[oc] += go;
            const int iy0 = oy * stride - pad;
            const int ix0 = ox * stride - pad;
            for (int ic = 0; ic < ci; ++ic) {
              const std::int64_t xbase =
                  ((static_cast<std::int64_t>(in) * ci + ic) * h) * wd;
              const std::int64_t wbase =
                  ((static_cast<std::int64_t>(oc) * ci + ic) * 3) * 3;
              for (int ky = 0; ky < 3; ++ky) {
                const int iy = iy0 + ky;
                if (iy < 0 || iy >= h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                  const int ix = ix0 + kx;
                  if (ix < 0 || ix >= wd) continue;
                  gw[wbase + ky * 3 + kx] += go * xd[xbase + iy * wd + ix];
                  gx[xbase + iy * wd + ix] += go * wdata[wbase + ky * 3 + kx];
                }
              }
            }
          }
        }
      }
    }
  };
  return {idx};
}

Var Tape::leaky_relu(Var x, double slope) {
  Tensor out = values_[x.index];
  for (double& v : out.v) {
    if (v < 0.0) v *= slope;
  }
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x, slope]() {
    const auto& g = grads_[idx].v;
    const auto& xv = values_[x.index].v;
    auto& gx = grads_[x.index].v;
    for (std::size_t i = 0; i < g.size(); ++i) {
      gx[i] += g[i] * (xv[i] > 0.0 ? 1.0 : slope);
    }
  };
  return {idx};
}

Var Tape::upsample2(Var x) {
  const Tensor& xv = values_[x.index];
  if (xv.shape.size() != 4) {
    throw Error(ErrorCode::ShapeMismatch, "upsample2 expects [n,c,h,w]");
  }
  const int n = xv.shape[0], c = xv.shape[1], h = xv.shape[2], w = xv.shape[3];
  Tensor out({n, c, 2 * h, 2 * w});
  for (int in = 0; in < n * c; ++in) {
    const double* src = &xv.v[static_cast<std::int64_t>(in) * h * w];
    double* dst = &out.v[static_cast<std::int64_t>(in) * 4 * h * w];
    for (int y = 0; y < h; ++y) {
      for (int x2 = 0; x2 < w; ++x2) {
        const double v = src[y * w + x2];
        dst[(2 * y) * 2 * w + 2 * x2] = v;
        dst[(2 * y) * 2 * w + 2 * x2 + 1] = v;
        dst[(2 * y + 1) * 2 * w + 2 * x2] = v;
        dst[(2 * y + 1) * 2 * w + 2 * x2 + 1] = v;
      }
    }
  }
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x, n, c, h, w]() {
    const auto& g = grads_[idx].v;
    auto& gx = grads_[x.index].v;
    for (int in = 0; in < n * c; ++in) {
      const double* gsrc = &g[static_cast<std::int64_t>(in) * 4 * h * w];
      double* gdst = &gx[static_cast<std::int64_t>(in) * h * w];
      for (int y = 0; y < h; ++y) {
        for (int x2 = 0; x2 < w; ++x2) {
          gdst[y * w + x2] += gsrc[(2 * y) * 2 * w + 2 * x2] +
                              gsrc[(2 * y) * 2 * w + 2 * x2 + 1] +
                              gsrc[(2 * y + 1) * 2 * w + 2 * x2] +
                              gsrc[(2 * y + 1) * 2 * w + 2 * x2 + 1];
        }
      }
    }
  };
  return {idx};
}

Var Tape::reshape(Var x, std::vector<int> shape) {
  if (Tensor::count(shape) != values_[x.index].size()) {
    throw Error(ErrorCode::ShapeMismatch, "reshape: element count differs");
  }
  Tensor out = values_[x.index];
  out.shape = std::move(shape);
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x]() {
    const auto& g = grads_[idx].v;
    auto& gx = grads_[x.index].v;
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  };
  return {idx};
}

Var Tape::linear(Var x, Var w, Var b) {
  const Tensor& xv = values_[x.index];
  const Tensor& wv = values_[w.index];
  if (xv.shape.size() != 2 || wv.shape.size() != 2 ||
      xv.shape[1] != wv.shape[1]) {
    throw Error(ErrorCode::ShapeMismatch, "linear: bad operand shapes");
  }
  const int n = xv.shape[0], in_dim = xv.shape[1], out_dim = wv.shape[0];
  Tensor out({n, out_dim});
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < out_dim; ++o) {
      double acc = values_[b.index].v[o];
      const double* xrow = &xv.v[static_cast<std::int64_t>(i) * in_dim];
      const double* wrow = &wv.v[static_cast<std::int64_t>(o) * in_dim];
      for (int k = 0; k < in_dim; ++k) acc += xrow[k] * wrow[k];
      out.v[static_cast<std::int64_t>(i) * out_dim + o] = acc;
    }
  }
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x, w, b, n, in_dim, out_dim]() {
    const auto& g = grads_[idx].v;
    const auto& xv = values_[x.index].v;
    const auto& wv = values_[w.index].v;
    auto& gx = grads_[x.index].v;
    auto& gw = grads_[w.index].v;
    auto& gb = grads_[b.index].v;
    for (int i = 0; i < n; ++i) {
      for (int o = 0; o < out_dim; ++o) {
        const double go = g[static_cast<std::int64_t>(i) * out_dim + o];
        if (go == 0.0) continue;
        gb[o] += go;
        const double* xrow = &xv[static_cast<std::int64_t>(i) * in_dim];
        const double* wrow = &wv[static_cast<std::int64_t>(o) * in_dim];
        double* gxrow = &gx[static_cast<std::int64_t>(i) * in_dim];
        double* gwrow = &gw[static_cast<std::int64_t>(o) * in_dim];
        for (int k = 0; k < in_dim; ++k) {
          gxrow[k] += go * wrow[k];
          gwrow[k] += go * xrow[k];
        }
      }
    }
  };
  return {idx};
}

Var Tape::clamp01(Var x) {
  Tensor out = values_[x.index];
  for (double& v : out.v) v = std::clamp(v, 0.0, 1.0);
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, x]() {
    const auto& g = grads_[idx].v;
    const auto& xv = values_[x.index].v;
    auto& gx = grads_[x.index].v;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > 0.0 && xv[i] < 1.0) gx[i] += g[i];
    }
  };
  return {idx};
}

Var Tape::mse(Var a, Var b) {
  require_same_size(values_[a.index], values_[b.index], "mse");
  const auto& av = values_[a.index].v;
  const auto& bv = values_[b.index].v;
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  Tensor out({1});
  out.v[0] = acc / static_cast<double>(av.size());
  const int idx = push(std::move(out));
  backward_ops_[idx] = [this, idx, a, b]() {
    const double go = grads_[idx].v[0];
    const auto& av = values_[a.index].v;
    const auto& bv = values_[b.index].v;
    auto& ga = grads_[a.index].v;
    auto& gb = grads_[b.index].v;
    const double k = 2.0 * go / static_cast<double>(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
      const double d = k * (av[i] - bv[i]);
      ga[i] += d;
      gb[i] -= d;
    }
  };
  return {idx};
}

void Tape::backward(Var loss) {
  if (values_[loss.index].size() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "backward needs a scalar loss");
  }
  grads_[loss.index].v[0] = 1.0;
  for (int i = static_cast<int>(backward_ops_.size()) - 1; i >= 0; --i) {
    if (backward_ops_[i]) backward_ops_[i]();
  }
  for (const auto& binding : bindings_) {
    const auto& g = grads_[binding.node].v;
    auto& dst = binding.param->grad.v;
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }
}

}  // namespace ergopipe::gap
