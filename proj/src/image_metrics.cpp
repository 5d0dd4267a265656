#include "ergopipe/image_metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ergopipe/error.hpp"

namespace ergopipe::metrics {

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::ShapeMismatch, "psnr needs equal image shapes");
  }
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sq_sum += d * d;
  }
  const double mse = sq_sum / static_cast<double>(a.data.size());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable weighted filter, valid region only: output is
// (h - 10) x (w - 10).
std::vector<double> filter_valid(const std::vector<double>& plane, int w,
                                 int h, const std::array<double, kWindow>& taps) {
  const int wo = w - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * wo);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += taps[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      }
      rows[static_cast<std::size_t>(y) * wo + x] = acc;
    }
  }
  const int ho = h - kWindow + 1;
  std::vector<double> out(static_cast<std::size_t>(ho) * wo);
  for (int y = 0; y < ho; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += taps[k] * rows[static_cast<std::size_t>(y + k) * wo + x];
      }
      out[static_cast<std::size_t>(y) * wo + x] = acc;
    }
  }
  return out;
}

double ssim_plane(const std::vector<double>& x, const std::vector<double>& y,
                  int w, int h) {
  const auto taps = gaussian_taps();
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, w, h, taps);
  const auto mu_y = filter_valid(y, w, h, taps);
  const auto m_xx = filter_valid(xx, w, h, taps);
  const auto m_yy = filter_valid(yy, w, h, taps);
  const auto m_xy = filter_valid(xy, w, h, taps);

  double sum = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double var_x = m_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = m_yy[i] - mu_y[i] * mu_y[i];
    const double cov = m_xy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + kC1) * (2.0 * cov + kC2);
    const double den =
        (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + kC1) * (var_x + var_y + kC2);
    sum += num / den;
  }
  return sum / static_cast<double>(mu_x.size());
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::ShapeMismatch, "ssim needs equal image shapes");
  }
  if (a.width < kWindow || a.height < kWindow) {
    throw Error(ErrorCode::ImageTooSmall,
                "ssim needs images of at least 11x11");
  }
  const std::size_t pixels = static_cast<std::size_t>(a.width) * a.height;
  double total = 0.0;
  std::vector<double> plane_a(pixels), plane_b(pixels);
  for (int c = 0; c < a.channels; ++c) {
    for (std::size_t p = 0; p < pixels; ++p) {
      plane_a[p] = a.data[p * a.channels + c];
      plane_b[p] = b.data[p * b.channels + c];
    }
    total += ssim_plane(plane_a, plane_b, a.width, a.height);
  }
  return total / a.channels;
}

}  // namespace ergopipe::metrics
