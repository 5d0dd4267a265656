#include "ergopipe/filters.hpp"

#include <algorithm>
#include <cmath>

#include "ergopipe/error.hpp"

namespace ergopipe::filters {

const char* method_name(Method method) {
  switch (method) {
    case Method::Blur: return "blur";
    case Method::Noise: return "noise";
    case Method::Pixelate: return "pixelate";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "blur") return Method::Blur;
  if (name == "noise") return Method::Noise;
  if (name == "pixelate") return Method::Pixelate;
  throw Error(ErrorCode::ParseError, "unknown filter method '" + name + "'");
}

namespace {

// Round half away from zero, the project-wide quantization rule.
std::uint8_t quantize(double v) {
  const double r = std::round(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

int clamp_coord(int v, int hi) { return std::clamp(v, 0, hi - 1); }

}  // namespace

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  if (sigma < 1e-6) {
    return img;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int w = img.width, h = img.height, ch = img.channels;
  // Horizontal pass into a double buffer, final rounding only after the
  // vertical pass.
  std::vector<double> tmp(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = clamp_coord(x + k, w);
          acc += kernel[k + radius] * img.at(xx, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  ImageBuffer out = ImageBuffer::make(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = clamp_coord(y + k, h);
          acc += kernel[k + radius] *
                 tmp[(static_cast<std::size_t>(yy) * w + x) * ch + c];
        }
        out.at(x, y, c) = quantize(acc);
      }
    }
  }
  return out;
}

namespace {

// splitmix64 output for the (index+1)-th state of a stream seeded with
// `seed`. Counter-based: any sample is computable independently.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

ImageBuffer additive_noise(const ImageBuffer& img, double sigma,
                           std::uint64_t seed) {
  if (sigma < 1e-12) {
    return img;
  }
  ImageBuffer out = img;
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    // Box-Muller from two counter draws; u1 in (0,1], u2 in [0,1).
    const double u1 =
        (static_cast<double>(splitmix64_at(seed, 2 * i) >> 11) + 1.0) * 0x1p-53;
    const double u2 =
        static_cast<double>(splitmix64_at(seed, 2 * i + 1) >> 11) * 0x1p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    out.data[i] = quantize(static_cast<double>(img.data[i]) + sigma * z);
  }
  return out;
}

ImageBuffer pixelate(const ImageBuffer& img, int block) {
  if (block < 1) {
    throw Error(ErrorCode::ParseError, "pixelate block must be >= 1");
  }
  if (block == 1) {
    return img;
  }
  const int w = img.width, h = img.height, ch = img.channels;
  ImageBuffer out = ImageBuffer::make(w, h, ch);
  for (int by = 0; by < h; by += block) {
    const int bh = std::min(block, h - by);
    for (int bx = 0; bx < w; bx += block) {
      const int bw = std::min(block, w - bx);
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int y = 0; y < bh; ++y) {
          for (int x = 0; x < bw; ++x) {
            acc += img.at(bx + x, by + y, c);
          }
        }
        const std::uint8_t mean = quantize(acc / (bw * bh));
        for (int y = 0; y < bh; ++y) {
          for (int x = 0; x < bw; ++x) {
            out.at(bx + x, by + y, c) = mean;
          }
        }
      }
    }
  }
  return out;
}

ImageBuffer apply(const ImageBuffer& img, const FilterSpec& spec) {
  switch (spec.method) {
    case Method::Blur:
      return gaussian_blur(img, spec.intensity);
    case Method::Noise:
      return additive_noise(img, spec.intensity, spec.seed);
    case Method::Pixelate:
      return pixelate(img, static_cast<int>(std::lround(spec.intensity)));
  }
  return img;
}

std::vector<SweepEntry> sweep(
    const std::vector<std::pair<std::string, ImageBuffer>>& corpus,
    const std::vector<FilterSpec>& specs) {
  std::vector<const FilterSpec*> ordered;
  ordered.reserve(specs.size());
  for (const auto& s : specs) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const FilterSpec* a, const FilterSpec* b) {
                     if (a->method != b->method) return a->method < b->method;
                     return a->intensity < b->intensity;
                   });
  std::vector<int> image_order(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) image_order[i] = static_cast<int>(i);
  std::sort(image_order.begin(), image_order.end(), [&](int a, int b) {
    return corpus[a].first < corpus[b].first;
  });

  std::vector<SweepEntry> entries;
  entries.reserve(specs.size() * corpus.size());
  for (const FilterSpec* spec : ordered) {
    for (int idx : image_order) {
      entries.push_back(
          {corpus[idx].first, *spec, apply(corpus[idx].second, *spec)});
    }
  }
  return entries;
}

std::vector<FilterSpec> default_sweep_specs(std::uint64_t seed) {
  std::vector<FilterSpec> specs;
  for (double s : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    specs.push_back({Method::Blur, s, 0});
  }
  for (double s : {10.0, 25.0, 50.0, 75.0, 100.0}) {
    specs.push_back({Method::Noise, s, seed});
  }
  for (double b : {2.0, 4.0, 8.0, 16.0, 32.0}) {
    specs.push_back({Method::Pixelate, b, 0});
  }
  return specs;
}

}  // namespace ergopipe::filters
