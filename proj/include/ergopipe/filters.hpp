#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ergopipe/types.hpp"

namespace ergopipe::filters {

enum class Method { Blur, Noise, Pixelate };

const char* method_name(Method method);
Method method_from_name(const std::string& name);

struct FilterSpec {
  Method method = Method::Blur;
  double intensity = 0.0;  // blur: sigma px, noise: sigma sample units,
                           // pixelate: block size px
  std::uint64_t seed = 0;  // noise only
};

// Separable Gaussian blur, kernel radius ceil(3*sigma), clamp-to-edge
// borders. sigma below 1e-6 copies the input.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);

// I.i.d. Gaussian noise per sample from the splitmix64 counter stream
// (see filters.cpp for the exact mapping), clamped and rounded.
ImageBuffer additive_noise(const ImageBuffer& img, double sigma,
                           std::uint64_t seed);

// Block-mean downsample (partial edge blocks use their actual extent)
// followed by nearest-neighbor upsample.
ImageBuffer pixelate(const ImageBuffer& img, int block);

ImageBuffer apply(const ImageBuffer& img, const FilterSpec& spec);

struct SweepEntry {
  std::string image_id;
  FilterSpec spec;
  ImageBuffer output;
};

// Applies every spec to every image. Entries are ordered by
// (method, intensity, image_id) so manifests are reproducible.
std::vector<SweepEntry> sweep(
    const std::vector<std::pair<std::string, ImageBuffer>>& corpus,
    const std::vector<FilterSpec>& specs);

// Default intensity grids for the tradeoff sweep.
std::vector<FilterSpec> default_sweep_specs(std::uint64_t seed);

}  // namespace ergopipe::filters
