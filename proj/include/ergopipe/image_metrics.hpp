#pragma once

#include "ergopipe/types.hpp"

namespace ergopipe::metrics {

// Peak signal-to-noise ratio in dB over all samples; +infinity for
// identical images. Throws ShapeMismatch.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Structural similarity: 11x11 Gaussian window (sigma 1.5), valid region
// only, channels averaged. Throws ShapeMismatch / ImageTooSmall.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace ergopipe::metrics
