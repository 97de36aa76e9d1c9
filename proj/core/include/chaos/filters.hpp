#pragma once

#include <vector>

#include "chaos/raster.hpp"

namespace chaos {

// Dense 2-D convolution kernel, row-major, odd extents.
struct Kernel2D {
  int width = 0;
  int height = 0;
  std::vector<double> weights;

  double& at(int x, int y) { return weights[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return weights[static_cast<std::size_t>(y) * width + x]; }
  double sum() const;
};

// 1-D Gaussian taps, odd length 2*ceil(3*sigma)+1, normalized to sum 1.
// sigma == 0 yields the identity tap {1}.
std::vector<double> gaussian_taps(double sigma);

Kernel2D gaussian_kernel(double sigma);

// Rasterized line of `length` unit weights through the kernel center at
// `angle_deg`, normalized by length. length must be odd and >= 1.
Kernel2D motion_line_kernel(int length, double angle_deg);

// Convolution with symmetric reflect padding, per channel, double
// accumulation, round half up.
Raster convolve(const Raster& img, const Kernel2D& kernel);

// Separable Gaussian with the same border policy as convolve(); equal to
// convolve(img, gaussian_kernel(sigma)) up to quantization.
Raster gaussian_blur(const Raster& img, double sigma);

// In-place separable Gaussian on a single float plane (reflect padding).
void gaussian_blur_plane(std::vector<float>& plane, int w, int h, double sigma);

// Bilinear resampling to an arbitrary size (used for the morphology
// upscale). Geometry follows the usual pixel-center convention:
// src = (dst + 0.5) * scale - 0.5, clamped to the source rect.
Raster resize_bilinear(const Raster& img, int out_w, int out_h);

// Exact factor x factor block average (inverse of the 10x upscale step).
// Source dimensions must be divisible by factor.
Raster downscale_area(const Raster& img, int factor);

// Structuring elements as offset lists.
using Element = std::vector<std::pair<int, int>>;
Element disk_element(int diameter);    // ox^2 + oy^2 <= r^2, r = (d-1)/2
Element square_element(int side);      // full side x side box (test hook)

// Grayscale-per-channel morphology. Erosion takes the window minimum over
// A(x+ox, y+oy), dilation the maximum over A(x-ox, y-oy); out-of-bounds
// taps are skipped, which preserves the erosion/dilation duality under
// complement exactly.
Raster erode(const Raster& img, const Element& element);
Raster dilate(const Raster& img, const Element& element);

}  // namespace chaos
