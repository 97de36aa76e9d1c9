#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chaos {

// 8-bit RGB image, row-major, interleaved channels. All perturbation
// operators consume and produce this type; grayscale and paletted inputs
// are expanded on decode.
struct Raster {
  static constexpr int kChannels = 3;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Raster() = default;
  Raster(int w, int h, std::uint8_t fill = 255);

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }

  std::size_t sample_count() const { return data.size(); }
  bool same_shape(const Raster& other) const {
    return width == other.width && height == other.height;
  }
  bool empty() const { return data.empty(); }
};

bool operator==(const Raster& a, const Raster& b);

// Float view on [0,1], same layout. Some operators are defined on the
// normalized scale; this is the exchange type for them.
struct NormRaster {
  static constexpr int kChannels = 3;

  int width = 0;
  int height = 0;
  std::vector<float> data;

  NormRaster() = default;
  NormRaster(int w, int h, float fill = 1.0f);

  float& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
  float at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
};

// Quantization used everywhere when going back to 8 bit: clamp to [0,1],
// scale by 255, round half up.
std::uint8_t quantize_unit(double v);

NormRaster to_norm(const Raster& img);
Raster to_8bit(const NormRaster& img);

Raster invert(const Raster& img);

}  // namespace chaos
