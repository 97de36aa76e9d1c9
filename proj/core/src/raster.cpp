#include "chaos/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace chaos {

Raster::Raster(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("Raster: negative extent");
  data.assign(static_cast<std::size_t>(w) * h * kChannels, fill);
}

bool operator==(const Raster& a, const Raster& b) {
  return a.width == b.width && a.height == b.height && a.data == b.data;
}

NormRaster::NormRaster(int w, int h, float fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("NormRaster: negative extent");
  data.assign(static_cast<std::size_t>(w) * h * kChannels, fill);
}

std::uint8_t quantize_unit(double v) {
  if (v <= 0.0) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

NormRaster to_norm(const Raster& img) {
  NormRaster out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = static_cast<float>(img.data[i]) / 255.0f;
  }
  return out;
}

Raster to_8bit(const NormRaster& img) {
  Raster out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = quantize_unit(img.data[i]);
  }
  return out;
}

Raster invert(const Raster& img) {
  Raster out = img;
  for (auto& v : out.data) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

}  // namespace chaos
