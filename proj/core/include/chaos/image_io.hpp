#pragma once

#include <filesystem>

#include "chaos/raster.hpp"

namespace chaos {

// Decode PNG or JPEG (sniffed by magic bytes) into 8-bit RGB. Grayscale
// and paletted images are expanded; alpha is composited over white.
Raster read_image(const std::filesystem::path& file);

Raster read_png(const std::filesystem::path& file);
Raster read_jpeg(const std::filesystem::path& file);

// 8-bit RGB PNG with fixed encoder settings and no ancillary chunks, so
// identical rasters produce identical bytes.
void write_png(const Raster& img, const std::filesystem::path& file);

}  // namespace chaos
