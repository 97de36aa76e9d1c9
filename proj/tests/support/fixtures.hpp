#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "chaos/raster.hpp"

namespace testsupport {

// Deterministic synthetic chart: white background, dark axes, a few solid
// bars, a polyline and tick marks. Seed varies bar heights and colors.
chaos::Raster make_chart_fixture(int w, int h, std::uint64_t seed);

double mean_abs_diff(const chaos::Raster& a, const chaos::Raster& b);

std::string read_file_bytes(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);

// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
