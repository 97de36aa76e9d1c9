#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "chaos/rng.hpp"

namespace testsupport {

using chaos::Raster;

namespace {

void put(Raster& img, int x, int y, int r, int g, int b) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.at(x, y, 0) = static_cast<std::uint8_t>(r);
  img.at(x, y, 1) = static_cast<std::uint8_t>(g);
  img.at(x, y, 2) = static_cast<std::uint8_t>(b);
}

}  // namespace

Raster make_chart_fixture(int w, int h, std::uint64_t seed) {
  Raster img(w, h, 255);
  chaos::RngStream rng(seed);
  int left = w / 10, bottom = h - h / 8, top = h / 12;
  for (int x = left; x < w - 2; ++x) put(img, x, bottom, 35, 35, 35);
  for (int y = top; y <= bottom; ++y) put(img, left, y, 35, 35, 35);
  for (int t = 1; t <= 4; ++t) {
    int y = top + t * (bottom - top) / 5;
    for (int x = left - 2; x < left; ++x) put(img, x, y, 35, 35, 35);
  }
  int bars = 3 + static_cast<int>(rng.uniform_below(4));
  int slot = (w - left - 4) / bars;
  int bw = std::max(2, slot * 3 / 5);
  for (int b = 0; b < bars; ++b) {
    int bh = rng.uniform_int((bottom - top) / 5, bottom - top - 2);
    int r = static_cast<int>(rng.uniform_below(210));
    int g = static_cast<int>(rng.uniform_below(210));
    int bl = static_cast<int>(rng.uniform_below(210));
    int x0 = left + 2 + b * slot;
    for (int x = x0; x < x0 + bw && x < w - 1; ++x)
      for (int y = bottom - bh; y < bottom; ++y) put(img, x, y, r, g, bl);
  }
  int py = rng.uniform_int(top + 2, bottom - 2);
  for (int x = left + 1; x < w - 2; ++x) {
    if (x % 7 == 0) py += rng.uniform_int(-3, 3);
    int y = std::clamp(py, top, bottom - 1);
    put(img, x, y, 190, 40, 40);
  }
  return img;
}

double mean_abs_diff(const Raster& a, const Raster& b) {
  if (!a.same_shape(b) || a.data.size() != b.data.size()) {
    throw std::invalid_argument("mean_abs_diff: shape mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    sum += std::abs(static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]));
  }
  return a.data.empty() ? 0.0 : sum / static_cast<double>(a.data.size());
}

std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  auto base = std::filesystem::temp_directory_path();
  path_ = base / ("chaos-test-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace testsupport
