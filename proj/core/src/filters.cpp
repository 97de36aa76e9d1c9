#include "chaos/filters.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <stdexcept>

namespace chaos {

namespace {

// Symmetric reflection (edge sample repeated): -1 -> 0, n -> n-1.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

std::uint8_t round_sample(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

}  // namespace

double Kernel2D::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::vector<double> gaussian_taps(double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_taps: sigma < 0");
  if (sigma == 0.0) return {1.0};
  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    double w = std::exp(-0.5 * (t / sigma) * (t / sigma));
    taps[t + radius] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

Kernel2D gaussian_kernel(double sigma) {
  std::vector<double> taps = gaussian_taps(sigma);
  int n = static_cast<int>(taps.size());
  Kernel2D k;
  k.width = n;
  k.height = n;
  k.weights.resize(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) k.at(x, y) = taps[x] * taps[y];
  }
  return k;
}

Kernel2D motion_line_kernel(int length, double angle_deg) {
  if (length < 1 || length % 2 == 0) {
    throw std::invalid_argument("motion_line_kernel: length must be odd >= 1");
  }
  int r = (length - 1) / 2;
  int n = 2 * r + 1;
  Kernel2D k;
  k.width = n;
  k.height = n;
  k.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
  double rad = angle_deg * std::numbers::pi / 180.0;
  double cx = std::cos(rad), cy = std::sin(rad);
  double w = 1.0 / length;
  for (int i = 0; i < length; ++i) {
    int t = i - r;
    int px = r + static_cast<int>(std::lround(t * cx));
    int py = r + static_cast<int>(std::lround(t * cy));
    k.at(px, py) += w;
  }
  return k;
}

Raster convolve(const Raster& img, const Kernel2D& kernel) {
  if (kernel.width < 1 || kernel.height < 1 || kernel.width % 2 == 0 ||
      kernel.height % 2 == 0) {
    throw std::invalid_argument("convolve: kernel extents must be odd >= 1");
  }
  // Applied as correlation; every kernel built here is symmetric under
  // 180-degree rotation, so the distinction is moot.
  int rx = kernel.width / 2, ry = kernel.height / 2;
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int ky = 0; ky < kernel.height; ++ky) {
        int sy = reflect_index(y + ky - ry, img.height);
        for (int kx = 0; kx < kernel.width; ++kx) {
          double w = kernel.at(kx, ky);
          if (w == 0.0) continue;
          int sx = reflect_index(x + kx - rx, img.width);
          for (int c = 0; c < Raster::kChannels; ++c) {
            acc[c] += w * img.at(sx, sy, c);
          }
        }
      }
      for (int c = 0; c < Raster::kChannels; ++c) {
        out.at(x, y, c) = round_sample(acc[c]);
      }
    }
  }
  return out;
}

Raster gaussian_blur(const Raster& img, double sigma) {
  std::vector<double> taps = gaussian_taps(sigma);
  if (taps.size() == 1) return img;
  int r = static_cast<int>(taps.size()) / 2;
  std::size_t n = img.data.size();
  std::vector<double> tmp(n);
  // horizontal
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int t = -r; t <= r; ++t) {
        int sx = reflect_index(x + t, img.width);
        double w = taps[t + r];
        for (int c = 0; c < Raster::kChannels; ++c) {
          acc[c] += w * img.at(sx, y, c);
        }
      }
      std::size_t base = (static_cast<std::size_t>(y) * img.width + x) * 3;
      for (int c = 0; c < 3; ++c) tmp[base + c] = acc[c];
    }
  }
  // vertical, quantize once at the end
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int t = -r; t <= r; ++t) {
        int sy = reflect_index(y + t, img.height);
        double w = taps[t + r];
        std::size_t base = (static_cast<std::size_t>(sy) * img.width + x) * 3;
        for (int c = 0; c < 3; ++c) acc[c] += w * tmp[base + c];
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = round_sample(acc[c]);
    }
  }
  return out;
}

void gaussian_blur_plane(std::vector<float>& plane, int w, int h,
                         double sigma) {
  if (static_cast<std::size_t>(w) * h != plane.size()) {
    throw std::invalid_argument("gaussian_blur_plane: size mismatch");
  }
  std::vector<double> taps = gaussian_taps(sigma);
  if (taps.size() == 1) return;
  int r = static_cast<int>(taps.size()) / 2;
  std::vector<double> tmp(plane.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) {
        acc += taps[t + r] * plane[static_cast<std::size_t>(y) * w +
                                   reflect_index(x + t, w)];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) {
        acc += taps[t + r] * tmp[static_cast<std::size_t>(reflect_index(y + t, h)) * w + x];
      }
      plane[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
    }
  }
}

Raster resize_bilinear(const Raster& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw std::invalid_argument("resize_bilinear: bad output size");
  }
  if (img.width < 1 || img.height < 1) {
    throw std::invalid_argument("resize_bilinear: empty input");
  }
  if (out_w == img.width && out_h == img.height) return img;
  Raster out(out_w, out_h);
  double sx_scale = static_cast<double>(img.width) / out_w;
  double sy_scale = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double sy = (y + 0.5) * sy_scale - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int ya = clamp_index(y0, img.height);
    int yb = clamp_index(y0 + 1, img.height);
    for (int x = 0; x < out_w; ++x) {
      double sx = (x + 0.5) * sx_scale - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int xa = clamp_index(x0, img.width);
      int xb = clamp_index(x0 + 1, img.width);
      for (int c = 0; c < Raster::kChannels; ++c) {
        double top = img.at(xa, ya, c) * (1.0 - fx) + img.at(xb, ya, c) * fx;
        double bot = img.at(xa, yb, c) * (1.0 - fx) + img.at(xb, yb, c) * fx;
        out.at(x, y, c) = round_sample(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  return out;
}

Raster downscale_area(const Raster& img, int factor) {
  if (factor < 1) throw std::invalid_argument("downscale_area: factor < 1");
  if (factor == 1) return img;
  if (img.width % factor != 0 || img.height % factor != 0) {
    throw std::invalid_argument(
        "downscale_area: extents not divisible by factor");
  }
  int ow = img.width / factor, oh = img.height / factor;
  Raster out(ow, oh);
  const int n = factor * factor;
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      long sum[3] = {0, 0, 0};
      for (int by = 0; by < factor; ++by) {
        for (int bx = 0; bx < factor; ++bx) {
          for (int c = 0; c < Raster::kChannels; ++c) {
            sum[c] += img.at(x * factor + bx, y * factor + by, c);
          }
        }
      }
      for (int c = 0; c < Raster::kChannels; ++c) {
        // round half up on the exact rational sum / n
        out.at(x, y, c) =
            static_cast<std::uint8_t>((2 * sum[c] + n) / (2 * n));
      }
    }
  }
  return out;
}

Element disk_element(int diameter) {
  if (diameter < 1 || diameter % 2 == 0) {
    throw std::invalid_argument("disk_element: diameter must be odd >= 1");
  }
  int r = (diameter - 1) / 2;
  Element e;
  for (int oy = -r; oy <= r; ++oy) {
    for (int ox = -r; ox <= r; ++ox) {
      if (ox * ox + oy * oy <= r * r) e.emplace_back(ox, oy);
    }
  }
  return e;
}

Element square_element(int side) {
  if (side < 1 || side % 2 == 0) {
    throw std::invalid_argument("square_element: side must be odd >= 1");
  }
  int r = (side - 1) / 2;
  Element e;
  for (int oy = -r; oy <= r; ++oy) {
    for (int ox = -r; ox <= r; ++ox) e.emplace_back(ox, oy);
  }
  return e;
}

namespace {

struct RowRun {
  int oy;
  int lo;  // inclusive column offsets
  int hi;
};

// Convex elements decompose into one contiguous run per row, which lets
// the filter drop from O(|element|) to O(rows) per pixel via sliding
// window extrema.
bool decompose_runs(const Element& element, std::vector<RowRun>& runs) {
  std::map<int, std::pair<int, int>> bounds;  // oy -> (lo, hi)
  std::map<int, int> count;
  for (auto [ox, oy] : element) {
    auto it = bounds.find(oy);
    if (it == bounds.end()) {
      bounds[oy] = {ox, ox};
    } else {
      it->second.first = std::min(it->second.first, ox);
      it->second.second = std::max(it->second.second, ox);
    }
    ++count[oy];
  }
  runs.clear();
  for (auto& [oy, b] : bounds) {
    if (count[oy] != b.second - b.first + 1) return false;  // holes
    runs.push_back({oy, b.first, b.second});
  }
  return true;
}

template <bool kMin>
inline bool better(std::uint8_t a, std::uint8_t b) {
  return kMin ? a < b : a > b;
}

// Sliding-window extremum over columns [x+lo, x+hi] for one row of one
// channel; out-of-bounds columns are simply absent from the window.
template <bool kMin>
void row_extrema(const std::uint8_t* row, int w, int lo, int hi,
                 std::uint8_t* out) {
  std::deque<int> q;  // indices with non-improvable values, front = best
  int next = lo;      // next source column to admit
  for (int x = 0; x < w; ++x) {
    int hi_col = x + hi;
    for (; next <= hi_col; ++next) {
      if (next < 0 || next >= w) continue;
      // drop entries the newcomer dominates (ties included: the newer
      // index survives longer in the window)
      while (!q.empty() && !better<kMin>(row[q.back()], row[next])) {
        q.pop_back();
      }
      q.push_back(next);
    }
    while (!q.empty() && q.front() < x + lo) q.pop_front();
    out[x] = q.empty() ? (kMin ? 255 : 0) : row[q.front()];
  }
}

template <bool kMin>
Raster morph(const Raster& img, const Element& element) {
  if (element.empty()) throw std::invalid_argument("morph: empty element");
  Raster out(img.width, img.height);
  std::vector<RowRun> runs;
  const bool fast = decompose_runs(element, runs);
  const int w = img.width, h = img.height;

  std::vector<std::uint8_t> plane(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> rowbuf(w);

  for (int c = 0; c < Raster::kChannels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        plane[static_cast<std::size_t>(y) * w + x] = img.at(x, y, c);
      }
    }
    if (fast) {
      // Horizontal pass per distinct (lo,hi), then vertical combine.
      std::map<std::pair<int, int>, std::vector<std::uint8_t>> horiz;
      for (const RowRun& run : runs) {
        auto key = std::make_pair(run.lo, run.hi);
        if (horiz.count(key)) continue;
        std::vector<std::uint8_t> p(static_cast<std::size_t>(w) * h);
        for (int y = 0; y < h; ++y) {
          row_extrema<kMin>(&plane[static_cast<std::size_t>(y) * w], w,
                            run.lo, run.hi,
                            &p[static_cast<std::size_t>(y) * w]);
        }
        horiz.emplace(key, std::move(p));
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) rowbuf[x] = kMin ? 255 : 0;
        bool any = false;
        for (const RowRun& run : runs) {
          int sy = y + run.oy;
          if (sy < 0 || sy >= h) continue;
          any = true;
          const std::uint8_t* src =
              &horiz.at({run.lo, run.hi})[static_cast<std::size_t>(sy) * w];
          for (int x = 0; x < w; ++x) {
            if (better<kMin>(src[x], rowbuf[x])) rowbuf[x] = src[x];
          }
        }
        // With in-bounds anchor rows always present `any` only guards
        // degenerate geometry (element taller than the image).
        for (int x = 0; x < w; ++x) {
          out.at(x, y, c) = any ? rowbuf[x] : img.at(x, y, c);
        }
      }
    } else {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          int best = -1;
          for (auto [ox, oy] : element) {
            int sx = x + ox, sy = y + oy;
            if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
            int v = plane[static_cast<std::size_t>(sy) * w + sx];
            if (best < 0 || better<kMin>(static_cast<std::uint8_t>(v),
                                         static_cast<std::uint8_t>(best))) {
              best = v;
            }
          }
          out.at(x, y, c) =
              best < 0 ? img.at(x, y, c) : static_cast<std::uint8_t>(best);
        }
      }
    }
  }
  return out;
}

Element negate(const Element& element) {
  Element e;
  e.reserve(element.size());
  for (auto [ox, oy] : element) e.emplace_back(-ox, -oy);
  return e;
}

}  // namespace

Raster erode(const Raster& img, const Element& element) {
  return morph<true>(img, element);
}

Raster dilate(const Raster& img, const Element& element) {
  // (A (+) B)(x) = max over A(x - b); realized by running the max filter
  // with the reflected element.
  return morph<false>(img, negate(element));
}

}  // namespace chaos
