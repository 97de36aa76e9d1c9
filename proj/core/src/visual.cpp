#include "chaos/visual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaos {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint8_t round_sample(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Bilinear fetch with reads clamped to the image rect.
double sample_clamped(const Raster& img, double sx, double sy, int c) {
  int x0 = static_cast<int>(std::floor(sx));
  int y0 = static_cast<int>(std::floor(sy));
  double fx = sx - x0, fy = sy - y0;
  int xa = clamp_index(x0, img.width), xb = clamp_index(x0 + 1, img.width);
  int ya = clamp_index(y0, img.height), yb = clamp_index(y0 + 1, img.height);
  double top = img.at(xa, ya, c) * (1.0 - fx) + img.at(xb, ya, c) * fx;
  double bot = img.at(xa, yb, c) * (1.0 - fx) + img.at(xb, yb, c) * fx;
  return top * (1.0 - fy) + bot * fy;
}

int int_param(const PerturbationSpec& spec, std::string_view name) {
  return static_cast<int>(std::lround(spec.param(name)));
}

int int_param(const PerturbationSpec& spec, std::string_view name, double dflt) {
  return static_cast<int>(std::lround(spec.param(name, dflt)));
}

void require_nonempty(const Raster& img, const char* op) {
  if (img.width < 1 || img.height < 1 || img.data.empty()) {
    throw std::invalid_argument(std::string(op) + ": empty raster");
  }
}

// Peak response of the discrete Gaussian to a unit impulse; used to give
// blurred seed points a predictable amplitude.
double impulse_peak(double sigma) {
  std::vector<double> taps = gaussian_taps(sigma);
  double center = taps[taps.size() / 2];
  return center * center;
}

}  // namespace

// ----- warping -----

DisplacementField make_displacement_field(int w, int h, double max_disp,
                                          double field_sigma, RngStream& rng) {
  if (w < 1 || h < 1) throw std::invalid_argument("displacement field: empty");
  if (max_disp < 0) throw std::invalid_argument("displacement field: max_disp < 0");
  if (field_sigma <= 0) throw std::invalid_argument("displacement field: field_sigma <= 0");
  DisplacementField f;
  f.width = w;
  f.height = h;
  std::size_t n = static_cast<std::size_t>(w) * h;
  f.dx.resize(n);
  f.dy.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.dx[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (std::size_t i = 0; i < n; ++i) f.dy[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  gaussian_blur_plane(f.dx, w, h, field_sigma);
  gaussian_blur_plane(f.dy, w, h, field_sigma);
  // joint rescale so the largest component magnitude hits max_disp
  float m = 0.0f;
  for (float v : f.dx) m = std::max(m, std::abs(v));
  for (float v : f.dy) m = std::max(m, std::abs(v));
  if (m == 0.0f || max_disp == 0.0) {
    std::fill(f.dx.begin(), f.dx.end(), 0.0f);
    std::fill(f.dy.begin(), f.dy.end(), 0.0f);
  } else {
    float s = static_cast<float>(max_disp) / m;
    for (float& v : f.dx) v *= s;
    for (float& v : f.dy) v *= s;
  }
  return f;
}

Raster warp_with_field(const Raster& img, const DisplacementField& field) {
  if (field.width != img.width || field.height != img.height) {
    throw std::invalid_argument("warp_with_field: field/raster shape mismatch");
  }
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      double sx = x + field.dx[i];
      double sy = y + field.dy[i];
      sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
      sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
      for (int c = 0; c < Raster::kChannels; ++c) {
        out.at(x, y, c) = round_sample(sample_clamped(img, sx, sy, c));
      }
    }
  }
  return out;
}

// ----- occlusion -----

namespace {

struct P2 {
  double x, y;
};

double cross(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone chain; returns counterclockwise hull (y axis pointing down
// flips handedness consistently, which the inside test absorbs).
std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const P2& a, const P2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  if (pts.size() < 3) return {};
  std::vector<P2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull.size() >= 3 ? hull : std::vector<P2>{};
}

bool inside_hull(const std::vector<P2>& hull, double px, double py) {
  P2 p{px, py};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < 0) return false;
  }
  return true;
}

}  // namespace

OcclusionMask make_occlusion_mask(int w, int h, int polygon_count,
                                  double mask_sigma, RngStream& rng) {
  if (w < 1 || h < 1) throw std::invalid_argument("occlusion mask: empty");
  if (polygon_count < 0) throw std::invalid_argument("occlusion mask: negative count");
  if (mask_sigma < 0) throw std::invalid_argument("occlusion mask: sigma < 0");
  OcclusionMask mask;
  mask.width = w;
  mask.height = h;
  mask.values.assign(static_cast<std::size_t>(w) * h, 1.0f);
  double min_dim = std::min(w, h);
  for (int poly = 0; poly < polygon_count; ++poly) {
    // pinned draw order: center, mean radius, vertex count, then
    // (angle, radius) per vertex
    double cx = rng.uniform(0.0, w);
    double cy = rng.uniform(0.0, h);
    double r_mean = rng.uniform(0.08, 0.25) * min_dim;
    int k = rng.uniform_int(3, 8);
    std::vector<P2> pts(k);
    for (int j = 0; j < k; ++j) {
      double ang = rng.uniform(0.0, 2.0 * kPi);
      double rad = r_mean * rng.uniform(0.7, 1.3);
      pts[j] = {cx + rad * std::cos(ang), cy + rad * std::sin(ang)};
    }
    std::vector<P2> hull = convex_hull(std::move(pts));
    if (hull.empty()) continue;
    double lox = hull[0].x, hix = hull[0].x, loy = hull[0].y, hiy = hull[0].y;
    for (const P2& p : hull) {
      lox = std::min(lox, p.x);
      hix = std::max(hix, p.x);
      loy = std::min(loy, p.y);
      hiy = std::max(hiy, p.y);
    }
    int x0 = std::max(0, static_cast<int>(std::floor(lox)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(hix)));
    int y0 = std::max(0, static_cast<int>(std::floor(loy)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(hiy)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (inside_hull(hull, x, y)) {
          mask.values[static_cast<std::size_t>(y) * w + x] = 0.0f;
        }
      }
    }
  }
  if (mask_sigma > 0) gaussian_blur_plane(mask.values, w, h, mask_sigma);
  for (float& v : mask.values) v = std::clamp(v, 0.0f, 1.0f);
  return mask;
}

Raster apply_occlusion(const Raster& img, const OcclusionMask& mask,
                       ObstacleMode mode, double factor) {
  if (mask.width != img.width || mask.height != img.height) {
    throw std::invalid_argument("apply_occlusion: mask/raster shape mismatch");
  }
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double m = mask.values[static_cast<std::size_t>(y) * img.width + x];
      for (int c = 0; c < Raster::kChannels; ++c) {
        double v = img.at(x, y, c);
        // shadow: straight pixel-wise product, black inside the blobs;
        // glare: additive lift toward white inside the blobs
        double r = mode == ObstacleMode::shadow
                       ? factor * v * m
                       : v + (factor - 1.0) * 255.0 * (1.0 - m);
        out.at(x, y, c) = round_sample(r);
      }
    }
  }
  return out;
}

// ----- speckle -----

BlobNoise make_blob_noise(int w, int h, double density, double blob_sigma,
                          double strength, RngStream& rng) {
  if (w < 1 || h < 1) throw std::invalid_argument("blob noise: empty");
  if (density < 0.0 || density > 1.0) {
    throw std::invalid_argument("blob noise: density outside [0,1]");
  }
  if (strength <= 0.0) throw std::invalid_argument("blob noise: strength <= 0");
  if (blob_sigma < 0.0) throw std::invalid_argument("blob noise: sigma < 0");
  BlobNoise n;
  n.width = w;
  n.height = h;
  std::size_t size = static_cast<std::size_t>(w) * h;
  n.foreground.assign(size, 0.0f);
  n.background.assign(size, 0.0f);
  long seeds = std::lround(density * static_cast<double>(w) * h);
  double gain = strength / impulse_peak(blob_sigma);
  // Independent substreams per plane: the seed list for a low density is
  // a prefix of the list for a higher one under the same parent stream.
  struct PlaneJob {
    const char* label;
    std::vector<float>* plane;
  };
  for (PlaneJob job : {PlaneJob{"fg", &n.foreground}, PlaneJob{"bg", &n.background}}) {
    RngStream sub = rng.fork(job.label);
    for (long i = 0; i < seeds; ++i) {
      std::uint32_t x = sub.uniform_below(static_cast<std::uint32_t>(w));
      std::uint32_t y = sub.uniform_below(static_cast<std::uint32_t>(h));
      (*job.plane)[static_cast<std::size_t>(y) * w + x] += 1.0f;
    }
    if (blob_sigma > 0) gaussian_blur_plane(*job.plane, w, h, blob_sigma);
    for (float& v : *job.plane) {
      v = std::clamp(static_cast<float>(v * gain), 0.0f, 1.0f);
    }
  }
  return n;
}

Raster apply_blob_noise(const Raster& img, const BlobNoise& noise) {
  if (noise.width != img.width || noise.height != img.height) {
    throw std::invalid_argument("apply_blob_noise: shape mismatch");
  }
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      double fg = noise.foreground[i];
      double ceiling = 1.0 - noise.background[i];
      for (int c = 0; c < Raster::kChannels; ++c) {
        double v = img.at(x, y, c) / 255.0;
        double r = std::min(std::max(v, fg), ceiling);
        out.at(x, y, c) = quantize_unit(r);
      }
    }
  }
  return out;
}

// ----- paper texture -----

FiberTexture make_fiber_texture(int w, int h, int fiber_count,
                                double grain_noise, RngStream& rng) {
  if (w < 1 || h < 1) throw std::invalid_argument("fiber texture: empty");
  if (fiber_count < 0) throw std::invalid_argument("fiber texture: negative count");
  if (grain_noise < 0) throw std::invalid_argument("fiber texture: grain_noise < 0");
  constexpr double kGrainBase = 0.93;
  constexpr double kFiberSigma = 0.8;
  FiberTexture t;
  t.width = w;
  t.height = h;
  std::size_t size = static_cast<std::size_t>(w) * h;
  t.grain.resize(size);
  RngStream grain = rng.fork("grain");
  for (std::size_t i = 0; i < size; ++i) {
    double g = kGrainBase + grain_noise * (2.0 * grain.uniform() - 1.0);
    t.grain[i] = static_cast<float>(std::clamp(g, 0.0, 1.0));
  }
  t.mask.assign(size, 0.0f);
  RngStream fibers = rng.fork("fibers");
  double min_dim = std::min(w, h);
  for (int f = 0; f < fiber_count; ++f) {
    // pinned draw order: start, heading, length, curl
    double x = fibers.uniform(0.0, w);
    double y = fibers.uniform(0.0, h);
    double heading = fibers.uniform(0.0, 2.0 * kPi);
    double len = fibers.uniform(0.1, 0.35) * min_dim;
    double curl = fibers.uniform(-0.05, 0.05);
    int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int s = 0; s < steps; ++s) {
      int px = static_cast<int>(std::lround(x));
      int py = static_cast<int>(std::lround(y));
      if (px >= 0 && px < w && py >= 0 && py < h) {
        t.mask[static_cast<std::size_t>(py) * w + px] = 1.0f;
      }
      x += std::cos(heading);
      y += std::sin(heading);
      heading += curl;
    }
  }
  if (fiber_count > 0) {
    gaussian_blur_plane(t.mask, w, h, kFiberSigma);
    float gain = static_cast<float>(1.0 / impulse_peak(kFiberSigma));
    for (float& v : t.mask) v = std::clamp(v * gain, 0.0f, 1.0f);
  }
  return t;
}

Raster blend_texture(const Raster& img, const FiberTexture& texture,
                     double blend) {
  if (texture.width != img.width || texture.height != img.height) {
    throw std::invalid_argument("blend_texture: shape mismatch");
  }
  if (blend < 0.0 || blend > 1.0) {
    throw std::invalid_argument("blend_texture: blend outside [0,1]");
  }
  Raster out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      double m = texture.mask[i];
      double layer = m * texture.ink_tone + (1.0 - m) * texture.grain[i];
      for (int c = 0; c < Raster::kChannels; ++c) {
        double v = img.at(x, y, c) / 255.0;
        out.at(x, y, c) = quantize_unit(blend * v + (1.0 - blend) * layer);
      }
    }
  }
  return out;
}

// ----- rigid move -----

Raster rigid_transform_white(const Raster& img, double angle_deg, double tx,
                             double ty) {
  require_nonempty(img, "rigid_transform_white");
  Raster out(img.width, img.height, 255);
  double rad = angle_deg * kPi / 180.0;
  // cos(pi/2) evaluates to ~6e-17 rather than zero, which would nudge
  // border samples out of frame; snap so right angles permute the grid
  // exactly instead of bleeding white at the edges.
  auto snap = [](double v) {
    for (double t : {-1.0, 0.0, 1.0}) {
      if (std::abs(v - t) < 1e-12) return t;
    }
    return v;
  };
  double ct = snap(std::cos(rad)), st = snap(std::sin(rad));
  double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double u = x - cx, v = y - cy;
      // inverse rotation, then undo the translation
      double sx = ct * u + st * v + cx - tx;
      double sy = -st * u + ct * v + cy - ty;
      if (sx < 0.0 || sx > img.width - 1 || sy < 0.0 || sy > img.height - 1) {
        continue;  // stays white
      }
      for (int c = 0; c < Raster::kChannels; ++c) {
        out.at(x, y, c) = round_sample(sample_clamped(img, sx, sy, c));
      }
    }
  }
  return out;
}

// ----- blur / morphology / fade wrappers -----

Raster motion_blur(const Raster& img, int length, double angle_deg) {
  require_nonempty(img, "motion_blur");
  return convolve(img, motion_line_kernel(length, angle_deg));
}

namespace {
Raster morph_scaled(const Raster& img, int diameter, int scale, bool is_min) {
  require_nonempty(img, "morphology");
  if (diameter < 1 || diameter % 2 == 0) {
    throw std::invalid_argument("morphology: diameter must be odd >= 1");
  }
  if (scale < 1) throw std::invalid_argument("morphology: scale < 1");
  // Diameter 1 is the identity element; skip the resampling round trip,
  // which is not lossless, so the no-op case stays bit exact.
  if (diameter == 1) return img;
  Raster up = scale > 1
                  ? resize_bilinear(img, img.width * scale, img.height * scale)
                  : img;
  Element disk = disk_element(diameter);
  Raster filtered = is_min ? erode(up, disk) : dilate(up, disk);
  return scale > 1 ? downscale_area(filtered, scale) : filtered;
}
}  // namespace

Raster min_filter_scaled(const Raster& img, int diameter, int scale) {
  return morph_scaled(img, diameter, scale, true);
}

Raster max_filter_scaled(const Raster& img, int diameter, int scale) {
  return morph_scaled(img, diameter, scale, false);
}

Raster linear_fade(const Raster& img, double contrast, double brightness) {
  require_nonempty(img, "linear_fade");
  if (contrast <= 0.0) throw std::invalid_argument("linear_fade: contrast <= 0");
  Raster out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.data[i] = quantize_unit(contrast * (img.data[i] / 255.0) + brightness);
  }
  return out;
}

// ----- the ten operators -----

Raster defocus(const Raster& img, const PerturbationSpec& spec, RngStream&) {
  require_nonempty(img, "defocus");
  if (spec.level == 0) return img;
  double sigma = spec.param("sigma");
  if (sigma < 0) throw std::invalid_argument("defocus: sigma < 0");
  return gaussian_blur(img, sigma);
}

Raster vibration(const Raster& img, const PerturbationSpec& spec,
                 RngStream& rng) {
  require_nonempty(img, "vibration");
  if (spec.level == 0) return img;
  int length = int_param(spec, "length");
  if (length < 1 || length % 2 == 0) {
    throw std::invalid_argument("vibration: length must be odd >= 1");
  }
  double angle = rng.uniform(0.0, 360.0);
  return motion_blur(img, length, angle);
}

Raster warp(const Raster& img, const PerturbationSpec& spec, RngStream& rng) {
  require_nonempty(img, "warp");
  if (spec.level == 0) return img;
  double disp = spec.param("displacement");
  double fsigma = spec.param("field_sigma");
  if (disp < 0) throw std::invalid_argument("warp: displacement < 0");
  DisplacementField field =
      make_displacement_field(img.width, img.height, disp, fsigma, rng);
  return warp_with_field(img, field);
}

Raster omission(const Raster& img, const PerturbationSpec& spec,
                RngStream& rng) {
  require_nonempty(img, "omission");
  if (spec.level == 0) return img;
  double shift_frac = spec.param("shift_frac");
  double max_rot = spec.param("max_rot_deg");
  if (shift_frac < 0) throw std::invalid_argument("omission: shift_frac < 0");
  if (max_rot < 0) throw std::invalid_argument("omission: max_rot_deg < 0");
  double max_shift = shift_frac * std::min(img.width, img.height);
  // pinned draw order: tx, ty, angle
  double tx = rng.uniform(-max_shift, max_shift);
  double ty = rng.uniform(-max_shift, max_shift);
  double angle = rng.uniform(-max_rot, max_rot);
  return rigid_transform_white(img, angle, tx, ty);
}

Raster ink_bleed(const Raster& img, const PerturbationSpec& spec, RngStream&) {
  require_nonempty(img, "ink_bleed");
  if (spec.level == 0) return img;
  return min_filter_scaled(img, int_param(spec, "diameter"),
                           int_param(spec, "scale", 10.0));
}

Raster ink_holdout(const Raster& img, const PerturbationSpec& spec,
                   RngStream&) {
  require_nonempty(img, "ink_holdout");
  if (spec.level == 0) return img;
  return max_filter_scaled(img, int_param(spec, "diameter"),
                           int_param(spec, "scale", 10.0));
}

Raster obstacle(const Raster& img, const PerturbationSpec& spec,
                RngStream& rng) {
  require_nonempty(img, "obstacle");
  if (spec.level == 0) return img;
  double shadow_factor = spec.param("shadow_factor");
  double glare_factor = spec.param("glare_factor");
  int polygons = int_param(spec, "polygons");
  double mask_sigma = spec.param("mask_sigma", 3.0);
  if (shadow_factor < 0.0 || shadow_factor > 1.0) {
    throw std::invalid_argument("obstacle: shadow_factor outside [0,1]");
  }
  if (glare_factor < 1.0) {
    throw std::invalid_argument("obstacle: glare_factor < 1");
  }
  if (polygons < 0) throw std::invalid_argument("obstacle: polygons < 0");
  // mode first, then the mask geometry
  ObstacleMode mode =
      rng.uniform() < 0.5 ? ObstacleMode::shadow : ObstacleMode::glare;
  OcclusionMask mask =
      make_occlusion_mask(img.width, img.height, polygons, mask_sigma, rng);
  double factor =
      mode == ObstacleMode::shadow ? shadow_factor : glare_factor;
  return apply_occlusion(img, mask, mode, factor);
}

Raster fade(const Raster& img, const PerturbationSpec& spec, RngStream&) {
  require_nonempty(img, "fade");
  if (spec.level == 0) return img;
  return linear_fade(img, spec.param("contrast"), spec.param("brightness"));
}

Raster speckle(const Raster& img, const PerturbationSpec& spec,
               RngStream& rng) {
  require_nonempty(img, "speckle");
  if (spec.level == 0) return img;
  BlobNoise noise = make_blob_noise(
      img.width, img.height, spec.param("density"),
      spec.param("blob_sigma", 2.0), spec.param("strength", 0.9), rng);
  return apply_blob_noise(img, noise);
}

Raster texture(const Raster& img, const PerturbationSpec& spec,
               RngStream& rng) {
  require_nonempty(img, "texture");
  if (spec.level == 0) return img;
  double blend = spec.param("blend");
  if (blend < 0.0 || blend > 1.0) {
    throw std::invalid_argument("texture: blend outside [0,1]");
  }
  FiberTexture tex =
      make_fiber_texture(img.width, img.height, int_param(spec, "fibers"),
                         spec.param("grain_noise", 0.05), rng);
  return blend_texture(img, tex, blend);
}

Raster apply_visual(const Raster& img, const PerturbationSpec& spec,
                    RngStream& rng) {
  require_nonempty(img, "apply_visual");
  if (!is_visual(spec.kind)) {
    throw std::invalid_argument("apply_visual: " +
                                std::string(kind_code(spec.kind)) +
                                " is a textual kind");
  }
  switch (spec.kind) {
    case PerturbationKind::DF: return defocus(img, spec, rng);
    case PerturbationKind::VB: return vibration(img, spec, rng);
    case PerturbationKind::WP: return warp(img, spec, rng);
    case PerturbationKind::OM: return omission(img, spec, rng);
    case PerturbationKind::IB: return ink_bleed(img, spec, rng);
    case PerturbationKind::IH: return ink_holdout(img, spec, rng);
    case PerturbationKind::OB: return obstacle(img, spec, rng);
    case PerturbationKind::FD: return fade(img, spec, rng);
    case PerturbationKind::SP: return speckle(img, spec, rng);
    case PerturbationKind::TX: return texture(img, spec, rng);
    default: break;
  }
  throw std::invalid_argument("apply_visual: unhandled kind");
}

}  // namespace chaos
