#pragma once

#include <vector>

#include "chaos/filters.hpp"
#include "chaos/raster.hpp"
#include "chaos/rng.hpp"
#include "chaos/schedule.hpp"

namespace chaos {

// ----- intermediate artifacts (exposed so tests can pin them down) -----

// Smooth per-pixel displacement, built from uniform noise blurred with
// field_sigma and rescaled so max |component| == max_disp.
struct DisplacementField {
  int width = 0;
  int height = 0;
  std::vector<float> dx;
  std::vector<float> dy;
};

DisplacementField make_displacement_field(int w, int h, double max_disp,
                                          double field_sigma, RngStream& rng);

// Samples src at (x + dx, y + dy) with bilinear interpolation; reads are
// clamped to the image rect so borders smear instead of tearing.
Raster warp_with_field(const Raster& img, const DisplacementField& field);

// Soft occlusion mask on [0,1]: 1 everywhere except `polygon_count` random
// convex polygons rendered at 0 and blurred with mask_sigma.
struct OcclusionMask {
  int width = 0;
  int height = 0;
  std::vector<float> values;
};

OcclusionMask make_occlusion_mask(int w, int h, int polygon_count,
                                  double mask_sigma, RngStream& rng);

enum class ObstacleMode { shadow, glare };

// shadow: out = factor * I * M. glare: out = I + (factor - 1) * 255 * (1 - M).
Raster apply_occlusion(const Raster& img, const OcclusionMask& mask,
                       ObstacleMode mode, double factor);

// Blob noise pair for speckle: both planes on [0,1], density = expected
// blob seeds per pixel. Foreground lifts dark values, background eats
// bright ones. Seeds come from forked substreams so the seed set at a
// lower density is a prefix of the set at a higher one.
struct BlobNoise {
  int width = 0;
  int height = 0;
  std::vector<float> foreground;
  std::vector<float> background;
};

BlobNoise make_blob_noise(int w, int h, double density, double blob_sigma,
                          double strength, RngStream& rng);

// out = min(max(I, fg), 1 - bg) on the normalized scale, per channel.
Raster apply_blob_noise(const Raster& img, const BlobNoise& noise);

// Paper texture: fiber mask plus grain plane; the composed layer is
// T = mask * ink + (1 - mask) * grain.
struct FiberTexture {
  int width = 0;
  int height = 0;
  std::vector<float> mask;   // [0,1], soft fiber coverage
  std::vector<float> grain;  // paper tone per pixel
  double ink_tone = 0.22;
};

FiberTexture make_fiber_texture(int w, int h, int fiber_count,
                                double grain_noise, RngStream& rng);

// out = blend * I + (1 - blend) * T, per channel.
Raster blend_texture(const Raster& img, const FiberTexture& texture,
                     double blend);

// Rigid move: rotate by angle_deg around the image center, then translate
// by (tx, ty). Sampling is inverse bilinear; uncovered pixels become white.
Raster rigid_transform_white(const Raster& img, double angle_deg, double tx,
                             double ty);

// Directional blur with a rasterized line kernel.
Raster motion_blur(const Raster& img, int length, double angle_deg);

// Morphology with an elliptical element applied at `scale` x resolution
// (bilinear up, block-average down). diameter must be odd >= 1; diameter 1
// returns a copy untouched.
Raster min_filter_scaled(const Raster& img, int diameter, int scale);
Raster max_filter_scaled(const Raster& img, int diameter, int scale);

// out = contrast * I + brightness on the normalized scale, clamped.
Raster linear_fade(const Raster& img, double contrast, double brightness);

// ----- the ten visual operators -----
// Each validates its parameters, draws any randomness from `rng` in a
// pinned order, and returns a raster of the input shape. Level 0 specs are
// an exact copy.

Raster defocus(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster vibration(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster warp(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster omission(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster ink_bleed(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster ink_holdout(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster obstacle(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster fade(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster speckle(const Raster& img, const PerturbationSpec& spec, RngStream& rng);
Raster texture(const Raster& img, const PerturbationSpec& spec, RngStream& rng);

// Dispatch by spec.kind; rejects textual kinds and empty rasters.
Raster apply_visual(const Raster& img, const PerturbationSpec& spec,
                    RngStream& rng);

}  // namespace chaos
