#pragma once

#include <vector>

#include "svp/grid.hpp"

namespace svp {

/// Hyperparameters of the correlation block matcher.
struct FlowConfig {
  int search_radius = 4;    // candidate offsets per axis, per pyramid level
  int patch_radius = 3;     // comparison window half-size
  int pyramid_levels = 3;
  bool subpixel_refine = true;
  int median_radius = 2;    // post-smoothing window half-size, 0 disables
};

/// Similarity of every (2*radius+1)^2 candidate offset at every pixel.
/// Scores are means of elementwise products over the comparison window.
/// Stored candidate-major: plane(dy, dx) is a height*width score image.
struct CorrelationVolume {
  int height = 0;
  int width = 0;
  int radius = 0;
  std::vector<float> data;

  int candidates() const { return (2 * radius + 1) * (2 * radius + 1); }
  int plane_index(int dy, int dx) const {
    return (dy + radius) * (2 * radius + 1) + (dx + radius);
  }
  float* plane(int dy, int dx) {
    return data.data() +
           static_cast<std::size_t>(plane_index(dy, dx)) * height * width;
  }
  const float* plane(int dy, int dx) const {
    return data.data() +
           static_cast<std::size_t>(plane_index(dy, dx)) * height * width;
  }
  float at(int y, int x, int dy, int dx) const {
    return plane(dy, dx)[static_cast<std::size_t>(y) * width + x];
  }
};

/// Multiplicative patch comparison between two frames (grayscale, border
/// clamped): score(p, d) = mean over the window of a-patch-at-p times
/// b-patch-at-p+d. Accepts 3-channel images (averaged to gray) or
/// single-channel grids.
CorrelationVolume correlation_volume(const Grid& a, const Grid& b,
                                     const FlowConfig& cfg);

/// Dense flow from `a` to `b`: per-pixel offset such that b sampled at
/// p + flow(p) matches a(p). Coarse-to-fine over a half-resolution pyramid;
/// each level searches the correlation volume around the upsampled coarse
/// flow, the finest level optionally refines to sub-pixel precision by a
/// quadratic fit (clamped to +-0.5 px per axis).
FlowField estimate_flow(const Image& a, const Image& b, const FlowConfig& cfg);

/// Per-component median over the (2r+1)^2 window, border-clamped.
FlowField median_filter_flow(const FlowField& f, int radius);

}  // namespace svp
