#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace svp {

/// Row-major float grid with interleaved channels. One canonical layout is
/// shared by images (3 channels, values in [0,1]), probability maps
/// (K channels, per-pixel distributions), flow fields (2 channels: dx, dy)
/// and single-channel residual/confidence planes.
struct Grid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Grid() = default;
  Grid(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  float& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float* pixel(int y, int x) {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
  const float* pixel(int y, int x) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
  }
  float* row(int y) { return pixel(y, 0); }
  const float* row(int y) const { return pixel(y, 0); }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool same_extent(const Grid& o) const {
    return height == o.height && width == o.width;
  }
  bool same_shape(const Grid& o) const {
    return same_extent(o) && channels == o.channels;
  }
};

using Image = Grid;          // channels == 3
using ProbMap = Grid;        // channels == K
using FlowField = Grid;      // channels == 2
using ResidualMap = Grid;    // channels == 1
using ConfidenceMap = Grid;  // channels == 1

/// Per-pixel class indices, 0-based with 0 reserved for background.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  LabelMap() = default;
  LabelMap(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  std::uint8_t& at(int y, int x) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int y, int x) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool operator==(const LabelMap& o) const = default;
};

/// Bilinear sample of every channel at a sub-pixel coordinate per the
/// 4-neighbor interpolation rule. Coordinates outside the grid are clamped
/// to the border before interpolation. Non-finite coordinates are rejected.
void sample_bilinear(const Grid& src, float x, float y, float* out);

/// Backward warp: out(p) = src sampled at p + flow(p). Flow extent must match
/// the source. Values are convex combinations of source values.
Grid warp_image(const Grid& src, const FlowField& flow);

/// Same resampling as warp_image but renormalizes every pixel's distribution
/// to sum 1, keeping the ProbMap invariant intact through the pipeline.
ProbMap warp_probmap(const ProbMap& src, const FlowField& flow);

/// Per-pixel argmax over classes; ties break toward the lowest class index.
LabelMap argmax_labels(const ProbMap& p);

/// Throws std::invalid_argument unless every pixel of `p` is a nonnegative
/// distribution summing to 1 within `tol`.
void validate_probmap(const ProbMap& p, float tol = 1e-5f);

/// Mean of the three color channels as a single-channel grid.
Grid to_grayscale(const Image& img);

/// General bilinear resize (align-centers convention).
Grid resize_bilinear(const Grid& src, int out_height, int out_width);

/// 2x2 box-average downsample; odd trailing row/column is border-clamped.
Grid downsample_half(const Grid& src);

FlowField zero_flow(int height, int width);

}  // namespace svp
