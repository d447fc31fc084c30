#include "svp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svp/kernels.hpp"

namespace svp {

namespace {

// Clamped coordinate + interpolation weights for one axis.
struct AxisSample {
  int lo;
  int hi;
  float frac;
};

AxisSample axis_sample(float v, int extent) {
  float c = std::clamp(v, 0.0f, static_cast<float>(extent - 1));
  int lo = static_cast<int>(std::floor(c));
  if (lo > extent - 1) lo = extent - 1;
  int hi = std::min(lo + 1, extent - 1);
  return {lo, hi, c - static_cast<float>(lo)};
}

void sample_into(const Grid& src, float x, float y, float* out) {
  const AxisSample sx = axis_sample(x, src.width);
  const AxisSample sy = axis_sample(y, src.height);
  const float w00 = (1.0f - sx.frac) * (1.0f - sy.frac);
  const float w01 = sx.frac * (1.0f - sy.frac);
  const float w10 = (1.0f - sx.frac) * sy.frac;
  const float w11 = sx.frac * sy.frac;
  kern::active().bilinear_blend(src.pixel(sy.lo, sx.lo), src.pixel(sy.lo, sx.hi),
                                src.pixel(sy.hi, sx.lo), src.pixel(sy.hi, sx.hi),
                                w00, w01, w10, w11, out, src.channels);
}

Grid warp_common(const Grid& src, const FlowField& flow) {
  if (flow.channels != 2) {
    throw std::invalid_argument("warp: flow must have 2 channels");
  }
  if (!src.same_extent(flow)) {
    throw std::invalid_argument("warp: flow extent does not match source");
  }
  Grid out(src.height, src.width, src.channels);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const float* f = flow.pixel(y, x);
      sample_into(src, static_cast<float>(x) + f[0],
                  static_cast<float>(y) + f[1], out.pixel(y, x));
    }
  }
  return out;
}

}  // namespace

void sample_bilinear(const Grid& src, float x, float y, float* out) {
  if (src.height < 1 || src.width < 1 || src.channels < 1) {
    throw std::invalid_argument("sample_bilinear: empty grid");
  }
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("sample_bilinear: non-finite coordinate");
  }
  sample_into(src, x, y, out);
}

Grid warp_image(const Grid& src, const FlowField& flow) {
  return warp_common(src, flow);
}

ProbMap warp_probmap(const ProbMap& src, const FlowField& flow) {
  ProbMap out = warp_common(src, flow);
  // Bilinear mixing of normalized distributions sums to 1 up to rounding;
  // renormalize so the invariant is exact enough to machine-check downstream.
  const int k = out.channels;
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    float* v = out.data.data() + p * k;
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += v[c];
    if (sum > 0.0) {
      const float inv = static_cast<float>(1.0 / sum);
      kern::active().scale(v, inv, v, k);
    }
  }
  return out;
}

LabelMap argmax_labels(const ProbMap& p) {
  LabelMap out(p.height, p.width);
  const int k = p.channels;
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    const float* v = p.data.data() + i * k;
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (v[c] > v[best]) best = c;
    }
    out.data[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

void validate_probmap(const ProbMap& p, float tol) {
  const int k = p.channels;
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    const float* v = p.data.data() + i * k;
    float sum = 0.0f;
    for (int c = 0; c < k; ++c) {
      if (!(v[c] >= 0.0f)) {
        throw std::invalid_argument("probmap: negative or NaN probability");
      }
      sum += v[c];
    }
    if (std::fabs(sum - 1.0f) > tol) {
      throw std::invalid_argument("probmap: pixel distribution does not sum to 1");
    }
  }
}

Grid to_grayscale(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) {
    throw std::invalid_argument("to_grayscale: expected 1 or 3 channels");
  }
  Grid out(img.height, img.width, 1);
  const float* s = img.data.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i, s += 3) {
    out.data[i] = (s[0] + s[1] + s[2]) / 3.0f;
  }
  return out;
}

Grid resize_bilinear(const Grid& src, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) {
    throw std::invalid_argument("resize_bilinear: empty output");
  }
  Grid out(out_height, out_width, src.channels);
  const float sx = static_cast<float>(src.width) / static_cast<float>(out_width);
  const float sy =
      static_cast<float>(src.height) / static_cast<float>(out_height);
  for (int y = 0; y < out_height; ++y) {
    const float srcy = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
    for (int x = 0; x < out_width; ++x) {
      const float srcx = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
      sample_into(src, srcx, srcy, out.pixel(y, x));
    }
  }
  return out;
}

Grid downsample_half(const Grid& src) {
  const int oh = std::max(1, (src.height + 1) / 2);
  const int ow = std::max(1, (src.width + 1) / 2);
  Grid out(oh, ow, src.channels);
  for (int y = 0; y < oh; ++y) {
    const int y0 = std::min(2 * y, src.height - 1);
    const int y1 = std::min(2 * y + 1, src.height - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = std::min(2 * x, src.width - 1);
      const int x1 = std::min(2 * x + 1, src.width - 1);
      for (int c = 0; c < src.channels; ++c) {
        out.at(y, x, c) = 0.25f * (src.at(y0, x0, c) + src.at(y0, x1, c) +
                                   src.at(y1, x0, c) + src.at(y1, x1, c));
      }
    }
  }
  return out;
}

FlowField zero_flow(int height, int width) { return Grid(height, width, 2); }

}  // namespace svp
