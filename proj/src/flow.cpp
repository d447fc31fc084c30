#include "svp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "svp/kernels.hpp"

namespace svp {

namespace {

void validate_config(const FlowConfig& cfg) {
  if (cfg.search_radius < 1 || cfg.patch_radius < 1 || cfg.pyramid_levels < 1 ||
      cfg.median_radius < 0) {
    throw std::invalid_argument("flow config: radii/levels out of range");
  }
}

// Edge-replicated padding of a single-channel grid.
Grid pad_replicate(const Grid& src, int pad) {
  Grid out(src.height + 2 * pad, src.width + 2 * pad, 1);
  for (int y = 0; y < out.height; ++y) {
    const int sy = std::clamp(y - pad, 0, src.height - 1);
    for (int x = 0; x < out.width; ++x) {
      const int sx = std::clamp(x - pad, 0, src.width - 1);
      out.at(y, x, 0) = src.at(sy, sx, 0);
    }
  }
  return out;
}

CorrelationVolume correlate_gray(const Grid& a, const Grid& b,
                                 const FlowConfig& cfg) {
  const int h = a.height;
  const int w = a.width;
  const int r = cfg.patch_radius;
  const int d = cfg.search_radius;
  const auto& k = kern::active();

  CorrelationVolume vol;
  vol.height = h;
  vol.width = w;
  vol.radius = d;
  vol.data.assign(static_cast<std::size_t>(vol.candidates()) * h * w, 0.0f);

  // a padded by the window radius, b by window + search reach, so every
  // clamped patch access becomes a plain load from the padded planes.
  const Grid ap = pad_replicate(a, r);
  const Grid bp = pad_replicate(b, r + d);

  const int pw = ap.width;    // w + 2r
  const int ph = ap.height;   // h + 2r
  Grid prod(ph, pw, 1);
  Grid hsum(ph, w, 1);
  const float inv_area =
      1.0f / (static_cast<float>(2 * r + 1) * static_cast<float>(2 * r + 1));

  for (int dy = -d; dy <= d; ++dy) {
    for (int dx = -d; dx <= d; ++dx) {
      // prod(u) = ap(u) * bp(u + (d,d) + (dy,dx)) over ap's domain.
      for (int y = 0; y < ph; ++y) {
        k.multiply(ap.row(y), bp.pixel(y + d + dy, d + dx), prod.row(y), pw);
      }
      // Separable window sums in fixed ascending order: horizontal over the
      // padded rows, then vertical into the score plane.
      for (int y = 0; y < ph; ++y) {
        k.window_hsum(prod.row(y) + r, hsum.row(y), w, r);
      }
      float* plane = vol.plane(dy, dx);
      for (int y = 0; y < h; ++y) {
        k.window_vsum(hsum.row(y + r), plane + static_cast<std::size_t>(y) * w,
                      w, w, r);
      }
      k.scale(plane, inv_area, plane, h * w);
    }
  }
  return vol;
}

// Candidate visit order implementing the tie-break rule: smallest |d| first,
// then lexicographic (dy, dx). Earlier candidates win exact score ties.
std::vector<std::pair<int, int>> candidate_order(int d) {
  std::vector<std::pair<int, int>> order;
  order.reserve((2 * d + 1) * (2 * d + 1));
  for (int dy = -d; dy <= d; ++dy) {
    for (int dx = -d; dx <= d; ++dx) order.emplace_back(dy, dx);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& l, const auto& r) {
                     const int nl = l.first * l.first + l.second * l.second;
                     const int nr = r.first * r.first + r.second * r.second;
                     if (nl != nr) return nl < nr;
                     return l < r;
                   });
  return order;
}

float quadratic_offset(float sm, float s0, float sp) {
  const float denom = sm - 2.0f * s0 + sp;
  if (!(denom < 0.0f)) return 0.0f;  // not a proper maximum
  return std::clamp((sm - sp) / (2.0f * denom), -0.5f, 0.5f);
}

// Integer argmax over the volume, plus optional quadratic sub-pixel offsets.
FlowField argmax_volume(const CorrelationVolume& vol, bool subpixel) {
  const int d = vol.radius;
  const auto order = candidate_order(d);
  FlowField best(vol.height, vol.width, 2);
  for (int y = 0; y < vol.height; ++y) {
    for (int x = 0; x < vol.width; ++x) {
      float best_score = -std::numeric_limits<float>::infinity();
      int by = 0, bx = 0;
      for (const auto& [dy, dx] : order) {
        const float s = vol.at(y, x, dy, dx);
        if (s > best_score) {
          best_score = s;
          by = dy;
          bx = dx;
        }
      }
      float fx = static_cast<float>(bx);
      float fy = static_cast<float>(by);
      if (subpixel) {
        if (bx > -d && bx < d) {
          fx += quadratic_offset(vol.at(y, x, by, bx - 1), best_score,
                                 vol.at(y, x, by, bx + 1));
        }
        if (by > -d && by < d) {
          fy += quadratic_offset(vol.at(y, x, by - 1, bx), best_score,
                                 vol.at(y, x, by + 1, bx));
        }
      }
      best.at(y, x, 0) = fx;
      best.at(y, x, 1) = fy;
    }
  }
  return best;
}

}  // namespace

CorrelationVolume correlation_volume(const Grid& a, const Grid& b,
                                     const FlowConfig& cfg) {
  validate_config(cfg);
  if (!a.same_shape(b)) {
    throw std::invalid_argument("correlation_volume: dimension mismatch");
  }
  const Grid ga = to_grayscale(a);
  const Grid gb = to_grayscale(b);
  return correlate_gray(ga, gb, cfg);
}

FlowField estimate_flow(const Image& a, const Image& b, const FlowConfig& cfg) {
  validate_config(cfg);
  if (!a.same_shape(b)) {
    throw std::invalid_argument("estimate_flow: dimension mismatch");
  }
  const int patch = 2 * cfg.patch_radius + 1;
  if (a.width < patch || a.height < patch) {
    throw std::invalid_argument("estimate_flow: image smaller than one patch");
  }

  // Half-resolution pyramid, coarsest last; levels that no longer fit a
  // comparison window are dropped.
  std::vector<Grid> pyr_a{to_grayscale(a)};
  std::vector<Grid> pyr_b{to_grayscale(b)};
  for (int l = 1; l < cfg.pyramid_levels; ++l) {
    Grid next_a = downsample_half(pyr_a.back());
    if (next_a.width < patch || next_a.height < patch) break;
    pyr_a.push_back(std::move(next_a));
    pyr_b.push_back(downsample_half(pyr_b.back()));
  }

  FlowField flow = zero_flow(pyr_a.back().height, pyr_a.back().width);
  for (int level = static_cast<int>(pyr_a.size()) - 1; level >= 0; --level) {
    const Grid& la = pyr_a[level];
    const Grid& lb = pyr_b[level];
    if (flow.height != la.height || flow.width != la.width) {
      flow = resize_bilinear(flow, la.height, la.width);
      kern::active().scale(flow.data.data(), 2.0f, flow.data.data(),
                           static_cast<int>(flow.data.size()));
    }
    const Grid warped_b = warp_image(lb, flow);
    const CorrelationVolume vol = correlate_gray(la, warped_b, cfg);
    const bool refine = cfg.subpixel_refine && level == 0;
    const FlowField delta = argmax_volume(vol, refine);
    for (std::size_t i = 0; i < flow.data.size(); ++i) {
      flow.data[i] += delta.data[i];
    }
    if (cfg.median_radius > 0) {
      flow = median_filter_flow(flow, cfg.median_radius);
    }
  }
  return flow;
}

FlowField median_filter_flow(const FlowField& f, int radius) {
  if (radius < 0) throw std::invalid_argument("median_filter_flow: radius < 0");
  if (radius == 0) return f;
  FlowField out(f.height, f.width, 2);
  std::vector<float> window;
  window.reserve(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      for (int c = 0; c < 2; ++c) {
        window.clear();
        for (int wy = -radius; wy <= radius; ++wy) {
          const int sy = std::clamp(y + wy, 0, f.height - 1);
          for (int wx = -radius; wx <= radius; ++wx) {
            const int sx = std::clamp(x + wx, 0, f.width - 1);
            window.push_back(f.at(sy, sx, c));
          }
        }
        auto mid = window.begin() + window.size() / 2;
        std::nth_element(window.begin(), mid, window.end());
        out.at(y, x, c) = *mid;
      }
    }
  }
  return out;
}

}  // namespace svp
