#include "svp/confidence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "svp/kernels.hpp"

namespace svp {

ResidualMap reconstruction_residual(const Image& target, const Image& source,
                                    const FlowField& flow) {
  if (!target.same_shape(source) || !target.same_extent(flow)) {
    throw std::invalid_argument("reconstruction_residual: shape mismatch");
  }
  const Image warped = warp_image(source, flow);
  ResidualMap out(target.height, target.width, 1);
  const int c = target.channels;
  const float* t = target.data.data();
  const float* w = warped.data.data();
  for (std::size_t i = 0; i < out.pixel_count(); ++i, t += c, w += c) {
    float r = 0.0f;
    for (int k = 0; k < c; ++k) r += std::fabs(t[k] - w[k]);
    out.data[i] = r;
  }
  return out;
}

ConfidenceMap residual_to_confidence(const ResidualMap& r) {
  ConfidenceMap out(r.height, r.width, 1);
  double sum = 0.0;
  for (float v : r.data) sum += v;
  const double sigma = sum / static_cast<double>(r.data.size());
  if (sigma < 1e-8) {
    // Near-perfect reconstruction everywhere: trust fully rather than divide
    // by (almost) zero.
    for (float& v : out.data) v = 1.0f;
    return out;
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // exp can underflow to 0 for extreme residual/sigma ratios; clamp to the
  // smallest normal float to keep confidence inside (0,1].
  const float floor = std::numeric_limits<float>::min();
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    const float c = static_cast<float>(std::exp(-r.data[i] * inv));
    out.data[i] = c < floor ? floor : c;
  }
  return out;
}

ProbMap apply_confidence(const ProbMap& p, const ConfidenceMap& c) {
  if (!p.same_extent(c) || c.channels != 1) {
    throw std::invalid_argument("apply_confidence: shape mismatch");
  }
  ProbMap out(p.height, p.width, p.channels);
  const auto& k = kern::active();
  for (std::size_t i = 0; i < p.pixel_count(); ++i) {
    k.scale(p.data.data() + i * p.channels, c.data[i],
            out.data.data() + i * p.channels, p.channels);
  }
  return out;
}

ConfidenceMap ones_confidence(int height, int width) {
  return Grid(height, width, 1, 1.0f);
}

}  // namespace svp
