#pragma once

#include "svp/grid.hpp"

namespace svp {

/// Appearance reconstruction residual: per pixel, the L1 norm over channels
/// of target minus the flow-warped source (sum of the 3 absolute channel
/// differences for images).
ResidualMap reconstruction_residual(const Image& target, const Image& source,
                                    const FlowField& flow);

/// Maps residuals to flow trust in (0,1]: conf = exp(-r / (2*sigma^2)) with
/// sigma the mean residual over the whole frame. A near-zero sigma means the
/// reconstruction is essentially perfect and yields all-ones confidence.
ConfidenceMap residual_to_confidence(const ResidualMap& r);

/// Scales each pixel's class distribution by that pixel's confidence. The
/// result is intentionally not renormalized: the magnitude is the signal the
/// fusion layer consumes.
ProbMap apply_confidence(const ProbMap& p, const ConfidenceMap& c);

ConfidenceMap ones_confidence(int height, int width);

}  // namespace svp
