#pragma once

#include <string>
#include <vector>

#include "svp/grid.hpp"

namespace svp {

/// A training or test video: ordered frames, one labeled frame, and
/// (synthetic sequences only) per-frame ground-truth labels and flow.
/// Ground-truth flow stores the per-pixel velocity of the pixel's topmost
/// owner; the flow warping frame t toward frame t-s is -s times that field.
struct VideoSequence {
  std::string name;
  std::vector<Image> frames;
  int labeled_index = -1;
  LabelMap gt;

  std::vector<LabelMap> gt_labels;
  std::vector<FlowField> gt_flows;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

}  // namespace svp
