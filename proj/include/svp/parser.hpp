#pragma once

#include <vector>

#include "svp/fusion.hpp"  // TrainConfig, TrainRecord
#include "svp/grid.hpp"

namespace svp {

/// Hand-crafted per-pixel features standing in for the deep parsing
/// backbone: RGB, normalized coordinates, 3x3 neighborhood mean and
/// standard deviation per channel.
inline constexpr int kParserFeatureDim = 11;

/// Per-pixel linear softmax classifier over standardized features.
struct ParserModel {
  int num_classes = 0;
  std::vector<float> matrix;     // K x 11, row-major
  std::vector<float> bias;       // K
  std::vector<float> feat_mean;  // 11, from training pixels
  std::vector<float> feat_std;   // 11, floored at 1e-6

  bool operator==(const ParserModel&) const = default;
};

/// 11-channel feature grid; neighborhoods are border-clamped.
Grid extract_features(const Image& img);

/// Seeded full-batch gradient descent on softmax cross-entropy over the
/// standardized features of every pixel. Classes absent from the labels are
/// trained toward zero probability rather than removed, so K stays fixed.
ParserModel train_parser(const Image& img, const LabelMap& gt,
                         const TrainConfig& cfg, int num_classes,
                         std::vector<TrainRecord>* history = nullptr);

/// Multi-frame variant pooling the pixels of several labeled frames.
ParserModel train_parser(const std::vector<const Image*>& images,
                         const std::vector<const LabelMap*>& gts,
                         const TrainConfig& cfg, int num_classes,
                         std::vector<TrainRecord>* history = nullptr);

/// Per-pixel softmax over K classes; always a valid ProbMap.
ProbMap parse_frame(const ParserModel& model, const Image& img);

/// Finite-difference check of the parser's analytic gradient; returns the
/// max relative error (same convention as fusion's gradient_check).
double parser_gradient_check(const ParserModel& model, const Image& img,
                             const LabelMap& gt);

}  // namespace svp
