#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svp/grid.hpp"

namespace svp {

/// Ablation variants: which warped branches feed the fusion layer and
/// whether they are confidence-weighted first.
enum class Variant { L, S, LC, SC, LS, LSC };

Variant parse_variant(const std::string& s);
std::string to_string(Variant v);
bool variant_uses_long(Variant v);
bool variant_uses_short(Variant v);
bool variant_uses_confidence(Variant v);

/// The 1x1 temporal fusion layer: K output classes over the 3K concatenated
/// input channels, ordered (long block, short block, current block).
struct FusionWeights {
  int num_classes = 0;
  std::vector<float> matrix;  // K x 3K, row-major
  std::vector<float> bias;    // K

  bool operator==(const FusionWeights&) const = default;
};

/// One fusion site: the current frame's rough map plus the two
/// confidence-weighted warped maps. Inactive branches carry zero-filled
/// grids of the same shape.
struct FusionInput {
  ProbMap rough;
  ProbMap warped_long;
  ProbMap warped_short;
  bool long_active = true;
  bool short_active = true;
};

struct TrainConfig {
  float learning_rate = 0.1f;
  int epochs = 500;
  float deep_supervision_weight = 1.0f;
  std::uint32_t seed = 0;
  Variant variant = Variant::LSC;
};

struct TrainRecord {
  int epoch = 0;
  double loss = 0.0;
  double best = 0.0;  // best loss seen so far, non-increasing
};

using FusionExample = std::pair<FusionInput, LabelMap>;

/// Per pixel: logits = matrix * concat(long, short, current) + bias, then
/// softmax. Output is a valid ProbMap for any finite weights and inputs.
ProbMap fuse_forward(const FusionWeights& w, const FusionInput& in);

/// Mean per-pixel cross-entropy of pred against gt, plus
/// deep_supervision_weight times the cross-entropy of each provided
/// auxiliary map (renormalized per pixel first). Probabilities are floored
/// at 1e-12 inside the log. Pass nullptr for inactive auxiliaries.
double fusion_loss(const ProbMap& pred, const ProbMap* aux_long,
                   const ProbMap* aux_short, const LabelMap& gt,
                   const TrainConfig& cfg);

/// Full-batch gradient descent from a seeded standard-Gaussian
/// initialization (or from `init` when given, for fine-tuning rounds).
/// Returns the weights with the lowest recorded training loss.
FusionWeights train_fusion(const std::vector<FusionExample>& dataset,
                           const TrainConfig& cfg,
                           std::vector<TrainRecord>* history = nullptr,
                           const FusionWeights* init = nullptr);

/// Max relative error between the analytic gradient of fusion_loss and
/// central finite differences (step 1e-4) over every matrix and bias entry.
/// Near-zero gradient pairs are compared absolutely.
double gradient_check(const FusionWeights& w, const FusionInput& in,
                      const LabelMap& gt);

/// Fusion layer that reproduces argmax(rough): identity*tau on the current
/// block, zero elsewhere.
FusionWeights make_passthrough_fusion(int num_classes, float tau = 50.0f);

/// Per-class view of the learned weights in (long, short, current) block
/// order, with each block's argmax input channel.
struct WeightTable {
  struct BlockStats {
    int argmax_index = 0;
    float max_weight = 0.0f;
    bool flat = false;  // every weight in the block equal; argmax defaults to 0
  };
  struct ClassRow {
    std::vector<float> weights;  // 3K values, block order long|short|current
    std::array<BlockStats, 3> blocks;
  };
  int num_classes = 0;
  std::vector<ClassRow> classes;
};

WeightTable export_weights(const FusionWeights& w);

}  // namespace svp
