#include "svp/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "svp/kernels.hpp"

namespace svp {

namespace {

constexpr double kLogFloor = 1e-12;

struct DenseWeights {
  int num_classes = 0;
  std::vector<double> matrix;
  std::vector<double> bias;
};

DenseWeights to_dense(const FusionWeights& w) {
  DenseWeights d;
  d.num_classes = w.num_classes;
  d.matrix.assign(w.matrix.begin(), w.matrix.end());
  d.bias.assign(w.bias.begin(), w.bias.end());
  return d;
}

FusionWeights to_float(const DenseWeights& d) {
  FusionWeights w;
  w.num_classes = d.num_classes;
  w.matrix.assign(d.matrix.begin(), d.matrix.end());
  w.bias.assign(d.bias.begin(), d.bias.end());
  return w;
}

void validate_input(int k, const FusionInput& in) {
  if (in.rough.channels != k || in.warped_long.channels != k ||
      in.warped_short.channels != k) {
    throw std::invalid_argument("fusion: class count mismatch");
  }
  if (!in.rough.same_extent(in.warped_long) ||
      !in.rough.same_extent(in.warped_short)) {
    throw std::invalid_argument("fusion: input extents differ");
  }
}

void validate_weights(const FusionWeights& w) {
  const std::size_t k = static_cast<std::size_t>(w.num_classes);
  if (w.num_classes <= 0 || w.matrix.size() != k * 3 * k ||
      w.bias.size() != k) {
    throw std::invalid_argument("fusion: malformed weights");
  }
}

void gather_pixel(const FusionInput& in, std::size_t p, int k, double* x) {
  const float* l = in.warped_long.data.data() + p * k;
  const float* s = in.warped_short.data.data() + p * k;
  const float* r = in.rough.data.data() + p * k;
  for (int c = 0; c < k; ++c) x[c] = l[c];
  for (int c = 0; c < k; ++c) x[k + c] = s[c];
  for (int c = 0; c < k; ++c) x[2 * k + c] = r[c];
}

// Cross-entropy of a per-pixel-renormalized map against gt, mean over pixels.
double renormalized_ce(const ProbMap& m, const LabelMap& gt) {
  const int k = m.channels;
  double total = 0.0;
  for (std::size_t p = 0; p < m.pixel_count(); ++p) {
    const float* v = m.data.data() + p * k;
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += v[c];
    const double q = sum > 0.0 ? v[gt.data[p]] / sum : 0.0;
    total += -std::log(std::max(q, kLogFloor));
  }
  return total / static_cast<double>(m.pixel_count());
}

void check_labels(const LabelMap& gt, int k, int height, int width) {
  if (gt.height != height || gt.width != width) {
    throw std::invalid_argument("fusion: label extent mismatch");
  }
  for (std::uint8_t l : gt.data) {
    if (l >= k) throw std::invalid_argument("fusion: label out of range");
  }
}

// Mean cross-entropy over pixels and, when grad != nullptr, its gradient
// with respect to matrix and bias (double precision, fixed summation order).
double main_loss_and_grad(const DenseWeights& w, const FusionInput& in,
                          const LabelMap& gt, DenseWeights* grad) {
  const int k = w.num_classes;
  const std::size_t npix = in.rough.pixel_count();
  std::vector<double> x(3 * k), z(k), q(k);
  double loss = 0.0;
  for (std::size_t p = 0; p < npix; ++p) {
    gather_pixel(in, p, k, x.data());
    for (int c = 0; c < k; ++c) {
      const double* row = w.matrix.data() + static_cast<std::size_t>(c) * 3 * k;
      double acc = w.bias[c];
      for (int j = 0; j < 3 * k; ++j) acc += row[j] * x[j];
      z[c] = acc;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      q[c] = std::exp(z[c] - zmax);
      sum += q[c];
    }
    for (int c = 0; c < k; ++c) q[c] /= sum;
    const int y = gt.data[p];
    loss += -std::log(std::max(q[y], kLogFloor));
    if (grad && q[y] > kLogFloor) {
      for (int c = 0; c < k; ++c) {
        const double delta = q[c] - (c == y ? 1.0 : 0.0);
        grad->bias[c] += delta;
        double* grow = grad->matrix.data() + static_cast<std::size_t>(c) * 3 * k;
        for (int j = 0; j < 3 * k; ++j) grow[j] += delta * x[j];
      }
    }
  }
  return loss / static_cast<double>(npix);
}

}  // namespace

Variant parse_variant(const std::string& s) {
  if (s == "l") return Variant::L;
  if (s == "s") return Variant::S;
  if (s == "l+c") return Variant::LC;
  if (s == "s+c") return Variant::SC;
  if (s == "l+s") return Variant::LS;
  if (s == "l+s+c") return Variant::LSC;
  throw std::invalid_argument("unknown variant '" + s +
                              "' (expected one of l, s, l+c, s+c, l+s, l+s+c)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::L: return "l";
    case Variant::S: return "s";
    case Variant::LC: return "l+c";
    case Variant::SC: return "s+c";
    case Variant::LS: return "l+s";
    case Variant::LSC: return "l+s+c";
  }
  return "?";
}

bool variant_uses_long(Variant v) {
  return v == Variant::L || v == Variant::LC || v == Variant::LS ||
         v == Variant::LSC;
}

bool variant_uses_short(Variant v) {
  return v == Variant::S || v == Variant::SC || v == Variant::LS ||
         v == Variant::LSC;
}

bool variant_uses_confidence(Variant v) {
  return v == Variant::LC || v == Variant::SC || v == Variant::LSC;
}

ProbMap fuse_forward(const FusionWeights& w, const FusionInput& in) {
  validate_weights(w);
  validate_input(w.num_classes, in);
  const int k = w.num_classes;
  const auto& kr = kern::active();
  ProbMap out(in.rough.height, in.rough.width, k);
  std::vector<float> x(3 * k), logits(k);
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    const float* l = in.warped_long.data.data() + p * k;
    const float* s = in.warped_short.data.data() + p * k;
    const float* r = in.rough.data.data() + p * k;
    std::copy(l, l + k, x.begin());
    std::copy(s, s + k, x.begin() + k);
    std::copy(r, r + k, x.begin() + 2 * k);
    for (int c = 0; c < k; ++c) {
      logits[c] =
          w.bias[c] + kr.dot(w.matrix.data() + static_cast<std::size_t>(c) * 3 * k,
                             x.data(), 3 * k);
    }
    const float m = *std::max_element(logits.begin(), logits.end());
    float sum = 0.0f;
    float* o = out.data.data() + p * k;
    for (int c = 0; c < k; ++c) {
      o[c] = std::exp(logits[c] - m);
      sum += o[c];
    }
    kr.scale(o, 1.0f / sum, o, k);
  }
  return out;
}

double fusion_loss(const ProbMap& pred, const ProbMap* aux_long,
                   const ProbMap* aux_short, const LabelMap& gt,
                   const TrainConfig& cfg) {
  check_labels(gt, pred.channels, pred.height, pred.width);
  double total = 0.0;
  const int k = pred.channels;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    const double q = pred.data[p * k + gt.data[p]];
    total += -std::log(std::max(q, kLogFloor));
  }
  total /= static_cast<double>(pred.pixel_count());
  for (const ProbMap* aux : {aux_long, aux_short}) {
    if (!aux) continue;
    if (aux->channels != k || aux->height != pred.height ||
        aux->width != pred.width) {
      throw std::invalid_argument("fusion_loss: auxiliary shape mismatch");
    }
    total += cfg.deep_supervision_weight * renormalized_ce(*aux, gt);
  }
  return total;
}

FusionWeights train_fusion(const std::vector<FusionExample>& dataset,
                           const TrainConfig& cfg,
                           std::vector<TrainRecord>* history,
                           const FusionWeights* init) {
  if (dataset.empty()) {
    throw std::invalid_argument("train_fusion: empty dataset");
  }
  if (cfg.learning_rate < 0.0f || cfg.epochs < 1 ||
      cfg.deep_supervision_weight < 0.0f) {
    throw std::invalid_argument("train_fusion: bad config");
  }
  const int k = dataset.front().first.rough.channels;
  for (const auto& [in, gt] : dataset) {
    validate_input(k, in);
    check_labels(gt, k, in.rough.height, in.rough.width);
  }

  DenseWeights w;
  if (init) {
    validate_weights(*init);
    if (init->num_classes != k) {
      throw std::invalid_argument("train_fusion: init class count mismatch");
    }
    w = to_dense(*init);
  } else {
    w.num_classes = k;
    w.matrix.resize(static_cast<std::size_t>(k) * 3 * k);
    w.bias.resize(k);
    std::mt19937 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : w.matrix) v = gauss(rng);
    for (double& v : w.bias) v = gauss(rng);
  }

  // Deep-supervision terms do not depend on the fusion weights; fold them
  // into the recorded loss as a constant.
  double aux_const = 0.0;
  for (const auto& [in, gt] : dataset) {
    if (in.long_active) {
      aux_const += cfg.deep_supervision_weight * renormalized_ce(in.warped_long, gt);
    }
    if (in.short_active) {
      aux_const +=
          cfg.deep_supervision_weight * renormalized_ce(in.warped_short, gt);
    }
  }
  aux_const /= static_cast<double>(dataset.size());

  DenseWeights grad, egrad;
  grad.num_classes = egrad.num_classes = k;

  DenseWeights best_w = w;
  double best = std::numeric_limits<double>::infinity();
  const double inv_examples = 1.0 / static_cast<double>(dataset.size());
  for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
    grad.matrix.assign(w.matrix.size(), 0.0);
    grad.bias.assign(w.bias.size(), 0.0);
    double loss = aux_const;
    for (const auto& [in, gt] : dataset) {
      egrad.matrix.assign(w.matrix.size(), 0.0);
      egrad.bias.assign(w.bias.size(), 0.0);
      loss += main_loss_and_grad(w, in, gt, &egrad) * inv_examples;
      // egrad holds raw per-pixel sums; fold in the per-example mean.
      const double scale =
          inv_examples / static_cast<double>(in.rough.pixel_count());
      for (std::size_t i = 0; i < grad.matrix.size(); ++i) {
        grad.matrix[i] += scale * egrad.matrix[i];
      }
      for (std::size_t i = 0; i < grad.bias.size(); ++i) {
        grad.bias[i] += scale * egrad.bias[i];
      }
    }
    if (loss < best) {
      best = loss;
      best_w = w;
    }
    if (history) history->push_back({epoch, loss, best});
    if (epoch == cfg.epochs) break;
    const double step = static_cast<double>(cfg.learning_rate);
    for (std::size_t i = 0; i < w.matrix.size(); ++i) {
      w.matrix[i] -= step * grad.matrix[i];
    }
    for (std::size_t i = 0; i < w.bias.size(); ++i) {
      w.bias[i] -= step * grad.bias[i];
    }
  }
  return to_float(best_w);
}

double gradient_check(const FusionWeights& w, const FusionInput& in,
                      const LabelMap& gt) {
  validate_weights(w);
  validate_input(w.num_classes, in);
  check_labels(gt, w.num_classes, in.rough.height, in.rough.width);

  DenseWeights base = to_dense(w);
  DenseWeights grad;
  grad.num_classes = base.num_classes;
  grad.matrix.assign(base.matrix.size(), 0.0);
  grad.bias.assign(base.bias.size(), 0.0);
  main_loss_and_grad(base, in, gt, &grad);
  const double npix = static_cast<double>(in.rough.pixel_count());
  for (double& g : grad.matrix) g /= npix;
  for (double& g : grad.bias) g /= npix;

  const double h = 1e-4;
  auto loss_at = [&](const DenseWeights& cand) {
    return main_loss_and_grad(cand, in, gt, nullptr);
  };
  double max_rel = 0.0;
  auto check_param = [&](double* param, double analytic) {
    const double saved = *param;
    *param = saved + h;
    const double lp = loss_at(base);
    *param = saved - h;
    const double lm = loss_at(base);
    *param = saved;
    const double numeric = (lp - lm) / (2.0 * h);
    const double rel =
        std::fabs(analytic - numeric) /
        std::max(1e-4, std::fabs(analytic) + std::fabs(numeric));
    max_rel = std::max(max_rel, rel);
  };
  for (std::size_t i = 0; i < base.matrix.size(); ++i) {
    check_param(&base.matrix[i], grad.matrix[i]);
  }
  for (std::size_t i = 0; i < base.bias.size(); ++i) {
    check_param(&base.bias[i], grad.bias[i]);
  }
  return max_rel;
}

FusionWeights make_passthrough_fusion(int num_classes, float tau) {
  FusionWeights w;
  w.num_classes = num_classes;
  w.matrix.assign(static_cast<std::size_t>(num_classes) * 3 * num_classes, 0.0f);
  w.bias.assign(num_classes, 0.0f);
  for (int c = 0; c < num_classes; ++c) {
    w.matrix[static_cast<std::size_t>(c) * 3 * num_classes + 2 * num_classes +
             c] = tau;
  }
  return w;
}

WeightTable export_weights(const FusionWeights& w) {
  validate_weights(w);
  const int k = w.num_classes;
  WeightTable table;
  table.num_classes = k;
  table.classes.resize(k);
  for (int c = 0; c < k; ++c) {
    auto& row = table.classes[c];
    const float* m = w.matrix.data() + static_cast<std::size_t>(c) * 3 * k;
    row.weights.assign(m, m + 3 * k);
    for (int b = 0; b < 3; ++b) {
      const float* block = m + b * k;
      int best = 0;
      bool flat = true;
      for (int j = 1; j < k; ++j) {
        if (block[j] != block[0]) flat = false;
        if (block[j] > block[best]) best = j;
      }
      row.blocks[b] = {flat ? 0 : best, block[flat ? 0 : best], flat};
    }
  }
  return table;
}

}  // namespace svp
