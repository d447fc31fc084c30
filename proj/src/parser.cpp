#include "svp/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace svp {

namespace {

constexpr double kLogFloor = 1e-12;
constexpr float kStdFloor = 1e-6f;

struct DenseParser {
  int num_classes = 0;
  std::vector<double> matrix;  // K x 11
  std::vector<double> bias;    // K
};

// Standardized feature rows for a set of pixels, plus their labels.
struct TrainSet {
  std::vector<float> features;  // n x 11
  std::vector<std::uint8_t> labels;
  std::vector<float> mean, stddev;
  std::size_t count() const { return labels.size(); }
};

void standardize(TrainSet& set) {
  const std::size_t n = set.count();
  set.mean.assign(kParserFeatureDim, 0.0f);
  set.stddev.assign(kParserFeatureDim, 0.0f);
  std::vector<double> mean(kParserFeatureDim, 0.0), var(kParserFeatureDim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < kParserFeatureDim; ++f) {
      mean[f] += set.features[i * kParserFeatureDim + f];
    }
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < kParserFeatureDim; ++f) {
      const double d = set.features[i * kParserFeatureDim + f] - mean[f];
      var[f] += d * d;
    }
  }
  for (int f = 0; f < kParserFeatureDim; ++f) {
    set.mean[f] = static_cast<float>(mean[f]);
    set.stddev[f] = std::max(
        kStdFloor, static_cast<float>(std::sqrt(var[f] / static_cast<double>(n))));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < kParserFeatureDim; ++f) {
      float& v = set.features[i * kParserFeatureDim + f];
      v = (v - set.mean[f]) / set.stddev[f];
    }
  }
}

// Mean cross-entropy and, optionally, raw per-pixel gradient sums.
double loss_and_grad(const DenseParser& w, const TrainSet& set,
                     DenseParser* grad) {
  const int k = w.num_classes;
  std::vector<double> z(k), q(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < set.count(); ++i) {
    const float* x = set.features.data() + i * kParserFeatureDim;
    for (int c = 0; c < k; ++c) {
      const double* row =
          w.matrix.data() + static_cast<std::size_t>(c) * kParserFeatureDim;
      double acc = w.bias[c];
      for (int f = 0; f < kParserFeatureDim; ++f) acc += row[f] * x[f];
      z[c] = acc;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      q[c] = std::exp(z[c] - zmax);
      sum += q[c];
    }
    for (int c = 0; c < k; ++c) q[c] /= sum;
    const int y = set.labels[i];
    loss += -std::log(std::max(q[y], kLogFloor));
    if (grad && q[y] > kLogFloor) {
      for (int c = 0; c < k; ++c) {
        const double delta = q[c] - (c == y ? 1.0 : 0.0);
        grad->bias[c] += delta;
        double* grow =
            grad->matrix.data() + static_cast<std::size_t>(c) * kParserFeatureDim;
        for (int f = 0; f < kParserFeatureDim; ++f) grow[f] += delta * x[f];
      }
    }
  }
  return loss / static_cast<double>(set.count());
}

TrainSet build_train_set(const std::vector<const Image*>& images,
                         const std::vector<const LabelMap*>& gts,
                         int num_classes) {
  TrainSet set;
  for (std::size_t v = 0; v < images.size(); ++v) {
    const Image& img = *images[v];
    const LabelMap& gt = *gts[v];
    if (img.height < 1 || img.width < 1) {
      throw std::invalid_argument("train_parser: empty image");
    }
    if (gt.height != img.height || gt.width != img.width) {
      throw std::invalid_argument("train_parser: label extent mismatch");
    }
    for (std::uint8_t l : gt.data) {
      if (l >= num_classes) {
        throw std::invalid_argument("train_parser: label out of range");
      }
    }
    const Grid feats = extract_features(img);
    set.features.insert(set.features.end(), feats.data.begin(),
                        feats.data.end());
    set.labels.insert(set.labels.end(), gt.data.begin(), gt.data.end());
  }
  standardize(set);
  return set;
}

}  // namespace

Grid extract_features(const Image& img) {
  if (img.channels != 3) {
    throw std::invalid_argument("extract_features: expected RGB image");
  }
  Grid out(img.height, img.width, kParserFeatureDim);
  const int h = img.height, w = img.width;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float* f = out.pixel(y, x);
      const float* px = img.pixel(y, x);
      f[0] = px[0];
      f[1] = px[1];
      f[2] = px[2];
      f[3] = static_cast<float>(x) / static_cast<float>(w);
      f[4] = static_cast<float>(y) / static_cast<float>(h);
      // 3x3 neighborhood mean and population standard deviation, clamped.
      double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = std::clamp(x + dx, 0, w - 1);
          const float* n = img.pixel(sy, sx);
          for (int c = 0; c < 3; ++c) {
            sum[c] += n[c];
            sq[c] += static_cast<double>(n[c]) * n[c];
          }
        }
      }
      for (int c = 0; c < 3; ++c) {
        const double mean = sum[c] / 9.0;
        const double var = std::max(0.0, sq[c] / 9.0 - mean * mean);
        f[5 + c] = static_cast<float>(mean);
        f[8 + c] = static_cast<float>(std::sqrt(var));
      }
    }
  }
  return out;
}

ParserModel train_parser(const Image& img, const LabelMap& gt,
                         const TrainConfig& cfg, int num_classes,
                         std::vector<TrainRecord>* history) {
  return train_parser(std::vector<const Image*>{&img},
                      std::vector<const LabelMap*>{&gt}, cfg, num_classes,
                      history);
}

ParserModel train_parser(const std::vector<const Image*>& images,
                         const std::vector<const LabelMap*>& gts,
                         const TrainConfig& cfg, int num_classes,
                         std::vector<TrainRecord>* history) {
  if (images.empty() || images.size() != gts.size()) {
    throw std::invalid_argument("train_parser: empty or mismatched dataset");
  }
  if (num_classes < 1 || num_classes > 256) {
    throw std::invalid_argument("train_parser: bad class count");
  }
  if (cfg.learning_rate < 0.0f || cfg.epochs < 1) {
    throw std::invalid_argument("train_parser: bad config");
  }
  TrainSet set = build_train_set(images, gts, num_classes);

  DenseParser w;
  w.num_classes = num_classes;
  w.matrix.resize(static_cast<std::size_t>(num_classes) * kParserFeatureDim);
  w.bias.resize(num_classes);
  std::mt19937 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : w.matrix) v = gauss(rng);
  for (double& v : w.bias) v = gauss(rng);

  DenseParser grad;
  grad.num_classes = num_classes;
  DenseParser best_w = w;
  double best = std::numeric_limits<double>::infinity();
  const double inv_n = 1.0 / static_cast<double>(set.count());
  for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
    grad.matrix.assign(w.matrix.size(), 0.0);
    grad.bias.assign(w.bias.size(), 0.0);
    const double loss = loss_and_grad(w, set, &grad);
    if (loss < best) {
      best = loss;
      best_w = w;
    }
    if (history) history->push_back({epoch, loss, best});
    if (epoch == cfg.epochs) break;
    const double step = static_cast<double>(cfg.learning_rate) * inv_n;
    for (std::size_t i = 0; i < w.matrix.size(); ++i) {
      w.matrix[i] -= step * grad.matrix[i];
    }
    for (std::size_t i = 0; i < w.bias.size(); ++i) {
      w.bias[i] -= step * grad.bias[i];
    }
  }

  ParserModel model;
  model.num_classes = num_classes;
  model.matrix.assign(best_w.matrix.begin(), best_w.matrix.end());
  model.bias.assign(best_w.bias.begin(), best_w.bias.end());
  model.feat_mean = set.mean;
  model.feat_std = set.stddev;
  return model;
}

ProbMap parse_frame(const ParserModel& model, const Image& img) {
  if (model.num_classes < 1 ||
      model.matrix.size() !=
          static_cast<std::size_t>(model.num_classes) * kParserFeatureDim) {
    throw std::invalid_argument("parse_frame: malformed model");
  }
  const Grid feats = extract_features(img);
  const int k = model.num_classes;
  ProbMap out(img.height, img.width, k);
  std::vector<float> z(k);
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    const float* raw = feats.data.data() + p * kParserFeatureDim;
    float x[kParserFeatureDim];
    for (int f = 0; f < kParserFeatureDim; ++f) {
      x[f] = (raw[f] - model.feat_mean[f]) / model.feat_std[f];
    }
    for (int c = 0; c < k; ++c) {
      const float* row =
          model.matrix.data() + static_cast<std::size_t>(c) * kParserFeatureDim;
      float acc = model.bias[c];
      for (int f = 0; f < kParserFeatureDim; ++f) acc += row[f] * x[f];
      z[c] = acc;
    }
    const float m = *std::max_element(z.begin(), z.end());
    float sum = 0.0f;
    float* o = out.data.data() + p * k;
    for (int c = 0; c < k; ++c) {
      o[c] = std::exp(z[c] - m);
      sum += o[c];
    }
    for (int c = 0; c < k; ++c) o[c] /= sum;
  }
  return out;
}

double parser_gradient_check(const ParserModel& model, const Image& img,
                             const LabelMap& gt) {
  std::vector<const Image*> imgs{&img};
  std::vector<const LabelMap*> gts{&gt};
  TrainSet set = build_train_set(imgs, gts, model.num_classes);

  DenseParser base;
  base.num_classes = model.num_classes;
  base.matrix.assign(model.matrix.begin(), model.matrix.end());
  base.bias.assign(model.bias.begin(), model.bias.end());

  DenseParser grad;
  grad.num_classes = base.num_classes;
  grad.matrix.assign(base.matrix.size(), 0.0);
  grad.bias.assign(base.bias.size(), 0.0);
  loss_and_grad(base, set, &grad);
  const double inv_n = 1.0 / static_cast<double>(set.count());
  for (double& g : grad.matrix) g *= inv_n;
  for (double& g : grad.bias) g *= inv_n;

  const double h = 1e-4;
  double max_rel = 0.0;
  auto check_param = [&](double* param, double analytic) {
    const double saved = *param;
    *param = saved + h;
    const double lp = loss_and_grad(base, set, nullptr);
    *param = saved - h;
    const double lm = loss_and_grad(base, set, nullptr);
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

}  // namespace svp
