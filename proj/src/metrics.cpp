#include "svp/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace svp {

std::uint64_t Confusion::total() const {
  std::uint64_t t = 0;
  for (std::uint64_t v : counts) t += v;
  return t;
}

void Confusion::add(const LabelMap& pred, const LabelMap& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw std::invalid_argument("confusion: dimension mismatch");
  }
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    const int g = gt.data[i];
    const int p = pred.data[i];
    if (g >= num_classes || p >= num_classes) {
      throw std::invalid_argument("confusion: label out of range");
    }
    ++at(g, p);
  }
}

Confusion& Confusion::merge(const Confusion& other) {
  if (other.num_classes != num_classes) {
    throw std::invalid_argument("confusion: class count mismatch");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

Confusion confusion(const LabelMap& pred, const LabelMap& gt, int num_classes) {
  Confusion c(num_classes);
  c.add(pred, gt);
  return c;
}

MetricsReport compute_metrics(const Confusion& c, int background_class,
                              bool include_background) {
  const int k = c.num_classes;
  const std::uint64_t total = c.total();
  if (total == 0) {
    throw std::invalid_argument("compute_metrics: empty confusion");
  }

  MetricsReport r;
  r.per_class_precision.assign(k, 0.0);
  r.per_class_recall.assign(k, 0.0);
  r.per_class_f1.assign(k, 0.0);
  r.class_included.assign(k, false);

  std::uint64_t diag = 0;
  std::uint64_t fg_total = 0, fg_correct = 0;
  for (int g = 0; g < k; ++g) {
    diag += c.at(g, g);
    if (g != background_class) {
      for (int p = 0; p < k; ++p) fg_total += c.at(g, p);
      fg_correct += c.at(g, g);
    }
  }
  r.accuracy = static_cast<double>(diag) / static_cast<double>(total);
  // No foreground in ground truth: vacuously perfect rather than NaN.
  r.fg_accuracy = fg_total == 0 ? 1.0
                                : static_cast<double>(fg_correct) /
                                      static_cast<double>(fg_total);

  int included = 0;
  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (int cls = 0; cls < k; ++cls) {
    std::uint64_t gt_count = 0, pred_count = 0;
    for (int j = 0; j < k; ++j) {
      gt_count += c.at(cls, j);
      pred_count += c.at(j, cls);
    }
    if (gt_count == 0 && pred_count == 0) continue;  // absent everywhere
    const std::uint64_t tp = c.at(cls, cls);
    const double prec =
        pred_count == 0 ? 0.0
                        : static_cast<double>(tp) / static_cast<double>(pred_count);
    const double rec =
        gt_count == 0 ? 0.0
                      : static_cast<double>(tp) / static_cast<double>(gt_count);
    const double f1 =
        (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    r.per_class_precision[cls] = prec;
    r.per_class_recall[cls] = rec;
    r.per_class_f1[cls] = f1;
    r.class_included[cls] = true;
    if (!include_background && cls == background_class) continue;
    ++included;
    sum_p += prec;
    sum_r += rec;
    sum_f += f1;
  }
  if (included > 0) {
    r.avg_precision = sum_p / included;
    r.avg_recall = sum_r / included;
    r.avg_f1 = sum_f / included;
  }
  return r;
}

MetricsReport aggregate_report(const std::vector<Confusion>& per_video,
                               int background_class, bool include_background) {
  if (per_video.empty()) {
    throw std::invalid_argument("aggregate_report: no reports");
  }
  Confusion sum(per_video.front().num_classes);
  for (const Confusion& c : per_video) sum.merge(c);
  return compute_metrics(sum, background_class, include_background);
}

namespace {
std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}
}  // namespace

std::string report_csv_header(const std::vector<std::string>& class_names) {
  std::string out = "method";
  for (const auto& n : class_names) out += "," + n;
  out += ",accuracy,fg_accuracy,avg_precision,avg_recall,avg_f1";
  return out;
}

std::string report_csv_row(const std::string& label, const MetricsReport& r) {
  std::string out = label;
  for (double f : r.per_class_f1) out += "," + fmt4(f);
  out += "," + fmt4(r.accuracy);
  out += "," + fmt4(r.fg_accuracy);
  out += "," + fmt4(r.avg_precision);
  out += "," + fmt4(r.avg_recall);
  out += "," + fmt4(r.avg_f1);
  return out;
}

std::vector<std::string> default_class_names(int num_classes) {
  std::vector<std::string> names;
  names.reserve(num_classes);
  names.emplace_back("bk");
  for (int i = 1; i < num_classes; ++i) {
    names.push_back("class" + std::to_string(i));
  }
  return names;
}

}  // namespace svp
