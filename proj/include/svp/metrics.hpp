#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svp/grid.hpp"

namespace svp {

/// KxK pixel counts; cell (gt, pred) counts pixels of ground-truth class gt
/// predicted as pred. Accumulation is a commutative monoid: confusions from
/// several frames or videos can be summed before computing metrics.
struct Confusion {
  int num_classes = 0;
  std::vector<std::uint64_t> counts;  // gt-major

  Confusion() = default;
  explicit Confusion(int k)
      : num_classes(k),
        counts(static_cast<std::size_t>(k) * k, 0) {}

  std::uint64_t& at(int gt, int pred) {
    return counts[static_cast<std::size_t>(gt) * num_classes + pred];
  }
  std::uint64_t at(int gt, int pred) const {
    return counts[static_cast<std::size_t>(gt) * num_classes + pred];
  }
  std::uint64_t total() const;
  void add(const LabelMap& pred, const LabelMap& gt);
  Confusion& merge(const Confusion& other);
};

Confusion confusion(const LabelMap& pred, const LabelMap& gt, int num_classes);

/// PaperDoll-style summary: overall accuracy, foreground accuracy, and
/// macro-averaged precision/recall/F1 over classes present in ground truth
/// or prediction (0/0 cells count as 0; absent classes are excluded from the
/// averages and left at 0 in per_class_f1).
struct MetricsReport {
  double accuracy = 0.0;
  double fg_accuracy = 0.0;
  double avg_precision = 0.0;
  double avg_recall = 0.0;
  double avg_f1 = 0.0;
  std::vector<double> per_class_precision;
  std::vector<double> per_class_recall;
  std::vector<double> per_class_f1;
  std::vector<bool> class_included;
};

/// `include_background` controls whether the background class participates
/// in the macro averages (it always appears in the per-class vectors).
MetricsReport compute_metrics(const Confusion& c, int background_class,
                              bool include_background = true);

/// Pixel-count-weighted aggregation across videos: confusions are summed
/// before the metrics are computed.
MetricsReport aggregate_report(const std::vector<Confusion>& per_video,
                               int background_class,
                               bool include_background = true);

/// CSV row in the tables' column order: label, per-class F1, then the
/// summary quintet. Numbers are printed with 4 decimal places.
std::string report_csv_header(const std::vector<std::string>& class_names);
std::string report_csv_row(const std::string& label, const MetricsReport& r);

std::vector<std::string> default_class_names(int num_classes);

}  // namespace svp
