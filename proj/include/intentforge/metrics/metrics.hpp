#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace intentforge::metrics {

struct ConfusionMatrix {
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tp = 0;

  std::uint64_t total() const noexcept { return tn + fp + fn + tp; }
  std::uint64_t predicted_positive() const noexcept { return fp + tp; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// A sample is predicted positive iff p >= threshold.
ConfusionMatrix confusion(std::span<const double> probs, std::span<const int> labels,
                          double threshold);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct ClassReport {
  std::array<ClassMetrics, 2> classes;
  double accuracy = 0.0;
};

/// Undefined ratios (0/0) are reported as 0.
ClassReport report(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// One curve point per distinct score, so tied scores move diagonally.
RocCurve roc_auc(std::span<const double> probs, std::span<const int> labels);

inline const std::vector<double> kSweepThresholds{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

struct SweepRow {
  double threshold = 0.0;
  ConfusionMatrix confusion;
  ClassReport report;
};

struct ThresholdSweep {
  std::vector<SweepRow> rows;
};

ThresholdSweep sweep(std::span<const double> probs, std::span<const int> labels,
                     std::span<const double> thresholds = kSweepThresholds);

// Rendering. CSV column orders are fixed:
//   report/sweep: threshold,class,precision,recall,f1,support,accuracy
//   confusion:    threshold,tn,fp,fn,tp
//   roc:          fpr,tpr
std::string sweep_csv(const ThresholdSweep& s);
std::string confusion_csv(const ThresholdSweep& s);
std::string roc_csv(const RocCurve& roc);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const ClassReport& r);
nlohmann::json to_json(const ThresholdSweep& s);

/// Plain-text tables for the terminal.
std::string format_report(const ClassReport& r, const ConfusionMatrix& cm, double threshold);
std::string format_sweep(const ThresholdSweep& s);

}  // namespace intentforge::metrics
