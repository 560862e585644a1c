#include "intentforge/metrics/metrics.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "intentforge/error.hpp"

namespace intentforge::metrics {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void check_lengths(std::span<const double> probs, std::span<const int> labels) {
  require(probs.size() == labels.size(), ErrorKind::InvalidDimension,
          fmt::format("{} probabilities for {} labels", probs.size(), labels.size()));
}

void check_threshold(double t) {
  require(t >= 0.0 && t <= 1.0, ErrorKind::Config,
          fmt::format("threshold {} outside [0,1]", t));
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> probs, std::span<const int> labels,
                          double threshold) {
  check_lengths(probs, labels);
  check_threshold(threshold);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) {
      ++(predicted ? cm.tp : cm.fn);
    } else {
      ++(predicted ? cm.fp : cm.tn);
    }
  }
  return cm;
}

ClassReport report(const ConfusionMatrix& cm) {
  require(cm.total() > 0, ErrorKind::EmptyInput, "confusion matrix is empty");
  ClassReport r;
  auto& neg = r.classes[0];
  neg.precision = ratio(cm.tn, cm.tn + cm.fn);
  neg.recall = ratio(cm.tn, cm.tn + cm.fp);
  neg.f1 = harmonic(neg.precision, neg.recall);
  neg.support = cm.tn + cm.fp;
  auto& pos = r.classes[1];
  pos.precision = ratio(cm.tp, cm.tp + cm.fp);
  pos.recall = ratio(cm.tp, cm.tp + cm.fn);
  pos.f1 = harmonic(pos.precision, pos.recall);
  pos.support = cm.tp + cm.fn;
  r.accuracy = ratio(cm.tn + cm.tp, cm.total());
  return r;
}

RocCurve roc_auc(std::span<const double> probs, std::span<const int> labels) {
  check_lengths(probs, labels);
  const auto positives = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1));
  const std::uint64_t negatives = labels.size() - positives;
  require(positives > 0 && negatives > 0, ErrorKind::DegenerateLabels,
          "ROC needs both classes present");

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0, fp = 0;
  // Integrate in counts and divide once at the end: tp and fp are exact, so
  // the sum of trapezoids is exactly twice the pairwise statistic.
  double twice_area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = probs[order[i]];
    std::uint64_t dtp = 0, dfp = 0;
    for (; i < order.size() && probs[order[i]] == score; ++i) ++(labels[order[i]] == 1 ? dtp : dfp);
    twice_area += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({ratio(fp, negatives), ratio(tp, positives)});
  }
  roc.auc = twice_area / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return roc;
}

ThresholdSweep sweep(std::span<const double> probs, std::span<const int> labels,
                     std::span<const double> thresholds) {
  check_lengths(probs, labels);
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    require(thresholds[i] > thresholds[i - 1], ErrorKind::Config,
            "sweep thresholds must be strictly increasing");
  }
  ThresholdSweep s;
  for (double t : thresholds) {
    auto cm = confusion(probs, labels, t);
    s.rows.push_back({t, cm, report(cm)});
  }
  return s;
}

std::string sweep_csv(const ThresholdSweep& s) {
  std::string out = "threshold,class,precision,recall,f1,support,accuracy\n";
  for (const auto& row : s.rows) {
    for (int c = 0; c < 2; ++c) {
      const auto& m = row.report.classes[static_cast<std::size_t>(c)];
      out += fmt::format("{},{},{},{},{},{},{}\n", row.threshold, c, m.precision, m.recall, m.f1,
                         m.support, row.report.accuracy);
    }
  }
  return out;
}

std::string confusion_csv(const ThresholdSweep& s) {
  std::string out = "threshold,tn,fp,fn,tp\n";
  for (const auto& row : s.rows) {
    const auto& cm = row.confusion;
    out += fmt::format("{},{},{},{},{}\n", row.threshold, cm.tn, cm.fp, cm.fn, cm.tp);
  }
  return out;
}

std::string roc_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : roc.points) out += fmt::format("{},{}\n", p.fpr, p.tpr);
  return out;
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}, {"tp", cm.tp}};
}

nlohmann::json to_json(const ClassReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (int c = 0; c < 2; ++c) {
    const auto& m = r.classes[static_cast<std::size_t>(c)];
    classes.push_back({{"class", c},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support}});
  }
  return {{"classes", classes}, {"accuracy", r.accuracy}};
}

nlohmann::json to_json(const ThresholdSweep& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : s.rows) {
    rows.push_back({{"threshold", row.threshold},
                    {"confusion", to_json(row.confusion)},
                    {"report", to_json(row.report)}});
  }
  return rows;
}

std::string format_report(const ClassReport& r, const ConfusionMatrix& cm, double threshold) {
  std::string out = fmt::format("threshold {:.2f}\n", threshold);
  out += fmt::format("{:<16}{:>10}{:>10}{:>10}{:>10}\n", "Class", "Precision", "Recall",
                     "F1-score", "Support");
  const char* names[] = {"0 (No Purchase)", "1 (Purchase)"};
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& m = r.classes[c];
    out += fmt::format("{:<16}{:>10.4f}{:>10.4f}{:>10.4f}{:>10}\n", names[c], m.precision,
                       m.recall, m.f1, m.support);
  }
  out += fmt::format("accuracy {:.4f}\n\n", r.accuracy);
  out += fmt::format("{:<20}{:>22}{:>20}\n", "", "Predicted No Purchase", "Predicted Purchase");
  out += fmt::format("{:<20}{:>22}{:>20}\n", "Actual No Purchase", cm.tn, cm.fp);
  out += fmt::format("{:<20}{:>22}{:>20}\n", "Actual Purchase", cm.fn, cm.tp);
  return out;
}

std::string format_sweep(const ThresholdSweep& s) {
  std::string out = fmt::format("{:<10}{:<6}{:>10}{:>10}{:>10}{:>10}\n", "Threshold", "Class",
                                "Precision", "Recall", "F1-score", "Accuracy");
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& m = row.report.classes[c];
      const std::string t = c == 0 ? fmt::format("{:.1f}", row.threshold) : "";
      const std::string acc = c == 0 ? fmt::format("{:.4f}", row.report.accuracy) : "";
      out += fmt::format("{:<10}{:<6}{:>10.4f}{:>10.4f}{:>10.4f}{:>10}\n", t, c, m.precision,
                         m.recall, m.f1, acc);
    }
  }
  return out;
}

}  // namespace intentforge::metrics
