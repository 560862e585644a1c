#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentforge/data/split.hpp"
#include "intentforge/metrics/metrics.hpp"
#include "intentforge/nn/loss.hpp"
#include "intentforge/trainer/trainer.hpp"

namespace intentforge::baselines {

struct LogRegParams {
  std::vector<double> w;
  double b = 0.0;
};

struct LogRegConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  bool class_weighting = true;

  void validate() const;
};

nlohmann::json to_json(const LogRegConfig& c);
LogRegConfig logreg_config_from_json(const nlohmann::json& j, const LogRegConfig& base = {});

struct LogRegModel {
  LogRegParams params;
  data::FeatureSchema schema;
  std::string schema_digest;
  LogRegConfig config;
  double val_loss = 0.0;
};

/// One row per session: the row itself in flat mode, the mean over the
/// session's events in sequence mode.
Matrix session_means(const data::FeatureMatrix& m);

/// Weighted BCE plus (l2/2)·|w|².
double logreg_loss(const LogRegParams& p, const Matrix& x, std::span<const int> labels,
                   nn::ClassWeights weights, double l2);
LogRegParams logreg_gradient(const LogRegParams& p, const Matrix& x, std::span<const int> labels,
                             nn::ClassWeights weights, double l2);

std::vector<double> predict_logreg(const LogRegParams& p, const Matrix& rows);

/// Full-batch Adam from zero parameters. Deterministic; no randomness is drawn.
LogRegModel train_logreg(const data::DatasetSplit& split, const LogRegConfig& config);

inline const std::vector<double> kComparisonThresholds{0.5, 0.3, 0.6, 0.9};

struct ComparisonRow {
  std::string model;
  bool available = true;
  double accuracy = 0.0;
  double precision = 0.0;  // purchase class
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

/// Rows: logistic regression, random forest and XGBoost (never available),
/// plain LSTM, then the DQN-style model at each threshold. Baselines are
/// scored at 0.5. Every artifact must share the test split's schema digest.
ComparisonTable compare(const trainer::Checkpoint& model, const LogRegModel& logreg,
                        const trainer::Checkpoint& plain_lstm, const data::DatasetSplit& split,
                        std::span<const double> thresholds = kComparisonThresholds);

/// Columns: model,accuracy,precision,recall,f1,auc_roc (n/a for absent rows).
std::string comparison_csv(const ComparisonTable& t);
std::string format_comparison(const ComparisonTable& t);

}  // namespace intentforge::baselines
