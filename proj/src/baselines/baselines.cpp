#include "intentforge/baselines/baselines.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "intentforge/nn/adam.hpp"

namespace intentforge::baselines {

namespace {

std::vector<double> logits(const LogRegParams& p, const Matrix& x) {
  require(x.cols() == p.w.size(), ErrorKind::InvalidDimension,
          fmt::format("logistic regression expects {} features, got {}", p.w.size(),
                      shape_string(x)));
  std::vector<double> z(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    double acc = p.b;
    for (std::size_t c = 0; c < row.size(); ++c) acc += p.w[c] * row[c];
    z[i] = acc;
  }
  return z;
}

ComparisonRow score(std::string name, std::span<const double> probs, std::span<const int> labels,
                    double threshold, double auc) {
  const auto r = metrics::report(metrics::confusion(probs, labels, threshold));
  return {std::move(name), true, r.accuracy, r.classes[1].precision, r.classes[1].recall,
          r.classes[1].f1, auc};
}

}  // namespace

void LogRegConfig::validate() const {
  require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorKind::Config,
          "logreg learning_rate must be positive");
  require(epochs >= 1, ErrorKind::Config, "logreg epochs must be at least 1");
  require(std::isfinite(l2) && l2 >= 0.0, ErrorKind::Config, "logreg l2 must be non-negative");
}

nlohmann::json to_json(const LogRegConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"l2", c.l2},
          {"class_weighting", c.class_weighting}};
}

LogRegConfig logreg_config_from_json(const nlohmann::json& j, const LogRegConfig& base) {
  require(j.is_object(), ErrorKind::Config, "logreg config must be an object");
  LogRegConfig c = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "l2") c.l2 = value.get<double>();
      else if (key == "class_weighting") c.class_weighting = value.get<bool>();
      else fail(ErrorKind::Config, "unknown logreg key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::Config, "logreg key '" + key + "' has the wrong type");
    }
  }
  return c;
}

Matrix session_means(const data::FeatureMatrix& m) {
  Matrix out(m.sessions(), m.width);
  for (std::size_t i = 0; i < m.sessions(); ++i) {
    const std::size_t begin = m.offsets[i];
    const std::size_t end = m.offsets[i + 1];
    auto dst = out.row(i);
    for (std::size_t r = begin; r < end; ++r) {
      auto src = m.rows.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
    const double n = static_cast<double>(end - begin);
    for (double& v : dst) v /= n;
  }
  return out;
}

double logreg_loss(const LogRegParams& p, const Matrix& x, std::span<const int> labels,
                   nn::ClassWeights weights, double l2) {
  auto probs = logits(p, x);
  for (double& z : probs) z = sigmoid(z);
  double penalty = 0.0;
  for (double w : p.w) penalty += w * w;
  return nn::weighted_bce(probs, labels, weights) + 0.5 * l2 * penalty;
}

LogRegParams logreg_gradient(const LogRegParams& p, const Matrix& x, std::span<const int> labels,
                             nn::ClassWeights weights, double l2) {
  auto probs = logits(p, x);
  for (double& z : probs) z = sigmoid(z);
  const auto g = nn::weighted_bce_logit_grad(probs, labels, weights);
  LogRegParams grad{std::vector<double>(p.w.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) grad.w[c] += g[i] * row[c];
    grad.b += g[i];
  }
  for (std::size_t c = 0; c < p.w.size(); ++c) grad.w[c] += l2 * p.w[c];
  return grad;
}

std::vector<double> predict_logreg(const LogRegParams& p, const Matrix& rows) {
  auto z = logits(p, rows);
  for (double& v : z) v = sigmoid(v);
  return z;
}

LogRegModel train_logreg(const data::DatasetSplit& split, const LogRegConfig& config) {
  config.validate();
  require(split.train.sessions() >= 1, ErrorKind::EmptyInput, "no training sessions");
  const Matrix x = session_means(split.train);
  const auto& y = split.train.labels;
  const nn::ClassWeights weights =
      config.class_weighting ? data::class_weights(y) : nn::ClassWeights{};

  LogRegModel model;
  model.schema = split.schema;
  model.schema_digest = split.schema.digest();
  model.config = config;
  auto& p = model.params;
  p.w.assign(x.cols(), 0.0);
  nn::AdamState adam;
  std::span<double> b_span(&p.b, 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = logreg_loss(p, x, y, weights, config.l2);
    require(std::isfinite(loss), ErrorKind::Divergence,
            fmt::format("logistic regression loss is not finite at epoch {}", epoch));
    const auto grad = logreg_gradient(p, x, y, weights, config.l2);
    const std::array<std::span<double>, 2> params{std::span<double>(p.w), b_span};
    const std::array<std::span<const double>, 2> grads{std::span<const double>(grad.w),
                                                       std::span<const double>(&grad.b, 1)};
    nn::adam_step(params, grads, adam, config.learning_rate);
  }
  if (split.validation.sessions() > 0) {
    model.val_loss = nn::weighted_bce(predict_logreg(p, session_means(split.validation)),
                                      split.validation.labels, weights);
  }
  spdlog::info("logistic regression: {} epochs, validation loss {:.5f}", config.epochs,
               model.val_loss);
  return model;
}

ComparisonTable compare(const trainer::Checkpoint& model, const LogRegModel& logreg,
                        const trainer::Checkpoint& plain_lstm, const data::DatasetSplit& split,
                        std::span<const double> thresholds) {
  const std::string digest = split.schema.digest();
  const std::pair<const std::string*, const char*> artifacts[] = {
      {&model.schema_digest, "model checkpoint"},
      {&logreg.schema_digest, "logistic regression"},
      {&plain_lstm.schema_digest, "LSTM checkpoint"}};
  for (const auto& [d, name] : artifacts) {
    require(*d == digest, ErrorKind::IncompatibleArtifacts,
            std::string(name) + " was trained on a different feature schema");
  }
  const auto& test = split.test;
  const auto& labels = test.labels;
  const std::size_t steps = model.config.max_sequence_steps;

  ComparisonTable t;
  const auto lr_probs = predict_logreg(logreg.params, session_means(test));
  t.rows.push_back(score("Logistic Regression", lr_probs, labels, 0.5,
                         metrics::roc_auc(lr_probs, labels).auc));
  t.rows.push_back({"Random Forest", false});
  t.rows.push_back({"XGBoost", false});
  const auto lstm_probs = trainer::predict(plain_lstm.params, test, plain_lstm.config.max_sequence_steps);
  t.rows.push_back(score("LSTM", lstm_probs, labels, 0.5, metrics::roc_auc(lstm_probs, labels).auc));
  const auto probs = trainer::predict(model.params, test, steps);
  const double auc = metrics::roc_auc(probs, labels).auc;
  for (double th : thresholds) {
    t.rows.push_back(score(fmt::format("Our Model ({})", th), probs, labels, th, auc));
  }
  return t;
}

std::string comparison_csv(const ComparisonTable& t) {
  std::string out = "model,accuracy,precision,recall,f1,auc_roc\n";
  for (const auto& r : t.rows) {
    if (!r.available) {
      out += fmt::format("{},n/a,n/a,n/a,n/a,n/a\n", r.model);
    } else {
      out += fmt::format("{},{},{},{},{},{}\n", r.model, r.accuracy, r.precision, r.recall, r.f1,
                         r.auc);
    }
  }
  return out;
}

std::string format_comparison(const ComparisonTable& t) {
  std::string out = fmt::format("{:<22}{:>10}{:>11}{:>10}{:>10}{:>10}\n", "Model / Threshold",
                                "Accuracy", "Precision", "Recall", "F1-Score", "AUC-ROC");
  for (const auto& r : t.rows) {
    if (!r.available) {
      out += fmt::format("{:<22}{:>10}{:>11}{:>10}{:>10}{:>10}\n", r.model, "n/a", "n/a", "n/a",
                         "n/a", "n/a");
    } else {
      out += fmt::format("{:<22}{:>10.4f}{:>11.4f}{:>10.4f}{:>10.4f}{:>10.4f}\n", r.model,
                         r.accuracy, r.precision, r.recall, r.f1, r.auc);
    }
  }
  return out;
}

}  // namespace intentforge::baselines
