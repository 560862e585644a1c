#include "intentforge/trainer/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "intentforge/nn/adam.hpp"
#include "intentforge/nn/loss.hpp"

namespace intentforge::trainer {

namespace {

constexpr std::size_t kEvalChunk = 1024;

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Config, fmt::format("train key '{}' has the wrong type", key));
  }
}

}  // namespace

void TrainConfig::validate() const {
  require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorKind::Config,
          "learning_rate must be positive");
  require(batch_size >= 2, ErrorKind::Config, "batch_size must be at least 2");
  require(max_epochs >= 1, ErrorKind::Config, "max_epochs must be at least 1");
  require(patience <= max_epochs, ErrorKind::Config, "patience must not exceed max_epochs");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, ErrorKind::Config,
          "dropout_rate must be in [0,1)");
  require(epsilon_end > 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0,
          ErrorKind::Config, "need 0 < epsilon_end <= epsilon_start <= 1");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, ErrorKind::Config,
          "noise_sigma must be non-negative");
  require(max_sequence_steps >= 1, ErrorKind::Config, "max_sequence_steps must be at least 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"dropout_rate", c.dropout_rate},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"noise_sigma", c.noise_sigma},
          {"replay_capacity", c.replay_capacity},
          {"seed", c.seed},
          {"replay_enabled", c.replay_enabled},
          {"exploration_enabled", c.exploration_enabled},
          {"class_weighting", c.class_weighting},
          {"max_sequence_steps", c.max_sequence_steps}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base) {
  require(j.is_object(), ErrorKind::Config, "train config must be an object");
  const auto known = to_json(base);
  for (const auto& [key, _] : j.items()) {
    require(known.contains(key), ErrorKind::Config, "unknown train key '" + key + "'");
  }
  TrainConfig c = base;
  read_key(j, "learning_rate", c.learning_rate);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "max_epochs", c.max_epochs);
  read_key(j, "patience", c.patience);
  read_key(j, "dropout_rate", c.dropout_rate);
  read_key(j, "epsilon_start", c.epsilon_start);
  read_key(j, "epsilon_end", c.epsilon_end);
  read_key(j, "noise_sigma", c.noise_sigma);
  read_key(j, "replay_capacity", c.replay_capacity);
  read_key(j, "seed", c.seed);
  read_key(j, "replay_enabled", c.replay_enabled);
  read_key(j, "exploration_enabled", c.exploration_enabled);
  read_key(j, "class_weighting", c.class_weighting);
  read_key(j, "max_sequence_steps", c.max_sequence_steps);
  return c;
}

double epsilon_schedule(std::size_t epoch, const TrainConfig& config) {
  require(epoch < config.max_epochs, ErrorKind::Index,
          fmt::format("epoch {} outside [0, {})", epoch, config.max_epochs));
  if (config.max_epochs == 1) return config.epsilon_start;
  if (epoch + 1 == config.max_epochs) return config.epsilon_end;
  const double frac = static_cast<double>(epoch) / static_cast<double>(config.max_epochs - 1);
  return config.epsilon_start * std::pow(config.epsilon_end / config.epsilon_start, frac);
}

ReplayMemory::ReplayMemory(std::size_t capacity, std::size_t width)
    : capacity_(capacity), width_(width) {
  require(capacity >= 1, ErrorKind::Config, "replay capacity must be at least 1");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayMemory::remember(Sample sample) {
  require(sample.rows.cols() == width_ && sample.rows.rows() >= 1, ErrorKind::InvalidDimension,
          fmt::format("sample {} does not fit memory width {}", shape_string(sample.rows), width_));
  if (items_.size() < capacity_) {
    items_.push_back(std::move(sample));
  } else {
    items_[next_] = std::move(sample);
  }
  next_ = (next_ + 1) % capacity_;
  ++insertions_;
}

const Sample& ReplayMemory::at(std::size_t i) const {
  require(i < items_.size(), ErrorKind::Index, "replay index out of range");
  // Once wrapped, next_ points at the oldest entry.
  return items_.size() < capacity_ ? items_[i] : items_[(next_ + i) % capacity_];
}

std::vector<std::size_t> sample_indices(std::size_t memory_size, std::size_t batch_size, Rng& rng) {
  require(memory_size >= batch_size, ErrorKind::InsufficientMemory,
          fmt::format("memory holds {} samples, batch needs {}", memory_size, batch_size));
  std::vector<std::size_t> idx(memory_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, memory_size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(batch_size);
  return idx;
}

std::vector<Sample> sample_batch(const ReplayMemory& memory, std::size_t batch_size, Rng& rng) {
  std::vector<Sample> out;
  out.reserve(batch_size);
  for (std::size_t i : sample_indices(memory.size(), batch_size, rng)) out.push_back(memory.at(i));
  return out;
}

std::size_t apply_exploration_noise(std::span<Sample> batch, double epsilon, double sigma,
                                    std::size_t numeric_offset, Rng& rng,
                                    std::vector<double>* drawn) {
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorKind::InvalidRate,
          fmt::format("epsilon {} outside [0,1]", epsilon));
  std::bernoulli_distribution pick(epsilon);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t picked = 0;
  for (auto& s : batch) {
    if (!pick(rng)) continue;
    ++picked;
    for (std::size_t r = 0; r < s.rows.rows(); ++r) {
      auto row = s.rows.row(r);
      for (std::size_t c = numeric_offset; c < row.size(); ++c) {
        const double z = sigma * gauss(rng);
        if (drawn) drawn->push_back(z);
        row[c] = std::clamp(row[c] + z, 0.0, 1.0);
      }
    }
  }
  return picked;
}

std::vector<Matrix> to_steps(std::span<const Sample> batch, std::size_t max_steps) {
  require(!batch.empty(), ErrorKind::EmptyInput, "empty batch");
  const std::size_t width = batch.front().rows.cols();
  std::size_t longest = 0;
  for (const auto& s : batch) {
    require(s.rows.cols() == width, ErrorKind::InvalidDimension, "mixed sample widths in batch");
    longest = std::max(longest, s.rows.rows());
  }
  const std::size_t steps = std::min(longest, max_steps);
  std::vector<Matrix> out(steps, Matrix(batch.size(), width));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& rows = batch[b].rows;
    const std::size_t keep = std::min(rows.rows(), steps);
    const std::size_t first = rows.rows() - keep;
    for (std::size_t k = 0; k < keep; ++k) {
      auto src = rows.row(first + k);
      std::copy(src.begin(), src.end(), out[steps - keep + k].row(b).begin());
    }
  }
  return out;
}

bool EarlyStopping::observe(std::size_t epoch, double loss) {
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
    waited_ = 0;
    return false;
  }
  ++waited_;
  return waited_ >= patience_;
}

std::string history_csv(std::span<const EpochStats> history) {
  std::string out = "epoch,train_loss,val_loss,epsilon,seconds\n";
  for (const auto& e : history) {
    out += fmt::format("{},{},{},{},{:.3f}\n", e.epoch, e.train_loss, e.val_loss, e.epsilon,
                       e.seconds);
  }
  return out;
}

std::vector<Sample> samples_of(const data::FeatureMatrix& m) {
  std::vector<Sample> out;
  out.reserve(m.sessions());
  for (std::size_t i = 0; i < m.sessions(); ++i) out.push_back({m.session_rows(i), m.labels[i]});
  return out;
}

std::vector<double> predict(const nn::ModelParams& params, const data::FeatureMatrix& m,
                            std::size_t max_steps) {
  require(params.state_size() == m.width, ErrorKind::IncompatibleArtifacts,
          fmt::format("model expects {} features, data has {}", params.state_size(), m.width));
  std::vector<double> probs;
  probs.reserve(m.sessions());
  Rng unused = make_stream(0, Stream::Dropout);
  for (std::size_t begin = 0; begin < m.sessions(); begin += kEvalChunk) {
    const std::size_t end = std::min(m.sessions(), begin + kEvalChunk);
    std::vector<Sample> chunk;
    for (std::size_t i = begin; i < end; ++i) chunk.push_back({m.session_rows(i), m.labels[i]});
    auto out = nn::model_forward(params, to_steps(chunk, max_steps), false, unused);
    probs.insert(probs.end(), out.probs.begin(), out.probs.end());
  }
  return probs;
}

double evaluate_loss(const nn::ModelParams& params, const data::FeatureMatrix& m,
                     nn::ClassWeights weights, std::size_t max_steps) {
  require(m.sessions() > 0, ErrorKind::EmptyInput, "no sessions to evaluate");
  const auto probs = predict(params, m, max_steps);
  return nn::weighted_bce(probs, m.labels, weights);
}

TrainResult train(const TrainConfig& config, const data::DatasetSplit& split,
                  nn::ModelParams initial, const TrainCallbacks& callbacks) {
  config.validate();
  const std::size_t n = split.train.sessions();
  require(n >= config.batch_size, ErrorKind::InsufficientMemory,
          fmt::format("{} training sessions for batch size {}", n, config.batch_size));
  require(split.validation.sessions() > 0, ErrorKind::EmptyInput, "validation split is empty");
  require(initial.state_size() == split.train.width, ErrorKind::IncompatibleArtifacts,
          fmt::format("model expects {} features, data has {}", initial.state_size(),
                      split.train.width));

  nn::ModelParams params = std::move(initial);
  params.dropout_rate = config.dropout_rate;
  const nn::ClassWeights weights =
      config.class_weighting ? data::class_weights(split.train.labels) : nn::ClassWeights{};
  const std::size_t numeric_offset = split.schema.numeric_offset();
  const auto train_samples = samples_of(split.train);

  ReplayMemory memory(config.replay_capacity ? config.replay_capacity : n, split.train.width);
  Rng sampling = make_stream(config.seed, Stream::Sampling);
  Rng noise = make_stream(config.seed, Stream::Noise);
  Rng dropout = make_stream(config.seed, Stream::Dropout);
  nn::AdamState adam;
  EarlyStopping stopper(config.patience);

  TrainResult result;
  result.best.kind = config.replay_enabled || config.exploration_enabled ? "dqn" : "lstm";
  result.best.schema = split.schema;
  result.best.schema_digest = split.schema.digest();
  result.best.config = config;
  result.best.params = params;

  spdlog::info("training on {} sessions, weights neg={:.4f} pos={:.4f}", n, weights.negative,
               weights.positive);
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const double eps = epsilon_schedule(epoch, config);

    std::vector<std::vector<Sample>> batches;
    if (config.replay_enabled) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), sampling);
      for (std::size_t i : order) memory.remember(train_samples[i]);
      const std::size_t count = (n + config.batch_size - 1) / config.batch_size;
      for (std::size_t b = 0; b < count; ++b) {
        batches.push_back(sample_batch(memory, config.batch_size, sampling));
      }
    } else {
      for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
        const std::size_t end = std::min(n, begin + config.batch_size);
        // Batch norm needs two rows; a lone trailing sample is dropped.
        if (end - begin < 2) break;
        batches.emplace_back(train_samples.begin() + static_cast<std::ptrdiff_t>(begin),
                             train_samples.begin() + static_cast<std::ptrdiff_t>(end));
      }
    }

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      auto& batch = batches[b];
      if (config.exploration_enabled) {
        apply_exploration_noise(batch, eps, config.noise_sigma, numeric_offset, noise);
      }
      std::vector<int> labels;
      labels.reserve(batch.size());
      for (const auto& s : batch) labels.push_back(s.label);
      auto fwd = nn::model_forward(params, to_steps(batch, config.max_sequence_steps), true, dropout);
      const double loss = nn::weighted_bce(fwd.probs, labels, weights);
      require(std::isfinite(loss), ErrorKind::Divergence,
              fmt::format("non-finite training loss at epoch {} batch {}", epoch, b));
      auto grads = nn::model_backward(params, fwd.cache, fwd.probs, labels, weights);
      nn::adam_step(params, grads, adam, config.learning_rate);
      nn::update_running_stats(params, *fwd.cache);
      loss_sum += loss;
      if (callbacks.on_batch) callbacks.on_batch(epoch, b, loss);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(batches.size());
    stats.val_loss = evaluate_loss(params, split.validation, weights, config.max_sequence_steps);
    require(std::isfinite(stats.val_loss) && std::isfinite(stats.train_loss), ErrorKind::Divergence,
            fmt::format("non-finite loss at end of epoch {}", epoch));
    stats.epsilon = eps;
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const bool stop = stopper.observe(epoch, stats.val_loss);
    if (stopper.improved()) {
      result.best.params = params;
      result.best.best_epoch = epoch;
      result.best.val_loss = stats.val_loss;
    }
    spdlog::info("epoch {:>3}  train {:.5f}  val {:.5f}  eps {:.4f}  {:.1f}s", epoch,
                 stats.train_loss, stats.val_loss, eps, stats.seconds);
    result.history.push_back(stats);
    if (callbacks.on_epoch) callbacks.on_epoch(stats);
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace intentforge::trainer
