#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentforge/data/split.hpp"
#include "intentforge/nn/model.hpp"
#include "intentforge/rng.hpp"

namespace intentforge::trainer {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 10;
  double dropout_rate = 0.2;
  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  double noise_sigma = 0.1;
  std::size_t replay_capacity = 0;  // 0: size of the training set
  std::uint64_t seed = 42;
  bool replay_enabled = true;
  bool exploration_enabled = true;
  bool class_weighting = true;
  std::size_t max_sequence_steps = 16;  // sequence mode keeps the last events

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
/// Missing keys keep the base value; unknown keys and bad types are config errors.
TrainConfig train_config_from_json(const nlohmann::json& j, const TrainConfig& base = {});

/// ε(e) = ε_start·(ε_end/ε_start)^(e/(max_epochs−1)).
double epsilon_schedule(std::size_t epoch, const TrainConfig& config);

/// One session: its feature rows (timesteps × width) and label.
struct Sample {
  Matrix rows;
  int label = 0;
};

class ReplayMemory {
 public:
  ReplayMemory(std::size_t capacity, std::size_t width);

  /// Appends; once full the oldest entry is overwritten.
  void remember(Sample sample);

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t width() const noexcept { return width_; }
  std::uint64_t insertions() const noexcept { return insertions_; }
  /// Entries in insertion order, oldest first.
  const Sample& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t width_;
  std::vector<Sample> items_;
  std::size_t next_ = 0;
  std::uint64_t insertions_ = 0;
};

/// Distinct indices into the memory, uniform over subsets and orderings.
std::vector<std::size_t> sample_indices(std::size_t memory_size, std::size_t batch_size, Rng& rng);
std::vector<Sample> sample_batch(const ReplayMemory& memory, std::size_t batch_size, Rng& rng);

/// Each sample is picked with probability epsilon; picked samples get
/// N(0, sigma²) added to columns [numeric_offset, width) of every row, then
/// those columns are clamped to [0,1]. Returns how many samples were picked.
/// `drawn`, when given, receives every Gaussian value added.
std::size_t apply_exploration_noise(std::span<Sample> batch, double epsilon, double sigma,
                                    std::size_t numeric_offset, Rng& rng,
                                    std::vector<double>* drawn = nullptr);

/// Stacks samples into per-timestep matrices. Sessions longer than max_steps
/// keep their last max_steps rows; shorter ones are left-padded with zeros.
std::vector<Matrix> to_steps(std::span<const Sample> batch, std::size_t max_steps);

class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records an epoch's validation loss; true once `patience` epochs in a row
  /// have failed to beat the best.
  bool observe(std::size_t epoch, double loss);

  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_loss() const noexcept { return best_loss_; }
  bool improved() const noexcept { return waited_ == 0; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
  std::size_t waited_ = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double epsilon = 0.0;
  double seconds = 0.0;
};

std::string history_csv(std::span<const EpochStats> history);

struct Checkpoint {
  std::string kind = "dqn";
  nn::ModelParams params;
  data::FeatureSchema schema;
  std::string schema_digest;
  TrainConfig config;
  std::size_t best_epoch = 0;
  double val_loss = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochStats> history;
  bool stopped_early = false;
};

struct TrainCallbacks {
  std::function<void(const EpochStats&)> on_epoch;
  std::function<void(std::size_t epoch, std::size_t batch, double loss)> on_batch;
};

std::vector<Sample> samples_of(const data::FeatureMatrix& m);

/// Probabilities in session order, inference mode.
std::vector<double> predict(const nn::ModelParams& params, const data::FeatureMatrix& m,
                            std::size_t max_steps = 16);

/// Class-weighted loss in inference mode, averaged over sessions.
double evaluate_loss(const nn::ModelParams& params, const data::FeatureMatrix& m,
                     nn::ClassWeights weights, std::size_t max_steps = 16);

/// Runs the training loop from `initial` and returns the parameters with the
/// lowest validation loss. Non-finite losses raise a divergence error.
TrainResult train(const TrainConfig& config, const data::DatasetSplit& split,
                  nn::ModelParams initial, const TrainCallbacks& callbacks = {});

}  // namespace intentforge::trainer
