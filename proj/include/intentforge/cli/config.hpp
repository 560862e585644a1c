#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentforge/baselines/baselines.hpp"
#include "intentforge/data/pipeline.hpp"
#include "intentforge/synthgen/generator.hpp"
#include "intentforge/trainer/trainer.hpp"

namespace intentforge::cli {

struct EvaluationConfig {
  double threshold = 0.5;
  std::vector<double> sweep_thresholds = metrics::kSweepThresholds;
  std::vector<double> compare_thresholds = baselines::kComparisonThresholds;
};

/// Everything a run needs. One seed drives generation, splitting and training.
struct RunConfig {
  std::uint64_t seed = 42;
  synthgen::GeneratorConfig generator;
  data::PipelineOptions pipeline;
  trainer::TrainConfig train;
  baselines::LogRegConfig logreg;
  EvaluationConfig evaluation;
};

/// Defaults as a JSON tree; every accepted key appears here.
nlohmann::json default_config_json();

/// Overlays `overrides` on the defaults. Keys must exist and values must have
/// the default's JSON type; errors name the dotted key path.
nlohmann::json merge_config(const nlohmann::json& overrides);

/// Applies one `a.b.c=value` override. The value is read as JSON when it
/// parses, otherwise as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

RunConfig to_run_config(const nlohmann::json& tree);

/// Reads `path` (when non-empty), applies the overrides and seed, validates.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed);

nlohmann::json to_json(const RunConfig& c);

}  // namespace intentforge::cli
