#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "intentforge/cli/config.hpp"

namespace intentforge::cli {

struct Context {
  RunConfig config;
  std::filesystem::path out_dir;
  std::ostream* out = nullptr;
};

/// events.csv and truth.json in the output directory.
void cmd_generate(const Context& ctx);

/// The dataset directory (see io::save_split) plus exclusions.csv and
/// prepare_report.json.
void cmd_prepare(const Context& ctx, const std::filesystem::path& input_csv);

/// <model>.ifck and <model>_history.csv; model is dqn, lstm or logreg.
void cmd_train(const Context& ctx, const std::filesystem::path& data_dir, const std::string& model);

/// report.json, report.csv, confusion.csv and roc.csv on the test split.
void cmd_evaluate(const Context& ctx, const std::filesystem::path& checkpoint,
                  const std::filesystem::path& data_dir, std::optional<double> threshold);

/// sweep.csv, sweep_confusion.csv and sweep.json on the test split.
void cmd_sweep(const Context& ctx, const std::filesystem::path& checkpoint,
               const std::filesystem::path& data_dir);

/// comparison.csv and comparison.txt on the test split.
void cmd_compare(const Context& ctx, const std::filesystem::path& checkpoint,
                 const std::filesystem::path& lstm_checkpoint,
                 const std::filesystem::path& logreg_checkpoint,
                 const std::filesystem::path& data_dir);

/// predictions.csv (session_id,probability) for a raw event log.
void cmd_predict(const Context& ctx, const std::filesystem::path& checkpoint,
                 const std::filesystem::path& input_csv);

}  // namespace intentforge::cli
