#include "intentforge/cli/app.hpp"

#include <ostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "intentforge/cli/commands.hpp"
#include "intentforge/logging.hpp"

namespace intentforge::cli {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Session purchase-intent modelling toolkit", "intentforge"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "intentforge-out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for generation, splitting and training");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--set", overrides, "Override a config key, e.g. --set train.max_epochs=15")
      ->allow_extra_args(false);

  std::string input, data_dir, checkpoint, lstm_checkpoint, logreg_checkpoint;
  std::string model = "dqn";
  std::optional<double> threshold;

  auto* generate = app.add_subcommand("generate", "Write a synthetic event log and its truth sidecar");
  auto* prepare = app.add_subcommand("prepare", "Sessionize, split and featurize an event log");
  prepare->add_option("--input", input, "Event CSV")->required();
  auto* train = app.add_subcommand("train", "Train a model on a prepared dataset");
  train->add_option("--data", data_dir, "Prepared dataset directory")->required();
  train->add_option("--model", model, "dqn, lstm or logreg")
      ->check(CLI::IsMember({"dqn", "lstm", "logreg"}))
      ->capture_default_str();
  auto* evaluate = app.add_subcommand("evaluate", "Classification report on the test split");
  evaluate->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  evaluate->add_option("--data", data_dir, "Prepared dataset directory")->required();
  evaluate->add_option("--threshold", threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  auto* sweep = app.add_subcommand("sweep", "Reports across decision thresholds");
  sweep->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  sweep->add_option("--data", data_dir, "Prepared dataset directory")->required();
  auto* compare = app.add_subcommand("compare", "Compare against the baselines");
  compare->add_option("--checkpoint", checkpoint, "Replay/exploration model checkpoint")->required();
  compare->add_option("--lstm", lstm_checkpoint, "Plain LSTM checkpoint")->required();
  compare->add_option("--logreg", logreg_checkpoint, "Logistic regression checkpoint")->required();
  compare->add_option("--data", data_dir, "Prepared dataset directory")->required();
  auto* predict = app.add_subcommand("predict", "Score the sessions of a raw event log");
  predict->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  predict->add_option("--input", input, "Event CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    init_logging("info");
    Context ctx{load_run_config(config_path, overrides, seed), out_dir, &out};
    if (generate->parsed()) cmd_generate(ctx);
    else if (prepare->parsed()) cmd_prepare(ctx, input);
    else if (train->parsed()) cmd_train(ctx, data_dir, model);
    else if (evaluate->parsed()) cmd_evaluate(ctx, checkpoint, data_dir, threshold);
    else if (sweep->parsed()) cmd_sweep(ctx, checkpoint, data_dir);
    else if (compare->parsed()) cmd_compare(ctx, checkpoint, lstm_checkpoint, logreg_checkpoint, data_dir);
    else if (predict->parsed()) cmd_predict(ctx, checkpoint, input);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace intentforge::cli
