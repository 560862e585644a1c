#include "intentforge/cli/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "intentforge/io/binary.hpp"
#include "intentforge/io/checkpoint.hpp"
#include "intentforge/io/dataset_io.hpp"
#include "intentforge/metrics/metrics.hpp"

namespace intentforge::cli {

namespace {

namespace fs = std::filesystem;

// A checkpoint of any kind, reduced to what scoring needs.
struct Scorer {
  std::string kind;
  std::string schema_digest;
  data::FeatureSchema schema;
  std::optional<trainer::Checkpoint> network;
  std::optional<baselines::LogRegModel> logreg;

  std::vector<double> score(const data::FeatureMatrix& m) const {
    if (network) return trainer::predict(network->params, m, network->config.max_sequence_steps);
    return baselines::predict_logreg(logreg->params, baselines::session_means(m));
  }
};

Scorer load_scorer(const fs::path& path) {
  const auto bytes = io::read_file(path);
  Scorer s;
  try {
    s.kind = io::checkpoint_header(bytes).at("kind").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Format, "checkpoint '" + path.string() + "' has no kind");
  }
  if (s.kind == "logreg") {
    s.logreg = io::decode_logreg_checkpoint(bytes);
    s.schema = s.logreg->schema;
    s.schema_digest = s.logreg->schema_digest;
  } else {
    s.network = io::decode_model_checkpoint(bytes);
    s.schema = s.network->schema;
    s.schema_digest = s.network->schema_digest;
  }
  return s;
}

data::DatasetSplit load_matching_split(const fs::path& dir, const Scorer& scorer) {
  auto split = io::load_split(dir);
  require(split.schema.digest() == scorer.schema_digest, ErrorKind::IncompatibleArtifacts,
          "checkpoint and dataset '" + dir.string() + "' were built with different feature schemas");
  return split;
}

void write(const fs::path& path, std::string_view text) { io::write_file_atomic(path, text); }

std::vector<data::RawEvent> read_events(const fs::path& path, std::vector<data::RowError>* errors) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "'");
  auto parsed = data::parse_events(in);
  for (const auto& e : parsed.errors) spdlog::warn("{}:{}: {}", path.string(), e.line, e.message);
  if (errors) *errors = parsed.errors;
  return std::move(parsed.events);
}

double positive_rate(const data::FeatureMatrix& m) {
  if (m.sessions() == 0) return 0.0;
  return static_cast<double>(std::count(m.labels.begin(), m.labels.end(), 1)) /
         static_cast<double>(m.sessions());
}

}  // namespace

void cmd_generate(const Context& ctx) {
  const auto d = synthgen::generate(ctx.config.generator);
  write(ctx.out_dir / "events.csv", synthgen::events_csv(d));
  write(ctx.out_dir / "truth.json", synthgen::truth_json(d.truth).dump() + "\n");
  auto& out = *ctx.out;
  out << fmt::format("sessions {}\nevents {}\npositive rate {:.4f}\nintercept {:.6f}\n",
                     d.truth.size(), d.events.size(), d.positive_rate, d.intercept);
  if (d.positive_rate > 0.0 && d.positive_rate < 1.0) {
    out << fmt::format("bayes auc {:.4f}\n", synthgen::bayes_auc(d.truth));
  }
}

void cmd_prepare(const Context& ctx, const fs::path& input_csv) {
  std::vector<data::RowError> errors;
  auto events = read_events(input_csv, &errors);
  auto prepared = data::prepare(std::move(events), ctx.config.pipeline);
  prepared.row_errors = std::move(errors);
  const auto& split = prepared.split;
  io::save_split(ctx.out_dir, split);

  std::string exclusions = "session_id\n";
  for (const auto& id : prepared.excluded_sessions) exclusions += id + "\n";
  write(ctx.out_dir / "exclusions.csv", exclusions);

  auto part = [](const data::FeatureMatrix& m) {
    return nlohmann::json{{"sessions", m.sessions()}, {"positive_rate", positive_rate(m)}};
  };
  nlohmann::json report{{"input", input_csv.filename().string()},
                        {"events", prepared.events},
                        {"row_errors", prepared.row_errors.size()},
                        {"sessions", prepared.sessions},
                        {"excluded_sessions", prepared.excluded_sessions.size()},
                        {"state_size", split.schema.state_size()},
                        {"schema_digest", split.schema.digest()},
                        {"train", part(split.train)},
                        {"validation", part(split.validation)},
                        {"test", part(split.test)}};
  write(ctx.out_dir / "prepare_report.json", report.dump(2) + "\n");

  auto& out = *ctx.out;
  out << fmt::format("events {} ({} rejected rows)\n", prepared.events, prepared.row_errors.size());
  out << fmt::format("sessions {} ({} empty after truncation)\n", prepared.sessions,
                     prepared.excluded_sessions.size());
  out << fmt::format("state_size {}\n", split.schema.state_size());
  for (const auto& [name, m] : {std::pair{"train", &split.train}, {"validation", &split.validation},
                                {"test", &split.test}}) {
    const double rate = positive_rate(*m);
    out << fmt::format("{:<10} sessions {:>8}  no purchase {:.4f}  purchase {:.4f}\n", name,
                       m->sessions(), 1.0 - rate, rate);
  }
}

void cmd_train(const Context& ctx, const fs::path& data_dir, const std::string& model) {
  const auto split = io::load_split(data_dir);
  const auto& cfg = ctx.config;
  auto& out = *ctx.out;
  if (model == "logreg") {
    const auto& lc = cfg.logreg;
    out << fmt::format("model=logreg lr={} epochs={} l2={}\n", lc.learning_rate, lc.epochs, lc.l2);
    const auto m = baselines::train_logreg(split, lc);
    io::save_checkpoint(ctx.out_dir / "logreg.ifck", m);
    out << fmt::format("validation loss {:.6f}\n", m.val_loss);
    return;
  }
  require(model == "dqn" || model == "lstm", ErrorKind::Config,
          "--model must be dqn, lstm or logreg, got '" + model + "'");
  auto tc = cfg.train;
  if (model == "lstm") tc.replay_enabled = tc.exploration_enabled = false;
  out << fmt::format("model={} lr={} batch={} epochs={} patience={}\n", model, tc.learning_rate,
                     tc.batch_size, tc.max_epochs, tc.patience);

  std::vector<trainer::EpochStats> history;
  trainer::TrainCallbacks callbacks;
  callbacks.on_epoch = [&](const trainer::EpochStats& s) { history.push_back(s); };
  const auto history_path = ctx.out_dir / (model + "_history.csv");
  trainer::TrainResult result;
  try {
    result = trainer::train(tc, split, nn::init_params(split.schema.state_size(), tc.seed), callbacks);
  } catch (const Error&) {
    write(history_path, trainer::history_csv(history));
    throw;
  }
  io::save_checkpoint(ctx.out_dir / (model + ".ifck"), result.best);
  write(history_path, trainer::history_csv(result.history));
  out << fmt::format("epochs run {}{}\nbest epoch {}\nvalidation loss {:.6f}\n",
                     result.history.size(), result.stopped_early ? " (early stop)" : "",
                     result.best.best_epoch, result.best.val_loss);
}

void cmd_evaluate(const Context& ctx, const fs::path& checkpoint, const fs::path& data_dir,
                  std::optional<double> threshold) {
  const auto scorer = load_scorer(checkpoint);
  const auto split = load_matching_split(data_dir, scorer);
  const double t = threshold.value_or(ctx.config.evaluation.threshold);
  const auto probs = scorer.score(split.test);
  const auto& labels = split.test.labels;
  const std::vector<double> one{t};
  const auto sw = metrics::sweep(probs, labels, one);
  const auto& row = sw.rows.front();
  const auto roc = metrics::roc_auc(probs, labels);

  nlohmann::json report{{"model", scorer.kind},
                        {"threshold", t},
                        {"confusion", metrics::to_json(row.confusion)},
                        {"report", metrics::to_json(row.report)},
                        {"auc", roc.auc}};
  write(ctx.out_dir / "report.json", report.dump(2) + "\n");
  write(ctx.out_dir / "report.csv", metrics::sweep_csv(sw));
  write(ctx.out_dir / "confusion.csv", metrics::confusion_csv(sw));
  write(ctx.out_dir / "roc.csv", metrics::roc_csv(roc));
  *ctx.out << metrics::format_report(row.report, row.confusion, t)
           << fmt::format("auc {:.4f}\n", roc.auc);
}

void cmd_sweep(const Context& ctx, const fs::path& checkpoint, const fs::path& data_dir) {
  const auto scorer = load_scorer(checkpoint);
  const auto split = load_matching_split(data_dir, scorer);
  const auto probs = scorer.score(split.test);
  const auto sw = metrics::sweep(probs, split.test.labels, ctx.config.evaluation.sweep_thresholds);
  write(ctx.out_dir / "sweep.csv", metrics::sweep_csv(sw));
  write(ctx.out_dir / "sweep_confusion.csv", metrics::confusion_csv(sw));
  write(ctx.out_dir / "sweep.json", metrics::to_json(sw).dump(2) + "\n");
  *ctx.out << metrics::format_sweep(sw);
}

void cmd_compare(const Context& ctx, const fs::path& checkpoint, const fs::path& lstm_checkpoint,
                 const fs::path& logreg_checkpoint, const fs::path& data_dir) {
  const auto model = io::load_model_checkpoint(checkpoint);
  const auto lstm = io::load_model_checkpoint(lstm_checkpoint);
  const auto logreg = io::load_logreg_checkpoint(logreg_checkpoint);
  const auto split = io::load_split(data_dir);
  const auto table =
      baselines::compare(model, logreg, lstm, split, ctx.config.evaluation.compare_thresholds);
  const auto text = baselines::format_comparison(table);
  write(ctx.out_dir / "comparison.csv", baselines::comparison_csv(table));
  write(ctx.out_dir / "comparison.txt", text);
  *ctx.out << text;
}

void cmd_predict(const Context& ctx, const fs::path& checkpoint, const fs::path& input_csv) {
  const auto scorer = load_scorer(checkpoint);
  std::vector<std::string> excluded;
  const auto features = data::featurize_log(read_events(input_csv, nullptr), scorer.schema, &excluded);
  const auto probs = features.sessions() ? scorer.score(features) : std::vector<double>{};
  std::string csv = "session_id,probability\n";
  for (std::size_t i = 0; i < probs.size(); ++i) {
    csv += fmt::format("{},{}\n", features.session_ids[i], probs[i]);
  }
  write(ctx.out_dir / "predictions.csv", csv);
  *ctx.out << fmt::format("scored {} sessions ({} skipped: purchase before any other event)\n",
                          probs.size(), excluded.size());
}

}  // namespace intentforge::cli
