#include "intentforge/cli/config.hpp"

#include <fmt/format.h>

#include "intentforge/io/binary.hpp"

namespace intentforge::cli {

namespace {

std::string type_name(const nlohmann::json& j) {
  if (j.is_boolean()) return "a boolean";
  if (j.is_number()) return "a number";
  if (j.is_string()) return "a string";
  if (j.is_array()) return "an array";
  if (j.is_object()) return "an object";
  return "null";
}

bool same_kind(const nlohmann::json& expected, const nlohmann::json& got) {
  if (expected.is_number()) return got.is_number();
  return expected.type() == got.type();
}

void overlay(nlohmann::json& base, const nlohmann::json& over, const std::string& prefix) {
  for (const auto& [key, value] : over.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    require(base.contains(key), ErrorKind::Config, "unknown config key '" + path + "'");
    auto& slot = base[key];
    require(!slot.is_number_unsigned() || value.is_number_unsigned(), ErrorKind::Config,
            fmt::format("config key '{}' expects a non-negative integer", path));
    require(same_kind(slot, value), ErrorKind::Config,
            fmt::format("config key '{}' expects {}, got {}", path, type_name(slot), type_name(value)));
    if (slot.is_object()) {
      overlay(slot, value, path);
    } else {
      slot = value;
    }
  }
}

std::vector<double> thresholds(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  for (const auto& v : j) {
    require(v.is_number(), ErrorKind::Config, fmt::format("config key 'evaluation.{}' must hold numbers", key));
    const double t = v.get<double>();
    require(t >= 0.0 && t <= 1.0, ErrorKind::Config,
            fmt::format("config key 'evaluation.{}' has threshold {} outside [0,1]", key, t));
    out.push_back(t);
  }
  require(!out.empty(), ErrorKind::Config, fmt::format("config key 'evaluation.{}' is empty", key));
  return out;
}

// Section parsers report bare field names; prefix the section so the full path shows.
template <typename F>
auto in_section(const char* section, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    fail(e.kind(), fmt::format("in config section '{}': {}", section, e.message()));
  }
}

}  // namespace

nlohmann::json default_config_json() {
  RunConfig d;
  return to_json(d);
}

nlohmann::json to_json(const RunConfig& c) {
  auto gen = synthgen::to_json(c.generator);
  gen.erase("seed");
  auto train = trainer::to_json(c.train);
  train.erase("seed");
  return {{"seed", c.seed},
          {"generator", gen},
          {"pipeline",
           {{"vocab_cap", c.pipeline.vocab_cap},
            {"mode", std::string(data::to_string(c.pipeline.mode))},
            {"fractions", c.pipeline.fractions}}},
          {"train", train},
          {"logreg", baselines::to_json(c.logreg)},
          {"evaluation",
           {{"threshold", c.evaluation.threshold},
            {"sweep_thresholds", c.evaluation.sweep_thresholds},
            {"compare_thresholds", c.evaluation.compare_thresholds}}}};
}

nlohmann::json merge_config(const nlohmann::json& overrides) {
  require(overrides.is_object(), ErrorKind::Config, "config must be a JSON object");
  auto tree = default_config_json();
  overlay(tree, overrides, "");
  return tree;
}

void apply_override(nlohmann::json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::Config,
          "override '" + assignment + "' is not of the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json patch = value;
  std::size_t end = path.size();
  while (true) {
    const auto dot = path.rfind('.', end - 1);
    const std::string key = path.substr(dot == std::string::npos ? 0 : dot + 1,
                                        end - (dot == std::string::npos ? 0 : dot + 1));
    require(!key.empty(), ErrorKind::Config, "override key '" + path + "' is malformed");
    patch = nlohmann::json{{key, patch}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  overlay(tree, patch, "");
}

RunConfig to_run_config(const nlohmann::json& tree) {
  RunConfig c;
  try {
    c.seed = tree.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Config, "config key 'seed' must be a non-negative integer");
  }
  c.generator = in_section("generator",
                           [&] { return synthgen::generator_config_from_json(tree.at("generator")); });
  c.generator.seed = c.seed;
  c.train = in_section("train", [&] { return trainer::train_config_from_json(tree.at("train")); });
  c.train.seed = c.seed;
  c.logreg = in_section("logreg", [&] { return baselines::logreg_config_from_json(tree.at("logreg")); });

  const auto& p = tree.at("pipeline");
  c.pipeline.seed = c.seed;
  in_section("pipeline", [&] {
    c.pipeline.mode = data::parse_feature_mode(p.at("mode").get<std::string>());
    const auto cap = p.at("vocab_cap");
    require(cap.is_number_integer() && cap.get<long long>() >= 0, ErrorKind::Config,
            "config key 'pipeline.vocab_cap' must be a non-negative integer");
    c.pipeline.vocab_cap = cap.get<std::size_t>();
    const auto& f = p.at("fractions");
    require(f.size() == 3, ErrorKind::Config, "config key 'pipeline.fractions' needs 3 numbers");
    for (std::size_t i = 0; i < 3; ++i) {
      require(f[i].is_number(), ErrorKind::Config, "config key 'pipeline.fractions' must hold numbers");
      c.pipeline.fractions[i] = f[i].get<double>();
    }
    return 0;
  });

  const auto& e = tree.at("evaluation");
  c.evaluation.threshold = e.at("threshold").get<double>();
  require(c.evaluation.threshold >= 0.0 && c.evaluation.threshold <= 1.0, ErrorKind::Config,
          "config key 'evaluation.threshold' must be in [0,1]");
  c.evaluation.sweep_thresholds = thresholds(e.at("sweep_thresholds"), "sweep_thresholds");
  c.evaluation.compare_thresholds = thresholds(e.at("compare_thresholds"), "compare_thresholds");

  in_section("generator", [&] { c.generator.validate(); return 0; });
  in_section("train", [&] { c.train.validate(); return 0; });
  in_section("logreg", [&] { c.logreg.validate(); return 0; });
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed) {
  nlohmann::json tree = default_config_json();
  if (!path.empty()) {
    const auto text = io::read_file(path);
    nlohmann::json user;
    try {
      user = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Config, fmt::format("config '{}' is not valid JSON (byte {})", path.string(), e.byte));
    }
    tree = merge_config(user);
  }
  for (const auto& o : overrides) apply_override(tree, o);
  if (seed) tree["seed"] = *seed;
  return to_run_config(tree);
}

}  // namespace intentforge::cli
