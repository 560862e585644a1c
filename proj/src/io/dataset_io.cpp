#include "intentforge/io/dataset_io.hpp"

#include <json.hpp>

#include "intentforge/io/binary.hpp"

namespace intentforge::io {

namespace {

constexpr std::size_t kDigestLength = 64;

nlohmann::json split_manifest(const data::DatasetSplit& split) {
  nlohmann::json j;
  j["schema_digest"] = split.schema.digest();
  j["fractions"] = split.fractions;
  j["seed"] = split.seed;
  j["state_size"] = split.schema.state_size();
  j["mode"] = std::string(data::to_string(split.schema.mode));
  auto part = [](const data::FeatureMatrix& m) {
    std::size_t positives = 0;
    for (int y : m.labels) positives += y == 1 ? 1 : 0;
    return nlohmann::json{{"sessions", m.sessions()}, {"rows", m.rows.rows()},
                          {"positives", positives}};
  };
  j["parts"] = {{"train", part(split.train)},
                {"validation", part(split.validation)},
                {"test", part(split.test)}};
  return j;
}

}  // namespace

std::string encode_features(const data::FeatureMatrix& m, std::string_view schema_digest) {
  require(schema_digest.size() == kDigestLength, ErrorKind::Format, "schema digest length");
  ByteWriter w;
  w.bytes(kFeatureMagic);
  w.u32(kFeatureVersion);
  w.bytes(schema_digest);
  w.u32(m.mode == data::FeatureMode::Flat ? 0u : 1u);
  w.u64(m.sessions());
  w.u64(m.width);
  w.u64(m.rows.rows());
  for (std::size_t o : m.offsets) w.u64(o);
  for (int y : m.labels) w.u8(static_cast<std::uint8_t>(y));
  for (const auto& s : m.session_ids) w.str(s);
  for (const auto& s : m.user_ids) w.str(s);
  for (double v : m.rows.values()) w.f64(v);
  return w.take();
}

data::FeatureMatrix decode_features(std::string_view bytes, std::string* digest_out) {
  ByteReader r(bytes);
  require(r.bytes(4) == kFeatureMagic, ErrorKind::Format, "not a feature matrix file");
  const auto version = r.u32();
  require(version == kFeatureVersion, ErrorKind::Format,
          "unsupported feature file version " + std::to_string(version));
  std::string digest(r.bytes(kDigestLength));
  data::FeatureMatrix m;
  const auto mode = r.u32();
  require(mode <= 1, ErrorKind::Format, "bad feature mode");
  m.mode = mode == 0 ? data::FeatureMode::Flat : data::FeatureMode::Sequence;
  const auto sessions = r.u64();
  m.width = r.u64();
  const auto rows = r.u64();
  require(rows * m.width * 8 <= bytes.size(), ErrorKind::Format, "implausible row count");
  m.offsets.clear();
  for (std::uint64_t i = 0; i <= sessions; ++i) m.offsets.push_back(r.u64());
  require(m.offsets.front() == 0 && m.offsets.back() == rows, ErrorKind::Format,
          "session offsets do not cover the rows");
  for (std::uint64_t i = 0; i < sessions; ++i) m.labels.push_back(r.u8());
  for (std::uint64_t i = 0; i < sessions; ++i) m.session_ids.push_back(r.str());
  for (std::uint64_t i = 0; i < sessions; ++i) m.user_ids.push_back(r.str());
  require(r.remaining() == rows * m.width * 8, ErrorKind::Format,
          "payload length does not match header");
  std::vector<double> data(rows * m.width);
  for (double& v : data) v = r.f64();
  m.rows = Matrix(rows, m.width, std::move(data));
  if (digest_out) *digest_out = std::move(digest);
  return m;
}

void save_split(const std::filesystem::path& dir, const data::DatasetSplit& split) {
  std::filesystem::create_directories(dir);
  const std::string digest = split.schema.digest();
  write_file_atomic(dir / "schema.json", split.schema.to_json().dump(2) + "\n");
  write_file_atomic(dir / "split.json", split_manifest(split).dump(2) + "\n");
  write_file_atomic(dir / "train.iffm", encode_features(split.train, digest));
  write_file_atomic(dir / "validation.iffm", encode_features(split.validation, digest));
  write_file_atomic(dir / "test.iffm", encode_features(split.test, digest));
}

data::DatasetSplit load_split(const std::filesystem::path& dir) {
  data::DatasetSplit split;
  nlohmann::json manifest;
  try {
    split.schema = data::FeatureSchema::from_json(nlohmann::json::parse(read_file(dir / "schema.json")));
    manifest = nlohmann::json::parse(read_file(dir / "split.json"));
    split.fractions = manifest.at("fractions").get<data::SplitFractions>();
    split.seed = manifest.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, "dataset manifest in '" + dir.string() + "': " + e.what());
  }
  const std::string digest = split.schema.digest();
  require(manifest.at("schema_digest").get<std::string>() == digest,
          ErrorKind::IncompatibleArtifacts, "split.json digest does not match schema.json");
  auto load = [&](const char* name) {
    std::string stored;
    auto m = decode_features(read_file(dir / name), &stored);
    require(stored == digest, ErrorKind::IncompatibleArtifacts,
            std::string(name) + " was built with a different schema");
    require(m.width == split.schema.state_size(), ErrorKind::Format,
            std::string(name) + " width does not match schema");
    return m;
  };
  split.train = load("train.iffm");
  split.validation = load("validation.iffm");
  split.test = load("test.iffm");
  return split;
}

}  // namespace intentforge::io
