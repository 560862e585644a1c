#include "intentforge/io/checkpoint.hpp"

#include <fmt/format.h>

#include "intentforge/io/binary.hpp"
#include "intentforge/io/digest.hpp"

namespace intentforge::io {

namespace {

constexpr std::size_t kDigestLength = 64;

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<const double> data;
};

std::string encode(const std::string& digest, nlohmann::json header,
                   const std::vector<Tensor>& tensors) {
  require(digest.size() == kDigestLength, ErrorKind::Format, "schema digest length");
  ByteWriter payload;
  nlohmann::json dir = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& t : tensors) {
    dir.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    for (double v : t.data) payload.f64(v);
    offset += t.data.size();
  }
  header["tensors"] = dir;
  header["payload_doubles"] = offset;
  header["payload_sha256"] = sha256_hex(payload.buffer());
  const std::string text = header.dump();

  ByteWriter w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.bytes(digest);
  w.u64(text.size());
  w.bytes(text);
  w.bytes(payload.buffer());
  return w.take();
}

struct Decoded {
  std::string digest;
  nlohmann::json header;
  std::vector<double> payload;
};

Decoded decode(std::string_view bytes) {
  ByteReader r(bytes);
  require(r.bytes(4) == kCheckpointMagic, ErrorKind::Format, "not a checkpoint file");
  const auto version = r.u32();
  require(version == kCheckpointVersion, ErrorKind::Format,
          fmt::format("unsupported checkpoint version {}", version));
  Decoded d;
  d.digest = std::string(r.bytes(kDigestLength));
  const auto header_len = r.u64();
  require(header_len <= r.remaining(), ErrorKind::Format, "truncated checkpoint header");
  try {
    d.header = nlohmann::json::parse(r.bytes(header_len));
    const auto doubles = d.header.at("payload_doubles").get<std::uint64_t>();
    require(r.remaining() == doubles * 8, ErrorKind::Format,
            "checkpoint payload length does not match its header");
    const auto raw = bytes.substr(bytes.size() - r.remaining());
    require(sha256_hex(raw) == d.header.at("payload_sha256").get<std::string>(),
            ErrorKind::Format, "checkpoint payload is corrupted");
    d.payload.resize(doubles);
    for (double& v : d.payload) v = r.f64();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("checkpoint header: ") + e.what());
  }
  return d;
}

data::FeatureSchema embedded_schema(const Decoded& d) {
  auto schema = data::FeatureSchema::from_json(d.header.at("schema"));
  require(schema.digest() == d.digest, ErrorKind::IncompatibleArtifacts,
          "embedded schema does not match the checkpoint digest");
  return schema;
}

// Copies every tensor of the directory into `targets`, which must list the
// same names and shapes in the same order.
template <typename View>
void fill(const Decoded& d, const std::vector<View>& targets) {
  const auto& dir = d.header.at("tensors");
  require(dir.size() == targets.size(), ErrorKind::Format,
          fmt::format("checkpoint has {} tensors, expected {}", dir.size(), targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& entry = dir[i];
    const auto& t = targets[i];
    require(entry.at("name").get<std::string>() == t.name &&
                entry.at("shape").get<std::vector<std::size_t>>() == t.shape,
            ErrorKind::Format, "unexpected tensor '" + entry.at("name").get<std::string>() + "'");
    const auto offset = entry.at("offset").get<std::size_t>();
    require(offset + t.data.size() <= d.payload.size(), ErrorKind::Format,
            "tensor '" + t.name + "' runs past the payload");
    std::copy_n(d.payload.begin() + static_cast<std::ptrdiff_t>(offset), t.data.size(),
                t.data.begin());
  }
}

}  // namespace

std::string encode_checkpoint(const trainer::Checkpoint& c) {
  nlohmann::json header;
  header["kind"] = c.kind;
  header["schema"] = c.schema.to_json();
  header["config"] = trainer::to_json(c.config);
  header["dropout_rate"] = c.params.dropout_rate;
  header["best_epoch"] = c.best_epoch;
  header["val_loss"] = c.val_loss;
  std::vector<Tensor> tensors;
  for (const auto& t : nn::tensors(c.params, true)) tensors.push_back({t.name, t.shape, t.data});
  return encode(c.schema.digest(), std::move(header), tensors);
}

std::string encode_checkpoint(const baselines::LogRegModel& m) {
  nlohmann::json header;
  header["kind"] = "logreg";
  header["schema"] = m.schema.to_json();
  header["config"] = baselines::to_json(m.config);
  header["val_loss"] = m.val_loss;
  std::vector<Tensor> tensors{{"logreg.w", {m.params.w.size()}, m.params.w},
                              {"logreg.b", {1}, std::span<const double>(&m.params.b, 1)}};
  return encode(m.schema.digest(), std::move(header), tensors);
}

nlohmann::json checkpoint_header(std::string_view bytes) { return decode(bytes).header; }

trainer::Checkpoint decode_model_checkpoint(std::string_view bytes) {
  const auto d = decode(bytes);
  trainer::Checkpoint c;
  try {
    c.kind = d.header.at("kind").get<std::string>();
    require(c.kind == "dqn" || c.kind == "lstm", ErrorKind::IncompatibleArtifacts,
            "checkpoint holds a '" + c.kind + "' model, not a recurrent one");
    c.schema = embedded_schema(d);
    c.schema_digest = d.digest;
    c.config = trainer::train_config_from_json(d.header.at("config"));
    c.best_epoch = d.header.at("best_epoch").get<std::size_t>();
    c.val_loss = d.header.at("val_loss").get<double>();
    c.params = nn::ModelParams::zeros(c.schema.state_size());
    c.params.dropout_rate = d.header.at("dropout_rate").get<double>();
    fill(d, nn::tensors(c.params, true));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("checkpoint header: ") + e.what());
  }
  return c;
}

baselines::LogRegModel decode_logreg_checkpoint(std::string_view bytes) {
  const auto d = decode(bytes);
  baselines::LogRegModel m;
  try {
    const auto kind = d.header.at("kind").get<std::string>();
    require(kind == "logreg", ErrorKind::IncompatibleArtifacts,
            "checkpoint holds a '" + kind + "' model, not logistic regression");
    m.schema = embedded_schema(d);
    m.schema_digest = d.digest;
    m.config = baselines::logreg_config_from_json(d.header.at("config"));
    m.val_loss = d.header.at("val_loss").get<double>();
    m.params.w.assign(m.schema.state_size(), 0.0);
    std::vector<nn::TensorView> targets{
        {"logreg.w", {m.params.w.size()}, m.params.w},
        {"logreg.b", {1}, std::span<double>(&m.params.b, 1)}};
    fill(d, targets);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("checkpoint header: ") + e.what());
  }
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const trainer::Checkpoint& c) {
  write_file_atomic(path, encode_checkpoint(c));
}

void save_checkpoint(const std::filesystem::path& path, const baselines::LogRegModel& m) {
  write_file_atomic(path, encode_checkpoint(m));
}

trainer::Checkpoint load_model_checkpoint(const std::filesystem::path& path) {
  return decode_model_checkpoint(read_file(path));
}

baselines::LogRegModel load_logreg_checkpoint(const std::filesystem::path& path) {
  return decode_logreg_checkpoint(read_file(path));
}

}  // namespace intentforge::io
