#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "intentforge/baselines/baselines.hpp"
#include "intentforge/trainer/trainer.hpp"

namespace intentforge::io {

/// Checkpoint container:
///   "IFCK" | u32 version | 64 ascii hex schema digest | u64 header length |
///   JSON header | f64 payload, little-endian
/// The header carries the kind ("dqn", "lstm" or "logreg"), the embedded
/// feature schema, the training config, best epoch, validation loss, a tensor
/// directory (name, shape, offset in doubles), the payload length and the
/// payload's SHA-256.
inline constexpr std::string_view kCheckpointMagic = "IFCK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const trainer::Checkpoint& c);
std::string encode_checkpoint(const baselines::LogRegModel& m);

/// Reads only the header; used to dispatch on kind.
nlohmann::json checkpoint_header(std::string_view bytes);

trainer::Checkpoint decode_model_checkpoint(std::string_view bytes);
baselines::LogRegModel decode_logreg_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const trainer::Checkpoint& c);
void save_checkpoint(const std::filesystem::path& path, const baselines::LogRegModel& m);
trainer::Checkpoint load_model_checkpoint(const std::filesystem::path& path);
baselines::LogRegModel load_logreg_checkpoint(const std::filesystem::path& path);

}  // namespace intentforge::io
