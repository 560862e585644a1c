#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "intentforge/data/split.hpp"

namespace intentforge::io {

/// Feature matrix container:
///   "IFFM" | u32 version | 64 ascii hex schema digest | u32 mode |
///   u64 sessions | u64 width | u64 rows | u64 offsets[sessions+1] |
///   u8 labels[sessions] | session ids | user ids (u32 length + bytes each) |
///   f64 rows×width, row-major
/// All integers and floats little-endian.
inline constexpr std::string_view kFeatureMagic = "IFFM";
inline constexpr std::uint32_t kFeatureVersion = 1;

std::string encode_features(const data::FeatureMatrix& m, std::string_view schema_digest);
/// Returns the matrix; `digest_out` receives the stored schema digest.
data::FeatureMatrix decode_features(std::string_view bytes, std::string* digest_out = nullptr);

/// A prepared dataset directory:
///   schema.json, split.json, train.iffm, validation.iffm, test.iffm
void save_split(const std::filesystem::path& dir, const data::DatasetSplit& split);
/// Loads and cross-checks every file against the schema digest.
data::DatasetSplit load_split(const std::filesystem::path& dir);

}  // namespace intentforge::io
