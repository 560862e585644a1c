#pragma once

#include <cstdint>
#include <random>

namespace intentforge {

using Rng = std::mt19937_64;

/// Independent streams carved out of one run seed. Each consumer draws from
/// its own engine so that, e.g., enabling dropout never shifts the batch
/// sampling sequence.
enum class Stream : std::uint32_t {
  Init = 0,
  Sampling = 1,
  Noise = 2,
  Dropout = 3,
  Split = 4,
  Generator = 5,
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x1f0f6e7du};
  return Rng(seq);
}

}  // namespace intentforge
