#pragma once

#include <cstdint>
#include <random>

namespace codesleep {

using NodeId = std::uint32_t;
using PacketId = std::uint64_t;
using FlowId = std::uint32_t;
using Slot = std::int64_t;

/// All stochastic components draw from this engine. Seeds are derived with
/// derive_seed() so that independent streams never share a state.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer: mixes a base seed with a stream tag into an
/// independent 64-bit seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace codesleep
