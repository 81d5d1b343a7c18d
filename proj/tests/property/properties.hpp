#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace codesleep::props {

/// Outcome of one randomized property suite.
struct Result {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const noexcept { return cases > 0 && failures == 0; }
};

inline constexpr std::size_t kCases = 10000;

Result xor_round_trip(std::size_t cases, std::uint64_t seed);
Result energy_conservation(std::size_t cases, std::uint64_t seed);
Result coding_gain_floor(std::size_t cases, std::uint64_t seed);
Result q_table_size(std::size_t cases, std::uint64_t seed);
Result neighbor_symmetry(std::size_t cases, std::uint64_t seed);
Result trace_determinism(std::size_t cases, std::uint64_t seed);
/// Each case draws a random layout and link rates, then counts at least
/// `events` overhearable arrivals around one node.
Result epoch_gap(std::size_t cases, std::size_t events, std::uint64_t seed);

}  // namespace codesleep::props
