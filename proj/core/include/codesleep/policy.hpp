#pragma once

#include <string>
#include <string_view>

#include "codesleep/agent.hpp"
#include "codesleep/types.hpp"

namespace codesleep {

enum class PolicyKind { Learned, AlwaysOverhear, AlwaysSleep, RandomP };

/// How nodes answer overhearing opportunities.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Learned;
  /// Overhear probability for RandomP.
  double p = 0.5;

  void validate() const;
  bool learned() const noexcept { return kind == PolicyKind::Learned; }

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Accepts learned, always-overhear, always-sleep and random:P.
PolicySpec parse_policy(std::string_view text);
std::string to_string(const PolicySpec& p);

/// Decision of a non-learning policy. RandomP draws exactly one uniform;
/// the other policies draw nothing. Throws for Learned.
Action apply_fixed_policy(const PolicySpec& policy, Rng& rng);

}  // namespace codesleep
