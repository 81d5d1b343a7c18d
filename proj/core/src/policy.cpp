#include "codesleep/policy.hpp"

#include <charconv>
#include <stdexcept>

namespace codesleep {

void PolicySpec::validate() const {
  if (kind == PolicyKind::RandomP && !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("policy: random probability must lie in [0, 1]");
  }
}

PolicySpec parse_policy(std::string_view text) {
  if (text == "learned") return {PolicyKind::Learned, 0.5};
  if (text == "always-overhear") return {PolicyKind::AlwaysOverhear, 1.0};
  if (text == "always-sleep") return {PolicyKind::AlwaysSleep, 0.0};
  constexpr std::string_view prefix = "random:";
  if (text.starts_with(prefix)) {
    const std::string_view num = text.substr(prefix.size());
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
      throw std::invalid_argument("policy: bad probability in '" + std::string(text) + "'");
    }
    PolicySpec spec{PolicyKind::RandomP, p};
    spec.validate();
    return spec;
  }
  throw std::invalid_argument("policy: unknown policy '" + std::string(text) + "'");
}

std::string to_string(const PolicySpec& p) {
  switch (p.kind) {
    case PolicyKind::Learned: return "learned";
    case PolicyKind::AlwaysOverhear: return "always-overhear";
    case PolicyKind::AlwaysSleep: return "always-sleep";
    case PolicyKind::RandomP: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p.p);
      return "random:" + std::string(buf, ptr);
    }
  }
  return "?";
}

Action apply_fixed_policy(const PolicySpec& policy, Rng& rng) {
  switch (policy.kind) {
    case PolicyKind::AlwaysOverhear: return Action::Overhear;
    case PolicyKind::AlwaysSleep: return Action::Sleep;
    case PolicyKind::RandomP: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return u(rng) < policy.p ? Action::Overhear : Action::Sleep;
    }
    case PolicyKind::Learned: break;
  }
  throw std::logic_error("apply_fixed_policy: learned policy has no fixed action");
}

}  // namespace codesleep
