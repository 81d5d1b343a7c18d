#include <cmath>
#include <stdexcept>

#include "codesleep/policy.hpp"
#include "doctest.h"

using namespace codesleep;

TEST_CASE("policy names round trip") {
  for (const char* name : {"learned", "always-overhear", "always-sleep", "random:0.25", "random:1"}) {
    CHECK(to_string(parse_policy(name)) == name);
  }
  CHECK(parse_policy("random:0.25").p == 0.25);
  CHECK(parse_policy("learned").learned());
  CHECK_FALSE(parse_policy("always-sleep").learned());
}

TEST_CASE("bad policy text is rejected") {
  CHECK_THROWS_AS(parse_policy("sometimes"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("random:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("random:0.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("random:1.5"), std::invalid_argument);
}

TEST_CASE("fixed policies") {
  Rng rng(1);
  const Rng before = rng;
  CHECK(apply_fixed_policy(parse_policy("always-overhear"), rng) == Action::Overhear);
  CHECK(apply_fixed_policy(parse_policy("always-sleep"), rng) == Action::Sleep);
  CHECK((rng == before));
  CHECK_THROWS_AS(apply_fixed_policy(parse_policy("learned"), rng), std::logic_error);
}

TEST_CASE("random policy overhears with probability p") {
  Rng rng(99);
  const auto spec = parse_policy("random:0.3");
  const int n = 40000;
  int overhear = 0;
  for (int i = 0; i < n; ++i) overhear += apply_fixed_policy(spec, rng) == Action::Overhear;
  const double sd = std::sqrt(n * 0.3 * 0.7);
  CHECK(std::abs(overhear - 0.3 * n) < 5.0 * sd);
  CHECK(apply_fixed_policy(parse_policy("random:0"), rng) == Action::Sleep);
  CHECK(apply_fixed_policy(parse_policy("random:1"), rng) == Action::Overhear);
}
