#include <cmath>
#include <stdexcept>

#include "codesleep/metrics.hpp"
#include "doctest.h"

using namespace codesleep;

TEST_CASE("ratio metrics and their undefined cases") {
  MetricsReport r;
  CHECK_FALSE(coding_gain(r).defined);
  CHECK(coding_gain(r).value == 1.0);
  CHECK_FALSE(energy_per_bit(r).defined);
  CHECK_FALSE(avg_delay(r).defined);

  r.transmissions = 3;
  r.native_equivalent = 4;
  CHECK(coding_gain(r).value == 4.0 / 3.0);
  r.energy = {1.0, 2.0, 3.0, 4.0};
  r.delivered_bits = 8000.0;
  CHECK(energy_per_bit(r).value == 10.0 / 8000.0);
}

TEST_CASE("delay counts from the first transmission to delivery") {
  MetricsReport r;
  r.packets = {{0, 0, 0, 2, 10}, {1, 0, 1, 3, 5}, {2, 0, 2, 4, std::nullopt}, {3, 0, 3, std::nullopt, std::nullopt}};
  const MetricValue d = avg_delay(r);
  CHECK(d.defined);
  CHECK(d.value == 5.0);
  CHECK(undelivered(r) == 2);
}

TEST_CASE("reward curve matches a direct average") {
  const std::vector<std::vector<double>> per{{1, 2, 3, 4, 5}, {3, 4}, {}, {5, 6, 7}};
  const std::size_t w = 2;
  const auto c = reward_curve(per, w);
  REQUIRE(c.size() == 5);
  std::vector<double> mean;
  for (std::size_t k = 0; k < 5; ++k) {
    double s = 0;
    int n = 0;
    for (const auto& v : per) {
      if (k < v.size()) {
        s += v[k];
        ++n;
      }
    }
    mean.push_back(s / n);
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const double expect = k == 0 ? mean[0] : (mean[k] + mean[k - 1]) / 2.0;
    CHECK(c[k].first == static_cast<std::int64_t>(k));
    CHECK(c[k].second == doctest::Approx(expect));
  }
  CHECK_THROWS_AS(reward_curve(per, 0), std::invalid_argument);
  CHECK(reward_curve(std::vector<std::vector<double>>{}, 3).empty());
}

namespace {

std::vector<std::pair<std::int64_t, double>> series(std::int64_t n, double (*f)(std::int64_t)) {
  std::vector<std::pair<std::int64_t, double>> c;
  for (std::int64_t e = 0; e < n; ++e) c.emplace_back(e, f(e));
  return c;
}

}  // namespace

TEST_CASE("plateau detector on synthetic ramps") {
  // Linear ramp to epoch 2000, flat after: only windows that sit inside
  // the flat part can pass, which first happens at E - E/4 >= 2000.
  const auto hinge = series(8000, [](std::int64_t e) { return std::min<double>(e, 2000) / 2000.0; });
  const auto at = detect_plateau(hinge);
  REQUIRE(at.has_value());
  CHECK(*at >= 2000);
  CHECK(*at <= 2700);

  const auto ramp = series(8000, [](std::int64_t e) { return static_cast<double>(e); });
  CHECK_FALSE(detect_plateau(ramp).has_value());

  // A late climb resets an earlier plateau.
  const auto relapse = series(8000, [](std::int64_t e) {
    return e < 1000 ? 0.0 : e < 7000 ? 1.0 : 1.0 + static_cast<double>(e - 7000) / 100.0;
  });
  CHECK_FALSE(detect_plateau(relapse).has_value());

  const auto flat = series(1000, [](std::int64_t) { return 3.0; });
  CHECK(detect_plateau(flat) == std::int64_t{400});

  // Exponential approach to 1 with time constant 800.
  const auto expo = series(10000, [](std::int64_t e) { return 1.0 - std::exp(-static_cast<double>(e) / 800.0); });
  const auto ex = detect_plateau(expo);
  REQUIRE(ex.has_value());
  CHECK(*ex > 2000);
  CHECK(*ex < 8000);
}

TEST_CASE("lifetime is the first death") {
  MetricsReport r;
  r.death_slots = {std::nullopt, Slot{50}, Slot{20}};
  CHECK(lifetime(r) == Slot{20});
  r.death_slots = {std::nullopt};
  CHECK_FALSE(lifetime(r).has_value());
}
