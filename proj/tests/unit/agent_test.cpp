#include <cmath>
#include <sstream>
#include <stdexcept>

#include "codesleep/agent.hpp"
#include "doctest.h"

using namespace codesleep;

TEST_CASE("energy level is the ceiling of the residual fraction") {
  const StateQuantizer q{8, 10, 15};
  CHECK(q.observe(1.0, 1.0, {}).e_level == 8);
  CHECK(q.observe(0.875, 1.0, {}).e_level == 7);
  CHECK(q.observe(0.8751, 1.0, {}).e_level == 8);
  CHECK(q.observe(0.01, 1.0, {}).e_level == 1);
  CHECK(q.observe(0.0, 1.0, {}).e_level == 1);
  CHECK(q.observe(3.0, 1.0, {}).e_level == 8);
}

TEST_CASE("degree level bins the windowed mean coding degree") {
  const StateQuantizer q{8, 10, 4};
  Rng rng(3);
  std::uniform_int_distribution<int> deg(1, 4);
  std::uniform_int_distribution<int> len(0, 9);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<int> d(static_cast<std::size_t>(len(rng)));
    for (auto& x : d) x = deg(rng);
    const std::size_t n = std::min<std::size_t>(d.size(), 4);
    int expect = 1;
    if (n > 0) {
      long sum = 0;
      for (std::size_t i = d.size() - n; i < d.size(); ++i) sum += d[i];
      // Smallest k with mean <= 1 + k/10, i.e. 10 (sum - n) <= k n.
      expect = 10;
      for (int k = 1; k <= 10; ++k) {
        if (10 * (sum - static_cast<long>(n)) <= k * static_cast<long>(n)) {
          expect = k;
          break;
        }
      }
    }
    CHECK(q.observe(1.0, 1.0, d).g_level == expect);
  }
}

TEST_CASE("state index round trip covers the grid") {
  const StateQuantizer q{8, 10, 15};
  CHECK(q.state_count() == 80);
  for (std::size_t i = 0; i < q.state_count(); ++i) {
    const AgentState s = q.from_index(i);
    CHECK(s.e_level >= 1);
    CHECK(s.e_level <= 8);
    CHECK(s.g_level >= 1);
    CHECK(s.g_level <= 10);
    CHECK(q.index(s) == i);
  }
}

TEST_CASE("exploration decays linearly then stays flat") {
  const ExplorationSchedule e{0.3, 0.02, 4000};
  CHECK(e.at(0) == 0.3);
  CHECK(e.at(2000) == doctest::Approx(0.16));
  CHECK(e.at(4000) == 0.02);
  CHECK(e.at(100000) == 0.02);
  CHECK(ExplorationSchedule{0.3, 0.1, 0}.at(0) == 0.1);
}

TEST_CASE("learning parameter validation") {
  LearningParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.theta_max = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.time_unit = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.exploration.start = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("q-table shape, bounds and exact dump") {
  QTable q(6, 3);
  CHECK(q.size() == 6 * 2 * 4);
  CHECK_THROWS_AS(q.at(6, Action::Sleep, 0), std::out_of_range);
  CHECK_THROWS_AS(q.at(0, Action::Sleep, 4), std::out_of_range);
  Rng rng(5);
  std::normal_distribution<double> v;
  for (std::size_t s = 0; s < 6; ++s) {
    for (int th = 0; th <= 3; ++th) {
      q.at(s, Action::Overhear, th) = v(rng);
      q.at(s, Action::Sleep, th) = v(rng);
    }
  }
  std::stringstream ss;
  q.dump(ss);
  CHECK(QTable::load(ss) == q);

  std::istringstream bad("state,action,theta,value\n0,2,0,1\n");
  CHECK_THROWS(QTable::load(bad));
  std::istringstream headless("0,0,0,1\n");
  CHECK_THROWS(QTable::load(headless));
}

TEST_CASE("greedy selection picks the best slice, then the best action in it") {
  QTable q(1, 4);
  CHECK(greedy_selection(q, 0) == Selection{Action::Overhear, 0});
  q.at(0, Action::Sleep, 3) = 1.0;
  CHECK(greedy_selection(q, 0) == Selection{Action::Sleep, 3});
  q.at(0, Action::Overhear, 2) = 1.0;
  CHECK(greedy_selection(q, 0) == Selection{Action::Overhear, 2});
  q.at(0, Action::Sleep, 2) = 1.0;
  CHECK(greedy_selection(q, 0) == Selection{Action::Overhear, 2});
  q.at(0, Action::Sleep, 2) = 1.5;
  CHECK(greedy_selection(q, 0) == Selection{Action::Sleep, 2});
  CHECK(q.max_value(0) == 1.5);
}

TEST_CASE("epsilon-greedy selection") {
  QTable q(1, 0);
  q.at(0, Action::Sleep, 0) = 1.0;
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) CHECK(select(q, 0, 0.0, rng).action == Action::Sleep);
  int overhear = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) overhear += select(q, 0, 1.0, rng).action == Action::Overhear;
  // Binomial(n, 1/2): 5 sd is about 354.
  CHECK(std::abs(overhear - n / 2) < 354);
}

TEST_CASE("discounting and reward composition") {
  CHECK(elapsed_discount(5.0, 3.0, 0.5) == std::exp(-1.0));
  CHECK(elapsed_discount(3.0, 3.0, 0.5) == 1.0);
  CHECK_THROWS_AS(elapsed_discount(2.0, 3.0, 0.5), std::invalid_argument);
  const auto o = compose_reward(Action::Overhear, 7.0, 4.0);
  CHECK(o.immediate == -4.0);
  CHECK(o.per_use == 7.0);
  const auto s = compose_reward(Action::Sleep, 7.0, 4.0);
  CHECK(s.immediate == 0.0);
  CHECK(s.per_use == 0.0);
}

TEST_CASE("agent update credits every delay hypothesis") {
  LearningParams p;
  p.beta = 0.5;
  p.gamma = 0.9;
  p.theta_max = 1;
  p.exploration = {0.0, 0.0, 0};
  SleepAgent ag(2, p);
  Rng rng(1);

  CHECK(ag.on_epoch(0, 0.0, 0.0, rng) == Selection{Action::Overhear, 0});
  ag.on_epoch(1, 2.0, 1.0, rng);
  const double q00 = 0.5 * 1.0;
  CHECK(ag.table().at(0, Action::Overhear, 0) == doctest::Approx(q00));
  CHECK(ag.table().at(0, Action::Overhear, 1) == 0.0);

  const Selection sel = ag.on_epoch(0, 3.0, 2.0, rng);
  const double q10 = 0.5 * (2.0 + std::exp(-0.9) * q00);
  CHECK(ag.table().at(1, Action::Overhear, 0) == doctest::Approx(q10));
  const double q01 = 0.5 * (2.0 + std::exp(-1.8) * q10);
  CHECK(ag.table().at(0, Action::Overhear, 1) == doctest::Approx(q01));
  CHECK(sel == Selection{Action::Overhear, 1});
  CHECK(ag.epochs() == 3);
  CHECK(ag.history().size() == 2);
}

TEST_CASE("time unit rescales the discount") {
  LearningParams p;
  p.theta_max = 0;
  p.exploration = {0.0, 0.0, 0};
  p.time_unit = 10.0;
  SleepAgent ag(1, p);
  ag.table().at(0, Action::Sleep, 0) = 1.0;
  ag.on_epoch_forced(0, 0.0, 0.0, {Action::Overhear, 0});
  ag.on_epoch_forced(0, 20.0, 0.0, {Action::Sleep, 0});
  CHECK(ag.table().at(0, Action::Overhear, 0) == doctest::Approx(0.5 * std::exp(-0.9 * 2.0)));
  CHECK(ag.history().back().action == Action::Sleep);
}
