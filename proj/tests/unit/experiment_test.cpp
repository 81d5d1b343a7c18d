#include <cmath>
#include <sstream>
#include <stdexcept>

#include "codesleep/experiment.hpp"
#include "doctest.h"

using namespace codesleep;

namespace {

RunSummary row(std::optional<double> gain, std::optional<Slot> life) {
  RunSummary r;
  r.scenario = "s";
  r.policy = "p";
  r.flows = 2;
  r.nodes = 4;
  r.coding_gain = gain;
  r.energy_per_bit = 1e-9;
  r.delay_mean = 3.0;
  r.lifetime = life;
  return r;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("aggregate means skip undefined values") {
  const std::vector<RunSummary> runs{row(1.0, std::nullopt), row(1.5, Slot{900}), row(std::nullopt, Slot{400}),
                                     row(2.0, std::nullopt)};
  const AggregateRow a = aggregate(runs);
  CHECK(a.seed_count == 4);
  CHECK(*a.coding_gain_mean == 1.5);
  CHECK(*a.coding_gain_sd == doctest::Approx(0.5));
  CHECK(a.lifetime_min_slots == Slot{400});
  CHECK(*a.delay_mean_slots == 3.0);
  CHECK_FALSE(a.converged_epoch.has_value());
  CHECK(aggregate(std::vector<RunSummary>{}).seed_count == 0);
}

TEST_CASE("single run has zero spread") {
  const std::vector<RunSummary> runs{row(1.25, std::nullopt)};
  CHECK(*aggregate(runs).coding_gain_sd == 0.0);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.2113636363637928e-10, 1e300, -0.0, 42.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("aggregate csv has the fixed columns and empty undefined fields") {
  AggregateRow a;
  a.scenario = "chain-fig1";
  a.policy = "always-overhear";
  a.flows = 2;
  a.nodes = 4;
  a.seed_count = 20;
  a.coding_gain_mean = 4.0 / 3.0;
  a.coding_gain_sd = 0.0;
  a.energy_per_bit_mean = 2.5e-10;
  a.delay_mean_slots = 4.5;
  std::ostringstream os;
  write_aggregate_csv(os, std::vector<AggregateRow>{a});
  CHECK(os.str() ==
        "scenario,policy,flows,nodes,seed_count,coding_gain_mean,coding_gain_sd,energy_per_bit_mean,"
        "delay_mean_slots,lifetime_min_slots,converged_epoch\n"
        "chain-fig1,always-overhear,2,4,20,1.3333333333333333,0,2.5e-10,4.5,,\n");
}

TEST_CASE("run csv rows line up with the header") {
  std::vector<RunSummary> runs{row(1.0, Slot{7}), row(std::nullopt, std::nullopt)};
  runs[0].converged_epoch = 4100;
  std::ostringstream os;
  write_runs_csv(os, runs);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(split(line) == kRunColumns);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto f = split(line);
    CHECK(f.size() == kRunColumns.size());
    ++rows;
  }
  CHECK(rows == 2);
  CHECK(os.str().find(",7,4100,") != std::string::npos);
}

TEST_CASE("repetitions are ordered and independent of thread count") {
  auto c = canonical_scenario("desk");
  c.topology.nodes = 10;
  c.topology.width = c.topology.height = 400.0;
  c.traffic.flow_count = 3;
  c.duration = 800;
  ExperimentOptions one;
  one.reps = 5;
  one.seed = 3;
  one.threads = 1;
  ExperimentOptions many = one;
  many.threads = 4;
  const auto a = run_repetitions(c, one);
  std::vector<int> seen(5, 0);
  const auto b = run_repetitions(c, many, [&](std::size_t rep, const MetricsReport&) { ++seen[rep]; });
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(a[k].rep == k);
    CHECK(a[k].seed == repetition_seed(3, k));
    CHECK(a[k].trace_hash == b[k].trace_hash);
    CHECK(seen[k] == 1);
  }
  CHECK_FALSE(a[0].trace_hash == a[1].trace_hash);
}

TEST_CASE("a failing repetition surfaces its exception") {
  auto c = canonical_scenario("chain-fig1");
  c.duration = 10;
  ExperimentOptions o;
  o.reps = 2;
  o.threads = 2;
  CHECK_THROWS_AS(run_repetitions(c, o, [](std::size_t rep, const MetricsReport&) {
                    if (rep == 1) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
