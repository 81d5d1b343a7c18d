#include <numeric>
#include <sstream>
#include <stdexcept>

#include "codesleep/simulator.hpp"
#include "doctest.h"

using namespace codesleep;

namespace {

Topology line(std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({100.0 * static_cast<double>(i), 0.0});
  return build_topology(pts, 120.0);
}

ScenarioConfig small_desk(Slot duration) {
  auto c = canonical_scenario("desk");
  c.topology.nodes = 12;
  c.topology.width = c.topology.height = 450.0;
  c.traffic.flow_count = 4;
  c.duration = duration;
  return c;
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("bar", fnv1a("foo")) == fnv1a("foobar"));
}

TEST_CASE("conflict rule on a line") {
  const Topology t = line(6);
  CHECK(conflicts(t, {0, {1}}, {0, {1}}));
  CHECK(conflicts(t, {0, {1}}, {1, {2}}));  // 1 cannot send and receive
  CHECK(conflicts(t, {0, {1}}, {2, {3}}));  // 2 is heard at 1
  CHECK(conflicts(t, {2, {3}}, {0, {1}}));
  CHECK(conflicts(t, {1, {0}}, {3, {2}}));  // 1 is heard at 2
  CHECK_FALSE(conflicts(t, {0, {1}}, {4, {5}}));
  CHECK_FALSE(conflicts(t, {1, {0}}, {4, {5}}));
  CHECK(conflicts(t, {3, {2, 4}}, {5, {4}}));
}

TEST_CASE("grants match a pairwise scan built from raw distances") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Point> pts(15);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const Topology t = build_topology(pts, 150.0);
    auto in_range = [&](NodeId a, NodeId b) { return a != b && distance(pts[a], pts[b]) <= 150.0; };

    std::vector<Candidate> cands;
    std::vector<NodeId> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (NodeId s : order) {
      const auto nb = t.neighbors(s);
      if (nb.empty() || rng() % 2) continue;
      Candidate c{s, {}};
      for (NodeId r : nb) {
        if (rng() % 3 == 0) c.receivers.push_back(r);
      }
      if (c.receivers.empty()) c.receivers.push_back(nb.front());
      cands.push_back(c);
    }
    auto clash = [&](const Candidate& a, const Candidate& b) {
      if (a.sender == b.sender) return true;
      for (NodeId r : b.receivers) {
        if (r == a.sender || in_range(a.sender, r)) return true;
      }
      for (NodeId r : a.receivers) {
        if (r == b.sender || in_range(b.sender, r)) return true;
      }
      return false;
    };
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      bool ok = true;
      for (std::size_t g : expect) ok = ok && !clash(cands[g], cands[i]);
      if (ok) expect.push_back(i);
    }
    CHECK(grant_transmissions(t, cands) == expect);
  }
}

TEST_CASE("slot outcomes respect half-duplex and reception rules") {
  const auto c = small_desk(3000);
  for (std::uint64_t seed : {1, 2, 3}) {
    Simulator sim(c, materialize(c, seed), seed);
    while (!sim.finished()) {
      const SlotOutcome& o = sim.step();
      std::vector<int> addressed(sim.nodes().size(), 0);
      for (const auto& tx : o.transmissions) {
        CHECK(o.modes[tx.sender] == NodeMode::Send);
        CHECK(tx.receivers.size() == tx.frame.degree());
        for (NodeId r : tx.receivers) {
          CHECK(o.modes[r] == NodeMode::Receive);
          ++addressed[r];
        }
      }
      for (std::size_t n = 0; n < addressed.size(); ++n) CHECK(addressed[n] <= 1);
      for (std::size_t i = 0; i < o.transmissions.size(); ++i) {
        for (std::size_t j = i + 1; j < o.transmissions.size(); ++j) {
          const Candidate a{o.transmissions[i].sender, o.transmissions[i].receivers};
          const Candidate b{o.transmissions[j].sender, o.transmissions[j].receivers};
          CHECK_FALSE(conflicts(sim.topology(), a, b));
        }
      }
      // Exactly the nodes with an epoch this slot are overhearing or asleep.
      for (std::size_t n = 0; n < o.modes.size(); ++n) {
        const bool choice = o.modes[n] == NodeMode::Overhear || o.modes[n] == NodeMode::Sleep;
        CHECK(choice == sim.decisions()[n].has_value());
      }
    }
    CHECK_THROWS_AS(sim.step(), std::logic_error);
  }
}

TEST_CASE("figure-1 chain: overhearing saves the fourth transmission") {
  auto c = canonical_scenario("chain-fig1");
  c.traffic.end = 0;
  c.duration = 40;
  c.policy = parse_policy("always-sleep");
  const auto sleep = run(c, 1);
  c.policy = parse_policy("always-overhear");
  const auto hear = run(c, 1);
  CHECK(sleep.transmissions == 4);
  CHECK(hear.transmissions == 3);
  CHECK(hear.coded_transmissions == 1);
  CHECK(sleep.delivered_packets == 2);
  CHECK(hear.delivered_packets == 2);
  CHECK(coding_gain(hear).value == 4.0 / 3.0);
}

TEST_CASE("two-way relay codes without any overhearing") {
  auto c = canonical_scenario("two-way-relay");
  c.traffic.end = 0;
  c.duration = 40;
  for (const char* p : {"always-sleep", "always-overhear"}) {
    c.policy = parse_policy(p);
    const auto r = run(c, 3);
    CHECK(r.transmissions == 3);
    CHECK(r.delivered_packets == 2);
  }
}

TEST_CASE("without overhearing the chain never codes") {
  auto c = canonical_scenario("chain-fig1");
  c.duration = 5000;
  c.policy = parse_policy("always-sleep");
  const auto r = run(c, 2);
  CHECK(r.coded_transmissions == 0);
  CHECK(r.overhear_decisions == 0);
  CHECK(r.energy.overhear == 0.0);
  CHECK(r.transmissions == r.native_equivalent);
}

TEST_CASE("trace text hashes to the report hash and repeats per seed") {
  const auto c = small_desk(2000);
  std::ostringstream t1, t2;
  const auto a = run(c, 8, &t1);
  const auto b = run(c, 8, &t2);
  CHECK(t1.str() == t2.str());
  CHECK(a == b);
  CHECK(fnv1a(t1.str()) == a.trace_hash);
  CHECK_FALSE(run(c, 9).trace_hash == a.trace_hash);
  // Tracing does not change the run.
  CHECK(run(c, 8) == a);
}

TEST_CASE("report energy equals the sum of node ledgers") {
  const auto c = small_desk(2000);
  Simulator sim(c, materialize(c, 4), 4);
  const auto r = sim.run();
  double total = 0.0;
  std::int64_t idle = 0;
  for (const auto& n : sim.nodes()) {
    total += n.energy.spent_total();
    idle += n.energy.idle_slots;
    CHECK(n.energy.initial - n.energy.residual + n.energy.recharged == doctest::Approx(n.energy.spent_total()));
  }
  CHECK(r.energy.total() == doctest::Approx(total));
  CHECK(r.idle_slots == idle);
  CHECK(r.generated == static_cast<std::int64_t>(r.packets.size()));
  CHECK(r.delivered_packets <= r.generated);
}

TEST_CASE("exhausted nodes die, drop their queue and stop") {
  auto c = canonical_scenario("chain-fig1");
  c.duration = 3000;
  c.energy.capacity = 200 * c.energy.transmit_energy();
  std::ostringstream trace;
  const auto r = run(c, 1, &trace);
  REQUIRE(lifetime(r).has_value());
  CHECK(*lifetime(r) < 3000);
  CHECK(trace.str().find(" K -") != std::string::npos);
  CHECK(r.delivered_packets < r.generated);
}

TEST_CASE("learning nodes record one reward per epoch") {
  const auto c = small_desk(3000);
  const auto r = run(c, 5);
  std::int64_t epochs = 0;
  for (const auto& v : r.epoch_rewards) epochs += static_cast<std::int64_t>(v.size());
  CHECK(epochs == r.epochs);
  CHECK(r.overhear_decisions + r.sleep_decisions == r.epochs);
  CHECK(r.epochs > 0);
}
