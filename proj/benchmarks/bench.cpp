#include <benchmark/benchmark.h>

#include "codesleep/agent.hpp"
#include "codesleep/coding.hpp"
#include "codesleep/packet.hpp"
#include "codesleep/simulator.hpp"

using namespace codesleep;

namespace {

NativePacket packet(PacketId id, NodeId hop, std::size_t bytes) {
  NativePacket p;
  p.header = {id, 0, 0, hop, 0};
  p.next_hop = hop;
  p.payload = make_payload(id, bytes);
  return p;
}

void BM_Encode(benchmark::State& state) {
  const auto degree = static_cast<std::size_t>(state.range(0));
  std::vector<NativePacket> ps;
  for (std::size_t i = 0; i < degree; ++i) ps.push_back(packet(i, static_cast<NodeId>(i), 500));
  for (auto _ : state) benchmark::DoNotOptimize(encode(ps));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * degree * 500));
}
BENCHMARK(BM_Encode)->DenseRange(2, 4);

void BM_Decode(benchmark::State& state) {
  const auto degree = static_cast<std::size_t>(state.range(0));
  std::vector<NativePacket> ps;
  for (std::size_t i = 0; i < degree; ++i) ps.push_back(packet(i, static_cast<NodeId>(i), 500));
  const CodedPacket coded = encode(ps);
  const std::vector<NativePacket> known(ps.begin() + 1, ps.end());
  for (auto _ : state) benchmark::DoNotOptimize(decode(coded, known));
}
BENCHMARK(BM_Decode)->DenseRange(2, 4);

// Queue of `n` forwarded packets over 8 next hops; every neighbor holds
// every even id, so plans mix accepted and rejected candidates.
void BM_PlanCodingSet(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<QueuedPacket> queue;
  for (std::size_t i = 0; i < n; ++i) {
    queue.push_back({packet(i, static_cast<NodeId>(i % 8), 0), 0, true});
  }
  const HoldsFn holds = [](NodeId, PacketId id) { return id % 2 == 0; };
  for (auto _ : state) benchmark::DoNotOptimize(plan_coding_set(queue, holds));
}
BENCHMARK(BM_PlanCodingSet)->RangeMultiplier(4)->Range(4, 64);

void BM_AgentEpoch(benchmark::State& state) {
  LearningParams params;
  params.theta_max = static_cast<int>(state.range(0));
  SleepAgent agent(25, params);
  Rng rng(1);
  double t = 0.0;
  std::size_t s = 0;
  for (auto _ : state) {
    t += 3.0;
    s = (s * 7 + 3) % 25;
    benchmark::DoNotOptimize(agent.on_epoch(s, t, 1e-8, rng));
  }
}
BENCHMARK(BM_AgentEpoch)->Arg(0)->Arg(8);

void BM_DeskSlot(benchmark::State& state) {
  auto c = canonical_scenario("desk");
  c.traffic.flow_count = static_cast<std::size_t>(state.range(0));
  c.duration = std::numeric_limits<std::int32_t>::max();
  c.traffic.end = 200000;
  Simulator sim(c, materialize(c, 1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_DeskSlot)->Arg(2)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
