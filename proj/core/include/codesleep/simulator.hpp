#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codesleep/agent.hpp"
#include "codesleep/coding.hpp"
#include "codesleep/energy.hpp"
#include "codesleep/metrics.hpp"
#include "codesleep/packet.hpp"
#include "codesleep/policy.hpp"
#include "codesleep/scenario.hpp"
#include "codesleep/world.hpp"

namespace codesleep {

/// A would-be sender and the next hops its frame is for.
struct Candidate {
  NodeId sender = 0;
  std::vector<NodeId> receivers;
};

/// True when the two transmissions cannot share a slot: either sender is a
/// receiver of the other (half-duplex) or either sender is within range of a
/// receiver of the other.
bool conflicts(const Topology& topo, const Candidate& a, const Candidate& b);

/// Grants candidates in the given order, each iff it conflicts with no
/// earlier grant. Returns indices into `ordered`.
std::vector<std::size_t> grant_transmissions(const Topology& topo, std::span<const Candidate> ordered);

struct Transmission {
  NodeId sender = 0;
  Frame frame;
  std::vector<NodeId> receivers;
};

struct Collision {
  NodeId node = 0;
  std::vector<NodeId> senders;
};

struct SlotOutcome {
  Slot slot = 0;
  /// nullopt for dead nodes.
  std::vector<std::optional<NodeMode>> modes;
  std::vector<Transmission> transmissions;
  std::vector<Collision> collisions;
};

struct NodeRuntime {
  NodeId id = 0;
  EnergyAccount energy;
  CodingState coding;
  std::optional<SleepAgent> agent;
  Rng rng;
  /// Reward collected since the last epoch, including that epoch's overhearing cost.
  double pending_reward = 0.0;
  /// Index of the latest epoch, -1 before the first.
  std::int64_t epoch = -1;

  NodeRuntime(NodeId id, const EnergyModel& energy_model, const CodingParams& coding_params,
              std::size_t degree_window, std::uint64_t seed);
  bool alive() const noexcept { return energy.alive; }
};

/// Slot-by-slot engine for one run.
class Simulator {
 public:
  Simulator(ScenarioConfig config, World world, std::uint64_t run_seed);

  /// Enables the text event trace (slot node event detail per line).
  void set_trace(std::ostream* out) noexcept { trace_ = out; }

  /// Advances one slot and returns what happened in it.
  const SlotOutcome& step();
  /// Runs the remaining slots and returns the report.
  MetricsReport run();

  Slot slot() const noexcept { return slot_; }
  bool finished() const noexcept { return slot_ >= config_.duration; }
  const Topology& topology() const noexcept { return world_.topology; }
  const std::vector<Flow>& flows() const noexcept { return world_.flows; }
  const std::vector<NodeRuntime>& nodes() const noexcept { return nodes_; }
  const ScenarioConfig& config() const noexcept { return config_; }
  const MetricsReport& report() const noexcept { return report_; }
  std::uint64_t trace_hash() const noexcept { return report_.trace_hash; }
  /// Action picked at the most recent epoch of `node` this slot, if any.
  const std::vector<std::optional<Action>>& decisions() const noexcept { return decisions_; }

 private:
  void inject_arrivals();
  void route_or_deliver(NodeRuntime& node, NativePacket p, bool forwarded);
  void fire_epoch(NodeRuntime& node);
  void deliver(const Transmission& tx, std::span<const std::optional<NodeMode>> modes);
  void emit(NodeId node, const char* event, const std::string& detail);
  std::string frame_label(const Frame& f) const;

  ScenarioConfig config_;
  World world_;
  std::uint64_t seed_;
  Rng sched_rng_;
  std::vector<NodeRuntime> nodes_;
  std::vector<std::vector<Slot>> arrivals_;
  std::vector<std::size_t> arrival_cursor_;
  std::vector<std::size_t> packet_index_;  // packet id -> index in report_.packets
  PacketId next_packet_ = 0;
  Slot slot_ = 0;
  SlotOutcome outcome_;
  std::vector<std::optional<Action>> decisions_;
  MetricsReport report_;
  std::ostream* trace_ = nullptr;
};

/// One complete run of `config` under `run_seed`.
MetricsReport run(const ScenarioConfig& config, std::uint64_t run_seed, std::ostream* trace = nullptr);

/// FNV-1a over bytes, chained from `h`.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

}  // namespace codesleep
