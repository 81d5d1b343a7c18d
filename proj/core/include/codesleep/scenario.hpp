#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codesleep/agent.hpp"
#include "codesleep/coding.hpp"
#include "codesleep/energy.hpp"
#include "codesleep/policy.hpp"
#include "codesleep/world.hpp"

namespace codesleep {

struct TopologySpec {
  enum class Kind { Explicit, Random };
  Kind kind = Kind::Explicit;
  std::vector<Point> positions;
  std::size_t nodes = 0;
  double width = 0.0;
  double height = 0.0;
  double radius = 200.0;
  /// Fixes the random layout across repetitions; otherwise each run draws
  /// its own from the run seed.
  std::optional<std::uint64_t> seed;
};

struct FlowSpec {
  NodeId source = 0;
  NodeId destination = 0;

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct TrafficSpec {
  /// Explicit flows; when empty, `flow_count` random flows are drawn per run.
  std::vector<FlowSpec> flows;
  std::size_t flow_count = 0;
  double mean_interarrival = 20.0;
  ArrivalPattern pattern = ArrivalPattern::Poisson;
  Slot start = 0;
  /// Last arrival slot; defaults to the final slot of the run.
  std::optional<Slot> end;
  std::uint32_t packet_bits = 4000;
};

struct ScenarioConfig {
  std::string name = "custom";
  TopologySpec topology;
  TrafficSpec traffic;
  Slot duration = 1000;
  EnergyModel energy;
  CodingParams coding;
  LearningParams learning;
  StateQuantizer quantizer;
  /// When set, each agent's time unit is its own expected epoch gap.
  bool auto_time_unit = true;
  PolicySpec policy;
  std::uint64_t seed = 1;
  std::size_t reps = 20;
  std::string out_dir = "out";

  std::size_t node_count() const noexcept;
  std::size_t flow_total() const noexcept;
  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

/// Parses the INI-style scenario format (sections, key = value).
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// chain-fig1, two-way-relay, bystander-cross or desk.
ScenarioConfig canonical_scenario(std::string_view name);
std::vector<std::string> canonical_scenario_names();

/// The topology and flows one run actually uses.
struct World {
  Topology topology;
  std::vector<Flow> flows;
};

/// Draws `count` flows between distinct node pairs joined by a greedy route.
std::vector<Flow> random_flows(const Topology& topo, std::size_t count, const TrafficSpec& traffic, Slot last_slot,
                               std::uint64_t seed);

World materialize(const ScenarioConfig& config, std::uint64_t run_seed);

}  // namespace codesleep
