#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codesleep/types.hpp"

namespace codesleep {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;

/// Static unit-disk graph: i and j are neighbors iff i != j and their
/// Euclidean distance is at most the radius.
class Topology {
 public:
  Topology() = default;

  std::size_t size() const noexcept { return positions_.size(); }
  double radius() const noexcept { return radius_; }
  Point position(NodeId n) const { return positions_.at(n); }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  /// Sorted ascending.
  std::span<const NodeId> neighbors(NodeId n) const { return neighbors_.at(n); }
  bool adjacent(NodeId a, NodeId b) const;
  double distance(NodeId a, NodeId b) const;
  /// Non-fatal construction diagnostics (coincident nodes, ...).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  friend Topology build_topology(std::span<const Point> positions, double radius);

  std::vector<Point> positions_;
  double radius_ = 0.0;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<std::string> warnings_;
};

/// Throws std::invalid_argument for an empty position list or radius <= 0.
Topology build_topology(std::span<const Point> positions, double radius);

/// n nodes uniform i.i.d. over [0, width] x [0, height].
Topology random_topology(std::size_t n, double width, double height, double radius, std::uint64_t seed);

/// Greedy geographic forwarding: the neighbor of `current` closest to
/// `destination` (ties to the lowest id), or nullopt when no neighbor is
/// strictly closer than `current` itself.
std::optional<NodeId> next_hop(const Topology& topo, NodeId current, NodeId destination);

/// Full greedy path source..destination, or nullopt on a dead end.
std::optional<std::vector<NodeId>> greedy_route(const Topology& topo, NodeId source, NodeId destination);

enum class ArrivalPattern { Poisson, Periodic };

struct Flow {
  FlowId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  std::uint32_t packet_bits = 4000;
  /// Mean inter-arrival in slots; +infinity means the flow is silent.
  double mean_interarrival = std::numeric_limits<double>::infinity();
  Slot start = 0;
  Slot end = 0;
  ArrivalPattern pattern = ArrivalPattern::Poisson;

  void validate() const;
};

/// Arrival slots in [start, end]. Poisson flows draw exponential gaps with
/// the flow's mean, rounded up to whole slots (minimum 1), counted from
/// start - 1; periodic flows arrive at start, start + mean, ...
std::vector<Slot> generate_arrivals(const Flow& flow, std::uint64_t seed);

/// Per-link transmission intensities lambda(i, j), defined only on edges.
class TrafficRates {
 public:
  /// Throws std::invalid_argument for negative rates or non-adjacent pairs.
  void set(const Topology& topo, NodeId from, NodeId to, double rate);
  void add(const Topology& topo, NodeId from, NodeId to, double rate);
  double get(NodeId from, NodeId to) const;
  const std::map<std::pair<NodeId, NodeId>, double>& entries() const noexcept { return rates_; }

 private:
  std::map<std::pair<NodeId, NodeId>, double> rates_;
};

/// Per-hop rates implied by a set of flows routed greedily (1 / mean per hop).
TrafficRates rates_from_flows(const Topology& topo, std::span<const Flow> flows);

/// Inverse of the total rate of neighbor transmissions not addressed to n:
/// [ sum_{i in K_n} sum_{j in K_i, j != n} lambda(i, j) ]^-1.
/// nullopt when that rate is zero (the gap is infinite).
std::optional<double> expected_epoch_gap(const Topology& topo, const TrafficRates& rates, NodeId n);

}  // namespace codesleep
