#include "codesleep/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace codesleep {

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& n = neighbors_.at(a);
  return std::binary_search(n.begin(), n.end(), b);
}

double Topology::distance(NodeId a, NodeId b) const {
  return codesleep::distance(positions_.at(a), positions_.at(b));
}

Topology build_topology(std::span<const Point> positions, double radius) {
  if (positions.empty()) throw std::invalid_argument("topology: no nodes");
  if (!(radius > 0.0)) throw std::invalid_argument("topology: radius must be > 0");

  Topology t;
  t.positions_.assign(positions.begin(), positions.end());
  t.radius_ = radius;
  t.neighbors_.resize(positions.size());
  const auto n = static_cast<NodeId>(positions.size());
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double d = distance(positions[i], positions[j]);
      if (d == 0.0) {
        std::ostringstream w;
        w << "nodes " << i << " and " << j << " share a position";
        t.warnings_.push_back(w.str());
      }
      if (d <= radius) {
        t.neighbors_[i].push_back(j);
        t.neighbors_[j].push_back(i);
      }
    }
  }
  for (auto& list : t.neighbors_) std::sort(list.begin(), list.end());
  return t;
}

Topology random_topology(std::size_t n, double width, double height, double radius, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random_topology: n must be >= 1");
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("random_topology: empty area");
  Rng rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = ux(rng);
    p.y = uy(rng);
  }
  return build_topology(pts, radius);
}

std::optional<NodeId> next_hop(const Topology& topo, NodeId current, NodeId destination) {
  if (current == destination) throw std::invalid_argument("next_hop: already at destination");
  const Point dest = topo.position(destination);
  double best = distance(topo.position(current), dest);
  std::optional<NodeId> choice;
  for (NodeId nb : topo.neighbors(current)) {  // ascending, so '<' keeps the lowest id on ties
    const double d = distance(topo.position(nb), dest);
    if (d < best) {
      best = d;
      choice = nb;
    }
  }
  return choice;
}

std::optional<std::vector<NodeId>> greedy_route(const Topology& topo, NodeId source, NodeId destination) {
  std::vector<NodeId> path{source};
  NodeId cur = source;
  while (cur != destination) {
    auto nh = next_hop(topo, cur, destination);
    if (!nh) return std::nullopt;
    cur = *nh;
    path.push_back(cur);
  }
  return path;
}

void Flow::validate() const {
  if (source == destination) throw std::invalid_argument("flow: source equals destination");
  if (!(mean_interarrival > 0.0)) throw std::invalid_argument("flow: mean inter-arrival must be > 0");
  if (start > end) throw std::invalid_argument("flow: start after end");
  if (packet_bits == 0) throw std::invalid_argument("flow: zero packet size");
}

std::vector<Slot> generate_arrivals(const Flow& flow, std::uint64_t seed) {
  flow.validate();
  std::vector<Slot> out;
  if (std::isinf(flow.mean_interarrival)) return out;

  if (flow.pattern == ArrivalPattern::Periodic) {
    const auto step = std::max<Slot>(1, static_cast<Slot>(std::llround(flow.mean_interarrival)));
    for (Slot t = flow.start; t <= flow.end; t += step) out.push_back(t);
    return out;
  }

  Rng rng(seed);
  std::exponential_distribution<double> gap(1.0 / flow.mean_interarrival);
  Slot t = flow.start - 1;
  for (;;) {
    const double g = std::ceil(gap(rng));
    if (g > static_cast<double>(flow.end - t)) break;
    t += std::max<Slot>(1, static_cast<Slot>(g));
    if (t > flow.end) break;
    out.push_back(t);
  }
  return out;
}

void TrafficRates::set(const Topology& topo, NodeId from, NodeId to, double rate) {
  if (rate < 0.0 || !std::isfinite(rate)) throw std::invalid_argument("traffic rate must be finite and >= 0");
  if (!topo.adjacent(from, to)) throw std::invalid_argument("traffic rate defined only between neighbors");
  rates_[{from, to}] = rate;
}

void TrafficRates::add(const Topology& topo, NodeId from, NodeId to, double rate) {
  set(topo, from, to, get(from, to) + rate);
}

double TrafficRates::get(NodeId from, NodeId to) const {
  auto it = rates_.find({from, to});
  return it == rates_.end() ? 0.0 : it->second;
}

TrafficRates rates_from_flows(const Topology& topo, std::span<const Flow> flows) {
  TrafficRates rates;
  for (const auto& f : flows) {
    if (std::isinf(f.mean_interarrival)) continue;
    auto path = greedy_route(topo, f.source, f.destination);
    if (!path) continue;
    for (std::size_t k = 0; k + 1 < path->size(); ++k) {
      rates.add(topo, (*path)[k], (*path)[k + 1], 1.0 / f.mean_interarrival);
    }
  }
  return rates;
}

std::optional<double> expected_epoch_gap(const Topology& topo, const TrafficRates& rates, NodeId n) {
  double total = 0.0;
  for (NodeId i : topo.neighbors(n)) {
    for (NodeId j : topo.neighbors(i)) {
      if (j != n) total += rates.get(i, j);
    }
  }
  if (total <= 0.0) return std::nullopt;
  return 1.0 / total;
}

}  // namespace codesleep
