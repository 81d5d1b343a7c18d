#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codesleep/types.hpp"

namespace codesleep {

struct PacketRecord {
  PacketId id = 0;
  FlowId flow = 0;
  Slot created = 0;
  std::optional<Slot> first_transmission;
  std::optional<Slot> delivered;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct EnergyTotals {
  double transmit = 0.0;
  double receive = 0.0;
  double overhear = 0.0;
  double idle = 0.0;

  double total() const noexcept { return transmit + receive + overhear + idle; }

  friend bool operator==(const EnergyTotals&, const EnergyTotals&) = default;
};

/// Everything one run measured.
struct MetricsReport {
  std::string scenario;
  std::string policy;
  std::size_t nodes = 0;
  std::size_t flows = 0;
  std::uint64_t seed = 0;
  Slot duration = 0;

  /// Data frames sent.
  std::int64_t transmissions = 0;
  /// Sum of frame degrees: what the same frames cost without coding.
  std::int64_t native_equivalent = 0;
  std::int64_t coded_transmissions = 0;

  std::int64_t generated = 0;
  std::int64_t delivered_packets = 0;
  double delivered_bits = 0.0;
  std::int64_t dropped_route = 0;
  std::int64_t dropped_queue = 0;
  std::int64_t dropped_dead = 0;
  std::int64_t decode_failures = 0;
  std::vector<PacketRecord> packets;

  EnergyTotals energy;
  std::vector<std::optional<Slot>> death_slots;

  /// Per node, the reward collected at each of its epochs.
  std::vector<std::vector<double>> epoch_rewards;
  std::int64_t epochs = 0;
  std::int64_t overhear_decisions = 0;
  std::int64_t sleep_decisions = 0;
  std::int64_t useful_overhears = 0;
  std::int64_t useless_overhears = 0;
  std::int64_t idle_slots = 0;
  std::int64_t sleep_slots = 0;
  std::int64_t collisions = 0;

  std::uint64_t trace_hash = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// A metric that can be undefined (zero denominator); `value` then holds the
/// documented fallback.
struct MetricValue {
  double value = 0.0;
  bool defined = true;
};

/// native_equivalent / transmissions; 1.0 flagged undefined without transmissions.
MetricValue coding_gain(const MetricsReport& r);
/// Total energy over delivered bits; undefined without deliveries.
MetricValue energy_per_bit(const MetricsReport& r);
/// Mean of delivery minus first transmission over delivered packets.
MetricValue avg_delay(const MetricsReport& r);
std::int64_t undelivered(const MetricsReport& r);

/// Per-epoch reward averaged across the nodes that reached that epoch, then a
/// trailing mean over `window` epochs (shorter at the start).
std::vector<std::pair<std::int64_t, double>> reward_curve(const MetricsReport& r, std::size_t window);
std::vector<std::pair<std::int64_t, double>> reward_curve(const std::vector<std::vector<double>>& per_node,
                                                          std::size_t window);

struct PlateauDetector {
  /// Checkpoints are spaced this many epochs apart.
  std::int64_t step = 100;
  /// Relative flatness threshold against the range of the whole curve.
  double tolerance = 0.01;
  std::int64_t min_epoch = 400;
};

/// First checkpoint E from which on every checkpoint passes the flatness
/// test: the least-squares slope over the last quarter of [0, E], times that
/// quarter's length, stays below tolerance x (max - min of the curve).
std::optional<std::int64_t> detect_plateau(const std::vector<std::pair<std::int64_t, double>>& curve,
                                           const PlateauDetector& d = {});

/// Earliest death slot; nullopt when every node survived.
std::optional<Slot> lifetime(const MetricsReport& r);

}  // namespace codesleep
