#pragma once

#include <cstdint>
#include <optional>

#include "codesleep/types.hpp"

namespace codesleep {

/// What a node's radio does during one slot.
enum class NodeMode : std::uint8_t { Send, Receive, Overhear, Idle, Sleep };

const char* to_string(NodeMode m) noexcept;

/// Constant-power radio model. Per-slot energies are power x slot length;
/// sleeping costs nothing.
struct EnergyModel {
  double transmit_power = 140e-6;  // W
  double receive_power = 90e-6;    // W
  double idle_power = 55e-6;       // W
  double slot_seconds = 4000.0 / 11e6;
  double capacity = 1.0;  // J
  double recharge_per_slot = 0.0;  // J

  double transmit_energy() const noexcept { return transmit_power * slot_seconds; }
  double receive_energy() const noexcept { return receive_power * slot_seconds; }
  double idle_energy() const noexcept { return idle_power * slot_seconds; }
  double cost(NodeMode m) const noexcept;

  /// Airtime of one packet at the given bit rate.
  static double slot_for(std::uint32_t packet_bits, double bit_rate) noexcept {
    return static_cast<double>(packet_bits) / bit_rate;
  }

  void validate() const;
};

/// Energy state of one node plus the per-mode tallies the conservation check
/// is written against.
struct EnergyAccount {
  double residual = 0.0;
  double initial = 0.0;
  double recharged = 0.0;
  bool alive = true;
  std::optional<Slot> death_slot;

  std::int64_t sends = 0;
  std::int64_t receives = 0;
  std::int64_t overhears = 0;
  std::int64_t idle_slots = 0;
  std::int64_t sleep_slots = 0;

  double spent_transmit = 0.0;
  double spent_receive = 0.0;
  double spent_overhear = 0.0;
  double spent_idle = 0.0;

  static EnergyAccount full(const EnergyModel& model) {
    EnergyAccount a;
    a.residual = a.initial = model.capacity;
    return a;
  }

  double spent_total() const noexcept { return spent_transmit + spent_receive + spent_overhear + spent_idle; }
};

/// Charges one slot in `mode`, applies recharge, clamps to [0, capacity] and
/// marks the node dead when it reaches 0. No-op on a dead node.
void account_energy(EnergyAccount& node, NodeMode mode, const EnergyModel& model, Slot slot);

}  // namespace codesleep
