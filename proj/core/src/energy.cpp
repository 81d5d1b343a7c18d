#include "codesleep/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace codesleep {

const char* to_string(NodeMode m) noexcept {
  switch (m) {
    case NodeMode::Send: return "S";
    case NodeMode::Receive: return "R";
    case NodeMode::Overhear: return "O";
    case NodeMode::Idle: return "I";
    case NodeMode::Sleep: return "Z";
  }
  return "?";
}

double EnergyModel::cost(NodeMode m) const noexcept {
  switch (m) {
    case NodeMode::Send: return transmit_energy();
    case NodeMode::Receive:
    case NodeMode::Overhear: return receive_energy();
    case NodeMode::Idle: return idle_energy();
    case NodeMode::Sleep: return 0.0;
  }
  return 0.0;
}

void EnergyModel::validate() const {
  if (transmit_power < 0.0 || receive_power < 0.0 || idle_power < 0.0) {
    throw std::invalid_argument("energy: powers must be >= 0");
  }
  if (!(slot_seconds > 0.0)) throw std::invalid_argument("energy: slot length must be > 0");
  if (!(capacity > 0.0)) throw std::invalid_argument("energy: capacity must be > 0");
  if (recharge_per_slot < 0.0) throw std::invalid_argument("energy: recharge must be >= 0");
}

void account_energy(EnergyAccount& node, NodeMode mode, const EnergyModel& model, Slot slot) {
  if (!node.alive) return;
  // A node can only draw what it has left; the tallies book the energy
  // actually drawn, so initial - residual + recharged == spent_total().
  const double drawn = std::min(model.cost(mode), node.residual);
  switch (mode) {
    case NodeMode::Send:
      ++node.sends;
      node.spent_transmit += drawn;
      break;
    case NodeMode::Receive:
      ++node.receives;
      node.spent_receive += drawn;
      break;
    case NodeMode::Overhear:
      ++node.overhears;
      node.spent_overhear += drawn;
      break;
    case NodeMode::Idle:
      ++node.idle_slots;
      node.spent_idle += drawn;
      break;
    case NodeMode::Sleep: ++node.sleep_slots; break;
  }
  node.residual -= drawn;
  if (node.residual <= 0.0) {
    node.residual = 0.0;
    node.alive = false;
    node.death_slot = slot;
    return;
  }
  const double gained = std::clamp(model.recharge_per_slot, 0.0, model.capacity - node.residual);
  node.residual += gained;
  node.recharged += gained;
}

}  // namespace codesleep
