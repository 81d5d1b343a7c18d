#include "codesleep/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace codesleep {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool conflicts(const Topology& topo, const Candidate& a, const Candidate& b) {
  auto hits = [&topo](const Candidate& x, const Candidate& y) {
    for (NodeId r : y.receivers) {
      if (r == x.sender || topo.adjacent(x.sender, r)) return true;
    }
    return false;
  };
  return a.sender == b.sender || hits(a, b) || hits(b, a);
}

std::vector<std::size_t> grant_transmissions(const Topology& topo, std::span<const Candidate> ordered) {
  std::vector<std::size_t> granted;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const bool free = std::none_of(granted.begin(), granted.end(),
                                   [&](std::size_t g) { return conflicts(topo, ordered[g], ordered[i]); });
    if (free) granted.push_back(i);
  }
  return granted;
}

NodeRuntime::NodeRuntime(NodeId id_, const EnergyModel& energy_model, const CodingParams& coding_params,
                         std::size_t degree_window, std::uint64_t seed)
    : id(id_), energy(EnergyAccount::full(energy_model)), coding(id_, coding_params, degree_window), rng(seed) {}

Simulator::Simulator(ScenarioConfig config, World world, std::uint64_t run_seed)
    : config_(std::move(config)), world_(std::move(world)), seed_(run_seed), sched_rng_(derive_seed(run_seed, 1)) {
  config_.validate();
  const std::size_t n = world_.topology.size();
  const TrafficRates rates = rates_from_flows(world_.topology, world_.flows);
  nodes_.reserve(n);
  for (NodeId id = 0; id < n; ++id) {
    nodes_.emplace_back(id, config_.energy, config_.coding, config_.quantizer.degree_window,
                        derive_seed(run_seed, 1000 + id));
    if (config_.policy.learned()) {
      LearningParams lp = config_.learning;
      if (config_.auto_time_unit) lp.time_unit = expected_epoch_gap(world_.topology, rates, id).value_or(1.0);
      nodes_.back().agent.emplace(config_.quantizer.state_count(), lp);
    }
  }
  for (const auto& f : world_.flows) {
    if (f.source >= n || f.destination >= n) throw std::invalid_argument("simulator: flow endpoint out of range");
    arrivals_.push_back(generate_arrivals(f, derive_seed(run_seed, 100000 + f.id)));
  }
  arrival_cursor_.assign(world_.flows.size(), 0);

  report_.scenario = config_.name;
  report_.policy = to_string(config_.policy);
  report_.nodes = n;
  report_.flows = world_.flows.size();
  report_.seed = run_seed;
  report_.duration = config_.duration;
  report_.death_slots.assign(n, std::nullopt);
  report_.epoch_rewards.assign(n, {});
  report_.trace_hash = fnv1a("");
}

void Simulator::emit(NodeId node, const char* event, const std::string& detail) {
  std::string line = std::to_string(slot_);
  line += ' ';
  line += std::to_string(node);
  line += ' ';
  line += event;
  line += ' ';
  line += detail;
  line += '\n';
  report_.trace_hash = fnv1a(line, report_.trace_hash);
  if (trace_) *trace_ << line;
}

std::string Simulator::frame_label(const Frame& f) const {
  std::string out;
  for (const auto& [id, hop] : f.targets()) {
    if (!out.empty()) out += '+';
    out += std::to_string(id);
    out += '>';
    out += std::to_string(hop);
  }
  return out;
}

void Simulator::route_or_deliver(NodeRuntime& node, NativePacket p, bool forwarded) {
  PacketRecord& rec = report_.packets.at(packet_index_.at(p.id()));
  if (p.header.destination == node.id) {
    if (!rec.delivered) {
      rec.delivered = slot_;
      ++report_.delivered_packets;
      report_.delivered_bits += static_cast<double>(world_.flows.at(p.header.flow).packet_bits);
      emit(node.id, "D", std::to_string(p.id()));
    }
    return;
  }
  const auto hop = next_hop(world_.topology, node.id, p.header.destination);
  if (!hop) {
    ++report_.dropped_route;
    emit(node.id, "X", "route " + std::to_string(p.id()));
    return;
  }
  if (!nodes_[*hop].alive()) {
    ++report_.dropped_dead;
    emit(node.id, "X", "dead " + std::to_string(p.id()));
    return;
  }
  p.next_hop = *hop;
  if (!node.coding.enqueue(p, slot_, forwarded)) {
    ++report_.dropped_queue;
    emit(node.id, "X", "queue " + std::to_string(p.id()));
  }
}

void Simulator::inject_arrivals() {
  const std::size_t bytes_per_bit_div = 8;
  for (std::size_t k = 0; k < world_.flows.size(); ++k) {
    const Flow& f = world_.flows[k];
    auto& cur = arrival_cursor_[k];
    while (cur < arrivals_[k].size() && arrivals_[k][cur] == slot_) {
      ++cur;
      const PacketId id = next_packet_++;
      packet_index_.push_back(report_.packets.size());
      report_.packets.push_back({id, f.id, slot_, std::nullopt, std::nullopt});
      ++report_.generated;
      NodeRuntime& src = nodes_[f.source];
      if (!src.alive()) {
        ++report_.dropped_dead;
        continue;
      }
      NativePacket p;
      p.header = {id, f.id, f.source, f.destination, slot_};
      p.payload = make_payload(id, (f.packet_bits + bytes_per_bit_div - 1) / bytes_per_bit_div);
      emit(f.source, "A", std::to_string(id));
      src.coding.store().remember(p, slot_ + config_.coding.alpha);
      route_or_deliver(src, std::move(p), false);
    }
  }
}

void Simulator::fire_epoch(NodeRuntime& node) {
  const double reward = node.pending_reward;
  node.pending_reward = 0.0;
  report_.epoch_rewards[node.id].push_back(reward);
  ++node.epoch;
  ++report_.epochs;

  Action a;
  if (node.agent) {
    const auto& hist = node.coding.degrees();
    const std::vector<int> degrees(hist.begin(), hist.end());
    const AgentState st = config_.quantizer.observe(node.energy.residual, config_.energy.capacity, degrees);
    a = node.agent->on_epoch(config_.quantizer.index(st), static_cast<double>(slot_), reward, node.rng).action;
  } else {
    a = apply_fixed_policy(config_.policy, node.rng);
  }
  if (a == Action::Overhear) {
    node.pending_reward -= config_.energy.receive_energy();
    ++report_.overhear_decisions;
  } else {
    ++report_.sleep_decisions;
  }
  decisions_[node.id] = a;
}

void Simulator::deliver(const Transmission& tx, std::span<const std::optional<NodeMode>> modes) {
  const ReceptionReport piggyback = nodes_[tx.sender].coding.emit_reception_report(slot_);
  const double e_t = config_.energy.transmit_energy();
  auto hand_over = [&](NodeRuntime& node, bool receiver) {
    ReceiveResult res = node.coding.on_receive(tx.frame, tx.sender, slot_, receiver, node.epoch, e_t);
    for (const auto& ev : res.rewards) node.pending_reward += ev.amount;
    report_.useful_overhears += static_cast<std::int64_t>(res.newly_useful);
    if (res.decode_failure) {
      ++report_.decode_failures;
      emit(node.id, "F", frame_label(tx.frame));
    }
    node.coding.update_knowledge(tx.sender, piggyback, slot_);
    for (auto& p : res.recovered) route_or_deliver(node, std::move(p), true);
  };
  const std::string label = frame_label(tx.frame);
  for (NodeId r : tx.receivers) {
    emit(r, "R", label);
    hand_over(nodes_[r], true);
  }
  for (NodeId nb : world_.topology.neighbors(tx.sender)) {
    if (modes[nb] == NodeMode::Overhear) {
      emit(nb, "O", label);
      hand_over(nodes_[nb], false);
    }
  }
}

const SlotOutcome& Simulator::step() {
  if (finished()) throw std::logic_error("simulator: run already finished");
  const std::size_t n = nodes_.size();
  outcome_ = SlotOutcome{};
  outcome_.slot = slot_;
  outcome_.modes.assign(n, std::nullopt);
  decisions_.assign(n, std::nullopt);

  // Packets waiting on a dead next hop can never leave.
  for (auto& node : nodes_) {
    if (!node.alive()) continue;
    auto& q = node.coding.queue();
    const auto before = q.size();
    std::erase_if(q, [&](const QueuedPacket& p) { return !nodes_[p.packet.next_hop].alive(); });
    report_.dropped_dead += static_cast<std::int64_t>(before - q.size());
  }

  inject_arrivals();

  std::vector<Candidate> candidates;
  for (auto& node : nodes_) {
    if (!node.alive() || !node.coding.ready(slot_)) continue;
    Candidate c{node.id, {}};
    const auto& q = node.coding.queue();
    for (std::size_t i : node.coding.plan(slot_)) c.receivers.push_back(q[i].packet.next_hop);
    candidates.push_back(std::move(c));
  }
  std::shuffle(candidates.begin(), candidates.end(), sched_rng_);
  const auto granted = grant_transmissions(world_.topology, candidates);

  auto& modes = outcome_.modes;
  for (std::size_t g : granted) {
    modes[candidates[g].sender] = NodeMode::Send;
    for (NodeId r : candidates[g].receivers) modes[r] = NodeMode::Receive;
  }
  std::vector<std::vector<NodeId>> heard(n);
  for (std::size_t g : granted) {
    const NodeId s = candidates[g].sender;
    for (NodeId nb : world_.topology.neighbors(s)) {
      if (nodes_[nb].alive() && !modes[nb]) heard[nb].push_back(s);
    }
  }
  for (auto& node : nodes_) {
    if (!node.alive() || modes[node.id]) continue;
    const auto& h = heard[node.id];
    if (h.size() == 1) {
      fire_epoch(node);
      const bool overhear = decisions_[node.id] == Action::Overhear;
      modes[node.id] = overhear ? NodeMode::Overhear : NodeMode::Sleep;
      if (!overhear) emit(node.id, "Z", std::to_string(h.front()));
    } else {
      modes[node.id] = NodeMode::Idle;
      if (h.size() > 1) {
        ++report_.collisions;
        std::vector<NodeId> senders = h;
        std::sort(senders.begin(), senders.end());
        std::string detail;
        for (NodeId s : senders) detail += (detail.empty() ? "" : ",") + std::to_string(s);
        emit(node.id, "C", detail);
        outcome_.collisions.push_back({node.id, std::move(senders)});
      }
    }
  }

  for (std::size_t g : granted) {
    NodeRuntime& sender = nodes_[candidates[g].sender];
    Transmission tx{sender.id, sender.coding.transmit(slot_), candidates[g].receivers};
    ++report_.transmissions;
    report_.native_equivalent += static_cast<std::int64_t>(tx.frame.degree());
    if (tx.frame.is_coded()) ++report_.coded_transmissions;
    for (const auto& [id, hop] : tx.frame.targets()) {
      auto& rec = report_.packets.at(packet_index_.at(id));
      if (!rec.first_transmission) rec.first_transmission = slot_;
    }
    emit(sender.id, "S", frame_label(tx.frame));
    outcome_.transmissions.push_back(std::move(tx));
  }
  for (const auto& tx : outcome_.transmissions) deliver(tx, modes);

  for (auto& node : nodes_) {
    if (!node.alive()) continue;
    report_.useless_overhears += static_cast<std::int64_t>(node.coding.age_pool(slot_ + 1).size());
  }

  if ((slot_ + 1) % config_.coding.report_period == 0) {
    for (auto& node : nodes_) {
      if (!node.alive()) continue;
      const ReceptionReport rep = node.coding.emit_reception_report(slot_);
      for (NodeId nb : world_.topology.neighbors(node.id)) {
        if (nodes_[nb].alive()) nodes_[nb].coding.update_knowledge(node.id, rep, slot_);
      }
    }
  }

  for (auto& node : nodes_) {
    if (!node.alive()) continue;
    account_energy(node.energy, *modes[node.id], config_.energy, slot_);
    if (!node.alive()) {
      report_.death_slots[node.id] = slot_;
      report_.dropped_dead += static_cast<std::int64_t>(node.coding.queue().size());
      node.coding.queue().clear();
      emit(node.id, "K", "-");
    }
  }

  ++slot_;
  return outcome_;
}

MetricsReport Simulator::run() {
  while (!finished()) step();
  MetricsReport r = report_;
  r.energy = {};
  r.idle_slots = r.sleep_slots = 0;
  for (const auto& node : nodes_) {
    r.energy.transmit += node.energy.spent_transmit;
    r.energy.receive += node.energy.spent_receive;
    r.energy.overhear += node.energy.spent_overhear;
    r.energy.idle += node.energy.spent_idle;
    r.idle_slots += node.energy.idle_slots;
    r.sleep_slots += node.energy.sleep_slots;
  }
  return r;
}

MetricsReport run(const ScenarioConfig& config, std::uint64_t run_seed, std::ostream* trace) {
  Simulator sim(config, materialize(config, run_seed), run_seed);
  sim.set_trace(trace);
  return sim.run();
}

}  // namespace codesleep
