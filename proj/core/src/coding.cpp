#include "codesleep/coding.hpp"

#include <algorithm>
#include <stdexcept>

namespace codesleep {

void CodingParams::validate() const {
  if (alpha < 1) throw std::invalid_argument("coding: alpha must be >= 1");
  if (pool_capacity == 0) throw std::invalid_argument("coding: pool capacity must be >= 1");
  if (report_period < 1) throw std::invalid_argument("coding: report period must be >= 1");
  if (hold < 0) throw std::invalid_argument("coding: hold must be >= 0");
  if (queue_capacity == 0) throw std::invalid_argument("coding: queue capacity must be >= 1");
}

bool OverheardPool::insert(OverheardEntry entry, std::optional<OverheardEntry>* evicted) {
  if (find(entry.packet.id())) return false;
  if (entries_.size() >= capacity_) {
    if (evicted) *evicted = std::move(entries_.front());
    entries_.pop_front();
  }
  entries_.push_back(std::move(entry));
  return true;
}

const OverheardEntry* OverheardPool::find(PacketId id) const {
  for (const auto& e : entries_) {
    if (e.packet.id() == id) return &e;
  }
  return nullptr;
}

const OverheardEntry* OverheardPool::credit(PacketId id, Slot slot) {
  for (auto& e : entries_) {
    if (e.packet.id() != id) continue;
    if (slot < e.overheard || slot > e.expiry) return nullptr;
    ++e.psi;
    return &e;
  }
  return nullptr;
}

std::vector<OverheardEntry> OverheardPool::age(Slot slot) {
  std::vector<OverheardEntry> useless;
  std::deque<OverheardEntry> kept;
  for (auto& e : entries_) {
    if (slot > e.expiry) {
      if (e.psi == 0) useless.push_back(std::move(e));
    } else {
      kept.push_back(std::move(e));
    }
  }
  entries_ = std::move(kept);
  return useless;
}

void PacketStore::remember(const NativePacket& p, Slot expiry) {
  auto [it, fresh] = packets_.try_emplace(p.id(), p, expiry);
  if (!fresh) it->second.second = std::max(it->second.second, expiry);
}

const NativePacket* PacketStore::find(PacketId id) const {
  auto it = packets_.find(id);
  return it == packets_.end() ? nullptr : &it->second.first;
}

void PacketStore::age(Slot slot) {
  std::erase_if(packets_, [slot](const auto& kv) { return slot > kv.second.second; });
}

void KnowledgeTable::update(NodeId neighbor, const ReceptionReport& report, Slot slot) {
  Entry e;
  e.freshness = slot;
  for (const auto& [id, expiry] : report.held) e.ids[id] = expiry;
  table_[neighbor] = std::move(e);
}

void KnowledgeTable::note(NodeId neighbor, PacketId id, Slot expiry) {
  Slot& cur = table_[neighbor].ids[id];
  cur = std::max(cur, expiry);
}

bool KnowledgeTable::holds(NodeId neighbor, PacketId id, Slot slot) const {
  auto it = table_.find(neighbor);
  if (it == table_.end()) return false;
  auto jt = it->second.ids.find(id);
  return jt != it->second.ids.end() && jt->second >= slot;
}

void KnowledgeTable::prune(Slot slot) {
  for (auto& [nb, e] : table_) {
    std::erase_if(e.ids, [slot](const auto& kv) { return slot > kv.second; });
  }
}

std::optional<Slot> KnowledgeTable::freshness(NodeId neighbor) const {
  auto it = table_.find(neighbor);
  if (it == table_.end()) return std::nullopt;
  return it->second.freshness;
}

std::size_t KnowledgeTable::known_count(NodeId neighbor) const {
  auto it = table_.find(neighbor);
  return it == table_.end() ? 0 : it->second.ids.size();
}

std::vector<std::size_t> plan_coding_set(std::span<const QueuedPacket> queue, const HoldsFn& holds) {
  std::vector<std::size_t> chosen;
  if (queue.empty()) return chosen;
  chosen.push_back(0);
  for (std::size_t k = 1; k < queue.size(); ++k) {
    const NativePacket& x = queue[k].packet;
    bool ok = true;
    for (std::size_t c : chosen) {
      const NativePacket& y = queue[c].packet;
      if (y.next_hop == x.next_hop || !holds(y.next_hop, x.id()) || !holds(x.next_hop, y.id())) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(k);
  }
  return chosen;
}

Frame take_coding_set(std::vector<QueuedPacket>& queue, const std::vector<std::size_t>& plan) {
  if (plan.empty()) throw std::invalid_argument("take_coding_set: empty plan");
  std::vector<NativePacket> picked;
  picked.reserve(plan.size());
  for (std::size_t i : plan) picked.push_back(queue.at(i).packet);
  // Erase from the back so earlier indices stay valid.
  std::vector<std::size_t> order(plan);
  std::sort(order.rbegin(), order.rend());
  for (std::size_t i : order) queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(i));
  if (picked.size() == 1) return Frame{std::move(picked.front())};
  return Frame{encode(picked)};
}

CodingState::CodingState(NodeId self, const CodingParams& params, std::size_t degree_window)
    : self_(self), params_(params), degree_window_(degree_window), pool_(params.pool_capacity) {}

const NativePacket* CodingState::lookup(PacketId id) const {
  if (const NativePacket* p = store_.find(id)) return p;
  if (const OverheardEntry* e = pool_.find(id)) return &e->packet;
  return nullptr;
}

bool CodingState::enqueue(const NativePacket& p, Slot slot, bool forwarded) {
  if (queue_.size() >= params_.queue_capacity) return false;
  queue_.push_back({p, slot, forwarded});
  return true;
}

std::vector<std::size_t> CodingState::plan(Slot slot) const {
  return plan_coding_set(queue_, [&](NodeId n, PacketId id) { return knowledge_.holds(n, id, slot); });
}

bool CodingState::ready(Slot slot) const {
  if (queue_.empty()) return false;
  const QueuedPacket& head = queue_.front();
  if (!head.forwarded || slot - head.enqueued >= params_.hold) return true;
  return plan(slot).size() >= 2;
}

Frame CodingState::transmit(Slot slot) {
  Frame frame = take_coding_set(queue_, plan(slot));
  const Slot expiry = slot + params_.alpha;
  const auto targets = frame.targets();
  if (const auto* n = std::get_if<NativePacket>(&frame.body)) {
    store_.remember(*n, expiry);
  } else {
    // The sender had every constituent natively; they are in the store or pool.
    for (const auto& [id, hop] : targets) {
      if (const NativePacket* p = lookup(id)) store_.remember(*p, expiry);
    }
  }
  // Each receiver ends up holding every constituent: its own by decoding, the
  // rest because decoding required them.
  for (const auto& [unused, hop] : targets) {
    for (const auto& [id, unused2] : targets) knowledge_.note(hop, id, expiry);
  }
  return frame;
}

ReceiveResult CodingState::on_receive(const Frame& frame, NodeId sender, Slot slot, bool receiver,
                                      std::int64_t epoch, double transmit_energy) {
  ReceiveResult out;
  const Slot expiry = slot + params_.alpha;
  auto add_to_pool = [&](const NativePacket& p) {
    if (lookup(p.id())) {
      out.redundant = true;
      return;
    }
    pool_.insert({p, slot, expiry, 0, epoch});
    out.pooled = p.id();
  };

  if (const auto* native = std::get_if<NativePacket>(&frame.body)) {
    if (receiver) {
      store_.remember(*native, expiry);
      out.recovered.push_back(*native);
    } else {
      add_to_pool(*native);
    }
  } else {
    const auto& coded = std::get<CodedPacket>(frame.body);
    for (const auto& c : coded.constituents) {
      if (const OverheardEntry* e = pool_.credit(c.header.id, slot)) {
        out.rewards.push_back({transmit_energy, e->origin_epoch, slot});
        if (e->psi == 1) ++out.newly_useful;
      }
    }
    auto result = decode(coded, [this](PacketId id) { return lookup(id); });
    if (auto* p = std::get_if<NativePacket>(&result)) {
      if (receiver && p->next_hop == self_) {
        store_.remember(*p, expiry);
        out.recovered.push_back(std::move(*p));
      } else if (receiver) {
        out.redundant = true;
      } else {
        add_to_pool(*p);
      }
    } else if (std::holds_alternative<DecodeFailure>(result)) {
      out.decode_failure = receiver;
    } else {
      out.redundant = true;
    }
  }

  for (const auto& [id, hop] : frame.targets()) knowledge_.note(sender, id, expiry);
  record_degree(static_cast<int>(frame.degree()));
  return out;
}

std::vector<OverheardEntry> CodingState::age_pool(Slot slot) {
  store_.age(slot);
  knowledge_.prune(slot);
  return pool_.age(slot);
}

ReceptionReport CodingState::emit_reception_report(Slot slot) const {
  ReceptionReport r;
  r.from = self_;
  r.slot = slot;
  std::map<PacketId, Slot> held;
  for (const auto& [id, entry] : store_.entries()) {
    if (entry.second >= slot) held[id] = entry.second;
  }
  for (const auto& e : pool_.entries()) {
    if (e.expiry < slot) continue;
    Slot& cur = held[e.packet.id()];
    cur = std::max(cur, e.expiry);
  }
  r.held.assign(held.begin(), held.end());
  return r;
}

void CodingState::update_knowledge(NodeId neighbor, const ReceptionReport& report, Slot slot) {
  knowledge_.update(neighbor, report, slot);
}

void CodingState::record_degree(int degree) {
  degrees_.push_back(degree);
  while (degrees_.size() > degree_window_) degrees_.pop_front();
}

}  // namespace codesleep
