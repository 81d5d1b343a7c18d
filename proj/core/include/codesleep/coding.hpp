#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "codesleep/agent.hpp"
#include "codesleep/packet.hpp"
#include "codesleep/types.hpp"

namespace codesleep {

struct CodingParams {
  /// Slots an overheard or held packet stays usable.
  Slot alpha = 50;
  std::size_t pool_capacity = 64;
  /// Standalone reception reports go out at the end of every `report_period`-th slot.
  Slot report_period = 5;
  /// Slots a relay keeps an uncodable forwarded head packet back, waiting for
  /// a coding partner, before sending it natively. 0 disables waiting.
  Slot hold = 8;
  std::size_t queue_capacity = 256;

  void validate() const;
};

struct OverheardEntry {
  NativePacket packet;
  Slot overheard = 0;
  Slot expiry = 0;
  int psi = 0;
  /// Agent epoch whose Overhear decision stored this entry.
  std::int64_t origin_epoch = 0;
};

/// Overheard packets with usefulness counters. FIFO eviction on overflow.
class OverheardPool {
 public:
  explicit OverheardPool(std::size_t capacity = 64) : capacity_(capacity) {}

  /// Adds the entry unless the id is already present. On overflow the oldest
  /// entry is pushed out and returned through `evicted`.
  bool insert(OverheardEntry entry, std::optional<OverheardEntry>* evicted = nullptr);
  const OverheardEntry* find(PacketId id) const;
  /// Counts one use of `id` when slot lies in [overheard, expiry]; returns
  /// the crediting entry.
  const OverheardEntry* credit(PacketId id, Slot slot);
  /// Drops entries with slot > expiry and returns those never used.
  std::vector<OverheardEntry> age(Slot slot);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::deque<OverheardEntry>& entries() const noexcept { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<OverheardEntry> entries_;
};

/// Natives a node holds because it generated, received or sent them.
class PacketStore {
 public:
  void remember(const NativePacket& p, Slot expiry);
  const NativePacket* find(PacketId id) const;
  void age(Slot slot);
  std::size_t size() const noexcept { return packets_.size(); }
  const std::map<PacketId, std::pair<NativePacket, Slot>>& entries() const noexcept { return packets_; }

 private:
  std::map<PacketId, std::pair<NativePacket, Slot>> packets_;
};

struct ReceptionReport {
  NodeId from = 0;
  Slot slot = 0;
  /// (packet id, slot until which the reporter expects to keep it), ascending by id.
  std::vector<std::pair<PacketId, Slot>> held;
};

/// What each neighbor is believed to hold.
class KnowledgeTable {
 public:
  /// Replaces everything known about `neighbor` with the report.
  void update(NodeId neighbor, const ReceptionReport& report, Slot slot);
  /// Adds one inferred holding.
  void note(NodeId neighbor, PacketId id, Slot expiry);
  bool holds(NodeId neighbor, PacketId id, Slot slot) const;
  void prune(Slot slot);
  std::optional<Slot> freshness(NodeId neighbor) const;
  std::size_t known_count(NodeId neighbor) const;

 private:
  struct Entry {
    Slot freshness = 0;
    std::unordered_map<PacketId, Slot> ids;
  };
  std::map<NodeId, Entry> table_;
};

struct QueuedPacket {
  NativePacket packet;
  Slot enqueued = 0;
  /// Received from another node rather than generated here.
  bool forwarded = false;
};

using HoldsFn = std::function<bool(NodeId node, PacketId id)>;

/// Greedy FIFO-head-anchored coding set: indices into `queue` (head first).
/// A later packet joins iff its next hop differs from every chosen next hop,
/// every chosen next hop holds it and its next hop holds every chosen packet.
std::vector<std::size_t> plan_coding_set(std::span<const QueuedPacket> queue, const HoldsFn& holds);

/// Pulls the planned packets out of the queue and forms the frame.
Frame take_coding_set(std::vector<QueuedPacket>& queue, const std::vector<std::size_t>& plan);

/// Outcome of handing one heard frame to a node.
struct ReceiveResult {
  /// Natives now addressed to this node (decoded or native).
  std::vector<NativePacket> recovered;
  /// Native stored in the overheard pool, if any.
  std::optional<PacketId> pooled;
  std::vector<RewardEvent> rewards;
  /// Pool entries credited for the first time.
  std::size_t newly_useful = 0;
  bool decode_failure = false;
  bool redundant = false;
};

/// Per-node coding state: transmission queue, held and overheard packets,
/// neighbor knowledge and the recent coding degrees.
class CodingState {
 public:
  CodingState(NodeId self, const CodingParams& params, std::size_t degree_window);

  NodeId self() const noexcept { return self_; }
  std::vector<QueuedPacket>& queue() noexcept { return queue_; }
  const std::vector<QueuedPacket>& queue() const noexcept { return queue_; }
  OverheardPool& pool() noexcept { return pool_; }
  const OverheardPool& pool() const noexcept { return pool_; }
  PacketStore& store() noexcept { return store_; }
  const PacketStore& store() const noexcept { return store_; }
  KnowledgeTable& knowledge() noexcept { return knowledge_; }
  const KnowledgeTable& knowledge() const noexcept { return knowledge_; }
  const std::deque<int>& degrees() const noexcept { return degrees_; }

  /// Natives held for decoding (store, then pool).
  const NativePacket* lookup(PacketId id) const;

  /// False when the queue is full.
  bool enqueue(const NativePacket& p, Slot slot, bool forwarded);

  std::vector<std::size_t> plan(Slot slot) const;
  /// Whether the node wants the channel this slot (the hold rule applies).
  bool ready(Slot slot) const;
  /// Removes and returns the frame to send; remembers what was sent and what
  /// the receivers will hold afterwards.
  Frame transmit(Slot slot);

  /// Handles a frame from `sender`. `receiver` is true when this node is one
  /// of the intended next hops, false when it overheard. `epoch` is the
  /// agent epoch at which an overhearing decision was taken.
  ReceiveResult on_receive(const Frame& frame, NodeId sender, Slot slot, bool receiver, std::int64_t epoch,
                           double transmit_energy);

  /// Ages the pool and the store; returns overheard entries that expired unused.
  std::vector<OverheardEntry> age_pool(Slot slot);

  ReceptionReport emit_reception_report(Slot slot) const;
  void update_knowledge(NodeId neighbor, const ReceptionReport& report, Slot slot);

  void record_degree(int degree);

 private:
  NodeId self_;
  CodingParams params_;
  std::size_t degree_window_;
  std::vector<QueuedPacket> queue_;
  OverheardPool pool_;
  PacketStore store_;
  KnowledgeTable knowledge_;
  std::deque<int> degrees_;
};

}  // namespace codesleep
