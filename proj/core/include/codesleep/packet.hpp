#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "codesleep/types.hpp"

namespace codesleep {

using Payload = std::vector<std::uint8_t>;
using PayloadPtr = std::shared_ptr<const Payload>;

/// Deterministic pseudo-random payload for a packet id.
PayloadPtr make_payload(PacketId id, std::size_t bytes);

struct PacketHeader {
  PacketId id = 0;
  FlowId flow = 0;
  NodeId source = 0;
  NodeId destination = 0;
  Slot created = 0;

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

struct NativePacket {
  PacketHeader header;
  NodeId next_hop = 0;
  PayloadPtr payload;

  PacketId id() const noexcept { return header.id; }
};

struct CodedPacket {
  struct Constituent {
    PacketHeader header;
    NodeId next_hop = 0;
  };

  std::vector<Constituent> constituents;
  PayloadPtr payload;

  std::size_t degree() const noexcept { return constituents.size(); }
  bool contains(PacketId id) const noexcept;
};

/// XOR of the payloads. Needs >= 2 packets with pairwise distinct next hops
/// and ids and equal payload sizes; throws std::invalid_argument otherwise.
CodedPacket encode(std::span<const NativePacket> packets);

struct DecodeFailure {
  std::size_t missing = 0;
};
struct Redundant {};

using DecodeResult = std::variant<NativePacket, DecodeFailure, Redundant>;

/// Looks up a natively held packet by id; nullptr when unknown.
using PacketLookup = std::function<const NativePacket*(PacketId)>;

/// Recovers the single unknown constituent, or reports DecodeFailure (two or
/// more unknown) / Redundant (none unknown).
DecodeResult decode(const CodedPacket& coded, const PacketLookup& known);
DecodeResult decode(const CodedPacket& coded, std::span<const NativePacket> known);

/// What goes on the air in one data slot.
struct Frame {
  std::variant<NativePacket, CodedPacket> body;

  std::size_t degree() const noexcept;
  /// (id, next hop) of every packet carried.
  std::vector<std::pair<PacketId, NodeId>> targets() const;
  bool is_coded() const noexcept { return std::holds_alternative<CodedPacket>(body); }
};

}  // namespace codesleep
