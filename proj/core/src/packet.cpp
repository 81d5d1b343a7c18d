#include "codesleep/packet.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace codesleep {

PayloadPtr make_payload(PacketId id, std::size_t bytes) {
  auto p = std::make_shared<Payload>(bytes);
  std::uint64_t state = derive_seed(id, 0x7061796CULL);
  for (std::size_t i = 0; i < bytes; ++i) {
    if (i % 8 == 0) state = derive_seed(state, i);
    (*p)[i] = static_cast<std::uint8_t>(state >> (8 * (i % 8)));
  }
  return p;
}

bool CodedPacket::contains(PacketId id) const noexcept {
  return std::any_of(constituents.begin(), constituents.end(),
                     [id](const Constituent& c) { return c.header.id == id; });
}

CodedPacket encode(std::span<const NativePacket> packets) {
  if (packets.size() < 2) throw std::invalid_argument("encode: need at least two packets");
  const std::size_t len = packets.front().payload ? packets.front().payload->size() : 0;
  CodedPacket out;
  auto acc = std::make_shared<Payload>(len, std::uint8_t{0});
  for (const auto& p : packets) {
    if (!p.payload || p.payload->size() != len) throw std::invalid_argument("encode: payload size mismatch");
    for (const auto& c : out.constituents) {
      if (c.next_hop == p.next_hop) throw std::invalid_argument("encode: duplicate next hop");
      if (c.header.id == p.id()) throw std::invalid_argument("encode: duplicate packet");
    }
    out.constituents.push_back({p.header, p.next_hop});
    for (std::size_t i = 0; i < len; ++i) (*acc)[i] ^= (*p.payload)[i];
  }
  out.payload = std::move(acc);
  return out;
}

DecodeResult decode(const CodedPacket& coded, const PacketLookup& known) {
  std::size_t missing = 0;
  const CodedPacket::Constituent* unknown = nullptr;
  std::vector<const NativePacket*> held;
  held.reserve(coded.constituents.size());
  for (const auto& c : coded.constituents) {
    const NativePacket* p = known(c.header.id);
    if (p) {
      held.push_back(p);
    } else {
      ++missing;
      unknown = &c;
    }
  }
  if (missing == 0) return Redundant{};
  if (missing > 1) return DecodeFailure{missing};

  auto bytes = std::make_shared<Payload>(*coded.payload);
  for (const NativePacket* p : held) {
    if (!p->payload || p->payload->size() != bytes->size()) return DecodeFailure{1};
    for (std::size_t i = 0; i < bytes->size(); ++i) (*bytes)[i] ^= (*p->payload)[i];
  }
  return NativePacket{unknown->header, unknown->next_hop, std::move(bytes)};
}

DecodeResult decode(const CodedPacket& coded, std::span<const NativePacket> known) {
  std::unordered_map<PacketId, const NativePacket*> index;
  for (const auto& p : known) index.emplace(p.id(), &p);
  return decode(coded, [&](PacketId id) -> const NativePacket* {
    auto it = index.find(id);
    return it == index.end() ? nullptr : it->second;
  });
}

std::size_t Frame::degree() const noexcept {
  if (const auto* c = std::get_if<CodedPacket>(&body)) return c->degree();
  return 1;
}

std::vector<std::pair<PacketId, NodeId>> Frame::targets() const {
  std::vector<std::pair<PacketId, NodeId>> out;
  if (const auto* n = std::get_if<NativePacket>(&body)) {
    out.emplace_back(n->id(), n->next_hop);
  } else {
    for (const auto& c : std::get<CodedPacket>(body).constituents) out.emplace_back(c.header.id, c.next_hop);
  }
  return out;
}

}  // namespace codesleep
