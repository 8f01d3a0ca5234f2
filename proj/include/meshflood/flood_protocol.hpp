#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "meshflood/relay_select.hpp"
#include "meshflood/topology.hpp"
#include "meshflood/types.hpp"

namespace meshflood {

struct PacketKey {
  NodeId origin = 0;
  std::uint64_t seq = 0;
  auto operator<=>(const PacketKey&) const = default;
};

struct Packet {
  NodeId origin = 0;
  std::uint64_t seq = 0;
  std::uint32_t payload_bits = 2000;
  std::uint32_t header_bits = 0;  // 200 per relay retransmission by default
  std::uint32_t relay_hops = 0;
  NodeId emitter = 0;
  SimTime created_at;

  PacketKey key() const { return {origin, seq}; }
  std::uint64_t wire_size_bits() const { return std::uint64_t{payload_bits} + header_bits; }
};

/// Copy of `p` as retransmitted by relay `by`.
inline Packet relay_copy(const Packet& p, NodeId by, std::uint32_t header_bits_per_relay) {
  Packet q = p;
  q.header_bits += header_bits_per_relay;
  q.relay_hops += 1;
  q.emitter = by;
  return q;
}

enum class Action { DeliverAndRelay, DeliverOnly, DropDuplicate };

struct HeldPacket {
  Packet packet;
  SimTime held_at;
};

struct NodeProtocolState {
  NodeId node = 0;
  bool is_relay = false;
  std::map<PacketKey, SimTime> seen;  // first-seen time
  std::vector<HeldPacket> hold_buffer;
  SimTime duplicate_cache_ttl = SimTime::seconds(30);
  SimTime hold_time = SimTime::seconds(6);
  std::uint32_t header_bits_per_relay = 200;
  // Forwarding rule ii (last-emitter eligibility); off leaves pure
  // first-reception relay flooding.
  bool emitter_rule = true;
};

namespace detail {

inline void require_neighbor(const NodeProtocolState& s, const Packet& p, const Topology& at_tx) {
  if (p.emitter == s.node || !at_tx.adjacent(p.emitter, s.node)) {
    throw ProtocolViolation("node " + std::to_string(s.node) + " received from non-neighbor " +
                            std::to_string(p.emitter));
  }
}

// True and refreshes nothing if the key is cached and not older than the TTL.
inline bool is_live_duplicate(const NodeProtocolState& s, const PacketKey& k, SimTime now) {
  auto it = s.seen.find(k);
  return it != s.seen.end() && now - it->second <= s.duplicate_cache_ttl;
}

}  // namespace detail

/// Records a locally originated packet so its echoes are recognised.
inline void note_originated(NodeProtocolState& s, const Packet& p, SimTime now) {
  s.seen[p.key()] = now;
}

/// Whether relay `s.node` should forward a copy emitted by `pkt.emitter`:
/// the emitter is one of the nodes it serves, or the packet's origin.
inline bool emitter_eligible(const NodeProtocolState& s, const Packet& pkt,
                             const RelayAssignment& relays, const Topology& t) {
  if (relays.serves(s.node, pkt.emitter)) return true;
  return pkt.emitter == pkt.origin && pkt.origin != s.node && t.adjacent(pkt.origin, s.node);
}

/// Optimized-flooding reception. `at_tx` is the topology in force when the
/// copy was transmitted.
inline Action on_receive(NodeProtocolState& s, const Packet& pkt, const RelayAssignment& relays,
                         const Topology& at_tx, SimTime now) {
  detail::require_neighbor(s, pkt, at_tx);
  if (detail::is_live_duplicate(s, pkt.key(), now)) return Action::DropDuplicate;
  s.seen[pkt.key()] = now;
  if (s.is_relay && (!s.emitter_rule || emitter_eligible(s, pkt, relays, at_tx))) {
    s.hold_buffer.push_back({pkt, now});
    return Action::DeliverAndRelay;
  }
  return Action::DeliverOnly;
}

/// Baseline: every node retransmits every first-seen packet once.
inline Action blind_flood_on_receive(NodeProtocolState& s, const Packet& pkt, const Topology& at_tx,
                                     SimTime now) {
  detail::require_neighbor(s, pkt, at_tx);
  if (detail::is_live_duplicate(s, pkt.key(), now)) return Action::DropDuplicate;
  s.seen[pkt.key()] = now;
  s.hold_buffer.push_back({pkt, now});
  return Action::DeliverAndRelay;
}

struct Evictions {
  std::vector<PacketKey> expired;   // seen entries older than the TTL
  std::vector<Packet> flushed;      // held packets due for retransmission, already relay copies
};

inline Evictions expire_caches(NodeProtocolState& s, SimTime now) {
  Evictions ev;
  for (auto it = s.seen.begin(); it != s.seen.end();) {
    if (now - it->second > s.duplicate_cache_ttl) {
      ev.expired.push_back(it->first);
      it = s.seen.erase(it);
    } else {
      ++it;
    }
  }
  std::vector<HeldPacket> keep;
  for (auto& h : s.hold_buffer) {
    if (now - h.held_at >= s.hold_time) {
      ev.flushed.push_back(relay_copy(h.packet, s.node, s.header_bits_per_relay));
    } else {
      keep.push_back(std::move(h));
    }
  }
  s.hold_buffer = std::move(keep);
  return ev;
}

}  // namespace meshflood
