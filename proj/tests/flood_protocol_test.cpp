#include <gtest/gtest.h>

#include "meshflood/fixtures.hpp"
#include "meshflood/flood_protocol.hpp"

namespace meshflood {
namespace {

NodeProtocolState state_for(NodeId node, const RelayAssignment& a) {
  NodeProtocolState s;
  s.node = node;
  s.is_relay = a.is_relay(node);
  return s;
}

Packet from(NodeId origin, NodeId emitter, std::uint64_t seq = 0) {
  Packet p;
  p.origin = origin;
  p.emitter = emitter;
  p.seq = seq;
  return p;
}

class BridgedStarProtocol : public ::testing::Test {
 protected:
  Topology t = fixtures::bridged_star();
  RelayAssignment a = select_relays(t);
  SimTime now = SimTime::seconds(10);
};

TEST_F(BridgedStarProtocol, ClientDeliversOnly) {
  auto s = state_for(4, a);
  EXPECT_EQ(on_receive(s, from(0, 1), a, t, now), Action::DeliverOnly);
  EXPECT_TRUE(s.hold_buffer.empty());
}

TEST_F(BridgedStarProtocol, RelayForwardsFreshPacketFromSource) {
  auto s = state_for(1, a);
  EXPECT_TRUE(emitter_eligible(s, from(0, 0), a, t));
  EXPECT_EQ(on_receive(s, from(0, 0), a, t, now), Action::DeliverAndRelay);
  ASSERT_EQ(s.hold_buffer.size(), 1u);
}

TEST_F(BridgedStarProtocol, RelayDropsDuplicate) {
  auto s = state_for(1, a);
  on_receive(s, from(0, 0), a, t, now);
  EXPECT_EQ(on_receive(s, from(0, 2), a, t, now + SimTime::seconds(6)), Action::DropDuplicate);
  EXPECT_EQ(s.hold_buffer.size(), 1u);
}

TEST_F(BridgedStarProtocol, PeerRelayCopyIsIneligibleWhenNotServed) {
  // Build an assignment where relay 1 serves only its clients, so a copy
  // re-emitted by peer relay 2 must not be re-relayed.
  RelayAssignment narrow = a;
  narrow.selectors[1] = {4, 5};
  auto s = state_for(1, narrow);
  const auto copy = from(0, 2);
  EXPECT_FALSE(emitter_eligible(s, copy, narrow, t));
  EXPECT_EQ(on_receive(s, copy, narrow, t, now), Action::DeliverOnly);

  s.seen.clear();
  s.emitter_rule = false;
  EXPECT_EQ(on_receive(s, copy, narrow, t, now), Action::DeliverAndRelay);
}

TEST_F(BridgedStarProtocol, ClientsNeverEmitForRelays) {
  RelayAssignment narrow = a;
  narrow.selectors[1] = {0};
  auto s = state_for(1, narrow);
  EXPECT_FALSE(emitter_eligible(s, from(0, 4), narrow, t));
}

TEST_F(BridgedStarProtocol, NonNeighborIsProtocolViolation) {
  auto s = state_for(4, a);
  EXPECT_THROW(on_receive(s, from(0, 0), a, t, now), ProtocolViolation);
  EXPECT_THROW(blind_flood_on_receive(s, from(0, 2), t, now), ProtocolViolation);
}

TEST(BlindFlood, EveryFirstSeenPacketRelayed) {
  auto t = fixtures::path(3);
  NodeProtocolState s;
  s.node = 1;
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 0), t, SimTime{}), Action::DeliverAndRelay);
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 2), t, SimTime::seconds(1)), Action::DropDuplicate);
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 0, 1), t, SimTime::seconds(2)), Action::DeliverAndRelay);
}

TEST(ExpireCaches, SeenEntriesAgeOutAfterTtl) {
  NodeProtocolState s;
  s.seen[{0, 1}] = SimTime::seconds(0);
  s.seen[{0, 2}] = SimTime::seconds(2);
  auto ev = expire_caches(s, SimTime::seconds(31));
  ASSERT_EQ(ev.expired.size(), 1u);
  EXPECT_EQ(ev.expired[0], (PacketKey{0, 1}));
  EXPECT_EQ(s.seen.count({0, 2}), 1u);
}

TEST(ExpireCaches, AgedThirtyOneEvictedTwentyNineRetained) {
  NodeProtocolState s;
  s.seen[{0, 1}] = SimTime::seconds(0);
  EXPECT_TRUE(expire_caches(s, SimTime::seconds(29)).expired.empty());
  EXPECT_EQ(expire_caches(s, SimTime::seconds(31)).expired.size(), 1u);
  EXPECT_TRUE(s.seen.empty());
}

TEST(ExpireCaches, HeldPacketEmittedOnceAtHoldTime) {
  NodeProtocolState s;
  s.node = 3;
  s.hold_buffer.push_back({from(0, 0), SimTime::seconds(4)});
  EXPECT_TRUE(expire_caches(s, SimTime::seconds(9)).flushed.empty());
  auto ev = expire_caches(s, SimTime::seconds(10));
  ASSERT_EQ(ev.flushed.size(), 1u);
  EXPECT_EQ(ev.flushed[0].emitter, 3u);
  EXPECT_EQ(ev.flushed[0].header_bits, 200u);
  EXPECT_EQ(ev.flushed[0].wire_size_bits(), 2200u);
  EXPECT_TRUE(expire_caches(s, SimTime::seconds(11)).flushed.empty());
}

TEST(ExpireCaches, StaleEntryNoLongerSuppresses) {
  auto t = fixtures::path(3);
  NodeProtocolState s;
  s.node = 2;
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 1), t, SimTime::seconds(0)), Action::DeliverAndRelay);
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 1), t, SimTime::seconds(30)), Action::DropDuplicate);
  EXPECT_EQ(blind_flood_on_receive(s, from(0, 1), t, SimTime::seconds(31)), Action::DeliverAndRelay);
}

TEST(PacketHeader, GrowsTwoHundredPerRelay) {
  Packet p = from(0, 0);
  for (std::uint32_t k = 1; k <= 5; ++k) {
    p = relay_copy(p, k, 200);
    EXPECT_EQ(p.header_bits, 200 * k);
    EXPECT_EQ(p.wire_size_bits(), 2000u + 200u * k);
    EXPECT_EQ(p.relay_hops, k);
  }
}

}  // namespace
}  // namespace meshflood
