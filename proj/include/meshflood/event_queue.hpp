#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "meshflood/types.hpp"

namespace meshflood {

// Declaration order is the same-instant processing order: topology and relay
// sets settle before traffic at a shared timestamp.
enum class EventKind : std::uint8_t {
  TopoReconfigure,
  TopoControl,
  CacheExpiry,
  EmitFromSource,
  RelayEmit,
  Receive,
  MetricsTick,
};

template <typename Payload>
struct Event {
  SimTime time;
  EventKind kind = EventKind::MetricsTick;
  std::uint64_t subject = 0;
  std::uint64_t insertion = 0;  // assigned by the queue
  Payload payload{};
};

/// Min-queue under the total order (time, kind, subject, insertion).
template <typename Payload>
class EventQueue {
 public:
  using value_type = Event<Payload>;

  void schedule(value_type ev) {
    ev.insertion = next_insertion_++;
    heap_.push(std::move(ev));
  }

  /// std::nullopt signals end of simulation.
  std::optional<value_type> next_event() {
    if (heap_.empty()) return std::nullopt;
    value_type ev = heap_.top();
    heap_.pop();
    return ev;
  }

  const value_type* peek() const { return heap_.empty() ? nullptr : &heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const value_type& a, const value_type& b) const {
      return std::tie(a.time, a.kind, a.subject, a.insertion) >
             std::tie(b.time, b.kind, b.subject, b.insertion);
    }
  };
  std::priority_queue<value_type, std::vector<value_type>, Later> heap_;
  std::uint64_t next_insertion_ = 0;
};

}  // namespace meshflood
