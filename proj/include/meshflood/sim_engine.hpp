#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "meshflood/event_queue.hpp"
#include "meshflood/fixtures.hpp"
#include "meshflood/flood_protocol.hpp"
#include "meshflood/metrics.hpp"
#include "meshflood/relay_select.hpp"
#include "meshflood/sim_config.hpp"
#include "meshflood/topology.hpp"

namespace meshflood {

/// Serialization delay of `bits` on a `bps` channel, rounded up to whole
/// microseconds.
inline SimTime serialization_delay(std::uint64_t bits, std::uint64_t bps) {
  return SimTime::micros(static_cast<std::int64_t>((bits * 1'000'000 + bps - 1) / bps));
}

struct Reception {
  NodeId receiver = 0;
  SimTime arrival;
};

/// One broadcast on the shared channel: every current 1-hop neighbor of the
/// emitter receives a copy after the serialization delay.
inline std::vector<Reception> transmit(const Topology& t, NodeId emitter, const Packet& pkt,
                                       SimTime now, std::uint64_t channel_bps) {
  const SimTime arrival = now + serialization_delay(pkt.wire_size_bits(), channel_bps);
  std::vector<Reception> out;
  for (NodeId v : t.one_hop(emitter)) out.push_back({v, arrival});
  return out;
}

/// Per-event observation hook, used by tests and tracing.
struct TraceRecord {
  SimTime time;
  EventKind kind = EventKind::Receive;
  NodeId node = 0;
  Packet packet;
  std::optional<Action> action;  // set for receptions that reached the protocol
  bool lost = false;
};
using TraceSink = std::function<void(const TraceRecord&)>;

struct RunResult {
  MetricsSeries series;
  Summary summary;
  Topology initial_topology;
  RelayAssignment initial_assignment;
  std::vector<std::string> warnings;
};

/// Builds the t=0 topology: a named fixture, or placed nodes under the disk model.
inline Topology initial_topology(const SimConfig& cfg) {
  if (cfg.fixture) return fixtures::by_name(*cfg.fixture, cfg.area_side);
  return Topology(place_nodes(cfg.node_count, cfg.placement, cfg.area_side, cfg.seed), cfg.radio_range);
}

/// FNV-1a over the topology and every setting except the flooding mode and
/// its protocol switches, so paired optimized/blind runs share a fingerprint.
inline std::string scenario_fingerprint(const SimConfig& cfg, const Topology& t) {
  std::ostringstream os;
  write_topology(os, t);
  auto kv = config_key_values(cfg);
  kv.erase("mode");
  kv.erase("rule2");
  kv.erase("candidate_order");
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << h;
  return hex.str();
}

namespace detail {

struct EventData {
  std::uint32_t tx = 0;  // Receive: index into the transmission log
};

struct Transmission {
  Packet packet;
  std::uint64_t epoch = 0;
};

class Simulation {
 public:
  Simulation(const SimConfig& cfg, Topology initial, TraceSink trace)
      : cfg_(cfg), trace_(std::move(trace)) {
    cfg_.node_count = initial.size();
    history_.push_back(initial.with_epoch(0));
    const std::size_t n = current().size();
    // Upper bound on drain: a flood passes through each node at most once.
    horizon_ = cfg_.sim_duration + (cfg_.hold_time + SimTime::seconds(1)) * static_cast<std::int64_t>(n) +
               SimTime::seconds(1);
    series_ = MetricsSeries(horizon_);
    source_ = current().source();
    if (source_ >= n) throw ConfigError("topology has no source node");
    states_.resize(n);
    relayed_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = states_[i];
      s.node = static_cast<NodeId>(i);
      s.duplicate_cache_ttl = cfg_.duplicate_ttl;
      s.hold_time = cfg_.hold_time;
      s.header_bits_per_relay = cfg_.header_bits_per_relay;
      s.emitter_rule = cfg_.rule2;
    }
  }

  RunResult run() {
    RunResult result;
    const Topology& t0 = current();
    result.initial_topology = t0;

    recompute_relays();
    result.initial_assignment = assignment_;

    auto& info = series_.info;
    info.fingerprint = scenario_fingerprint(cfg_, t0);
    info.mode = std::string(mode_name(cfg_.mode));
    info.node_count = t0.size();
    info.source = source_;
    info.relay_set_size = assignment_.relays.size();
    info.cardinality = cardinality_report(t0, assignment_);
    info.config = config_key_values(cfg_);
    info.disconnected_at_start = !is_connected(t0);
    if (info.disconnected_at_start) warnings_.push_back("topology disconnected at t=0");
    reachable_ = reachable_from(t0, source_);

    queue_.schedule({SimTime{}, EventKind::EmitFromSource, source_});
    if (cfg_.topo_control_interval < cfg_.sim_duration) {
      queue_.schedule({cfg_.topo_control_interval, EventKind::TopoControl, 0});
    }
    // A zero displacement never changes the topology, so no epochs are spent on it.
    if (cfg_.mobility_m > 0.0 && cfg_.topo_stability < cfg_.sim_duration) {
      queue_.schedule({cfg_.topo_stability, EventKind::TopoReconfigure, 0});
    }
    queue_.schedule({SimTime::seconds(1), EventKind::MetricsTick, 1});

    while (auto ev = queue_.next_event()) {
      if (ev->time >= horizon_) {
        truncate(*ev);
        break;
      }
      now_ = ev->time;
      dispatch(*ev);
    }
    finish_channel_check();

    for (std::size_t i = 0; i < reachable_.size(); ++i) {
      if (reachable_[i] && i != source_) info.reachable.push_back(static_cast<NodeId>(i));
    }
    info.relay_recomputations = recomputations_;
    info.relay_loop_violations = loop_violations_;
    info.duplicate_deliveries = duplicate_deliveries_;
    info.channel_violations = channel_violations_;
    info.cache_evictions = cache_evictions_;
    info.truncated = truncated_;

    result.summary = summarize(series_);
    if (!result.summary.accounting_ok) warnings_.push_back("accounting identity violated");
    result.series = std::move(series_);
    result.warnings = std::move(warnings_);
    return result;
  }

 private:
  const Topology& current() const { return history_.back(); }

  void dispatch(const Event<EventData>& ev) {
    switch (ev.kind) {
      case EventKind::TopoReconfigure: on_reconfigure(); break;
      case EventKind::TopoControl: on_topo_control(); break;
      case EventKind::CacheExpiry: on_expiry(static_cast<NodeId>(ev.subject)); break;
      case EventKind::EmitFromSource: on_source_emit(); break;
      case EventKind::RelayEmit: on_expiry(static_cast<NodeId>(ev.subject)); break;
      case EventKind::Receive: on_receive_event(static_cast<NodeId>(ev.subject), ev.payload.tx); break;
      case EventKind::MetricsTick: on_tick(ev.subject); break;
    }
  }

  void recompute_relays() {
    assignment_ = select_relays(current(), cfg_.candidate_order);
    for (auto& s : states_) s.is_relay = assignment_.is_relay(s.node);
    ++recomputations_;
  }

  void on_reconfigure() {
    const std::uint64_t next_epoch = current().epoch() + 1;
    history_.push_back(reconfigure(current(), MobilityStep{cfg_.mobility_m},
                                   mix_seed(cfg_.seed, next_epoch), cfg_.area_side));
    const auto r = reachable_from(current(), source_);
    for (std::size_t i = 0; i < r.size(); ++i) reachable_[i] |= r[i];
    const SimTime next = now_ + cfg_.topo_stability;
    if (next < cfg_.sim_duration) queue_.schedule({next, EventKind::TopoReconfigure, 0});
  }

  void on_topo_control() {
    if (assignment_.epoch != current().epoch()) recompute_relays();
    const SimTime next = now_ + cfg_.topo_control_interval;
    if (next < cfg_.sim_duration) queue_.schedule({next, EventKind::TopoControl, 0});
  }

  void on_source_emit() {
    Packet p;
    p.origin = source_;
    p.seq = cfg_.repeat_seq ? 0 : next_seq_++;
    p.payload_bits = cfg_.payload_at(now_);
    p.emitter = source_;
    p.created_at = now_;
    note_originated(states_[source_], p, now_);
    schedule_expiry(source_);
    series_.record(now_, source_, Counter::PacketsSent, 1);
    series_.record(now_, source_, Counter::BitsSent, static_cast<std::int64_t>(p.wire_size_bits()));
    emit(source_, p, EventKind::EmitFromSource);
    const SimTime next = now_ + cfg_.packet_interval;
    if (next < cfg_.sim_duration) queue_.schedule({next, EventKind::EmitFromSource, source_});
  }

  // Shared by RelayEmit and CacheExpiry: both drain whatever is due.
  void on_expiry(NodeId node) {
    auto ev = expire_caches(states_[node], now_);
    cache_evictions_ += ev.expired.size();
    for (const auto& p : ev.flushed) {
      if (!relayed_[node].insert(p.key()).second) ++loop_violations_;
      series_.record(now_, node, Counter::PacketsRelayed, 1);
      series_.record(now_, node, Counter::BitsRelayed, static_cast<std::int64_t>(p.wire_size_bits()));
      emit(node, p, EventKind::RelayEmit);
    }
  }

  void emit(NodeId emitter, const Packet& p, EventKind kind) {
    const auto receptions = transmit(current(), emitter, p, now_, cfg_.channel_bps);
    series_.record(now_, emitter, Counter::BitsOffered,
                   static_cast<std::int64_t>(p.wire_size_bits() * receptions.size()));
    const auto tx = static_cast<std::uint32_t>(log_.size());
    log_.push_back({p, current().epoch()});
    for (const auto& r : receptions) {
      queue_.schedule({r.arrival, EventKind::Receive, r.receiver, 0, EventData{tx}});
    }
    if (trace_) trace_({now_, kind, emitter, p, std::nullopt, false});
  }

  void on_receive_event(NodeId node, std::uint32_t tx_index) {
    const Transmission& tx = log_[tx_index];
    const Packet& p = tx.packet;
    const auto wire = static_cast<std::int64_t>(p.wire_size_bits());
    const Topology& at_tx = history_[tx.epoch];

    if (cfg_.inflight == InflightPolicy::Drop && tx.epoch != current().epoch() &&
        !current().adjacent(p.emitter, node)) {
      series_.record(now_, node, Counter::BitsLost, wire);
      if (trace_) trace_({now_, EventKind::Receive, node, p, std::nullopt, true});
      return;
    }

    auto& state = states_[node];
    const Action action = cfg_.mode == FloodMode::RelayFlood
                              ? on_receive(state, p, assignment_, at_tx, now_)
                              : blind_flood_on_receive(state, p, at_tx, now_);
    if (action == Action::DropDuplicate) {
      series_.record(now_, node, Counter::PacketsReceivedDup, 1);
      series_.record(now_, node, Counter::BitsReceivedDup, wire);
    } else {
      series_.record(now_, node, Counter::PacketsReceivedFirst, 1);
      series_.record(now_, node, Counter::BitsReceivedFirst, wire);
      if (++deliveries_[{node, p.key()}] > 1) ++duplicate_deliveries_;
      schedule_expiry(node);
      if (action == Action::DeliverAndRelay) {
        queue_.schedule({now_ + cfg_.hold_time, EventKind::RelayEmit, node});
      }
    }
    if (trace_) trace_({now_, EventKind::Receive, node, p, action, false});
  }

  void schedule_expiry(NodeId node) {
    queue_.schedule({now_ + cfg_.duplicate_ttl + SimTime::micros(1), EventKind::CacheExpiry, node});
  }

  // Tick k audits second k-1 against the channel rate.
  void on_tick(std::uint64_t k) {
    check_second(static_cast<std::int64_t>(k) - 1);
    checked_through_ = static_cast<std::int64_t>(k);
    const SimTime next = SimTime::seconds(static_cast<std::int64_t>(k) + 1);
    if (next <= cfg_.sim_duration) queue_.schedule({next, EventKind::MetricsTick, k + 1});
  }

  void check_second(std::int64_t sec) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const auto node = static_cast<NodeId>(i);
      const auto bits = series_.at(sec, node, Counter::BitsSent) + series_.at(sec, node, Counter::BitsRelayed);
      if (bits > cfg_.channel_bps) {
        ++channel_violations_;
        warnings_.push_back("node " + std::to_string(node) + " exceeded channel rate in second " +
                            std::to_string(sec));
      }
    }
  }

  void finish_channel_check() {
    std::int64_t last = checked_through_;
    for (const auto& [key, value] : series_.buckets()) last = std::max(last, std::get<0>(key) + 1);
    for (std::int64_t s = checked_through_; s < last; ++s) check_second(s);
  }

  // Receptions still pending at the horizon are accounted as lost.
  void truncate(const Event<EventData>& first) {
    truncated_ = true;
    warnings_.push_back("run truncated at drain horizon");
    const SimTime last_valid = horizon_ - SimTime::micros(1);
    auto account = [&](const Event<EventData>& ev) {
      if (ev.kind != EventKind::Receive) return;
      series_.record(last_valid, static_cast<NodeId>(ev.subject), Counter::BitsLost,
                     static_cast<std::int64_t>(log_[ev.payload.tx].packet.wire_size_bits()));
    };
    account(first);
    while (auto ev = queue_.next_event()) account(*ev);
  }

  SimConfig cfg_;
  TraceSink trace_;
  std::vector<Topology> history_;  // indexed by epoch
  SimTime horizon_;
  SimTime now_;
  MetricsSeries series_;
  NodeId source_ = 0;
  RelayAssignment assignment_;
  std::vector<NodeProtocolState> states_;
  std::vector<std::set<PacketKey>> relayed_;
  std::map<std::pair<NodeId, PacketKey>, std::uint32_t> deliveries_;
  std::vector<char> reachable_;
  std::vector<Transmission> log_;
  EventQueue<EventData> queue_;
  std::vector<std::string> warnings_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t recomputations_ = 0;
  std::uint64_t loop_violations_ = 0;
  std::uint64_t duplicate_deliveries_ = 0;
  std::uint64_t channel_violations_ = 0;
  std::uint64_t cache_evictions_ = 0;
  std::int64_t checked_through_ = 0;
  bool truncated_ = false;
};

}  // namespace detail

/// Runs one scenario to quiescence. Source emissions, topology control and
/// reconfiguration stop at sim_duration; in-flight floods then drain.
/// Identical inputs give identical results.
inline RunResult run(const SimConfig& cfg, const Topology& initial, TraceSink trace = {}) {
  cfg.validate();
  detail::Simulation sim(cfg, initial, std::move(trace));
  return sim.run();
}

inline RunResult run(const SimConfig& cfg, TraceSink trace = {}) {
  cfg.validate();
  return run(cfg, initial_topology(cfg), std::move(trace));
}

}  // namespace meshflood
