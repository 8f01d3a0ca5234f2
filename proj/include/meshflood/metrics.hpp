#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "meshflood/relay_select.hpp"
#include "meshflood/types.hpp"

namespace meshflood {

// Enumerators are in lexicographic order of their names so that CSV row order
// and enum order agree.
enum class Counter : std::uint8_t {
  BitsLost,
  BitsOffered,
  BitsReceivedDup,
  BitsReceivedFirst,
  BitsRelayed,
  BitsSent,
  PacketsReceivedDup,
  PacketsReceivedFirst,
  PacketsRelayed,
  PacketsSent,
};
inline constexpr std::size_t kCounterCount = 10;

inline constexpr std::array<std::string_view, kCounterCount> kCounterNames = {
    "bits_lost",         "bits_offered",         "bits_received_dup", "bits_received_first",
    "bits_relayed",      "bits_sent",            "packets_received_dup",
    "packets_received_first", "packets_relayed", "packets_sent",
};

inline std::string_view counter_name(Counter c) { return kCounterNames[static_cast<std::size_t>(c)]; }

inline Counter parse_counter(std::string_view s) {
  for (std::size_t i = 0; i < kCounterCount; ++i) {
    if (kCounterNames[i] == s) return static_cast<Counter>(i);
  }
  throw ParseError("unknown counter '" + std::string(s) + "'");
}

/// Scenario-level facts the engine attaches to a series; not part of the CSV.
struct ScenarioInfo {
  std::string fingerprint;
  std::string mode;
  std::size_t node_count = 0;
  NodeId source = 0;
  std::vector<NodeId> reachable;  // non-source nodes reachable from the source in some epoch
  std::size_t relay_set_size = 0;
  CardinalityReport cardinality;
  std::uint64_t relay_recomputations = 0;
  std::uint64_t relay_loop_violations = 0;
  std::uint64_t duplicate_deliveries = 0;
  std::uint64_t channel_violations = 0;
  std::uint64_t cache_evictions = 0;
  bool disconnected_at_start = false;
  bool truncated = false;
  std::map<std::string, std::string> config;  // effective configuration echo
};

/// Per-second, per-node traffic counters.
class MetricsSeries {
 public:
  using Key = std::tuple<std::int64_t, NodeId, Counter>;  // (second, node, counter)

  MetricsSeries() = default;
  explicit MetricsSeries(SimTime horizon) : horizon_(horizon) {}

  SimTime horizon() const { return horizon_; }

  void record(SimTime t, NodeId node, Counter c, std::int64_t amount) {
    if (amount < 0) throw AccountingError("negative amount recorded for " + std::string(counter_name(c)));
    if (t < SimTime{} || t >= horizon_) {
      throw AccountingError("record at t=" + format_double(t.to_seconds()) + "s outside series horizon");
    }
    if (amount == 0) return;
    const auto a = static_cast<std::uint64_t>(amount);
    buckets_[{t.whole_seconds(), node, c}] += a;
    totals_[{node, c}] += a;
    grand_[static_cast<std::size_t>(c)] += a;
  }

  std::uint64_t at(std::int64_t second, NodeId node, Counter c) const {
    auto it = buckets_.find({second, node, c});
    return it == buckets_.end() ? 0 : it->second;
  }
  std::uint64_t total(NodeId node, Counter c) const {
    auto it = totals_.find({node, c});
    return it == totals_.end() ? 0 : it->second;
  }
  std::uint64_t total(Counter c) const { return grand_[static_cast<std::size_t>(c)]; }

  const std::map<Key, std::uint64_t>& buckets() const { return buckets_; }

  ScenarioInfo info;

  /// Bucket contents only; horizon and info are not compared.
  friend bool operator==(const MetricsSeries& a, const MetricsSeries& b) {
    return a.buckets_ == b.buckets_;
  }

 private:
  SimTime horizon_ = SimTime::max();
  std::map<Key, std::uint64_t> buckets_;
  std::map<std::pair<NodeId, Counter>, std::uint64_t> totals_;
  std::array<std::uint64_t, kCounterCount> grand_{};
};

inline void export_csv(const MetricsSeries& s, std::ostream& os) {
  os << "t,node_id,counter,value\n";
  for (const auto& [key, value] : s.buckets()) {
    const auto& [sec, node, c] = key;
    os << sec << ',' << node << ',' << counter_name(c) << ',' << value << '\n';
  }
}

inline void export_csv(const MetricsSeries& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  export_csv(s, f);
  if (!f) throw Error("write failed: " + path);
}

inline MetricsSeries parse_csv(std::istream& is) {
  MetricsSeries s;
  std::string line;
  if (!std::getline(is, line) || line != "t,node_id,counter,value") {
    throw ParseError("missing CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<std::string_view, 4> f;
    std::string_view rest = line;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) throw ParseError("bad CSV row: " + line);
      f[i] = rest.substr(0, comma);
      rest = i < 3 ? rest.substr(comma + 1) : std::string_view{};
    }
    const auto sec = parse_int<std::int64_t>(f[0]);
    s.record(SimTime::seconds(sec), parse_int<NodeId>(f[1]), parse_counter(f[2]),
             parse_int<std::int64_t>(f[3]));
  }
  return s;
}

struct Summary {
  std::string fingerprint;
  std::string mode;
  std::uint64_t source_emissions = 0;
  std::uint64_t relay_transmissions = 0;
  std::uint64_t total_transmissions = 0;
  std::uint64_t packets_received_first = 0;
  std::uint64_t packets_received_dup = 0;
  std::uint64_t bits_sent = 0;
  std::uint64_t bits_relayed = 0;
  std::uint64_t bits_offered = 0;
  std::uint64_t bits_received_first = 0;
  std::uint64_t bits_received_dup = 0;
  std::uint64_t lost_in_transit = 0;  // bits
  double coverage_fraction = 0.0;
  double redundancy_ratio = 0.0;
  bool accounting_ok = true;
  ScenarioInfo info;

  /// Sorted key/value view, as written to summary.txt.
  std::map<std::string, std::string> to_key_values() const {
    auto fixed = [](double v) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(6) << v;
      return os.str();
    };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::map<std::string, std::string> kv;
    kv["accounting_ok"] = b(accounting_ok);
    kv["bits_offered"] = std::to_string(bits_offered);
    kv["bits_received_dup"] = std::to_string(bits_received_dup);
    kv["bits_received_first"] = std::to_string(bits_received_first);
    kv["bits_relayed"] = std::to_string(bits_relayed);
    kv["bits_sent"] = std::to_string(bits_sent);
    kv["cache_evictions"] = std::to_string(info.cache_evictions);
    kv["card_R"] = std::to_string(info.cardinality.card_r);
    kv["card_V"] = std::to_string(info.cardinality.card_v);
    kv["channel_violations"] = std::to_string(info.channel_violations);
    kv["cond1"] = b(info.cardinality.cond1);
    kv["cond2"] = b(info.cardinality.cond2);
    kv["coverage_fraction"] = fixed(coverage_fraction);
    kv["disconnected_at_start"] = b(info.disconnected_at_start);
    kv["duplicate_deliveries"] = std::to_string(info.duplicate_deliveries);
    kv["fingerprint"] = fingerprint;
    kv["lost_in_transit"] = std::to_string(lost_in_transit);
    kv["mode"] = mode;
    kv["packets_received_dup"] = std::to_string(packets_received_dup);
    kv["packets_received_first"] = std::to_string(packets_received_first);
    kv["redundancy_ratio"] = fixed(redundancy_ratio);
    kv["relay_loop_violations"] = std::to_string(info.relay_loop_violations);
    kv["relay_recomputations"] = std::to_string(info.relay_recomputations);
    kv["relay_set_size"] = std::to_string(info.relay_set_size);
    kv["relay_transmissions"] = std::to_string(relay_transmissions);
    kv["source_emissions"] = std::to_string(source_emissions);
    kv["total_transmissions"] = std::to_string(total_transmissions);
    kv["truncated"] = b(info.truncated);
    for (const auto& [k, v] : info.config) kv["config." + k] = v;
    return kv;
  }
};

inline Summary summarize(const MetricsSeries& s) {
  Summary r;
  r.info = s.info;
  r.fingerprint = s.info.fingerprint;
  r.mode = s.info.mode;
  r.source_emissions = s.total(Counter::PacketsSent);
  r.relay_transmissions = s.total(Counter::PacketsRelayed);
  r.total_transmissions = r.source_emissions + r.relay_transmissions;
  r.packets_received_first = s.total(Counter::PacketsReceivedFirst);
  r.packets_received_dup = s.total(Counter::PacketsReceivedDup);
  r.bits_sent = s.total(Counter::BitsSent);
  r.bits_relayed = s.total(Counter::BitsRelayed);
  r.bits_offered = s.total(Counter::BitsOffered);
  r.bits_received_first = s.total(Counter::BitsReceivedFirst);
  r.bits_received_dup = s.total(Counter::BitsReceivedDup);
  r.lost_in_transit = s.total(Counter::BitsLost);
  r.accounting_ok = r.bits_offered == r.bits_received_first + r.bits_received_dup + r.lost_in_transit;

  std::size_t delivered = 0;
  for (NodeId n : s.info.reachable) {
    if (s.total(n, Counter::PacketsReceivedFirst) > 0) ++delivered;
  }
  r.coverage_fraction = s.info.reachable.empty()
                            ? 1.0
                            : static_cast<double>(delivered) / static_cast<double>(s.info.reachable.size());
  r.redundancy_ratio = r.packets_received_first == 0
                           ? 0.0
                           : static_cast<double>(r.packets_received_dup) /
                                 static_cast<double>(r.packets_received_first);
  return r;
}

inline void write_summary(std::ostream& os, const Summary& s) {
  for (const auto& [k, v] : s.to_key_values()) os << k << '=' << v << '\n';
}

struct ReductionReport {
  std::uint64_t optimized_transmissions = 0;
  std::uint64_t blind_transmissions = 0;
  std::uint64_t optimized_duplicates = 0;
  std::uint64_t blind_duplicates = 0;
  double transmission_reduction_pct = 0.0;
  double redundancy_reduction_pct = 0.0;
};

inline double reduction_pct(std::uint64_t optimized, std::uint64_t blind) {
  if (blind == 0) return 0.0;
  return 100.0 * (static_cast<double>(blind) - static_cast<double>(optimized)) /
         static_cast<double>(blind);
}

inline ReductionReport compare(const Summary& optimized, const Summary& blind) {
  if (optimized.fingerprint != blind.fingerprint) {
    throw ComparisonError("summaries come from different scenarios (" + optimized.fingerprint +
                          " vs " + blind.fingerprint + ")");
  }
  ReductionReport r;
  r.optimized_transmissions = optimized.total_transmissions;
  r.blind_transmissions = blind.total_transmissions;
  r.optimized_duplicates = optimized.packets_received_dup;
  r.blind_duplicates = blind.packets_received_dup;
  r.transmission_reduction_pct = reduction_pct(r.optimized_transmissions, r.blind_transmissions);
  r.redundancy_reduction_pct = reduction_pct(r.optimized_duplicates, r.blind_duplicates);
  return r;
}

inline void write_compare(std::ostream& os, const ReductionReport& r) {
  os << std::fixed << std::setprecision(6);
  os << "blind_duplicates=" << r.blind_duplicates << '\n'
     << "blind_transmissions=" << r.blind_transmissions << '\n'
     << "optimized_duplicates=" << r.optimized_duplicates << '\n'
     << "optimized_transmissions=" << r.optimized_transmissions << '\n'
     << "redundancy_reduction_pct=" << r.redundancy_reduction_pct << '\n'
     << "transmission_reduction_pct=" << r.transmission_reduction_pct << '\n';
}

}  // namespace meshflood
