#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshflood/relay_select.hpp"
#include "meshflood/topology.hpp"
#include "meshflood/types.hpp"

namespace meshflood {

enum class FloodMode { RelayFlood, BlindFlood };
enum class InflightPolicy { Deliver, Drop };

/// From `at` onwards the source emits `payload_bits` per packet.
struct RateStep {
  SimTime at;
  std::uint32_t payload_bits = 0;
  friend bool operator==(const RateStep&, const RateStep&) = default;
};

struct SimConfig {
  std::size_t node_count = 25;
  Placement placement = Placement::UniformRandom;
  double area_side = 500.0;            // meters
  double radio_range = 120.0;          // meters
  std::uint64_t channel_bps = 11'000'000;
  double tx_power_mw = 5.0;            // recorded only; the disk model ignores it
  std::uint32_t payload_bits = 2000;
  std::uint32_t header_bits_per_relay = 200;
  SimTime packet_interval = SimTime::seconds(2);
  SimTime topo_control_interval = SimTime::seconds(5);
  SimTime hold_time = SimTime::seconds(6);
  SimTime topo_stability = SimTime::seconds(15);
  SimTime duplicate_ttl = SimTime::seconds(30);
  SimTime sim_duration = SimTime::seconds(300);
  FloodMode mode = FloodMode::RelayFlood;
  bool rule2 = true;
  InflightPolicy inflight = InflightPolicy::Deliver;
  double mobility_m = 0.0;             // max displacement per reconfiguration
  std::uint64_t seed = 1;
  bool repeat_seq = false;
  CandidateOrder candidate_order = CandidateOrder::Ascending;
  std::optional<std::string> fixture;
  std::vector<RateStep> rate_schedule;

  void validate() const {
    auto positive = [](SimTime t, const char* name) {
      if (t <= SimTime{}) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(packet_interval, "packet_interval_s");
    positive(topo_control_interval, "topo_control_interval_s");
    positive(hold_time, "hold_time_s");
    positive(topo_stability, "topo_stability_s");
    positive(duplicate_ttl, "duplicate_ttl_s");
    positive(sim_duration, "sim_duration_s");
    if (sim_duration < packet_interval) throw ConfigError("sim_duration_s must be >= packet_interval_s");
    if (!fixture && node_count == 0) throw ConfigError("node_count must be at least 1");
    if (!(area_side > 0.0)) throw ConfigError("area_side must be positive");
    if (!(radio_range > 0.0)) throw ConfigError("radio_range must be positive");
    if (channel_bps == 0) throw ConfigError("channel_bps must be positive");
    if (mobility_m < 0.0) throw ConfigError("mobility_m must be non-negative");
    for (std::size_t i = 1; i < rate_schedule.size(); ++i) {
      if (rate_schedule[i].at <= rate_schedule[i - 1].at) {
        throw ConfigError("rate_schedule times must be strictly increasing");
      }
    }
  }

  std::uint32_t payload_at(SimTime t) const {
    std::uint32_t bits = payload_bits;
    for (const auto& step : rate_schedule) {
      if (step.at <= t) bits = step.payload_bits;
    }
    return bits;
  }
};

namespace detail {

inline std::string seconds_text(SimTime t) { return format_double(t.to_seconds()); }

inline SimTime parse_seconds(std::string_view v) { return SimTime::from_seconds(parse_double(v)); }

inline bool parse_switch(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected on/off, got '" + std::string(v) + "'");
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline std::string_view mode_name(FloodMode m) { return m == FloodMode::RelayFlood ? "relay" : "blind"; }

inline FloodMode parse_mode(std::string_view v) {
  if (v == "relay") return FloodMode::RelayFlood;
  if (v == "blind") return FloodMode::BlindFlood;
  throw ConfigError("mode: expected relay|blind, got '" + std::string(v) + "'");
}

inline InflightPolicy parse_inflight(std::string_view v) {
  if (v == "deliver") return InflightPolicy::Deliver;
  if (v == "drop") return InflightPolicy::Drop;
  throw ConfigError("inflight: expected deliver|drop, got '" + std::string(v) + "'");
}

/// Parses "t:bits, t:bits, ..." with t in seconds.
inline std::vector<RateStep> parse_rate_schedule(std::string_view v) {
  std::vector<RateStep> steps;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string_view::npos) comma = v.size();
    const std::string item = detail::trim(v.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) {
      if (comma == v.size()) break;
      continue;
    }
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("rate_schedule item '" + item + "' lacks ':'");
    steps.push_back({detail::parse_seconds(detail::trim(item.substr(0, colon))),
                     parse_int<std::uint32_t>(detail::trim(item.substr(colon + 1)))});
  }
  return steps;
}

/// Applies one `key=value` setting. Unknown keys and malformed values throw
/// ConfigError.
inline void apply_setting(SimConfig& c, std::string_view key, std::string_view value) {
  const std::string k(key);
  try {
    if (k == "node_count") c.node_count = parse_int<std::size_t>(value);
    else if (k == "placement") {
      if (value == "grid") c.placement = Placement::Grid;
      else if (value == "uniform") c.placement = Placement::UniformRandom;
      else throw ConfigError("placement: expected grid|uniform");
    }
    else if (k == "area_side") c.area_side = parse_double(value);
    else if (k == "radio_range") c.radio_range = parse_double(value);
    else if (k == "channel_bps") c.channel_bps = parse_int<std::uint64_t>(value);
    else if (k == "tx_power_mw") c.tx_power_mw = parse_double(value);
    else if (k == "payload_bits") c.payload_bits = parse_int<std::uint32_t>(value);
    else if (k == "header_bits_per_relay") c.header_bits_per_relay = parse_int<std::uint32_t>(value);
    else if (k == "packet_interval_s") c.packet_interval = detail::parse_seconds(value);
    else if (k == "topo_control_interval_s") c.topo_control_interval = detail::parse_seconds(value);
    else if (k == "hold_time_s") c.hold_time = detail::parse_seconds(value);
    else if (k == "topo_stability_s") c.topo_stability = detail::parse_seconds(value);
    else if (k == "duplicate_ttl_s") c.duplicate_ttl = detail::parse_seconds(value);
    else if (k == "sim_duration_s") c.sim_duration = detail::parse_seconds(value);
    else if (k == "mode") c.mode = parse_mode(value);
    else if (k == "rule2") c.rule2 = detail::parse_switch(k, value);
    else if (k == "inflight") c.inflight = parse_inflight(value);
    else if (k == "mobility_m") c.mobility_m = parse_double(value);
    else if (k == "seed") c.seed = parse_int<std::uint64_t>(value);
    else if (k == "repeat_seq") c.repeat_seq = detail::parse_switch(k, value);
    else if (k == "candidate_order") {
      if (value == "ascending") c.candidate_order = CandidateOrder::Ascending;
      else if (value == "descending") c.candidate_order = CandidateOrder::Descending;
      else if (value == "degree") c.candidate_order = CandidateOrder::DegreeDescending;
      else throw ConfigError("candidate_order: expected ascending|descending|degree");
    }
    else if (k == "fixture") {
      if (value.empty()) c.fixture.reset();
      else c.fixture = std::string(value);
    }
    else if (k == "rate_schedule") c.rate_schedule = parse_rate_schedule(value);
    else throw ConfigError("unknown key '" + k + "'");
  } catch (const ParseError& e) {
    throw ConfigError(k + ": " + e.what());
  }
}

/// Effective configuration as key/value text, keys as accepted by apply_setting.
inline std::map<std::string, std::string> config_key_values(const SimConfig& c) {
  std::map<std::string, std::string> kv;
  kv["area_side"] = format_double(c.area_side);
  kv["candidate_order"] = c.candidate_order == CandidateOrder::Ascending    ? "ascending"
                          : c.candidate_order == CandidateOrder::Descending ? "descending"
                                                                            : "degree";
  kv["channel_bps"] = std::to_string(c.channel_bps);
  kv["duplicate_ttl_s"] = detail::seconds_text(c.duplicate_ttl);
  kv["fixture"] = c.fixture.value_or("");
  kv["header_bits_per_relay"] = std::to_string(c.header_bits_per_relay);
  kv["hold_time_s"] = detail::seconds_text(c.hold_time);
  kv["inflight"] = c.inflight == InflightPolicy::Deliver ? "deliver" : "drop";
  kv["mobility_m"] = format_double(c.mobility_m);
  kv["mode"] = std::string(mode_name(c.mode));
  kv["node_count"] = std::to_string(c.node_count);
  kv["packet_interval_s"] = detail::seconds_text(c.packet_interval);
  kv["payload_bits"] = std::to_string(c.payload_bits);
  kv["placement"] = c.placement == Placement::Grid ? "grid" : "uniform";
  kv["radio_range"] = format_double(c.radio_range);
  std::string sched;
  for (const auto& s : c.rate_schedule) {
    if (!sched.empty()) sched += ',';
    sched += detail::seconds_text(s.at) + ":" + std::to_string(s.payload_bits);
  }
  kv["rate_schedule"] = sched;
  kv["repeat_seq"] = c.repeat_seq ? "on" : "off";
  kv["rule2"] = c.rule2 ? "on" : "off";
  kv["seed"] = std::to_string(c.seed);
  kv["sim_duration_s"] = detail::seconds_text(c.sim_duration);
  kv["topo_control_interval_s"] = detail::seconds_text(c.topo_control_interval);
  kv["topo_stability_s"] = detail::seconds_text(c.topo_stability);
  kv["tx_power_mw"] = format_double(c.tx_power_mw);
  return kv;
}

}  // namespace meshflood
