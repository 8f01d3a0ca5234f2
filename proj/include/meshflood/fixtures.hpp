#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "meshflood/topology.hpp"

namespace meshflood::fixtures {

// Relay-bridged star: source S (id 0) at the centre, three mutually adjacent
// routers (ids 1..3) around it, and two outer clients per router (ids 4..9)
// reachable from S only through that router.
inline constexpr double kBridgedStarRange = 100.0;

inline Topology bridged_star() {
  const Point centre{250.0, 250.0};
  auto polar = [&](double radius, double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    return Point{centre.x + radius * std::cos(rad), centre.y + radius * std::sin(rad)};
  };
  NodeSet nodes;
  nodes.push_back({0, Role::Source, centre});
  const double router_angle[3] = {90.0, 210.0, 330.0};
  for (NodeId i = 0; i < 3; ++i) nodes.push_back({i + 1, Role::Client, polar(55.0, router_angle[i])});
  for (NodeId i = 0; i < 3; ++i) {
    nodes.push_back({static_cast<NodeId>(4 + 2 * i), Role::Client, polar(150.0, router_angle[i] - 12.0)});
    nodes.push_back({static_cast<NodeId>(5 + 2 * i), Role::Client, polar(150.0, router_angle[i] + 12.0)});
  }
  return Topology(std::move(nodes), kBridgedStarRange);
}

/// Path 0-1-...-(n-1) along the x axis. The range is 1.5 spacings, clear of
/// rounding at the 1-spacing links and of the 2-spacing non-links.
inline Topology path(std::size_t n, double area_side = 500.0) {
  if (n == 0) throw EmptyScenarioError("path fixture needs at least one node");
  const double spacing = n > 1 ? std::min(100.0, area_side / static_cast<double>(n - 1)) : 100.0;
  NodeSet nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {static_cast<NodeId>(i), i == 0 ? Role::Source : Role::Client,
                Point{static_cast<double>(i) * spacing, area_side / 2}};
  }
  return Topology(std::move(nodes), 1.5 * spacing);
}

/// Grid placement linking the 4 lattice neighbors; the range (1.2 spacings)
/// stays below the diagonal so the links are those of range == spacing.
inline Topology grid(std::size_t n, double area_side = 500.0) {
  return Topology(place_nodes(n, Placement::Grid, area_side, 0), 1.2 * grid_spacing(n, area_side));
}

/// Complete graph K_n: nodes on a 10 m circle, 100 m range.
inline Topology complete(std::size_t n, double area_side = 500.0) {
  if (n == 0) throw EmptyScenarioError("complete fixture needs at least one node");
  NodeSet nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    nodes[i] = {static_cast<NodeId>(i), i == 0 ? Role::Source : Role::Client,
                Point{area_side / 2 + 10.0 * std::cos(a), area_side / 2 + 10.0 * std::sin(a)}};
  }
  return Topology(std::move(nodes), 100.0);
}

/// Resolves `fig3`, `path:<n>`, `grid:<n>` or `k:<n>`. Throws ConfigError on
/// anything else.
inline Topology by_name(std::string_view name, double area_side = 500.0) {
  if (name == "fig3") return bridged_star();
  const auto colon = name.find(':');
  if (colon == std::string_view::npos) throw ConfigError("unknown fixture '" + std::string(name) + "'");
  const auto kind = name.substr(0, colon);
  std::size_t n = 0;
  try {
    n = parse_int<std::size_t>(name.substr(colon + 1));
  } catch (const ParseError&) {
    throw ConfigError("bad fixture size in '" + std::string(name) + "'");
  }
  if (n == 0) throw ConfigError("fixture '" + std::string(name) + "' has no nodes");
  if (kind == "path") return path(n, area_side);
  if (kind == "grid") return grid(n, area_side);
  if (kind == "k") return complete(n, area_side);
  throw ConfigError("unknown fixture '" + std::string(name) + "'");
}

/// Syntax check only; does not build the topology.
inline bool is_fixture_name(std::string_view name) {
  if (name == "fig3") return true;
  const auto colon = name.find(':');
  if (colon == std::string_view::npos) return false;
  const auto kind = name.substr(0, colon);
  if (kind != "path" && kind != "grid" && kind != "k") return false;
  try {
    return parse_int<std::size_t>(name.substr(colon + 1)) > 0;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace meshflood::fixtures
