#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "meshflood/types.hpp"

namespace meshflood {

struct Node {
  NodeId id = 0;
  Role role = Role::Client;
  Point pos;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Nodes indexed by id; ids are exactly 0..size()-1.
using NodeSet = std::vector<Node>;

enum class Placement { Grid, UniformRandom };

namespace detail {

// 53-bit uniform draw in [0, 1); stable across standard libraries, unlike
// std::uniform_real_distribution.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::string_view role_name(Role r) { return r == Role::Source ? "source" : "client"; }

inline Role parse_role(std::string_view s) {
  if (s == "source") return Role::Source;
  if (s == "client") return Role::Client;
  throw ParseError("unknown role '" + std::string(s) + "'");
}

}  // namespace detail

/// Places `count` nodes in a square of side `area_side`. Node 0 is the source.
///
/// Grid mode fills a ceil(sqrt(count))-wide lattice row-major (x varies
/// fastest) with corners on the area boundary, truncated to `count` cells.
/// UniformRandom draws i.i.d. positions from a generator seeded with `seed`.
inline NodeSet place_nodes(std::size_t count, Placement placement, double area_side,
                           std::uint64_t seed) {
  if (count == 0) throw EmptyScenarioError("scenario has no nodes");
  if (!(area_side > 0.0)) throw ConfigError("area_side must be positive");

  NodeSet nodes(count);
  if (placement == Placement::Grid) {
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    const double spacing = side > 1 ? area_side / static_cast<double>(side - 1) : 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      nodes[i].pos = {static_cast<double>(i % side) * spacing,
                      static_cast<double>(i / side) * spacing};
    }
  } else {
    std::mt19937_64 rng(seed);
    for (auto& n : nodes) {
      const double x = detail::unit_draw(rng) * area_side;
      const double y = detail::unit_draw(rng) * area_side;
      n.pos = {x, y};
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    nodes[i].id = static_cast<NodeId>(i);
    nodes[i].role = i == 0 ? Role::Source : Role::Client;
  }
  return nodes;
}

/// Lattice spacing used by Grid placement for `count` nodes.
inline double grid_spacing(std::size_t count, double area_side) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  return side > 1 ? area_side / static_cast<double>(side - 1) : area_side;
}

/// Unit-disk connectivity graph over a node set, with cached 1-hop and
/// strict 2-hop neighborhoods. Immutable once built.
class Topology {
 public:
  Topology() = default;

  Topology(NodeSet nodes, double radio_range, std::uint64_t epoch = 0)
      : nodes_(std::move(nodes)), range_(radio_range), epoch_(epoch) {
    if (!(radio_range > 0.0)) throw ConfigError("radio_range must be positive");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id != i) throw ConfigError("node ids must be 0..n-1 in order");
    }
    build();
  }

  std::size_t size() const { return nodes_.size(); }
  const NodeSet& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { check(id); return nodes_[id]; }
  double radio_range() const { return range_; }
  std::uint64_t epoch() const { return epoch_; }
  std::size_t edge_count() const { return edges_; }

  bool adjacent(NodeId u, NodeId v) const {
    check(u);
    check(v);
    return matrix_[static_cast<std::size_t>(u) * nodes_.size() + v] != 0;
  }

  std::span<const NodeId> one_hop(NodeId u) const { check(u); return adj_[u]; }

  /// Nodes at hop distance exactly two.
  std::span<const NodeId> two_hop(NodeId u) const { check(u); return two_hop_[u]; }

  /// Id of the node with role Source, or size() if there is none.
  NodeId source() const {
    for (const auto& n : nodes_) {
      if (n.role == Role::Source) return n.id;
    }
    return static_cast<NodeId>(nodes_.size());
  }

  Topology with_epoch(std::uint64_t epoch) const {
    Topology t = *this;
    t.epoch_ = epoch;
    return t;
  }

  /// Same adjacency (positions and epoch may differ).
  bool same_links(const Topology& o) const { return adj_ == o.adj_; }

 private:
  void check(NodeId u) const {
    if (u >= nodes_.size()) throw LookupError("unknown node id " + std::to_string(u));
  }

  void build() {
    const std::size_t n = nodes_.size();
    const double r2 = range_ * range_;
    matrix_.assign(n * n, 0);
    adj_.assign(n, {});
    two_hop_.assign(n, {});
    edges_ = 0;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (squared_distance(nodes_[u].pos, nodes_[v].pos) <= r2) {
          matrix_[u * n + v] = matrix_[v * n + u] = 1;
          ++edges_;
        }
      }
    }
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (matrix_[u * n + v]) adj_[u].push_back(static_cast<NodeId>(v));
      }
    }
    std::vector<char> mark(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
      for (NodeId m : adj_[u]) {
        for (NodeId w : adj_[m]) {
          if (w != u && !matrix_[u * n + w]) mark[w] = 1;
        }
      }
      for (std::size_t w = 0; w < n; ++w) {
        if (mark[w]) {
          two_hop_[u].push_back(static_cast<NodeId>(w));
          mark[w] = 0;
        }
      }
    }
  }

  NodeSet nodes_;
  double range_ = 1.0;
  std::uint64_t epoch_ = 0;
  std::vector<char> matrix_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::vector<NodeId>> two_hop_;
  std::size_t edges_ = 0;
};

inline Topology build_topology(NodeSet nodes, double radio_range) {
  return Topology(std::move(nodes), radio_range);
}

/// Ids reachable from `from`, as a membership mask.
inline std::vector<char> reachable_from(const Topology& t, NodeId from) {
  std::vector<char> seen(t.size(), 0);
  if (t.size() == 0) return seen;
  std::queue<NodeId> frontier;
  seen[from] = 1;
  frontier.push(from);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : t.one_hop(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push(v);
      }
    }
  }
  return seen;
}

inline bool is_connected(const Topology& t) {
  if (t.size() <= 1) return true;
  const auto seen = reachable_from(t, 0);
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

struct MobilityStep {
  double max_displacement = 0.0;  // meters per reconfiguration
};

/// Moves every non-source node by a seeded displacement drawn uniformly from
/// the disk of radius `max_displacement`, clamps to the area, and rebuilds
/// adjacency with the epoch advanced by one.
inline Topology reconfigure(const Topology& t, MobilityStep mobility, std::uint64_t seed,
                            double area_side) {
  NodeSet nodes = t.nodes();
  const double d = mobility.max_displacement;
  if (d > 0.0) {
    std::mt19937_64 rng(seed);
    for (auto& n : nodes) {
      if (n.role == Role::Source) continue;
      double dx = 0.0;
      double dy = 0.0;
      // Rejection sampling keeps the draw pure arithmetic.
      do {
        dx = (2.0 * detail::unit_draw(rng) - 1.0) * d;
        dy = (2.0 * detail::unit_draw(rng) - 1.0) * d;
      } while (dx * dx + dy * dy > d * d);
      n.pos.x = std::clamp(n.pos.x + dx, 0.0, area_side);
      n.pos.y = std::clamp(n.pos.y + dy, 0.0, area_side);
    }
  }
  return Topology(std::move(nodes), t.radio_range(), t.epoch() + 1);
}

// Plain-text adjacency file:
//   n <count> range <meters>
//   node <id> <x> <y> <role>
//   edge <u> <v>
inline void write_topology(std::ostream& os, const Topology& t) {
  os << "n " << t.size() << " range " << format_double(t.radio_range()) << '\n';
  for (const auto& n : t.nodes()) {
    os << "node " << n.id << ' ' << format_double(n.pos.x) << ' ' << format_double(n.pos.y) << ' '
       << detail::role_name(n.role) << '\n';
  }
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (NodeId v : t.one_hop(static_cast<NodeId>(u))) {
      if (v > u) os << "edge " << u << ' ' << v << '\n';
    }
  }
}

/// Reads the adjacency format. Edges are re-derived from positions and must
/// match the listed ones exactly.
inline Topology read_topology(std::istream& is) {
  std::string line;
  std::size_t count = 0;
  double range = 0.0;
  bool have_header = false;
  NodeSet nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "n") {
      std::string c, kw, r;
      ls >> c >> kw >> r;
      if (kw != "range") throw ParseError("bad header: " + line);
      count = parse_int<std::size_t>(c);
      range = parse_double(r);
      have_header = true;
    } else if (tag == "node") {
      std::string id, x, y, role;
      ls >> id >> x >> y >> role;
      nodes.push_back(Node{parse_int<NodeId>(id), detail::parse_role(role),
                           Point{parse_double(x), parse_double(y)}});
    } else if (tag == "edge") {
      std::string u, v;
      ls >> u >> v;
      auto a = parse_int<NodeId>(u);
      auto b = parse_int<NodeId>(v);
      edges.emplace_back(std::min(a, b), std::max(a, b));
    } else {
      throw ParseError("unknown line: " + line);
    }
  }
  if (!have_header) throw ParseError("missing header line");
  if (nodes.size() != count) throw ParseError("node count does not match header");
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  Topology t(std::move(nodes), range);
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<NodeId, NodeId>> derived;
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (NodeId v : t.one_hop(static_cast<NodeId>(u))) {
      if (v > u) derived.emplace_back(static_cast<NodeId>(u), v);
    }
  }
  if (edges != derived) throw ParseError("edge list inconsistent with positions and range");
  return t;
}

}  // namespace meshflood
