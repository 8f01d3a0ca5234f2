#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "meshflood/topology.hpp"

namespace meshflood {

/// Unordered 2-hop pair, stored with first < second.
using NodePair = std::pair<NodeId, NodeId>;

/// The global relay set R and, per relay, the nodes whose 2-hop coverage it
/// provides.
struct RelayAssignment {
  std::vector<NodeId> relays;                          // ascending
  std::map<NodeId, std::vector<NodeId>> selectors;     // relay -> ascending ids
  std::vector<NodePair> covered_pairs;                 // ascending
  std::uint64_t epoch = 0;
  // Number of (candidate, 2-hop pair) bridge tests performed by selection.
  std::uint64_t bridge_tests = 0;

  bool is_relay(NodeId id) const {
    return std::binary_search(relays.begin(), relays.end(), id);
  }

  /// True if `relay` is in R and `u` is one of its selectors.
  bool serves(NodeId relay, NodeId u) const {
    auto it = selectors.find(relay);
    return it != selectors.end() && std::binary_search(it->second.begin(), it->second.end(), u);
  }

  friend bool operator==(const RelayAssignment&, const RelayAssignment&) = default;
};

enum class CandidateOrder { Ascending, Descending, DegreeDescending };

namespace detail {

inline std::vector<NodeId> candidate_sequence(const Topology& t, CandidateOrder order) {
  std::vector<NodeId> ids(t.size());
  std::iota(ids.begin(), ids.end(), NodeId{0});
  switch (order) {
    case CandidateOrder::Ascending:
      break;
    case CandidateOrder::Descending:
      std::reverse(ids.begin(), ids.end());
      break;
    case CandidateOrder::DegreeDescending:
      std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        return t.one_hop(a).size() > t.one_hop(b).size();
      });
      break;
  }
  return ids;
}

}  // namespace detail

/// Greedy 2-hop cover. Candidates are visited in `order`; a candidate joins R
/// iff it is the middle node of at least one still-uncovered pair (u, w) with
/// w two hops from u. Every pair a new relay bridges is then marked covered.
/// Selection stops once no uncovered pair remains.
inline RelayAssignment select_relays(const Topology& t,
                                     CandidateOrder order = CandidateOrder::Ascending) {
  const std::size_t n = t.size();
  RelayAssignment a;
  a.epoch = t.epoch();

  std::size_t uncovered = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (NodeId w : t.two_hop(static_cast<NodeId>(u))) {
      if (w > u) ++uncovered;
    }
  }
  std::vector<char> covered(n * n, 0);
  std::vector<NodePair> bridged;

  for (NodeId v : detail::candidate_sequence(t, order)) {
    if (uncovered == 0) break;
    const auto nbrs = t.one_hop(v);
    bridged.clear();
    bool bridges_new = false;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        // Two distinct non-adjacent neighbors of v are exactly two hops apart.
        if (t.adjacent(nbrs[i], nbrs[j])) continue;
        ++a.bridge_tests;
        bridged.emplace_back(nbrs[i], nbrs[j]);
        if (!covered[static_cast<std::size_t>(nbrs[i]) * n + nbrs[j]]) bridges_new = true;
      }
    }
    if (!bridges_new) continue;

    a.relays.push_back(v);
    std::vector<NodeId> served;
    for (auto [u, w] : bridged) {
      char& c = covered[static_cast<std::size_t>(u) * n + w];
      if (!c) {
        c = 1;
        --uncovered;
      }
      served.push_back(u);
      served.push_back(w);
    }
    std::sort(served.begin(), served.end());
    served.erase(std::unique(served.begin(), served.end()), served.end());
    a.selectors.emplace(v, std::move(served));
  }

  std::sort(a.relays.begin(), a.relays.end());
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t w = u + 1; w < n; ++w) {
      if (covered[u * n + w]) a.covered_pairs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(w));
    }
  }
  return a;
}

/// Every 2-hop pair (u < w) with no relay adjacent to both endpoints.
/// Direct enumeration; shares no code with select_relays.
inline std::vector<NodePair> coverage_check(const Topology& t, const std::vector<NodeId>& relays) {
  for (NodeId r : relays) {
    if (r >= t.size()) throw LookupError("relay id " + std::to_string(r) + " not in topology");
  }
  std::vector<NodePair> missing;
  for (std::size_t u = 0; u < t.size(); ++u) {
    const auto uid = static_cast<NodeId>(u);
    for (NodeId w : t.two_hop(uid)) {
      if (w < uid) continue;
      const bool ok = std::any_of(relays.begin(), relays.end(), [&](NodeId r) {
        return r != uid && r != w && t.adjacent(r, uid) && t.adjacent(r, w);
      });
      if (!ok) missing.emplace_back(uid, w);
    }
  }
  return missing;
}

/// Exact minimum relay cover by enumerating subsets in increasing size, each
/// size in lexicographic order. The first valid subset is returned.
inline std::vector<NodeId> brute_force_min_relays(const Topology& t, std::size_t max_n = 12) {
  const std::size_t n = t.size();
  if (n > max_n) {
    throw SizeLimitError("oracle limited to " + std::to_string(max_n) + " nodes, topology has " +
                         std::to_string(n));
  }
  std::vector<NodeId> subset;
  for (std::size_t k = 0; k <= n; ++k) {
    // idx holds the current k-combination of 0..n-1.
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
      subset.assign(idx.begin(), idx.end());
      if (coverage_check(t, subset).empty()) return subset;
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return subset;  // unreachable: the full node set always covers
}

struct CardinalityReport {
  std::size_t card_r = 0;
  std::size_t card_v = 0;
  bool cond1 = false;  // |R| < |V|
  bool cond2 = false;  // |R| < |V - R|
};

/// Reports, without enforcing, the two cardinality conditions on R.
inline CardinalityReport cardinality_report(const Topology& t, const RelayAssignment& a) {
  if (a.epoch != t.epoch()) {
    throw StaleAssignmentError("assignment for epoch " + std::to_string(a.epoch) +
                               " used with topology epoch " + std::to_string(t.epoch()));
  }
  CardinalityReport r;
  r.card_r = a.relays.size();
  r.card_v = t.size();
  r.cond1 = r.card_r < r.card_v;
  r.cond2 = r.card_r < r.card_v - r.card_r;
  return r;
}

inline void write_relays(std::ostream& os, const RelayAssignment& a) {
  for (NodeId r : a.relays) {
    os << "relay " << r << " selectors";
    if (auto it = a.selectors.find(r); it != a.selectors.end()) {
      for (NodeId u : it->second) os << ' ' << u;
    }
    os << '\n';
  }
}

}  // namespace meshflood
