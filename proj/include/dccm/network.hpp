// Graph data model: one time slice of a dynamic network.
//
// A Network is a simple undirected graph over a roster of externally named
// nodes, each carrying a discrete group label. Group labels live in a
// canonical lexicographically sorted universe so that group-pair statistics
// line up across time slices even when a group is momentarily empty.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dccm {

using Edge = std::pair<int, int>;  // node indices, first < second

/// Node count per group label, aligned with a Network's label universe.
struct GroupTally {
  std::vector<long long> counts;

  long long total() const {
    long long s = 0;
    for (long long c : counts) s += c;
    return s;
  }
};

/// Unordered group-pair index: (l, k) with l <= k, lexicographic over labels.
/// For K labels the pairs enumerate as (0,0),(0,1),...,(0,K-1),(1,1),...
inline int pair_count(int n_labels) { return n_labels * (n_labels + 1) / 2; }

inline int pair_index(int n_labels, int l, int k) {
  if (l > k) std::swap(l, k);
  return l * n_labels - l * (l - 1) / 2 + (k - l);
}

inline std::pair<int, int> pair_labels(int n_labels, int pair) {
  for (int l = 0; l < n_labels; ++l) {
    int row = n_labels - l;
    if (pair < row) return {l, l + pair};
    pair -= row;
  }
  throw std::out_of_range("pair index out of range");
}

/// Edge counts partitioned by endpoint group pair.
struct MixingCounts {
  int n_labels = 0;
  std::vector<long long> counts;  // by pair index

  MixingCounts() = default;
  explicit MixingCounts(int labels) : n_labels(labels), counts(pair_count(labels), 0) {}

  long long& at(int l, int k) { return counts[pair_index(n_labels, l, k)]; }
  long long at(int l, int k) const { return counts[pair_index(n_labels, l, k)]; }
  long long total() const {
    long long s = 0;
    for (long long c : counts) s += c;
    return s;
  }
  friend bool operator==(const MixingCounts&, const MixingCounts&) = default;
};

class Network {
 public:
  Network() = default;

  int size() const { return static_cast<int>(roster_.size()); }
  const std::vector<std::string>& roster() const { return roster_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int n_labels() const { return static_cast<int>(labels_.size()); }
  int group_of(int v) const { return group_[v]; }
  const std::vector<int>& groups() const { return group_; }
  const std::vector<Edge>& edges() const { return edges_; }
  long long edge_count() const { return static_cast<long long>(edges_.size()); }

  /// Index of an external node id, or -1.
  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b});
  }

  GroupTally tally() const {
    GroupTally t{std::vector<long long>(labels_.size(), 0)};
    for (int g : group_) ++t.counts[g];
    return t;
  }

  /// Flip one dyad; the single mutating entry point.
  void toggle_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("self-loop toggle");
    if (a > b) std::swap(a, b);
    Edge e{a, b};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it != edges_.end() && *it == e)
      edges_.erase(it);
    else
      edges_.insert(it, e);
  }

  Network with_toggled(int a, int b) const {
    Network n = *this;
    n.toggle_edge(a, b);
    return n;
  }

  /// Same roster and labels, empty edge set.
  Network edgeless() const {
    Network n = *this;
    n.edges_.clear();
    return n;
  }

  friend Network build_network(const std::vector<std::string>&,
                               const std::map<std::string, std::string>&,
                               const std::vector<std::pair<std::string, std::string>>&,
                               const std::vector<std::string>*);
  friend Network build_network_indexed(std::vector<std::string>, std::vector<int>,
                                       std::vector<std::string>, std::vector<Edge>);

 private:
  std::vector<std::string> roster_;
  std::vector<int> group_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;  // sorted, unique, first < second
  std::unordered_map<std::string, int> index_;
};

/// Canonical constructor from external ids. Duplicate undirected pairs
/// collapse; self-loops, unknown endpoints, and unlabeled nodes are rejected.
/// `label_universe`, when given, fixes the label set (it must cover the data).
inline Network build_network(
    const std::vector<std::string>& roster,
    const std::map<std::string, std::string>& groups,
    const std::vector<std::pair<std::string, std::string>>& edge_list,
    const std::vector<std::string>* label_universe = nullptr) {
  Network n;
  n.roster_ = roster;
  for (int i = 0; i < static_cast<int>(roster.size()); ++i) {
    if (!n.index_.emplace(roster[i], i).second)
      throw std::invalid_argument("duplicate roster id: " + roster[i]);
  }
  if (label_universe) {
    n.labels_ = *label_universe;
    if (!std::is_sorted(n.labels_.begin(), n.labels_.end()))
      std::sort(n.labels_.begin(), n.labels_.end());
  } else {
    for (const auto& id : roster) {
      auto it = groups.find(id);
      if (it != groups.end()) n.labels_.push_back(it->second);
    }
    std::sort(n.labels_.begin(), n.labels_.end());
    n.labels_.erase(std::unique(n.labels_.begin(), n.labels_.end()), n.labels_.end());
  }
  n.group_.resize(roster.size());
  for (int i = 0; i < static_cast<int>(roster.size()); ++i) {
    auto it = groups.find(roster[i]);
    if (it == groups.end())
      throw std::invalid_argument("node without group label: " + roster[i]);
    auto lit = std::lower_bound(n.labels_.begin(), n.labels_.end(), it->second);
    if (lit == n.labels_.end() || *lit != it->second)
      throw std::invalid_argument("label '" + it->second + "' not in label universe");
    n.group_[i] = static_cast<int>(lit - n.labels_.begin());
  }
  n.edges_.reserve(edge_list.size());
  for (const auto& [a, b] : edge_list) {
    int ia = n.index_of(a), ib = n.index_of(b);
    if (ia < 0 || ib < 0)
      throw std::invalid_argument("edge endpoint not in roster: (" + a + ", " + b + ")");
    if (ia == ib)
      throw std::invalid_argument("self-loop rejected: (" + a + ", " + b + ")");
    n.edges_.emplace_back(std::min(ia, ib), std::max(ia, ib));
  }
  std::sort(n.edges_.begin(), n.edges_.end());
  n.edges_.erase(std::unique(n.edges_.begin(), n.edges_.end()), n.edges_.end());
  return n;
}

/// Low-level constructor for callers that already hold canonical parts.
inline Network build_network_indexed(std::vector<std::string> roster,
                                     std::vector<int> group,
                                     std::vector<std::string> labels,
                                     std::vector<Edge> edges) {
  Network n;
  n.roster_ = std::move(roster);
  n.group_ = std::move(group);
  n.labels_ = std::move(labels);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  n.edges_ = std::move(edges);
  for (int i = 0; i < static_cast<int>(n.roster_.size()); ++i) n.index_.emplace(n.roster_[i], i);
  for (auto [a, b] : n.edges_)
    if (a < 0 || b <= a || b >= n.size()) throw std::invalid_argument("bad edge index");
  for (int g : n.group_)
    if (g < 0 || g >= n.n_labels()) throw std::invalid_argument("bad group index");
  return n;
}

/// Rebuild `prev` on `roster_net`'s roster: departed nodes' edges drop,
/// arrivals start isolated. Used when conditioning across roster changes.
inline Network restrict_to_roster(const Network& prev, const Network& roster_net) {
  std::vector<Edge> edges;
  for (auto [a, b] : prev.edges()) {
    int ia = roster_net.index_of(prev.roster()[a]);
    int ib = roster_net.index_of(prev.roster()[b]);
    if (ia >= 0 && ib >= 0) edges.emplace_back(std::min(ia, ib), std::max(ia, ib));
  }
  return build_network_indexed(roster_net.roster(), roster_net.groups(),
                               roster_net.labels(), std::move(edges));
}

/// Time-indexed sequence of slices (rosters may change between steps).
struct DynamicNetwork {
  std::vector<std::string> times;  // parallel to slices
  std::vector<Network> slices;

  std::size_t size() const { return slices.size(); }
};

}  // namespace dccm
