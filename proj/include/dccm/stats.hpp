// Network statistics: group-mixing counts, edge-persistence counts, their
// normalized "essential property" views, O(1) single-toggle updates,
// goodness-of-fit statistics (triangles, k-stars, alternating k-stars), and
// covariate summaries (components, centralities).
//
// Integer counts are the source of truth everywhere; normalized values are
// views recomputed on demand so incremental updates stay exact.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stack>
#include <stdexcept>
#include <vector>

#include "dccm/network.hpp"

namespace dccm {

/// count / normalizer with the documented zero convention.
inline double normalize_count(long long count, long long normalizer) {
  if (normalizer == 0) {
    if (count != 0)
      throw std::domain_error("nonzero mixing count with empty normalizing group");
    return 0.0;  // empty group, empty class: keep the series well-defined
  }
  return static_cast<double>(count) / static_cast<double>(normalizer);
}

/// Normalized mixing averages for one time step. The normalizer for pair
/// (l, k) is the tally of l, the canonically first label of the pair.
struct PropertyVector {
  std::vector<double> static_part;                 // by pair index
  std::optional<std::vector<double>> dynamic_part;  // absent at sequence/term starts
  GroupTally normalizer;

  std::size_t dimension() const {
    return static_part.size() + (dynamic_part ? dynamic_part->size() : 0);
  }
};

inline MixingCounts mixing_counts(const Network& net) {
  MixingCounts m(net.n_labels());
  for (auto [a, b] : net.edges())
    ++m.counts[pair_index(m.n_labels, net.group_of(a), net.group_of(b))];
  return m;
}

/// Edges present in both slices, restricted to dyads whose endpoints exist in
/// both rosters, classified by net_t's group labels.
inline MixingCounts persistence_counts(const Network& net_t, const Network& net_prev) {
  MixingCounts m(net_t.n_labels());
  for (auto [a, b] : net_prev.edges()) {
    int ia = net_t.index_of(net_prev.roster()[a]);
    int ib = net_t.index_of(net_prev.roster()[b]);
    if (ia < 0 || ib < 0) continue;
    if (net_t.has_edge(ia, ib))
      ++m.counts[pair_index(m.n_labels, net_t.group_of(ia), net_t.group_of(ib))];
  }
  return m;
}

inline std::vector<double> normalize_mixing(const MixingCounts& counts, const GroupTally& tally) {
  std::vector<double> out(counts.counts.size());
  for (int p = 0; p < static_cast<int>(out.size()); ++p) {
    auto [l, k] = pair_labels(counts.n_labels, p);
    out[p] = normalize_count(counts.counts[p], tally.counts[l]);
  }
  return out;
}

inline std::vector<double> static_properties(const Network& net) {
  return normalize_mixing(mixing_counts(net), net.tally());
}

inline std::vector<double> dynamic_properties(const Network& net_t, const Network& net_prev) {
  return normalize_mixing(persistence_counts(net_t, net_prev), net_t.tally());
}

inline PropertyVector properties(const Network& net_t, const Network* net_prev = nullptr) {
  PropertyVector pv;
  pv.normalizer = net_t.tally();
  MixingCounts mix = mixing_counts(net_t);
  pv.static_part = normalize_mixing(mix, pv.normalizer);
  if (net_prev) pv.dynamic_part = normalize_mixing(persistence_counts(net_t, *net_prev), pv.normalizer);
  return pv;
}

/// O(1) count update for toggling `dyad` in `net_t` (which still holds the
/// pre-toggle edge set): present -> removal, absent -> addition. Persistence
/// moves with the static count exactly when the dyad exists in `net_prev`.
inline void apply_toggle_delta(MixingCounts& mixing, MixingCounts& persisting,
                               const Network& net_t, const Network* net_prev, Edge dyad) {
  auto [a, b] = dyad;
  if (a == b) throw std::invalid_argument("self-loop dyad");
  int pair = pair_index(mixing.n_labels, net_t.group_of(a), net_t.group_of(b));
  long long delta = net_t.has_edge(a, b) ? -1 : +1;
  mixing.counts[pair] += delta;
  if (net_prev) {
    int pa = net_prev->index_of(net_t.roster()[a]);
    int pb = net_prev->index_of(net_t.roster()[b]);
    if (pa >= 0 && pb >= 0 && net_prev->has_edge(pa, pb)) persisting.counts[pair] += delta;
  }
}

namespace detail {

/// Adjacency as bit rows; n up to a few thousand is fine.
struct BitAdjacency {
  int n = 0, words = 0;
  std::vector<std::uint64_t> bits;

  explicit BitAdjacency(const Network& net)
      : n(net.size()), words((net.size() + 63) / 64), bits(static_cast<std::size_t>(net.size()) * words, 0) {
    for (auto [a, b] : net.edges()) {
      bits[static_cast<std::size_t>(a) * words + b / 64] |= 1ULL << (b % 64);
      bits[static_cast<std::size_t>(b) * words + a / 64] |= 1ULL << (a % 64);
    }
  }
  const std::uint64_t* row(int v) const { return bits.data() + static_cast<std::size_t>(v) * words; }
};

inline long long binom_ll(long long d, long long k) {
  if (k < 0 || k > d) return 0;
  k = std::min(k, d - k);
  unsigned __int128 r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned __int128>(d - k + i) / static_cast<unsigned __int128>(i);
    if (r > static_cast<unsigned __int128>(std::numeric_limits<long long>::max()))
      throw std::overflow_error("k-star count overflows 64 bits");
  }
  return static_cast<long long>(r);
}

}  // namespace detail

/// Unordered node triples with all three edges present; each triangle once.
inline long long triangles(const Network& net) {
  if (net.size() == 0) return 0;
  detail::BitAdjacency adj(net);
  long long count = 0;
  for (auto [a, b] : net.edges()) {
    const std::uint64_t* ra = adj.row(a);
    const std::uint64_t* rb = adj.row(b);
    // common neighbours k > b close a triangle exactly once per triple
    int start_word = (b + 1) / 64;
    for (int w = start_word; w < adj.words; ++w) {
      std::uint64_t m = ra[w] & rb[w];
      if (w == start_word && (b + 1) % 64) m &= ~0ULL << ((b + 1) % 64);
      count += __builtin_popcountll(m);
    }
  }
  return count;
}

inline std::vector<int> degrees(const Network& net) {
  std::vector<int> d(net.size(), 0);
  for (auto [a, b] : net.edges()) { ++d[a]; ++d[b]; }
  return d;
}

/// Sum over nodes of C(degree, k).
inline long long k_stars(const Network& net, int k) {
  if (k < 1) throw std::invalid_argument("k_stars requires k >= 1");
  long long total = 0;
  for (int d : degrees(net)) total += detail::binom_ll(d, k);
  return total;
}

/// Alternating k-star statistic: sum_{i=2}^{n-1} (-1)^i S_i / tau^(i-2).
inline double alternating_k_stars(const Network& net, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("alternating_k_stars requires tau > 0");
  const int n = net.size();
  double total = 0;
  for (int d : degrees(net)) {
    // binom stays exact in double while C(d, i) < 2^53
    double binom = static_cast<double>(d) * (d - 1) / 2.0;  // C(d, 2)
    double weight = 1.0;
    for (int i = 2; i <= std::min(d, n - 1); ++i) {
      total += (i % 2 == 0 ? binom : -binom) * weight;
      binom = binom * (d - i) / (i + 1);
      weight /= tau;
    }
  }
  return total;
}

struct CovariateSummary {
  long long n_components = 0;
  long long largest_component = 0;
  double max_eigenvector_centrality = 0;
  double max_closeness = 0;
  double max_betweenness = 0;
  GroupTally group_sizes;
};

namespace detail {

inline std::vector<std::vector<int>> adjacency_lists(const Network& net) {
  std::vector<std::vector<int>> adj(net.size());
  for (auto [a, b] : net.edges()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

/// Power iteration on (A + I) restricted to `component`; the shift breaks the
/// +/- lambda tie on bipartite components. Unit 2-norm, max entry returned.
inline double max_eigen_centrality(const std::vector<std::vector<int>>& adj,
                                   const std::vector<int>& component,
                                   double tol = 1e-10, int max_iter = 10000) {
  if (component.size() <= 1) return 0.0;
  std::vector<int> pos(adj.size(), -1);
  for (std::size_t i = 0; i < component.size(); ++i) pos[component[i]] = static_cast<int>(i);
  std::size_t m = component.size();
  std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m))), y(m);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = x[i];  // the +I shift
      for (int nb : adj[component[i]]) s += x[pos[nb]];
      y[i] = s;
    }
    double norm = 0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    double diff = 0;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] /= norm;
      diff = std::max(diff, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (diff < tol) break;
  }
  double best = 0;
  for (double v : x) best = std::max(best, v);
  return best;
}

}  // namespace detail

/// Components, largest-component size, and the maxima of eigenvector
/// centrality, closeness, and betweenness over nodes.
inline CovariateSummary covariate_summary(const Network& net) {
  const int n = net.size();
  if (n == 0) throw std::invalid_argument("covariate_summary on empty roster");
  auto adj = detail::adjacency_lists(net);

  CovariateSummary cs;
  cs.group_sizes = net.tally();

  // components by BFS
  std::vector<int> comp(n, -1);
  std::vector<int> largest;
  for (int v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    std::vector<int> members;
    std::queue<int> q;
    q.push(v);
    comp[v] = static_cast<int>(cs.n_components);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      members.push_back(u);
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = comp[v];
          q.push(w);
        }
    }
    ++cs.n_components;
    if (static_cast<long long>(members.size()) > cs.largest_component) {
      cs.largest_component = static_cast<long long>(members.size());
      largest = std::move(members);
    }
  }

  cs.max_eigenvector_centrality = detail::max_eigen_centrality(adj, largest);

  // closeness: reachable / sum of distances, per node
  std::vector<int> dist(n);
  for (int v = 0; v < n; ++v) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    q.push(v);
    dist[v] = 0;
    long long total = 0, reached = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : adj[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          total += dist[w];
          ++reached;
          q.push(w);
        }
    }
    if (total > 0)
      cs.max_closeness = std::max(cs.max_closeness,
                                  static_cast<double>(reached) / static_cast<double>(total));
  }

  // betweenness (Brandes), undirected pair counting
  std::vector<double> bc(n, 0.0);
  std::vector<long long> sigma(n);
  std::vector<double> delta(n);
  std::vector<std::vector<int>> preds(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    std::vector<int> order;
    std::queue<int> q;
    dist[s] = 0;
    sigma[s] = 1;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      order.push_back(u);
      for (int w : adj[u]) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
        if (dist[w] == dist[u] + 1) {
          sigma[w] += sigma[u];
          preds[w].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (int u : preds[w])
        delta[u] += static_cast<double>(sigma[u]) / static_cast<double>(sigma[w]) * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  for (double v : bc) cs.max_betweenness = std::max(cs.max_betweenness, v / 2.0);

  return cs;
}

}  // namespace dccm
