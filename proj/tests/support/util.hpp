// Shared test helpers: small graph builders and random fixtures.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "dccm/network.hpp"
#include "dccm/rng.hpp"

namespace testutil {

/// Nodes "0".."n-1" with labels assigned round-robin from `labels`.
inline dccm::Network make_network(int n, const std::vector<std::string>& labels,
                                  const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::string> roster;
  std::map<std::string, std::string> groups;
  for (int i = 0; i < n; ++i) {
    roster.push_back(std::to_string(i));
    groups[roster.back()] = labels[i % labels.size()];
  }
  std::vector<std::pair<std::string, std::string>> named;
  for (auto [a, b] : edges) named.emplace_back(std::to_string(a), std::to_string(b));
  std::vector<std::string> universe = labels;
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  return dccm::build_network(roster, groups, named, &universe);
}

/// Same roster/labels as make_network, with G(n, p) edges.
inline dccm::Network random_network(int n, double p, const std::vector<std::string>& labels,
                                    dccm::Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dccm::canonical(rng) < p) edges.emplace_back(i, j);
  return make_network(n, labels, edges);
}

inline dccm::Network complete_network(int n, const std::vector<std::string>& labels) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return make_network(n, labels, edges);
}

/// Network on the same roster with the given dyad bitmask (dyads enumerated
/// as (0,1),(0,2),...,(0,n-1),(1,2),... matching the sampler's order).
inline dccm::Network mask_network(int n, const std::vector<std::string>& labels,
                                  std::uint64_t mask) {
  std::vector<std::pair<int, int>> edges;
  int d = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++d)
      if ((mask >> d) & 1) edges.emplace_back(i, j);
  return make_network(n, labels, edges);
}

}  // namespace testutil
