#include "dccm/stats.hpp"

#include <gtest/gtest.h>

#include <set>

#include "support/util.hpp"

using namespace dccm;
using testutil::make_network;
using testutil::random_network;

namespace {

// O(n^2) oracle: classify every adjacency entry directly
MixingCounts brute_mixing(const Network& net) {
  MixingCounts m(net.n_labels());
  for (int i = 0; i < net.size(); ++i)
    for (int j = i + 1; j < net.size(); ++j)
      if (net.has_edge(i, j)) ++m.at(net.group_of(i), net.group_of(j));
  return m;
}

// explicit set-intersection oracle keyed by external ids
MixingCounts brute_persistence(const Network& now, const Network& before) {
  std::set<std::pair<std::string, std::string>> prev_edges;
  for (auto [a, b] : before.edges()) {
    auto ia = before.roster()[a], ib = before.roster()[b];
    prev_edges.insert({std::min(ia, ib), std::max(ia, ib)});
  }
  MixingCounts m(now.n_labels());
  for (auto [a, b] : now.edges()) {
    auto ia = now.roster()[a], ib = now.roster()[b];
    if (prev_edges.count({std::min(ia, ib), std::max(ia, ib)}))
      ++m.at(now.group_of(a), now.group_of(b));
  }
  return m;
}

long long brute_triangles(const Network& net) {
  long long t = 0;
  for (int i = 0; i < net.size(); ++i)
    for (int j = i + 1; j < net.size(); ++j)
      for (int k = j + 1; k < net.size(); ++k)
        if (net.has_edge(i, j) && net.has_edge(i, k) && net.has_edge(j, k)) ++t;
  return t;
}

long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MixingCounts, EmptyGraphIsAllZero) {
  auto net = make_network(6, {"D", "R"}, {});
  auto m = mixing_counts(net);
  EXPECT_EQ(m.total(), 0);
}

TEST(MixingCounts, TriangleWithTwoDemocratsOneRepublican) {
  // nodes 0,1 = D and 2 = R (round-robin on 3 nodes gives D,R,D; build explicitly)
  auto net = build_network({"a", "b", "c"}, {{"a", "D"}, {"b", "D"}, {"c", "R"}},
                           {{"a", "b"}, {"a", "c"}, {"b", "c"}});
  auto m = mixing_counts(net);
  EXPECT_EQ(m.at(0, 0), 1);  // D-D
  EXPECT_EQ(m.at(0, 1), 2);  // D-R
  EXPECT_EQ(m.at(1, 1), 0);  // R-R
}

TEST(MixingCounts, MatchesBruteForceOnRandomGraphs) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto net = random_network(20, 0.3, {"D", "R", "Z"}, rng);
    EXPECT_EQ(mixing_counts(net), brute_mixing(net));
    EXPECT_EQ(mixing_counts(net).total(), net.edge_count());
  }
}

TEST(PersistenceCounts, FullOverlapEqualsMixingCounts) {
  Rng rng(3);
  auto net = random_network(15, 0.25, {"D", "R"}, rng);
  EXPECT_EQ(persistence_counts(net, net), mixing_counts(net));
}

TEST(PersistenceCounts, DisjointEdgeSetsAreZero) {
  auto a = make_network(6, {"D", "R"}, {{0, 1}, {2, 3}});
  auto b = make_network(6, {"D", "R"}, {{0, 2}, {1, 3}, {4, 5}});
  EXPECT_EQ(persistence_counts(a, b).total(), 0);
}

TEST(PersistenceCounts, DepartedNodesDyadsAreExcluded) {
  // previous slice: node "3" has three edges; "3" is absent from the new roster
  auto prev = build_network({"0", "1", "2", "3"},
                            {{"0", "D"}, {"1", "D"}, {"2", "R"}, {"3", "R"}},
                            {{"3", "0"}, {"3", "1"}, {"3", "2"}, {"0", "1"}});
  auto now = build_network({"0", "1", "2"}, {{"0", "D"}, {"1", "D"}, {"2", "R"}},
                           {{"0", "1"}, {"0", "2"}});
  auto p = persistence_counts(now, prev);
  EXPECT_EQ(p.total(), 1);  // only (0,1) persists
  EXPECT_EQ(p.at(0, 0), 1);
}

TEST(PersistenceCounts, MatchesIntersectionOracleOnRandomPairs) {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = random_network(20, 0.2, {"D", "R"}, rng);
    auto b = random_network(20, 0.2, {"D", "R"}, rng);
    EXPECT_EQ(persistence_counts(a, b), brute_persistence(a, b));
  }
}

TEST(StaticProperties, DirectDivision) {
  // 100 nodes, 50 D / 50 R; 100 D-D edges -> eta 2.0
  std::vector<std::string> roster;
  std::map<std::string, std::string> groups;
  for (int i = 0; i < 100; ++i) {
    roster.push_back(std::to_string(i));
    groups[roster.back()] = i < 50 ? "D" : "R";
  }
  std::vector<std::pair<std::string, std::string>> edges;
  int added = 0;
  for (int i = 0; i < 50 && added < 100; ++i)
    for (int j = i + 1; j < 50 && added < 100; ++j, ++added)
      edges.emplace_back(std::to_string(i), std::to_string(j));
  auto net = build_network(roster, groups, edges);
  auto props = static_properties(net);
  EXPECT_DOUBLE_EQ(props[pair_index(2, 0, 0)], 2.0);
  EXPECT_DOUBLE_EQ(props[pair_index(2, 0, 1)], 0.0);
}

TEST(StaticProperties, EmptyGraphIsZeroEverywhere) {
  auto net = make_network(10, {"D", "R"}, {});
  for (double v : static_properties(net)) EXPECT_EQ(v, 0.0);
}

TEST(StaticProperties, CrossPairDividesByCanonicallyFirstLabel) {
  // 1 D, 3 R, one D-R edge: eta_DR = 1 / M_D = 1
  auto net = build_network({"d", "r1", "r2", "r3"},
                           {{"d", "D"}, {"r1", "R"}, {"r2", "R"}, {"r3", "R"}},
                           {{"d", "r1"}});
  auto props = static_properties(net);
  EXPECT_DOUBLE_EQ(props[pair_index(2, 0, 1)], 1.0);
}

TEST(NormalizeCount, ZeroGroupConvention) {
  EXPECT_EQ(normalize_count(0, 0), 0.0);
  EXPECT_THROW(normalize_count(3, 0), std::domain_error);
}

TEST(DynamicProperties, IdenticalSlicesEqualStatic) {
  Rng rng(5);
  auto net = random_network(12, 0.3, {"D", "R"}, rng);
  EXPECT_EQ(dynamic_properties(net, net), static_properties(net));
}

TEST(DynamicProperties, BoundedByStaticComponentwise) {
  Rng rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = random_network(16, 0.3, {"D", "R"}, rng);
    auto b = random_network(16, 0.3, {"D", "R"}, rng);
    auto s = static_properties(a);
    auto d = dynamic_properties(a, b);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(d[i], s[i]);
  }
}

TEST(ToggleDelta, OnThenOffRestoresCounts) {
  Rng rng(41);
  auto net = random_network(10, 0.3, {"D", "R"}, rng);
  auto prev = random_network(10, 0.3, {"D", "R"}, rng);
  auto mix = mixing_counts(net);
  auto per = persistence_counts(net, prev);
  auto mix0 = mix, per0 = per;
  Edge dyad{2, 7};
  apply_toggle_delta(mix, per, net, &prev, dyad);
  net.toggle_edge(2, 7);
  apply_toggle_delta(mix, per, net, &prev, dyad);
  net.toggle_edge(2, 7);
  EXPECT_EQ(mix, mix0);
  EXPECT_EQ(per, per0);
}

TEST(ToggleDelta, IncrementalEqualsRecomputeOverRandomWalk) {
  Rng rng(43);
  auto net = random_network(50, 0.1, {"D", "R"}, rng);
  auto prev = random_network(50, 0.12, {"D", "R"}, rng);
  auto mix = mixing_counts(net);
  auto per = persistence_counts(net, prev);
  for (int step = 0; step < 1000; ++step) {
    int a = static_cast<int>(bounded(rng, 50));
    int b = static_cast<int>(bounded(rng, 49));
    if (b >= a) ++b;
    apply_toggle_delta(mix, per, net, &prev, {a, b});
    net.toggle_edge(a, b);
    ASSERT_EQ(mix, mixing_counts(net)) << "step " << step;
    ASSERT_EQ(per, persistence_counts(net, prev)) << "step " << step;
  }
}

TEST(ToggleDelta, RemovingPersistingCrossEdgeDropsBothCounts) {
  // dyad (d, r) present in both slices; removal lowers static and persisting
  // D-R counts by one
  auto now = build_network({"d", "r"}, {{"d", "D"}, {"r", "R"}}, {{"d", "r"}});
  auto prev = now;
  auto mix = mixing_counts(now);
  auto per = persistence_counts(now, prev);
  apply_toggle_delta(mix, per, now, &prev, {0, 1});
  EXPECT_EQ(mix.at(0, 1), 0);
  EXPECT_EQ(per.at(0, 1), 0);
}

TEST(Triangles, CompleteGraphOnFourNodes) {
  EXPECT_EQ(triangles(testutil::complete_network(4, {"D"})), 4);
}

TEST(Triangles, TreesHaveNone) {
  auto path = make_network(6, {"D"}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  EXPECT_EQ(triangles(path), 0);
  auto star = make_network(6, {"D"}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  EXPECT_EQ(triangles(star), 0);
}

TEST(Triangles, MatchesCubicOracleOnRandomGraphs) {
  Rng rng(97);
  for (int rep = 0; rep < 10; ++rep) {
    auto net = random_network(20, 0.3, {"D"}, rng);
    EXPECT_EQ(triangles(net), brute_triangles(net));
  }
  // cross the 64-bit word boundary in the adjacency rows
  auto big = random_network(70, 0.1, {"D"}, rng);
  EXPECT_EQ(triangles(big), brute_triangles(big));
}

TEST(KStars, StarGraphDegreeSequence) {
  auto star = make_network(6, {"D"}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  EXPECT_EQ(k_stars(star, 2), 10);  // C(5,2) + 5*C(1,2)
}

TEST(KStars, EmptyGraphAndHandshake) {
  auto empty = make_network(8, {"D"}, {});
  EXPECT_EQ(k_stars(empty, 3), 0);
  Rng rng(53);
  auto net = random_network(25, 0.3, {"D"}, rng);
  EXPECT_EQ(k_stars(net, 1), 2 * net.edge_count());
}

TEST(KStars, VanishesAboveRosterSize) {
  EXPECT_EQ(k_stars(testutil::complete_network(4, {"D"}), 5), 0);
}

TEST(KStars, MatchesDegreeSequenceOracle) {
  Rng rng(59);
  for (int k = 1; k <= 4; ++k) {
    auto net = random_network(30, 0.25, {"D"}, rng);
    long long expected = 0;
    for (int d : degrees(net)) expected += binom(d, k);
    EXPECT_EQ(k_stars(net, k), expected);
  }
}

TEST(AlternatingKStars, EmptyAndSingleEdge) {
  EXPECT_EQ(alternating_k_stars(make_network(5, {"D"}, {}), 2.0), 0.0);
  EXPECT_EQ(alternating_k_stars(make_network(5, {"D"}, {{0, 1}}), 2.0), 0.0);
}

TEST(AlternatingKStars, CompleteGraphOnFourNodesTauTwo) {
  // S_2 = 12, S_3 = 4: +12 - 4/2 = 10
  EXPECT_DOUBLE_EQ(alternating_k_stars(testutil::complete_network(4, {"D"}), 2.0), 10.0);
}

TEST(AlternatingKStars, RejectsZeroTau) {
  EXPECT_THROW(alternating_k_stars(testutil::complete_network(3, {"D"}), 0.0),
               std::invalid_argument);
}

TEST(AlternatingKStars, MatchesDirectSummation) {
  Rng rng(61);
  auto net = random_network(18, 0.35, {"D"}, rng);
  for (double tau : {1.0, 2.0, 3.5}) {
    double expected = 0;
    for (int i = 2; i <= net.size() - 1; ++i) {
      double si = 0;
      for (int d : degrees(net)) si += static_cast<double>(binom(d, i));
      expected += (i % 2 == 0 ? 1.0 : -1.0) * si / std::pow(tau, i - 2);
    }
    EXPECT_NEAR(alternating_k_stars(net, tau), expected, 1e-9 * std::abs(expected) + 1e-12);
  }
}

TEST(GofStats, ExhaustiveOracleOnFiveNodes) {
  // every graph on 5 nodes, checked against independent oracles
  const std::vector<std::string> labels{"D"};
  for (std::uint64_t mask = 0; mask < (1ULL << 10); ++mask) {
    auto net = testutil::mask_network(5, labels, mask);
    ASSERT_EQ(triangles(net), brute_triangles(net));
    for (int k = 1; k <= 3; ++k) {
      long long expected = 0;
      for (int d : degrees(net)) expected += binom(d, k);
      ASSERT_EQ(k_stars(net, k), expected);
    }
  }
}

TEST(CovariateSummary, TwoDisjointPairs) {
  auto net = make_network(4, {"D"}, {{0, 1}, {2, 3}});
  auto cs = covariate_summary(net);
  EXPECT_EQ(cs.n_components, 2);
  EXPECT_EQ(cs.largest_component, 2);
}

TEST(CovariateSummary, PathCenterBetweenness) {
  auto p3 = make_network(3, {"D"}, {{0, 1}, {1, 2}});
  auto cs = covariate_summary(p3);
  EXPECT_DOUBLE_EQ(cs.max_betweenness, 1.0);  // one pair routed through the middle
  EXPECT_DOUBLE_EQ(cs.max_closeness, 1.0);    // center reaches both at distance 1
}

TEST(CovariateSummary, StarHubHasMaxEigenvectorCentrality) {
  auto star = make_network(5, {"D"}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto cs = covariate_summary(star);
  // hub entry of the unit-norm leading eigenvector of K_{1,4} is 1/sqrt(2)
  EXPECT_NEAR(cs.max_eigenvector_centrality, 1.0 / std::sqrt(2.0), 1e-8);
}

TEST(CovariateSummary, EmptyRosterRejected) {
  Network empty;
  EXPECT_THROW(covariate_summary(empty), std::invalid_argument);
}

TEST(CovariateSummary, IsolatedRosterHasZeroCentralities) {
  auto net = make_network(7, {"D", "R"}, {});
  auto cs = covariate_summary(net);
  EXPECT_EQ(cs.n_components, 7);
  EXPECT_EQ(cs.largest_component, 1);
  EXPECT_EQ(cs.max_eigenvector_centrality, 0.0);
  EXPECT_EQ(cs.max_closeness, 0.0);
  EXPECT_EQ(cs.max_betweenness, 0.0);
}
