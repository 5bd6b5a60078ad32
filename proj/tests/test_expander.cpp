#include <gtest/gtest.h>

#include <tpr/expander.hpp>

#include "support.hpp"

using namespace tpr;
using namespace tpr::testing;

namespace {

GroundGraph complete(int n) {
  std::vector<std::pair<int, int>> es;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) es.push_back({u, v});
  return GroundGraph(n, es);
}

GroundGraph two_cliques(int m) {
  std::vector<std::pair<int, int>> es;
  for (int s : {0, m})
    for (int u = 0; u < m; ++u)
      for (int v = u + 1; v < m; ++v) es.push_back({s + u, s + v});
  return GroundGraph(2 * m, es);
}

void expect_valid_witness(const GroundGraph& G, const ExpanderCertificate& c) {
  ASSERT_FALSE(c.verdict);
  ASSERT_EQ((int)c.A.size(), c.set_size);
  ASSERT_EQ((int)c.B.size(), c.set_size);
  for (int a : c.A)
    for (int b : c.B) {
      EXPECT_NE(a, b);
      EXPECT_FALSE(G.has_edge(a, b));
    }
}

// direct pair enumeration over all disjoint a-sets
bool brute_expander(const GroundGraph& G, int a) {
  int n = G.n();
  for (int A = 0; A < (1 << n); ++A) {
    if (__builtin_popcount(A) != a) continue;
    for (int B = 0; B < (1 << n); ++B) {
      if (__builtin_popcount(B) != a || (A & B)) continue;
      bool edge = false;
      for (int u = 0; u < n && !edge; ++u)
        if (A >> u & 1)
          for (int v : G.adj(u))
            if (B >> v & 1) edge = true;
      if (!edge) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Verify, CompleteGraphsPass) {
  for (int n = 2; n <= 12; ++n)
    for (double eps : {0.1, 0.25, 0.5}) {
      if (eps * n < 1) continue;
      EXPECT_TRUE(verify_expansion(complete(n), eps, VerifyMode::Exhaustive).verdict);
      EXPECT_TRUE(verify_expansion(complete(n), eps, VerifyMode::Sampled, 2000).verdict);
    }
}

TEST(Verify, EdgelessGraphFailsWithWitness) {
  GroundGraph G(10, {});
  auto c = verify_expansion(G, 0.3, VerifyMode::Exhaustive);
  expect_valid_witness(G, c);
  auto s = verify_expansion(G, 0.3, VerifyMode::Sampled, 100);
  expect_valid_witness(G, s);
}

TEST(Verify, TwoCliquesWitnessIsTheTwoSides) {
  auto G = two_cliques(6);
  auto c = verify_expansion(G, 0.45, VerifyMode::Exhaustive);
  expect_valid_witness(G, c);
  EXPECT_EQ(c.A, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(c.B, (std::vector<int>{6, 7, 8, 9, 10, 11}));
  EXPECT_FALSE(verify_expansion(G, 0.2, VerifyMode::Sampled, 5000).verdict);
}

TEST(Verify, ExhaustiveMatchesPairEnumeration) {
  Rng g(21);
  for (int it = 0; it < 60; ++it) {
    int n = uniform(g, 3, 8), a = uniform(g, 1, n / 2);
    auto G = random_graph(g, n, 0.5, false);
    auto c = verify_expansion_sized(G, a, VerifyMode::Exhaustive);
    EXPECT_EQ(c.verdict, brute_expander(G, a));
    if (!c.verdict) expect_valid_witness(G, c);
  }
}

TEST(Verify, SampledAgreesWithExhaustiveOnSmallGraphs) {
  Rng g(22);
  for (int it = 0; it < 60; ++it) {
    int n = uniform(g, 6, 12);
    auto G = random_graph(g, n, 0.4);
    double eps = 0.25;
    auto e = verify_expansion(G, eps, VerifyMode::Exhaustive);
    auto s = verify_expansion(G, eps, VerifyMode::Sampled, 20000, it);
    EXPECT_EQ(e.verdict, s.verdict);
    if (!s.verdict) expect_valid_witness(G, s);
  }
}

TEST(Verify, SampledIsDeterministicAcrossThreadCounts) {
  Rng g(23);
  auto G = random_graph(g, 40, 0.1);
  auto a = verify_expansion(G, 0.2, VerifyMode::Sampled, 30000, 7, 1);
  auto b = verify_expansion(G, 0.2, VerifyMode::Sampled, 30000, 7, 8);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.B, b.B);
}

TEST(Verify, ExhaustiveRefusedAboveThreshold) {
  EXPECT_THROW(verify_expansion(complete(60), 0.25, VerifyMode::Exhaustive), std::invalid_argument);
}

TEST(Generate, DegreeBoundConnectivityAndSampledCertificate) {
  auto out = generate_expander(60, 0.25, 3);
  ASSERT_TRUE(out.ok) << out.diagnostics;
  EXPECT_EQ(out.certificate.mode, "sampled");
  EXPECT_EQ(out.certificate.trials, 100000u);
  EXPECT_LE(out.graph.max_degree(), 16);
  EXPECT_TRUE(out.graph.connected());
  EXPECT_TRUE(verify_expansion(out.graph, 0.25, VerifyMode::Sampled, 100000, 99).verdict);
}

TEST(Generate, SmallInstancesVerifiedExhaustively) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto out = generate_expander(16, 0.3, seed);
    ASSERT_TRUE(out.ok) << out.diagnostics;
    EXPECT_EQ(out.certificate.mode, "exhaustive");
    EXPECT_LE(out.graph.max_degree(), degree_cap(0.3));
    EXPECT_TRUE(out.graph.connected());
  }
}

TEST(Generate, DeterministicForFixedSeed) {
  auto a = generate_expander(40, 0.3, 11);
  auto b = generate_expander(40, 0.3, 11);
  EXPECT_EQ(a.graph.edges(), b.graph.edges());
  EXPECT_THROW(generate_expander(3, 0.3, 1), std::invalid_argument);
}

TEST(Matching, MaximalMatchingSizeBound) {
  Rng g(24);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto out = generate_expander(16, 0.3, seed);
    ASSERT_TRUE(out.ok);
    const auto& G = out.graph;
    for (int it = 0; it < 50; ++it) {
      std::vector<int> perm(16);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), g);
      int s = uniform(g, 1, 8), t = uniform(g, 1, 16 - s);
      std::vector<int> S(perm.begin(), perm.begin() + s), T(perm.begin() + s, perm.begin() + s + t);
      auto M = maximal_matching(G, S, T);
      EXPECT_GE((double)M.size(), std::min(s, t) - 0.3 * 16);
      std::set<int> used;
      for (auto [a, b] : M) {
        EXPECT_TRUE(G.has_edge(a, b));
        EXPECT_TRUE(used.insert(a).second);
        EXPECT_TRUE(used.insert(b).second);
      }
    }
  }
}

TEST(Rainbow, HalvesOfCompleteGraph) {
  auto G = complete(10);
  auto res = rainbow_path(G, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}}, 0.2);
  ASSERT_TRUE(res.ok);
  EXPECT_TRUE(G.has_edge(res.path[0], res.path[1]));
  EXPECT_LT(res.path[0], 5);
  EXPECT_GE(res.path[1], 5);
}

TEST(Rainbow, ForcedInstanceMatchesExhaustiveSearch) {
  GroundGraph G(6, {{0, 2}, {1, 3}, {3, 4}});
  std::vector<std::vector<int>> sets{{0, 1}, {2, 3}, {4, 5}};
  std::vector<std::vector<int>> all;
  for (int a : sets[0])
    for (int b : sets[1])
      for (int c : sets[2])
        if (G.has_edge(a, b) && G.has_edge(b, c)) all.push_back({a, b, c});
  ASSERT_EQ(all.size(), 1u);
  auto res = rainbow_path(G, sets, 0.1);
  ASSERT_TRUE(res.ok);
  EXPECT_EQ(res.path, all[0]);
  EXPECT_EQ(res.matching_sizes, (std::vector<int>{2, 1}));
}

TEST(Rainbow, PathsOnGeneratedExpanders) {
  Rng g(25);
  int found = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto out = generate_expander(48, 0.1, seed, {.retries = 50, .trials = 20000});
    ASSERT_TRUE(out.ok) << out.diagnostics;
    const auto& G = out.graph;
    for (int r = 2; r <= 3; ++r) {
      std::vector<int> perm(48);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), g);
      int sz = 48 / r;
      std::vector<std::vector<int>> sets;
      for (int i = 0; i < r; ++i) {
        sets.emplace_back(perm.begin() + i * sz, perm.begin() + (i + 1) * sz);
        std::sort(sets.back().begin(), sets.back().end());
      }
      auto res = rainbow_path(G, sets, 0.1);
      EXPECT_TRUE(res.precondition);
      ASSERT_TRUE(res.ok) << res.reason;
      ++found;
      for (int i = 0; i < r; ++i) {
        EXPECT_TRUE(std::binary_search(sets[i].begin(), sets[i].end(), res.path[i]));
        if (i) EXPECT_TRUE(G.has_edge(res.path[i - 1], res.path[i]));
      }
    }
  }
  EXPECT_EQ(found, 12);
}

TEST(Rainbow, RejectsOverlappingSets) {
  auto res = rainbow_path(complete(6), {{0, 1}, {1, 2}}, 0.1);
  EXPECT_FALSE(res.ok);
  EXPECT_FALSE(res.precondition);
}

TEST(Boost, GoodExpanderKeepsEverything) {
  auto G = complete(20);
  auto rep = boost_expansion(G, 2);
  EXPECT_TRUE(rep.exact_search);
  EXPECT_TRUE(rep.X.empty());
  EXPECT_EQ(rep.kept.size(), 20u);
  EXPECT_DOUBLE_EQ(rep.ratio, 1.0);
  ASSERT_TRUE(rep.power_check);
  EXPECT_TRUE(rep.power_check->verdict);
}

TEST(Boost, PendantPathIsCaptured) {
  std::vector<std::pair<int, int>> es = complete(20).edges();
  es.push_back({0, 20});
  es.push_back({20, 21});
  es.push_back({21, 22});
  GroundGraph G(23, es);
  auto rep = boost_expansion(G, 3);
  EXPECT_EQ(rep.X, (std::vector<int>{20, 21, 22}));
  EXPECT_EQ(rep.kept.size(), 19u);
  EXPECT_NEAR(rep.ratio, 19.0 / 23, 1e-12);
  EXPECT_FALSE(rep.ratio_ok);
}

TEST(Boost, ExactSearchMatchesMaximumOracle) {
  Rng g(26);
  for (int it = 0; it < 20; ++it) {
    int n = uniform(g, 6, 14);
    auto G = random_graph(g, n, 0.25);
    auto rep = boost_expansion(G, 2, 2000);
    int best = 0;
    for (int m = 0; m < (1 << n); ++m) {
      int sz = __builtin_popcount(m);
      if (sz > n / 4) continue;
      std::set<int> N;
      for (int v = 0; v < n; ++v)
        if (m >> v & 1)
          for (int u : G.adj(v))
            if (!(m >> u & 1)) N.insert(u);
      if ((int)N.size() <= 2 * sz) best = std::max(best, sz);
    }
    EXPECT_EQ((int)rep.X.size(), best);
  }
}

TEST(Boost, GreedyModeKeepsInvariant) {
  Rng g(27);
  auto G = random_graph(g, 40, 0.08);
  auto rep = boost_expansion(G, 4, 2000);
  EXPECT_FALSE(rep.exact_search);
  std::vector<char> inX(40, 0);
  for (int x : rep.X) inX[x] = 1;
  std::set<int> N;
  for (int x : rep.X)
    for (int u : G.adj(x))
      if (!inX[u]) N.insert(u);
  EXPECT_LE((int)rep.X.size(), 10);
  EXPECT_LE(N.size(), 2 * rep.X.size());
  EXPECT_EQ(rep.kept.size() + rep.X.size() + N.size(), 40u);
}

TEST(Boost, EpsilonFormula) {
  EXPECT_DOUBLE_EQ(boosted_epsilon(4), 0.2);
  EXPECT_DOUBLE_EQ(boosted_epsilon(6), 0.1);
  EXPECT_NEAR(boosted_epsilon(2), 0.4, 1e-12);
  EXPECT_LE(boosted_epsilon(0), 1.0);
}
