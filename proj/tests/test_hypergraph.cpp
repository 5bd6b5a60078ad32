#include <gtest/gtest.h>

#include <tpr/hypergraph.hpp>

#include "support.hpp"

using namespace tpr;
using namespace tpr::testing;

namespace {

Hypergraph random_hypergraph(Rng& g, int r, int n, double p) {
  Hypergraph H(r, n);
  std::bernoulli_distribution coin(p);
  std::vector<int> cur;
  std::function<void(int)> go = [&](int from) {
    if ((int)cur.size() == r) {
      if (coin(g)) H.add_edge(cur);
      return;
    }
    for (int v = from; v < n; ++v) {
      cur.push_back(v);
      go(v + 1);
      cur.pop_back();
    }
  };
  go(0);
  return H;
}

SForest height0(int n) {
  std::vector<std::pair<Label, int>> rows;
  for (int s = 0; s < n; ++s) rows.push_back({{s + 1}, s});
  return SForest::from_rows(n, 0, rows);
}

long long binom(int n, int k) {
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

GroundGraph path_graph(int n) {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i + 1 < n; ++i) es.push_back({i, i + 1});
  return GroundGraph(n, es);
}

}  // namespace

TEST(Hypergraph, EdgesAreSortedAndIndexed) {
  Hypergraph H(3, 5);
  EXPECT_EQ(H.add_edge({4, 0, 2}), 0);
  EXPECT_EQ(H.add_edge({2, 4, 0}), 0);
  EXPECT_EQ(H.edge_count(), 1u);
  EXPECT_EQ(H.edge(0), (Edge{0, 2, 4}));
  EXPECT_TRUE(H.has_edge({0, 4, 2}));
  EXPECT_EQ(H.degree(2), 1);
  EXPECT_THROW(H.add_edge({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(H.add_edge({0, 1}), std::invalid_argument);
  EXPECT_THROW(H.add_edge({0, 1, 5}), std::out_of_range);
  EXPECT_THROW(Hypergraph(1, 3), std::invalid_argument);
}

TEST(Hypergraph, PowerHypergraphSmallCases) {
  auto P4 = path_graph(4);
  EXPECT_EQ(power_hypergraph(P4, 0, 2).edge_count(), 0u);
  auto H = power_hypergraph(P4, 1, 2);
  EXPECT_EQ(H.edge_count(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(H.has_edge({i, i + 1}));
  EXPECT_EQ(power_hypergraph(P4, P4.diameter(), 3).edge_count(), (std::size_t)binom(4, 3));
  EXPECT_THROW(power_hypergraph(P4, 1, 5), std::invalid_argument);
}

TEST(Hypergraph, PowerHypergraphMatchesBruteForce) {
  Rng g(11);
  for (int it = 0; it < 40; ++it) {
    int n = uniform(g, 3, 9), r = uniform(g, 2, 4), t = uniform(g, 0, 3);
    if (r > n) continue;
    auto G = random_graph(g, n, 0.3);
    auto H = power_hypergraph(G, t, r);
    std::size_t cnt = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (__builtin_popcount(mask) != r) continue;
      std::vector<int> e;
      for (int v = 0; v < n; ++v)
        if (mask >> v & 1) e.push_back(v);
      bool ok = true;
      for (int a : e)
        for (int b : e) ok = ok && G.dist(a, b) <= t;
      EXPECT_EQ(H.has_edge(e), ok);
      cnt += ok;
    }
    EXPECT_EQ(H.edge_count(), cnt);
  }
}

TEST(Hypergraph, TextRoundTrip) {
  Rng g(2);
  auto H = random_hypergraph(g, 3, 7, 0.4);
  auto H2 = Hypergraph::from_text(H.to_text());
  EXPECT_EQ(H, H2);
  auto chi = Colouring::from_function(H, 3, [](const Edge& e) { return (e[0] + e[1] + e[2]) % 3; });
  auto chi2 = Colouring::from_text(H2, chi.to_text(H), 3);
  for (std::size_t i = 0; i < H.edge_count(); ++i) EXPECT_EQ(chi.of(H, H.edge(i)), chi2.of(H2, H.edge(i)));
  EXPECT_THROW(Hypergraph::from_text("3 4 2\n0 1 2\n"), std::invalid_argument);
  EXPECT_THROW(Colouring::from_text(H, "", 3), std::invalid_argument);
}

// The definition and the norm form agree when every set of roots pairwise
// within t can be completed to an edge of the power.
TEST(Tensor, DefinitionMatchesNormFormWhenRootSetsExtend) {
  Rng g(5);
  int compared = 0, differing = 0;
  for (int it = 0; it < 120; ++it) {
    int n = uniform(g, 3, 7), r = uniform(g, 2, 3), t = uniform(g, 1, 2), h = uniform(g, 0, 2);
    auto G = random_graph(g, n, 0.4);
    auto F = random_sforest(g, G, random_subset(g, [&] {
                              std::vector<int> a(n);
                              std::iota(a.begin(), a.end(), 0);
                              return a;
                            }()), h, 1, 2);
    if (!F) continue;
    auto A = tensor(power_hypergraph(G, t, r), *F, r);
    auto B = norm_tensor(G, *F, t, r);
    bool all_extend = true;
    for (const auto& e : B.edges()) {
      std::vector<int> R;
      for (int v : e) R.push_back(F->pi0(v));
      all_extend = all_extend && root_set_extends(G, R, t, r);
    }
    // definitional edges are always norm-form edges
    for (const auto& e : A.edges()) EXPECT_TRUE(B.has_edge(e));
    for (const auto& e : B.edges()) {
      std::vector<int> R;
      for (int v : e) R.push_back(F->pi0(v));
      EXPECT_EQ(A.has_edge(e), root_set_extends(G, R, t, r));
    }
    if (all_extend) {
      EXPECT_EQ(A, B);
      ++compared;
    } else {
      ++differing;
    }
  }
  EXPECT_GT(compared, 30);
}

TEST(Tensor, NormFormCounterexampleOnPath) {
  // on P3 with t = 1 no 3-set is pairwise adjacent, yet leaves over the roots {0,1} have norm 1
  auto G = path_graph(3);
  auto F = SForest::from_rows(3, 1, {{{1, 0}, 0}, {{1, 1}, 1}, {{1, 2}, 2}, {{2, 0}, 1}, {{2, 1}, 0}, {{2, 2}, 2}});
  EXPECT_EQ(power_hypergraph(G, 1, 3).edge_count(), 0u);
  EXPECT_EQ(tensor(power_hypergraph(G, 1, 3), F, 3).edge_count(), 0u);
  EXPECT_EQ(norm_tensor(G, F, 1, 3).edge_count(), 4u);
  EXPECT_FALSE(root_set_extends(G, {0, 1}, 1, 3));
  EXPECT_EQ(tensor(power_hypergraph(G, 1, 2), F, 2), norm_tensor(G, F, 1, 2));
}

TEST(Tensor, HeightZeroForestGivesHostBack) {
  Rng g(8);
  for (int it = 0; it < 20; ++it) {
    int n = uniform(g, 3, 8), r = uniform(g, 2, 3);
    auto H = random_hypergraph(g, r, n, 0.4);
    auto T = tensor(H, height0(n), r);
    EXPECT_EQ(T, H);  // vertex index = ground vertex for a height-0 forest built in order
  }
  auto H = random_hypergraph(g, 2, 4, 0.5);
  EXPECT_THROW(tensor(H, height0(5), 2), std::invalid_argument);
}

// phi: v[i] -> i-th leaf of the star at v
TEST(Tensor, StarForestAndBlowUp) {
  Rng g(9);
  for (int it = 0; it < 20; ++it) {
    int n = uniform(g, 3, 6), r = uniform(g, 2, 3), d = uniform(g, 1, 3);
    auto H = random_hypergraph(g, r, n, 0.5);
    // the star forest needs distinct pi values per tree; use a ground set padded with dummies
    int N = n + n * d;
    std::vector<std::pair<Label, int>> rows;
    for (int v = 0; v < n; ++v) {
      rows.push_back({{v + 1, 0}, v});
      for (int j = 0; j < d; ++j) rows.push_back({{v + 1, j + 1}, n + v * d + j});
    }
    Hypergraph Hpad(r, N, H.edges());
    auto S = SForest::from_rows(N, 1, rows);
    auto T = tensor(Hpad, S, r);
    auto B = blow_up(H, d);
    auto phi = [&](int x) { return S.forest().find(Label{x / d + 1, x % d + 1}); };
    std::size_t rainbow = 0;
    for (const auto& e : T.edges()) {
      std::set<int> R;
      for (int v : e) R.insert(S.pi0(v));
      if ((int)R.size() == r) ++rainbow;
    }
    for (const auto& e : B.edges()) {
      std::vector<int> img;
      for (int x : e) img.push_back(phi(x));
      EXPECT_TRUE(T.has_edge(img));
    }
    EXPECT_EQ(rainbow, B.edge_count());
    if (d >= 2 && H.edge_count() > 0) EXPECT_GT(T.edge_count(), B.edge_count());
  }
}

TEST(BlowUp, CountsAndSizeBound) {
  Rng g(10);
  for (int it = 0; it < 20; ++it) {
    int n = uniform(g, 3, 6), r = uniform(g, 2, 3), t = uniform(g, 1, 3);
    auto H = random_hypergraph(g, r, n, 0.5);
    auto B = blow_up(H, t);
    long long pw = 1;
    for (int i = 0; i < r; ++i) pw *= t;
    EXPECT_EQ((long long)B.edge_count(), (long long)H.edge_count() * pw);
    EXPECT_LE((long long)B.edge_count(), (long long)H.edge_count() * binom(t * r, r));
  }
  auto H = random_hypergraph(g, 3, 6, 0.5);
  EXPECT_EQ(blow_up(H, 1), H);
  EXPECT_THROW(blow_up(H, 0), std::invalid_argument);
}

TEST(Walks, ValidationExamples) {
  Hypergraph H(3, 6, {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}});
  EXPECT_TRUE(validate_walk(H, {{0, 1, 2}}).ok);
  EXPECT_TRUE(validate_walk(H, {{0, 1, 2, 3, 4}, true}).ok);
  EXPECT_TRUE(validate_walk(H, {{1, 2}}).ok);  // trivial walk
  auto bad = validate_walk(H, {{0, 1, 2, 3, 5}});
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.window, 2);
  EXPECT_FALSE(validate_walk(H, {{1, 0, 2}}).ok);
  EXPECT_TRUE(validate_walk(H, {{1, 0, 2}}, false).ok);
  EXPECT_FALSE(validate_walk(H, {{0, 1, 2, 3, 1, 2}, true}, false).ok);
  EXPECT_TRUE(validate_walk(H, {{0, 1, 2, 3, 1, 2}, false}, false).ok);
  EXPECT_FALSE(validate_walk(H, {{0}}).ok);
}

TEST(Walks, ConcatenationExamplesAndAssociativity) {
  Hypergraph H(3, 6, {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}});
  TightWalk P{{0, 1, 2}}, Q{{1, 2, 3}};
  auto PQ = concat(P, Q, 3);
  EXPECT_EQ(PQ.verts, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_TRUE(validate_walk(H, PQ).ok);
  EXPECT_EQ(concat(PQ, TightWalk{{2, 3}}, 3), PQ);
  EXPECT_THROW(concat(P, TightWalk{{2, 3, 4}}, 3), std::invalid_argument);

  Rng g(4);
  for (int it = 0; it < 200; ++it) {
    int r = uniform(g, 2, 4), n = 6;
    auto K = random_hypergraph(g, r, n, 1.0);
    auto rand_walk = [&](std::vector<int> start, int len) {
      TightWalk W{start};
      for (int i = 0; i < len; ++i) {
        std::vector<int> tail(W.verts.end() - (r - 1), W.verts.end());
        int v;
        do v = uniform(g, 0, n - 1);
        while (std::find(tail.begin(), tail.end(), v) != tail.end());
        W.verts.push_back(v);
      }
      return W;
    };
    std::vector<int> s(r - 1);
    std::iota(s.begin(), s.end(), 0);
    auto A = rand_walk(s, uniform(g, 0, 4));
    auto B = rand_walk(std::vector<int>(A.verts.end() - (r - 1), A.verts.end()), uniform(g, 0, 4));
    auto C = rand_walk(std::vector<int>(B.verts.end() - (r - 1), B.verts.end()), uniform(g, 0, 4));
    EXPECT_EQ(concat(concat(A, B, r), C, r), concat(A, concat(B, C, r), r));
    auto AB = concat(A, B, r);
    EXPECT_TRUE(validate_walk(K, AB, false).ok);
    EXPECT_EQ(AB.order(), A.order() + B.order() - (r - 1));
  }
}

TEST(MonoPaths, AlternatingFourCycle) {
  Hypergraph C4(2, 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto chi = Colouring::from_function(C4, 2, [&](const Edge& e) { return C4.edge_index(e) % 2; });
  auto res = longest_mono_tight_path(C4, chi);
  EXPECT_TRUE(res.exhaustive);
  for (int c = 0; c < 2; ++c) {
    EXPECT_EQ(res.best[c].order(), 2u);
    EXPECT_TRUE(validate_mono_walk(C4, chi, c, res.best[c]).ok);
  }
}

TEST(MonoPaths, MatchesPermutationBruteForce) {
  Rng g(12);
  for (int it = 0; it < 40; ++it) {
    int n = uniform(g, 3, 6), r = uniform(g, 2, 3);
    auto H = random_hypergraph(g, r, n, 0.6);
    int s = uniform(g, 1, 2);
    std::vector<int> cols;
    for (std::size_t i = 0; i < H.edge_count(); ++i) cols.push_back(uniform(g, 0, s - 1));
    Colouring chi{s, cols};
    auto res = longest_mono_tight_path(H, chi);
    ASSERT_TRUE(res.exhaustive);
    for (int c = 0; c < s; ++c) {
      // longest prefix-valid injective sequence over all orderings of all subsets
      std::size_t best = 0;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> sub;
        for (int v = 0; v < n; ++v)
          if (mask >> v & 1) sub.push_back(v);
        if ((int)sub.size() < r || sub.size() <= best) continue;
        do {
          if (validate_mono_walk(H, chi, c, {sub, true}).ok) {
            best = sub.size();
            break;
          }
        } while (std::next_permutation(sub.begin(), sub.end()));
      }
      EXPECT_EQ(res.best[c].order(), best);
      if (best) {
        EXPECT_TRUE(validate_mono_walk(H, chi, c, res.best[c]).ok);
      }
    }
  }
}

TEST(MonoPaths, MonochromaticHostAndBudget) {
  Rng g(13);
  auto H = random_hypergraph(g, 3, 9, 1.0);
  auto chi = Colouring::constant(H);
  auto res = longest_mono_tight_path(H, chi);
  EXPECT_EQ(res.best[0].order(), 9u);
  auto cut = longest_mono_tight_path(H, chi, 3);
  EXPECT_FALSE(cut.exhaustive);
  EXPECT_GE(cut.best[0].order(), 3u);
  EXPECT_TRUE(validate_mono_walk(H, chi, 0, cut.best[0]).ok);
}

TEST(Matchings, TriangleAndRandomBounds) {
  Hypergraph K3(2, 3, {{0, 1}, {1, 2}, {0, 2}});
  auto m = matching_decomposition(K3);
  EXPECT_EQ(m.size(), 3u);
  Hypergraph M(3, 9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
  EXPECT_EQ(matching_decomposition(M).size(), 1u);
  Rng g(14);
  for (int it = 0; it < 30; ++it) {
    int r = uniform(g, 2, 4);
    auto H = random_hypergraph(g, r, uniform(g, r, 9), 0.3);
    auto cls = matching_decomposition(H);
    EXPECT_LE((int)cls.size(), r * H.max_degree() + 1);
    std::vector<int> seen(H.edge_count(), 0);
    for (const auto& c : cls) {
      std::set<int> vs;
      for (int i : c) {
        ++seen[i];
        for (int v : H.edge(i)) EXPECT_TRUE(vs.insert(v).second);
      }
    }
    for (int x : seen) EXPECT_EQ(x, 1);
  }
}

TEST(Projection, HeightZeroIsIdentity) {
  Rng g(15);
  auto G = random_graph(g, 7, 0.4);
  auto F = height0(7);
  auto T = norm_tensor(G, F, 2, 3);
  if (T.edge_count() == 0) GTEST_SKIP();
  TightWalk W{T.edge(0)};
  auto P = project_walk(W, F, G, 2, 0, 2, 3);
  ASSERT_TRUE(P.ok) << P.reason;
  EXPECT_EQ(P.walk.verts, W.verts);
}

TEST(Projection, ShortSeparatedForestsMapWalksIntoThePower) {
  Rng g(16);
  int tried = 0;
  for (int it = 0; it < 2000 && tried < 40; ++it) {
    int n = uniform(g, 6, 10), h = uniform(g, 1, 2), k = 1, t = 1, r = uniform(g, 2, 3);
    auto G = random_graph(g, n, 0.35);
    std::vector<int> roots;
    for (int v = 0; v < n; ++v)
      if (uniform(g, 0, 1)) roots.push_back(v);
    if (roots.empty()) continue;
    auto F = random_sforest(g, G, roots, h, 1, 2, k);
    if (!F || !is_d_separated(*F, G, t).ok) continue;
    auto T = norm_tensor(G, *F, t, r);
    if (T.edge_count() == 0) continue;
    ++tried;
    auto chi = Colouring::constant(T);
    auto best = longest_mono_tight_path(T, chi, 20000).best[0];
    int p = t + 2 * h * k;
    auto P = project_walk(best, *F, G, t, k, p, r);
    ASSERT_TRUE(P.ok) << P.reason;
    EXPECT_EQ(P.walk.order(), best.order());
    EXPECT_FALSE(project_walk(best, *F, G, t, k, p - 1, r).ok);
  }
  EXPECT_GT(tried, 10);
}
