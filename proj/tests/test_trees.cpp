#include <gtest/gtest.h>

#include <tpr/trees.hpp>

#include "support.hpp"

using namespace tpr;
using namespace tpr::testing;

namespace {

// every d-ary subforest of F with the same roots, as masks
void for_each_subforest(const OrderedForest& F, int d, const std::function<void(const std::vector<char>&)>& cb) {
  std::vector<char> m(F.size(), 0);
  std::vector<int> open = F.roots();
  for (int r : open) m[r] = 1;
  std::function<void(std::vector<int>)> go = [&](std::vector<int> todo) {
    if (todo.empty()) {
      cb(m);
      return;
    }
    int v = todo.back();
    todo.pop_back();
    if (F.is_leaf(v)) {
      go(todo);
      return;
    }
    const auto& ch = F.children(v);
    int n = (int)ch.size();
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      if (__builtin_popcount(s) != d) continue;
      auto t2 = todo;
      for (int j = 0; j < n; ++j)
        if (s >> j & 1) m[ch[j]] = 1, t2.push_back(ch[j]);
      go(t2);
      for (int j = 0; j < n; ++j)
        if (s >> j & 1) m[ch[j]] = 0;
    }
  };
  go(open);
}

std::map<std::vector<int>, int> random_copy_colouring(Rng& g, const OrderedForest& F, const OrderedForest& S,
                                                      int colours) {
  std::vector<char> all(F.size(), 1);
  std::map<std::vector<int>, int> col;
  for (auto& c : all_copies(S, F, F.roots(), all)) col[c] = uniform(g, 0, colours - 1);
  return col;
}

OrderedForest star(int leaves) { return forest_from_code(ForestType{[&] {
  std::vector<int> c{leaves};
  c.resize(leaves + 1, 0);
  return c;
}()}); }

// trees at the given roots with a shared pool of child values, height 1
SForest shared_stars(int n, const std::vector<int>& roots, const std::vector<int>& pool) {
  std::vector<std::pair<Label, int>> rows;
  for (int s : roots) {
    rows.push_back({{s + 1, 0}, s});
    int j = 0;
    for (int x : pool)
      if (x != s) rows.push_back({{s + 1, ++j}, x});
  }
  return SForest::from_rows(n, 1, rows);
}

}  // namespace

TEST(RamseyBound, SmallValues) {
  EXPECT_EQ(ramsey_bound(1, 3, 2), 5u);
  EXPECT_EQ(ramsey_bound(2, 3, 2), 6u);
  EXPECT_EQ(ramsey_bound(2, 2, 5), 2u);
  EXPECT_EQ(ramsey_bound(3, 2, 2), 3u);
  EXPECT_GE(ramsey_bound(2, 5, 2), 43u);
  EXPECT_EQ(ramsey_bound(3, 20, 4), DEMAND_CAP);
}

TEST(MonoSubset, AgreesWithBruteForce) {
  Rng g(21);
  for (int it = 0; it < 200; ++it) {
    int n = uniform(g, 3, 8), r = uniform(g, 1, 3), d = uniform(g, 1, n);
    std::map<std::vector<int>, int> col;
    auto colour = [&](const std::vector<int>& s) {
      auto it2 = col.find(s);
      if (it2 != col.end()) return it2->second;
      return col[s] = uniform(g, 0, 1);
    };
    auto got = mono_subset(n, r, d, colour);
    bool exists = false;
    for (std::uint32_t m = 0; m < (1u << n) && !exists; ++m) {
      if (__builtin_popcount(m) != d) continue;
      std::vector<int> pts;
      for (int i = 0; i < n; ++i)
        if (m >> i & 1) pts.push_back(i);
      std::set<int> cs;
      std::vector<int> pick;
      std::function<void(int)> go = [&](int from) {
        if ((int)pick.size() == r) {
          cs.insert(colour(pick));
          return;
        }
        for (int i = from; i < (int)pts.size(); ++i) pick.push_back(pts[i]), go(i + 1), pick.pop_back();
      };
      go(0);
      exists = cs.size() <= 1;
    }
    EXPECT_EQ(got.has_value(), exists);
  }
}

TEST(RamseyTrees, StarBaseCaseIsRamsey) {
  Rng g(22);
  auto F = full_forest(1, 6, 1);
  auto S = star(2);
  EXPECT_EQ(ramsey_trees_demand(S, 3, 2), 6u);
  for (int it = 0; it < 100; ++it) {
    auto col = random_copy_colouring(g, F, S, 2);
    auto res = ramsey_trees(F, S, [&](const std::vector<int>& c) { return col.at(c); }, 3, 2);
    ASSERT_TRUE(res.ok);
    EXPECT_EQ(res.method, "recursion");
  }
}

TEST(RamseyTrees, SmallStarExhaustive) {
  Rng g(23);
  auto F = full_forest(1, 6, 1);
  auto S = star(2);
  for (int it = 0; it < 50; ++it) {
    auto col = random_copy_colouring(g, F, S, 2);
    CopyColouring chi = [&](const std::vector<int>& c) { return col.at(c); };
    auto res = ramsey_trees(F, S, chi, 2, 2);
    ASSERT_TRUE(res.ok);
    std::vector<char> m(F.size(), 0);
    for (int v : res.vertices) m[v] = 1;
    std::set<int> seen;
    for (auto& c : all_copies(S, F, F.roots(), m)) seen.insert(chi(c));
    EXPECT_EQ(seen.size(), 1u);
    EXPECT_EQ(res.copies, 1u);
  }
}

TEST(RamseyTrees, FirstTreePeeling) {
  Rng g(24);
  auto S = full_forest(2, 1, 1);  // two single-leaf stars
  EXPECT_EQ(ramsey_trees_demand(S, 2, 2), 9u);
  auto F = full_forest(2, 9, 1);
  for (int it = 0; it < 30; ++it) {
    auto col = random_copy_colouring(g, F, S, 2);
    auto res = ramsey_trees(F, S, [&](const std::vector<int>& c) { return col.at(c); }, 2, 2);
    ASSERT_TRUE(res.ok);
    EXPECT_EQ(res.method, "recursion");
    EXPECT_EQ(res.copies, 4u);
  }
}

TEST(RamseyTrees, RootPeeling) {
  Rng g(25);
  auto S = full_forest(1, 1, 2);  // a path
  EXPECT_EQ(ramsey_trees_demand(S, 2, 2), 9u);
  auto F = full_forest(1, 9, 2);
  for (int it = 0; it < 20; ++it) {
    auto col = random_copy_colouring(g, F, S, 2);
    auto res = ramsey_trees(F, S, [&](const std::vector<int>& c) { return col.at(c); }, 2, 2);
    ASSERT_TRUE(res.ok);
    EXPECT_EQ(res.method, "recursion");
  }
}

TEST(RamseyTrees, ConstantColouring) {
  auto F = full_forest(2, 3, 2);
  auto S = forest_from_code(ForestType{{1, 2, 0, 0, 1, 1, 0}});
  auto res = ramsey_trees(F, S, [](const std::vector<int>&) { return 1; }, 2, 2);
  ASSERT_TRUE(res.ok);
  EXPECT_EQ(res.colour, 1);
}

TEST(RamseyTrees, ExactSearchMatchesBruteForce) {
  Rng g(26);
  auto F = full_forest(1, 3, 2);
  auto S = forest_from_code(ForestType{{1, 1, 0}});
  EXPECT_EQ(ramsey_trees_demand(S, 2, 2), 9u);
  int found = 0;
  for (int it = 0; it < 60; ++it) {
    auto col = random_copy_colouring(g, F, S, 2);
    CopyColouring chi = [&](const std::vector<int>& c) { return col.at(c); };
    auto res = ramsey_trees(F, S, chi, 2, 2);
    bool exists = false;
    for_each_subforest(F, 2, [&](const std::vector<char>& m) {
      std::set<int> cs;
      for (auto& c : all_copies(S, F, F.roots(), m)) cs.insert(chi(c));
      exists = exists || cs.size() <= 1;
    });
    EXPECT_EQ(res.ok, exists);
    if (res.ok) {
      EXPECT_EQ(res.method, "exact");
      ++found;
    }
    EXPECT_FALSE(res.budget_hit);
  }
  EXPECT_GT(found, 0);
}

TEST(Separation, DFormula) {
  int D = separation_D(2, 2);
  EXPECT_LT(2 * std::log((double)D) - D / 36.0, std::log(0.5));
  EXPECT_GE(2 * std::log((double)(D - 1)) - (D - 1) / 36.0, std::log(0.5));
}

TEST(Separation, IdenticalTrees) {
  const int n = 158;
  std::vector<std::pair<Label, int>> rows;
  for (int s : {0, 1}) {
    rows.push_back({{s + 1, 0, 0}, s});
    for (int j = 1; j <= 12; ++j) {
      rows.push_back({{s + 1, j, 0}, 1 + j});
      for (int k = 1; k <= 12; ++k) rows.push_back({{s + 1, j, k}, 13 + (j - 1) * 12 + k});
    }
  }
  auto F = SForest::from_rows(n, 2, rows);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto res = separate_two_trees(F, 0, 1, 2, 2, seed);
    ASSERT_TRUE(res.ok) << res.reason;
    EXPECT_GE(res.arity1, 2);
    EXPECT_GE(res.arity2, 2);
    std::set<int> a;
    for (int v : res.T1) a.insert(F.pi(v));
    for (int v : res.T2) EXPECT_FALSE(a.count(F.pi(v)));
    EXPECT_TRUE(F.induced(res.T1).forest().is_balanced());
  }
}

TEST(Separation, DisjointTreesUntouched) {
  auto F = forest_of_trees(20, {shared_stars(20, {0}, {2, 3, 4}), shared_stars(20, {1}, {5, 6, 7})});
  auto res = separate_two_trees(F, 0, 1, 3, 3, 1);
  ASSERT_TRUE(res.ok);
  EXPECT_EQ(res.arity1, 3);
  EXPECT_EQ(res.arity2, 3);
}

TEST(Separation, ForestOnPath) {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i + 1 < 30; ++i) es.push_back({i, i + 1});
  GroundGraph G(30, es);
  std::vector<int> pool;
  for (int x = 10; x < 22; ++x) pool.push_back(x);
  auto F = shared_stars(30, {0, 1}, pool);
  EXPECT_FALSE(is_d_separated(F, G, 1).ok);
  auto res = separate_forest(F, G, 1, 7);
  ASSERT_TRUE(res.ok) << res.reason;
  EXPECT_EQ(res.passes, 1);
  EXPECT_TRUE(is_d_separated(res.forest, G, 1).ok);
}

TEST(Separation, RandomForests) {
  Rng g(27);
  int ok = 0;
  for (int it = 0; it < 20; ++it) {
    auto G = random_graph(g, 30, 0.06);
    std::vector<int> roots;
    for (int v = 0; v < 30; v += 5) roots.push_back(v);
    std::vector<int> pool;
    for (int x = 0; x < 30; ++x) pool.push_back(x);
    std::shuffle(pool.begin(), pool.end(), g);
    pool.resize(24);
    auto F = shared_stars(30, roots, pool);
    auto res = separate_forest(F, G, 2, it + 1);
    if (res.ok) {
      ++ok;
      EXPECT_TRUE(is_d_separated(res.forest, G, 2).ok);
      EXPECT_EQ(res.forest.root_set(), F.root_set());
    } else {
      EXPECT_FALSE(res.reason.empty());
    }
  }
  EXPECT_GT(ok, 10);
}

TEST(Cleaning, SigmaBookkeeping) {
  EXPECT_EQ(count_forest_types(1, 2), 2u);
  EXPECT_EQ(count_forest_types(2, 2), 3u);
  Hypergraph H(2, 12, {{0, 1}});
  auto F = shared_stars(12, {0, 1}, {2, 3, 4, 5, 6, 7, 8, 9, 10});
  auto res = clean_forest(H, F, [](const std::vector<int>&) { return 0; }, 2, 1);
  ASSERT_TRUE(res.ok);
  EXPECT_EQ(res.sigma, 8u);
  EXPECT_EQ(res.rho, 3u);
  EXPECT_EQ(res.rounds, 3u);
  EXPECT_LE(res.rounds, res.sigma * res.rho);
}

TEST(Cleaning, ScheduleOnNineAryStars) {
  Rng g(28);
  Hypergraph H(2, 12, {{0, 1}});
  auto F = shared_stars(12, {0, 1}, {2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  auto T = tensor(H, F, 2);
  for (int it = 0; it < 20; ++it) {
    auto chi = Colouring::from_function(T, 2, [&](const Edge&) { return uniform(g, 0, 1); });
    auto res = clean_forest(H, F, T, chi, 2);
    ASSERT_TRUE(res.ok) << res.reason;
    EXPECT_EQ(res.method, "schedule");
    EXPECT_EQ(res.required_arity, 9u);
  }
}

TEST(Cleaning, ExactMatchesBruteForce) {
  Rng g(29);
  Hypergraph H(2, 8, {{0, 1}});
  auto F = shared_stars(8, {0, 1}, {2, 3, 4, 5});
  auto T = tensor(H, F, 2);
  int found = 0;
  for (int it = 0; it < 40; ++it) {
    auto chi = Colouring::from_function(T, 2, [&](const Edge&) { return uniform(g, 0, 1); });
    LeafSetColouring f = [&](const std::vector<int>& e) { return chi.of(T, e); };
    auto res = clean_forest(H, F, T, chi, 2);
    bool exists = false;
    for_each_subforest(F.forest(), 2, [&](const std::vector<char>& m) {
      exists = exists || is_clean(H, F, mask_to_list(m), f).ok;
    });
    EXPECT_EQ(res.ok, exists);
    if (res.ok) {
      EXPECT_EQ(res.method, "exact");
      ++found;
    }
  }
  EXPECT_GT(found, 0);
}

TEST(Cleaning, DetectsDirtyColouring) {
  Hypergraph H(2, 8, {{0, 1}});
  auto F = shared_stars(8, {0, 1}, {2, 3, 4});
  LeafSetColouring f = [&](const std::vector<int>& e) { return e[0] == 1 && e[1] == 2 ? 1 : 0; };
  auto all = mask_to_list(std::vector<char>(F.size(), 1));
  auto cc = is_clean(H, F, all, f);
  EXPECT_FALSE(cc.ok);
  EXPECT_EQ(root_set_of(F, cc.e), root_set_of(F, cc.f));
}

TEST(XYZ, ConstantColourings) {
  struct Case { int r, l, h, d; };
  for (auto c : {Case{2, 1, 3, 2}, Case{2, 2, 5, 2}, Case{3, 2, 5, 2}, Case{3, 1, 2, 3}}) {
    auto T = full_forest(1, c.d, c.h);
    auto res = trees_tight_xyz(T, [](const std::vector<int>&) { return 0; }, c.r, c.l, 1);
    ASSERT_TRUE(res.ok) << res.reason;
    EXPECT_EQ(res.X.size(), (std::size_t)c.l);
    EXPECT_EQ(res.Y.size(), (std::size_t)c.l);
    EXPECT_EQ(res.Z.size(), (std::size_t)c.l);
    EXPECT_TRUE(independent_leaf_sets(T, res.X, res.Z));
    EXPECT_EQ(type_of(T, res.X), type_of(T, res.Z));
  }
}

TEST(XYZ, HeightTooSmall) {
  auto T = full_forest(1, 2, 3);
  auto res = trees_tight_xyz(T, [](const std::vector<int>&) { return 0; }, 2, 2, 1);
  EXPECT_FALSE(res.ok);
}

TEST(XYZ, RandomColouringsVerified) {
  // colour by type, except r-sets touching one corrupted leaf per child of the root
  Rng g(30);
  auto T = full_forest(1, 3, 3);
  auto lv = leaves(T);
  int ok = 0;
  for (int it = 0; it < 20; ++it) {
    std::set<int> dirty;
    for (int c : T.children(0)) {
      std::vector<int> mine;
      for (int v : lv)
        if (T.is_ancestor(c, v)) mine.push_back(v);
      dirty.insert(mine[uniform(g, 0, (int)mine.size() - 1)]);
    }
    std::map<ForestType, int> by_type;
    std::map<std::vector<int>, int> col;
    CopyColouring chi = [&](const std::vector<int>& e) {
      auto f = col.find(e);
      if (f != col.end()) return f->second;
      bool bad = false;
      for (int v : e) bad = bad || dirty.count(v);
      if (bad) return col[e] = uniform(g, 0, 1);
      auto key = type_of(T, e);
      if (!by_type.count(key)) by_type[key] = uniform(g, 0, 1);
      return col[e] = by_type[key];
    };
    auto res = trees_tight_xyz(T, chi, 2, 1, 2);
    ASSERT_TRUE(res.ok) << res.reason;
    ++ok;
    for (std::size_t i = 0; i + 1 < res.walk.verts.size(); ++i) {
      std::vector<int> e{res.walk.verts[i], res.walk.verts[i + 1]};
      std::sort(e.begin(), e.end());
      EXPECT_EQ(chi(e), res.colour);
    }
  }
  EXPECT_EQ(ok, 20);
}
