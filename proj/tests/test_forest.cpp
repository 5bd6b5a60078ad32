#include <gtest/gtest.h>

#include <tpr/forest.hpp>

#include "support.hpp"

using namespace tpr;
using namespace tpr::testing;

namespace {

Label L(std::initializer_list<int> xs) { return Label(xs); }

std::vector<int> naive_leaves(const OrderedForest& F) {
  std::vector<int> out;
  for (int v = 0; v < (int)F.size(); ++v) {
    bool has_child = false;
    for (int w = 0; w < (int)F.size(); ++w)
      if (F.parent(w) == v) has_child = true;
    if (!has_child) out.push_back(v);
  }
  return out;
}

// every injection F -> G checked against the definition
std::size_t brute_monomorphism_count(const OrderedForest& F, const OrderedForest& G) {
  std::size_t count = 0;
  std::vector<int> img(F.size());
  std::function<void(int)> go = [&](int i) {
    if (i == (int)F.size()) {
      bool ok = true;
      for (int a = 0; a < (int)F.size() && ok; ++a)
        for (int b = a + 1; b < (int)F.size() && ok; ++b)
          if (!(img[a] < img[b])) ok = false;
      for (int v = 0; v < (int)F.size() && ok; ++v)
        if (F.parent(v) >= 0 && G.parent(img[v]) != img[F.parent(v)]) ok = false;
      if (ok) ++count;
      return;
    }
    for (int w = 0; w < (int)G.size(); ++w) {
      img[i] = w;
      go(i + 1);
    }
  };
  go(0);
  return count;
}

}  // namespace

TEST(Forest, LeavesOfSingleVertexAndStar) {
  OrderedForest one(0, {L({1})});
  EXPECT_EQ(leaves(one), std::vector<int>{0});
  EXPECT_TRUE(one.is_root(0));
  EXPECT_TRUE(one.is_leaf(0));

  OrderedForest star(1, {L({1, 0}), L({1, 1}), L({1, 2}), L({1, 3})});
  auto lv = leaves(star);
  ASSERT_EQ(lv.size(), 3u);
  EXPECT_EQ(star.label(lv[0]), L({1, 1}));
  EXPECT_EQ(star.label(lv[2]), L({1, 3}));
}

TEST(Forest, LeavesMatchNaiveScanAndSitOnLastLevel) {
  Rng g(11);
  for (int it = 0; it < 300; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 0, 4), 40, 3, 3, it % 2);
    EXPECT_EQ(leaves(F), naive_leaves(F));
    for (int v : leaves(F)) EXPECT_EQ(F.level(v), F.height());
    EXPECT_TRUE(F.is_balanced());
  }
}

TEST(Forest, RejectsMalformedLabels) {
  EXPECT_THROW(OrderedForest(1, {L({1, 1})}), std::invalid_argument);
  EXPECT_THROW(OrderedForest(1, {L({0, 1})}), std::invalid_argument);
  EXPECT_THROW(OrderedForest(2, {L({1, 0, 0}), L({1, 0, 1})}), std::invalid_argument);
  EXPECT_THROW(OrderedForest(1, {L({1, 0, 0})}), std::invalid_argument);
}

TEST(Forest, OrderIsPreorder) {
  Rng g(3);
  for (int it = 0; it < 200; ++it) {
    auto F = random_balanced_forest(g, 3, 40, 3, 3, true);
    for (int v = 0; v < (int)F.size(); ++v) {
      if (F.parent(v) >= 0) EXPECT_LT(F.parent(v), v);
      for (int w = v + 1; w < (int)F.size(); ++w) {
        if (F.comparable(v, w)) continue;
        // incomparable u<v: every descendant of u precedes every descendant of v
        EXPECT_LE(F.subtree_end(v), w);
      }
    }
  }
}

TEST(Forest, AncestorClosureLaws) {
  Rng g(5);
  for (int it = 0; it < 300; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 0, 4), 40, 3, 3, it % 3 == 0);
    auto all = leaves(F);
    EXPECT_EQ(ancestor_closure(F, all), F);
    auto S = random_subset(g, all);
    auto A = ancestor_closure(F, S);
    auto AS = ancestor_set(F, S);
    EXPECT_EQ(ancestor_set(F, AS), AS);
    EXPECT_EQ(leaf_indices(F, A), S);
    for (int r : A.roots()) EXPECT_TRUE(F.is_root(F.find(A.label(r))));
    auto Fp = random_subforest(g, F);
    EXPECT_EQ(ancestor_closure(F, leaf_indices(F, Fp)), Fp);
  }
  OrderedForest star(1, {L({1, 0}), L({1, 1})});
  EXPECT_THROW(ancestor_set(star, {5}), std::out_of_range);
}

TEST(Forest, TypesDistinguishSplitPoint) {
  // height 2: leaves (1,1,1),(1,1,2) share a parent; (1,1,1),(1,2,1) split at the root
  OrderedForest T(2, {L({1, 0, 0}), L({1, 1, 0}), L({1, 2, 0}), L({1, 1, 1}), L({1, 1, 2}), L({1, 2, 1})});
  auto a = type_of(T, {T.find(L({1, 1, 1})), T.find(L({1, 1, 2}))});
  auto b = type_of(T, {T.find(L({1, 1, 1})), T.find(L({1, 2, 1}))});
  EXPECT_NE(a, b);
  EXPECT_EQ(a.code, (std::vector<int>{1, 2, 0, 0}));
  EXPECT_EQ(b.code, (std::vector<int>{2, 1, 0, 1, 0}));
  EXPECT_THROW(type_of(T, {T.find(L({1, 1, 0}))}), std::invalid_argument);
}

TEST(Forest, TypesEnumerationMatchesExhaustiveOracle) {
  // oracle: every ordered tree with depth <= h and at most `cap` vertices, every leaf subset of size <= r
  auto oracle = [](int h, int r, int cap) {
    std::set<ForestType> seen;
    for (int n = 1; n <= cap; ++n)
      for (const auto& T : all_forests(n, true)) {
        if (T.max_level() > h) continue;
        auto lv = leaves(T);
        int m = (int)lv.size();
        if (m > 12) continue;
        for (int mask = 1; mask < (1 << m); ++mask) {
          if (__builtin_popcount(mask) > r) continue;
          std::vector<int> e;
          for (int i = 0; i < m; ++i)
            if (mask >> i & 1) e.push_back(lv[i]);
          seen.insert(type_of(T, e));
        }
      }
    return seen;
  };
  EXPECT_EQ(oracle(1, 2, 5).size(), 3u);
  EXPECT_EQ(types_up_to(1, 2).size(), 3u);
  for (auto [h, r] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 2}}) {
    // a tree with depth <= h and <= r leaves has at most 1 + h*r vertices
    auto o = oracle(h, r, 1 + h * r);
    auto t = types_up_to(h, r);
    EXPECT_EQ(std::set<ForestType>(t.begin(), t.end()), o) << "h=" << h << " r=" << r;
  }
}

TEST(Forest, TypesInvariantUnderMonomorphism) {
  Rng g(17);
  for (int it = 0; it < 100; ++it) {
    int h = uniform(g, 1, 3);
    auto F = random_balanced_forest(g, h, 25, 2, 3, true);
    auto G = random_balanced_forest(g, h, 40, 3, 3, false);
    auto ms = find_monomorphisms(F, G, 5);
    for (const auto& m : ms) {
      auto e = random_subset(g, leaves(F));
      std::vector<int> fe;
      for (int v : e) fe.push_back(m.img[v]);
      EXPECT_EQ(type_of(F, e), type_of(G, fe));
    }
  }
}

TEST(Forest, TypeMinus) {
  EXPECT_EQ(type_minus(ForestType{{2, 0, 0}}).code, (std::vector<int>{0, 0}));
  EXPECT_EQ(type_minus(ForestType{{1, 0}}).code, (std::vector<int>{0}));
  EXPECT_THROW(type_minus(ForestType{{0}}), std::invalid_argument);
  Rng g(19);
  for (int it = 0; it < 300; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 1, 4), 40, 3, 3, true);
    auto e = random_subset(g, leaves(F));
    auto A = ancestor_closure(F, e);
    EXPECT_EQ(type_minus(type_code(A)), type_code(canonical_relabel(forest_minus(A))));
  }
}

TEST(Forest, ClosureCommutesWithRootDeletion) {
  Rng g(23);
  for (int it = 0; it < 300; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 1, 4), 40, 3, 3, true);
    std::vector<int> back;
    auto Fm = forest_minus(F, &back);
    auto X = random_subset(g, leaves(F));
    std::vector<int> Xm;
    for (int i = 0; i < (int)back.size(); ++i)
      if (std::binary_search(X.begin(), X.end(), back[i])) Xm.push_back(i);
    auto lhs = ancestor_set(Fm, Xm);
    std::vector<int> lhs_old;
    for (int v : lhs) lhs_old.push_back(back[v]);
    std::vector<int> rhs;
    for (int v : ancestor_set(F, X))
      if (!F.is_root(v)) rhs.push_back(v);
    EXPECT_EQ(lhs_old, rhs);
  }
}

TEST(Forest, MinusDropsHeightZeroTrees) {
  OrderedForest F(0, {L({1}), L({2})});
  EXPECT_TRUE(forest_minus(F).empty());
  OrderedForest E(0, {});
  EXPECT_TRUE(E.empty());
  EXPECT_TRUE(leaves(E).empty());
}

TEST(Forest, CanonicalCodeIgnoresLabelGaps) {
  Rng g(29);
  for (int it = 0; it < 200; ++it) {
    auto F = random_balanced_forest(g, 3, 40, 3, 3, true);
    auto C = canonical_relabel(F);
    EXPECT_EQ(type_code(F), type_code(C));
    EXPECT_EQ(forest_from_code(type_code(F), F.height()), C);
  }
}

TEST(Forest, MonomorphismBasics) {
  Rng g(31);
  for (int it = 0; it < 100; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 0, 3), 30, 3, 3, true);
    auto ms = find_monomorphisms(F, F, 1000);
    Monomorphism id;
    for (int v = 0; v < (int)F.size(); ++v) id.img.push_back(v);
    EXPECT_NE(std::find(ms.begin(), ms.end(), id), ms.end());
  }
}

TEST(Forest, MonomorphismSearchMatchesBruteForce) {
  for (int n = 1; n <= 4; ++n)
    for (int m = n; m <= 5; ++m)
      for (const auto& F : all_forests(n))
        for (const auto& G : all_forests(m)) {
          auto ms = find_monomorphisms(F, G, 1'000'000);
          EXPECT_EQ(ms.size(), brute_monomorphism_count(F, G));
          for (const auto& mm : ms) EXPECT_TRUE(is_monomorphism(F, G, mm));
        }
}

TEST(Forest, MonomorphismsPreserveLevelsAndClosures) {
  Rng g(37);
  for (int it = 0; it < 150; ++it) {
    int h = uniform(g, 1, 3);
    auto F = random_balanced_forest(g, h, 12, 2, 2, false);
    auto G = random_balanced_forest(g, h, 40, 3, 3, true);
    for (const auto& m : find_monomorphisms(F, G, 50)) {
      for (int v = 0; v < (int)F.size(); ++v) EXPECT_EQ(F.level(v), G.level(m.img[v]));
      std::vector<int> all(F.size());
      std::iota(all.begin(), all.end(), 0);
      auto X = random_subset(g, all);
      std::vector<int> lhs, phiX;
      for (int v : ancestor_set(F, X)) lhs.push_back(m.img[v]);
      for (int v : X) phiX.push_back(m.img[v]);
      std::sort(lhs.begin(), lhs.end());
      EXPECT_EQ(lhs, ancestor_set(G, phiX));
    }
  }
}

TEST(Forest, AtMostOneIsomorphism) {
  for (int n = 1; n <= 7; ++n) {
    auto fs = all_forests(n);
    for (const auto& F : fs)
      for (const auto& G : fs) {
        auto is = find_isomorphisms(F, G, 10);
        EXPECT_LE(is.size(), 1u);
        EXPECT_EQ(is.size() == 1, isomorphic(F, G));
      }
  }
}

TEST(Forest, ExtendiblePathsOfPathTree) {
  OrderedForest one(0, {L({1})});
  auto p1 = extendible_paths(one);
  ASSERT_EQ(p1.size(), 1u);
  EXPECT_EQ(p1[0], TreePath{0});

  OrderedForest path(2, {L({1, 0, 0}), L({1, 1, 0}), L({1, 1, 1})});
  auto ps = extendible_paths(path);
  std::set<TreePath> got(ps.begin(), ps.end());
  EXPECT_EQ(got, (std::set<TreePath>{{0, 1, 2}, {1, 2}, {2}}));
}

TEST(Forest, ExtendiblePathsMatchDefinition) {
  // oracle: every downward chain ending at a leaf, tested against the definition
  for (int n = 1; n <= 8; ++n)
    for (const auto& T : all_forests(n, true)) {
      std::set<TreePath> brute;
      for (int v = 0; v < (int)T.size(); ++v) {
        std::function<void(TreePath)> walk = [&](TreePath p) {
          if (T.is_leaf(p.back()) && is_extendible(T, p)) brute.insert(p);
          for (int c : T.children(p.back())) {
            auto q = p;
            q.push_back(c);
            walk(q);
          }
        };
        walk({v});
      }
      auto ps = extendible_paths(T);
      EXPECT_EQ(std::set<TreePath>(ps.begin(), ps.end()), brute);
      for (const auto& p : ps)
        for (int x = p.back() + 1; x < (int)T.size(); ++x) EXPECT_FALSE(T.comparable(x, p.front()));
    }
}

TEST(Forest, PExtensionBasics) {
  OrderedForest r(1, {L({1, 0})});
  auto s = p_extension(r, {0});
  EXPECT_EQ(s, OrderedForest(1, {L({1, 0}), L({1, 1})}));
  EXPECT_THROW(p_extension(r, {0}, L({1, 0})), std::invalid_argument);

  Rng g(41);
  for (int it = 0; it < 200; ++it) {
    auto S = random_tree(g, 3, 12);
    auto paths = extendible_paths(S);
    const auto& P = paths[uniform(g, 0, (int)paths.size() - 1)];
    if (S.level(P.front()) == S.height()) continue;
    auto T = p_extension(S, P);
    EXPECT_EQ(T.size(), S.size() + 1);
    std::vector<int> keep;
    for (int v = 0; v < (int)T.size(); ++v)
      if (S.contains(T.label(v))) keep.push_back(v);
    EXPECT_EQ(T.induced(keep), S);
    EXPECT_EQ(p_extension_path(S, T), P);
  }
  // not extendible: (1,0) has a later descendant
  OrderedForest two(1, {L({1, 0}), L({1, 2})});
  EXPECT_THROW(p_extension(two, {0}, L({1, 1})), std::invalid_argument);
}

// Single-leaf additions: exhaustive over trees with <= 9 vertices.
TEST(Forest, SingleLeafAdditionsAndPExtensions) {
  std::size_t cases = 0, p_ext = 0, not_latest = 0;
  for (int n = 2; n <= 9; ++n)
    for (const auto& T : all_forests(n, true)) {
      for (int y : leaves(T)) {
        if (T.is_root(y)) continue;
        std::vector<int> keep;
        for (int v = 0; v < (int)T.size(); ++v)
          if (v != y) keep.push_back(v);
        OrderedForest S = T.induced(keep);
        // brute force: every parent chain of S that is extendible by definition
        bool found = false;
        for (int v1 = 0; v1 < (int)S.size() && !found; ++v1) {
          std::function<void(TreePath)> walk = [&](TreePath p) {
            if (found) return;
            if (is_extendible(S, p)) {
              try {
                if (p_extension(S, p, T.label(y)) == T) found = true;
              } catch (const std::invalid_argument&) {
              }
            }
            for (int c : S.children(p.back())) {
              auto q = p;
              q.push_back(c);
              walk(q);
            }
          };
          walk({v1});
        }
        bool latest = T.children(T.parent(y)).back() == y;
        EXPECT_EQ(found, latest) << to_text(T);
        EXPECT_EQ(found, !p_extension_path(S, T).empty());
        ++cases;
        if (found) ++p_ext;
        if (!latest) ++not_latest;
      }
    }
  EXPECT_GT(cases, 0u);
  EXPECT_GT(p_ext, 0u);
  EXPECT_GT(not_latest, 0u);

  // smallest case where no extendible path works: a new first child
  OrderedForest S(1, {L({1, 0}), L({1, 2})});
  OrderedForest T(1, {L({1, 0}), L({1, 1}), L({1, 2})});
  EXPECT_TRUE(p_extension_path(S, T).empty());
  EXPECT_NO_THROW(add_leaf(S, L({1, 1})));
}

TEST(Forest, ExtensionSequenceReplay) {
  Rng g(43);
  OrderedForest T0(2, {L({1, 0, 0}), L({1, 1, 0}), L({1, 1, 1})});
  EXPECT_TRUE(extension_sequence(T0, T0).empty());
  for (int it = 0; it < 500; ++it) {
    auto T = random_tree(g, uniform(g, 1, 4), 12);
    // S: random ancestor-closed subset keeping the root
    std::vector<int> keep{0};
    for (int v = 1; v < (int)T.size(); ++v)
      if (std::binary_search(keep.begin(), keep.end(), T.parent(v)) && uniform(g, 0, 2)) keep.push_back(v);
    auto S = T.induced(keep);
    auto seq = extension_sequence(S, T);
    EXPECT_EQ(seq.size(), T.size() - S.size());
    EXPECT_EQ(replay_extensions(S, seq), T);
    // P-extension flag: no vertex of S is a later sibling of the new vertex
    for (const auto& st : seq) {
      bool later_sibling_in_S = false;
      int y = T.find(st.vertex);
      for (int c : T.children(T.parent(y)))
        if (c > y && S.contains(T.label(c))) later_sibling_in_S = true;
      EXPECT_EQ(st.p_extension, !later_sibling_in_S);
    }
  }
  OrderedForest other(2, {L({2, 0, 0})});
  EXPECT_THROW(extension_sequence(other, T0), std::invalid_argument);
  OrderedForest bigger(2, {L({1, 0, 0}), L({1, 2, 0})});
  EXPECT_THROW(extension_sequence(bigger, T0), std::invalid_argument);
}

TEST(Forest, ExtendIsomorphism) {
  Rng g(47);
  for (int it = 0; it < 300; ++it) {
    auto S = random_tree(g, 3, 10);
    auto paths = extendible_paths(S);
    const auto& P = paths[uniform(g, 0, (int)paths.size() - 1)];
    if (S.level(P.front()) == S.height()) continue;
    auto T = canonical_relabel(S);
    Monomorphism f;
    for (int v = 0; v < (int)S.size(); ++v) f.img.push_back(v);
    auto S2 = p_extension(S, P);
    auto T2 = p_extension(T, P);
    auto g2 = extend_isomorphism(S, T, f, S2, T2);
    EXPECT_TRUE(is_monomorphism(S2, T2, g2));
    auto iso = find_isomorphisms(S2, T2, 2);
    ASSERT_EQ(iso.size(), 1u);
    EXPECT_EQ(iso[0], g2);
    int s_new = -1, t_new = -1;
    for (int v = 0; v < (int)S2.size(); ++v)
      if (!S.contains(S2.label(v))) s_new = v;
    for (int v = 0; v < (int)T2.size(); ++v)
      if (!T.contains(T2.label(v))) t_new = v;
    EXPECT_EQ(g2.img[s_new], t_new);
    // identity case
    auto id2 = extend_isomorphism(S, S, f, S2, S2);
    for (int v = 0; v < (int)S2.size(); ++v) EXPECT_EQ(id2.img[v], v);
    // mismatched paths
    if (P.front() != 0 && S.level(0) < S.height()) {
      auto T3 = p_extension(T, extendible_path_from(T, 0));
      if (T3 != T2) EXPECT_THROW(extend_isomorphism(S, T, f, S2, T3), std::invalid_argument);
    }
  }
}

TEST(Forest, TextRoundTrip) {
  Rng g(53);
  for (int it = 0; it < 50; ++it) {
    auto F = random_balanced_forest(g, uniform(g, 0, 3), 30, 3, 3, true);
    EXPECT_EQ(forest_from_text(to_text(F)), F);
  }
  EXPECT_THROW(forest_from_text("nope"), std::invalid_argument);
}
