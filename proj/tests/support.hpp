#ifndef TPR_TEST_SUPPORT_HPP
#define TPR_TEST_SUPPORT_HPP

#include <tpr/forest.hpp>
#include <tpr/sforest.hpp>

#include <functional>
#include <map>
#include <optional>
#include <numeric>
#include <random>
#include <vector>

namespace tpr::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

// F-indices of the leaves of a subforest
inline std::vector<int> leaf_indices(const OrderedForest& F, const OrderedForest& sub) {
  std::vector<int> out;
  for (int v : leaves(sub)) out.push_back(F.find(sub.label(v)));
  return out;
}

// Balanced forest of the given height; child labels get random gaps when gapped.
inline OrderedForest random_balanced_forest(Rng& g, int h, int max_vertices, int max_roots = 3, int max_arity = 3,
                                            bool gapped = false) {
  std::vector<Label> ls;
  int budget = max_vertices;
  std::function<bool(Label, int)> grow = [&](Label l, int lv) -> bool {
    // a subtree of height h-lv needs at least h-lv+1 vertices
    if (budget < h - lv + 1) return false;
    ls.push_back(l);
    --budget;
    if (lv == h) return true;
    int k = uniform(g, 1, max_arity);
    int c = 0;
    bool any = false;
    for (int j = 0; j < k; ++j) {
      c += gapped ? uniform(g, 1, 3) : 1;
      Label ch = l;
      ch[lv + 1] = c;
      if (grow(ch, lv + 1)) any = true;
      else break;
    }
    if (!any) {
      // cannot happen: the budget check above reserved a full chain
      throw std::logic_error("random_balanced_forest: budget accounting");
    }
    return true;
  };
  int nr = uniform(g, 1, max_roots);
  int c = 0;
  for (int j = 0; j < nr; ++j) {
    c += gapped ? uniform(g, 1, 3) : 1;
    Label r(h + 1, 0);
    r[0] = c;
    if (!grow(r, 0)) break;
  }
  return OrderedForest(h, ls);
}

// Tree variant (one root), not necessarily balanced.
inline OrderedForest random_tree(Rng& g, int h, int max_vertices, int max_arity = 3) {
  std::vector<Label> ls;
  Label root(h + 1, 0);
  root[0] = 1;
  ls.push_back(root);
  std::vector<Label> frontier{root};
  while ((int)ls.size() < max_vertices && !frontier.empty()) {
    int i = uniform(g, 0, (int)frontier.size() - 1);
    Label p = frontier[i];
    int lv = label_level(p);
    if (lv == h) {
      frontier.erase(frontier.begin() + i);
      continue;
    }
    int nch = 0;
    for (auto& l : ls)
      if (label_level(l) == lv + 1 && label_parent(l) == p) ++nch;
    if (nch >= max_arity) {
      frontier.erase(frontier.begin() + i);
      continue;
    }
    Label c = p;
    c[lv + 1] = nch + 1;
    ls.push_back(c);
    frontier.push_back(c);
  }
  return OrderedForest(h, ls);
}

// All preorder child-count codes of ordered forests with exactly n vertices.
inline const std::vector<std::vector<int>>& forest_codes(int n) {
  static std::map<int, std::vector<std::vector<int>>> memo;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::vector<std::vector<int>> out;
  if (n == 0) {
    out.push_back({});
  } else {
    // first tree has k vertices: root with a forest of k-1 below it
    for (int k = 1; k <= n; ++k)
      for (const auto& below : forest_codes(k - 1))
        for (const auto& rest : forest_codes(n - k)) {
          std::vector<int> c;
          c.push_back(type_roots(ForestType{below}));
          c.insert(c.end(), below.begin(), below.end());
          c.insert(c.end(), rest.begin(), rest.end());
          out.push_back(std::move(c));
        }
  }
  return memo[n] = std::move(out);
}

inline std::vector<OrderedForest> all_forests(int n, bool trees_only = false) {
  std::vector<OrderedForest> out;
  for (const auto& c : forest_codes(n)) {
    OrderedForest f = forest_from_code(ForestType{c});
    if (trees_only && !f.is_tree()) continue;
    out.push_back(f);
  }
  return out;
}

// Random F' <= F: same height and roots, balanced, keeps a nonempty child subset per internal vertex.
inline OrderedForest random_subforest(Rng& g, const OrderedForest& F) {
  std::vector<int> keep;
  std::function<void(int)> go = [&](int v) {
    keep.push_back(v);
    const auto& ch = F.children(v);
    if (ch.empty()) return;
    std::vector<int> pick;
    for (int c : ch)
      if (uniform(g, 0, 1)) pick.push_back(c);
    if (pick.empty()) pick.push_back(ch[uniform(g, 0, (int)ch.size() - 1)]);
    for (int c : pick) go(c);
  };
  for (int r : F.roots()) go(r);
  std::sort(keep.begin(), keep.end());
  return F.induced(keep);
}

inline std::vector<int> random_subset(Rng& g, const std::vector<int>& from, int min_size = 1) {
  std::vector<int> s;
  for (int x : from)
    if (uniform(g, 0, 1)) s.push_back(x);
  while ((int)s.size() < min_size && (int)s.size() < (int)from.size()) {
    int x = from[uniform(g, 0, (int)from.size() - 1)];
    if (std::find(s.begin(), s.end(), x) == s.end()) s.push_back(x);
  }
  std::sort(s.begin(), s.end());
  return s;
}


// G(n,p); when connect is set, consecutive components are joined by one edge.
inline GroundGraph random_graph(Rng& g, int n, double p, bool connect = true) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> es;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(g)) es.push_back({u, v});
  if (connect) {
    GroundGraph G(n, es);
    std::vector<char> seen(n, 0);
    int prev = -1;
    for (int s = 0; s < n; ++s) {
      if (seen[s]) continue;
      for (int v : G.ball(s, INF - 1)) seen[v] = 1;
      if (prev >= 0) es.push_back({prev, s});
      prev = s;
    }
  }
  return GroundGraph(n, es);
}

// Balanced S-forest of height h on G: roots from `roots`, arity in [1,max_arity],
// child pi drawn from the ball of radius k around the parent's pi (k < 0: anywhere).
// Returns nullopt when some vertex cannot be given a fresh pi value.
inline std::optional<SForest> random_sforest(Rng& g, const GroundGraph& G, const std::vector<int>& roots, int h,
                                             int min_arity, int max_arity, int k = -1) {
  std::vector<std::pair<Label, int>> rows;
  for (int s : roots) {
    std::vector<char> used(G.n(), 0);
    used[s] = 1;
    bool ok = true;
    std::function<void(Label, int, int)> grow = [&](Label l, int lv, int x) {
      rows.push_back({l, x});
      if (lv == h || !ok) return;
      int a = uniform(g, min_arity, max_arity);
      auto cand = k < 0 ? G.ball(x, INF - 1) : G.ball(x, k);
      std::vector<int> fresh;
      for (int c : cand)
        if (!used[c]) fresh.push_back(c);
      if ((int)fresh.size() < 1) {
        ok = false;
        return;
      }
      std::shuffle(fresh.begin(), fresh.end(), g);
      a = std::min<int>(a, (int)fresh.size());
      for (int j = 0; j < a; ++j) used[fresh[j]] = 1;
      for (int j = 0; j < a; ++j) {
        Label c = l;
        c[lv + 1] = j + 1;
        grow(c, lv + 1, fresh[j]);
      }
    };
    Label r(h + 1, 0);
    r[0] = s + 1;
    grow(r, 0, s);
    if (!ok) return std::nullopt;
  }
  return SForest::from_rows(G.n(), h, rows);
}

struct AugmentationPair {
  SForest old_forest, new_forest;
  int k = 0;  // level 1 of new_forest and every level of old_forest are k-short
};

// Fold: random k-short forest rooted everywhere; Fnew: augment_tree over greedily
// chosen disjoint trees near each new root, then a random balanced sub-selection.
inline std::optional<AugmentationPair> random_augmentation_pair(Rng& g, const GroundGraph& G, int h, int k,
                                                                int max_arity = 2, int max_children = 3) {
  std::vector<int> all(G.n());
  std::iota(all.begin(), all.end(), 0);
  auto Fold = random_sforest(g, G, all, h, 1, max_arity, k);
  if (!Fold) return std::nullopt;
  std::vector<std::vector<int>> img(G.n());
  for (int u = 0; u < G.n(); ++u) {
    for (int v : Fold->tree_vertices(u)) img[u].push_back(Fold->pi(v));
    std::sort(img[u].begin(), img[u].end());
  }
  std::vector<SForest> trees;
  for (int v = 0; v < G.n(); ++v) {
    if (uniform(g, 0, 2) == 0) continue;
    std::vector<int> cand;
    for (int u : G.ball(v, k))
      if (u != v) cand.push_back(u);
    std::shuffle(cand.begin(), cand.end(), g);
    std::vector<int> picked;
    std::vector<char> used(G.n(), 0);
    used[v] = 1;
    for (int u : cand) {
      if ((int)picked.size() >= max_children) break;
      bool clash = false;
      for (int x : img[u]) clash = clash || used[x];
      if (clash) continue;
      for (int x : img[u]) used[x] = 1;
      picked.push_back(u);
    }
    if (picked.empty()) continue;
    std::sort(picked.begin(), picked.end());
    std::vector<SForest> subs;
    for (int u : picked) subs.push_back(Fold->tree_at(u));
    SForest T = augment_tree(v, subs);
    OrderedForest sub = random_subforest(g, T.forest());
    std::vector<int> keep;
    for (const auto& l : sub.labels()) keep.push_back(T.forest().find(l));
    trees.push_back(T.induced(keep));
  }
  if (trees.empty()) return std::nullopt;
  return AugmentationPair{*Fold, forest_of_trees(G.n(), trees), k};
}

}  // namespace tpr::testing

#endif
