#ifndef TPR_FOREST_HPP
#define TPR_FOREST_HPP

// Ordered rooted forests. A vertex is its label vector (x_0, ..., x_h):
// roots are (j,0,...,0), a vertex on level i has x_0..x_i positive and the
// rest zero. The order is lexicographic on labels, which is also preorder.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpr {

using Label = std::vector<int>;

inline int label_level(const Label& l) {
  int lv = -1;
  for (int x : l) {
    if (x == 0) break;
    ++lv;
  }
  return lv;
}

inline Label label_parent(const Label& l) {
  Label p = l;
  int lv = label_level(l);
  if (lv >= 0) p[lv] = 0;
  return p;
}

class OrderedForest {
 public:
  OrderedForest() = default;

  OrderedForest(int height, std::vector<Label> labels) : height_(height), labels_(std::move(labels)) {
    if (height_ < 0) throw std::invalid_argument("negative height");
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    build();
  }

  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const Label& label(int v) const { return labels_[v]; }
  const std::vector<Label>& labels() const { return labels_; }
  int parent(int v) const { return parent_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  int level(int v) const { return level_[v]; }
  bool is_root(int v) const { return parent_[v] < 0; }
  bool is_leaf(int v) const { return children_[v].empty(); }
  // index one past the last descendant of v
  int subtree_end(int v) const { return end_[v]; }

  int find(const Label& l) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
    if (it == labels_.end() || *it != l) return -1;
    return static_cast<int>(it - labels_.begin());
  }
  bool contains(const Label& l) const { return find(l) >= 0; }

  std::vector<int> roots() const {
    std::vector<int> r;
    for (int v = 0; v < (int)size(); ++v)
      if (parent_[v] < 0) r.push_back(v);
    return r;
  }

  int root_of(int v) const {
    while (parent_[v] >= 0) v = parent_[v];
    return v;
  }

  int max_level() const {
    int m = 0;
    for (int l : level_) m = std::max(m, l);
    return m;
  }

  // a is an ancestor of v (every vertex is its own ancestor)
  bool is_ancestor(int a, int v) const { return a <= v && v < end_[a]; }
  bool comparable(int a, int b) const { return is_ancestor(a, b) || is_ancestor(b, a); }

  int ancestor_at(int v, int lv) const {
    while (level_[v] > lv) v = parent_[v];
    return v;
  }

  bool is_balanced() const {
    for (int v = 0; v < (int)size(); ++v)
      if (children_[v].empty() && level_[v] != height_) return false;
    return true;
  }

  bool is_tree() const { return roots().size() == 1; }

  // every non-leaf has exactly d children
  bool is_d_ary(int d) const {
    for (int v = 0; v < (int)size(); ++v)
      if (!children_[v].empty() && (int)children_[v].size() != d) return false;
    return true;
  }

  int min_arity() const {
    int m = -1;
    for (int v = 0; v < (int)size(); ++v)
      if (!children_[v].empty() && (m < 0 || (int)children_[v].size() < m)) m = (int)children_[v].size();
    return m;
  }

  bool operator==(const OrderedForest& o) const { return height_ == o.height_ && labels_ == o.labels_; }

  // Subforest on a prefix-closed subset of vertices, keeping labels.
  OrderedForest induced(const std::vector<int>& verts) const {
    std::vector<Label> ls;
    ls.reserve(verts.size());
    for (int v : verts) ls.push_back(labels_[v]);
    return OrderedForest(height_, std::move(ls));
  }

  // Same labels with the dimension raised to h (zero padding).
  OrderedForest with_height(int h) const {
    if (h < max_level()) throw std::invalid_argument("with_height: too small");
    std::vector<Label> ls = labels_;
    for (auto& l : ls) l.resize(h + 1, 0);
    return OrderedForest(h, std::move(ls));
  }

 private:
  void build() {
    const int n = (int)labels_.size();
    parent_.assign(n, -1);
    children_.assign(n, {});
    level_.assign(n, 0);
    end_.assign(n, n);
    for (int v = 0; v < n; ++v) {
      const Label& l = labels_[v];
      if ((int)l.size() != height_ + 1) throw std::invalid_argument("label dimension mismatch");
      int lv = label_level(l);
      if (lv < 0) throw std::invalid_argument("label with zero root coordinate");
      for (int i = 0; i < (int)l.size(); ++i) {
        if (l[i] < 0) throw std::invalid_argument("negative label coordinate");
        if (i > lv && l[i] != 0) throw std::invalid_argument("label not of the form (x_0..x_i,0..0)");
      }
      level_[v] = lv;
      if (lv > 0) {
        int p = find(label_parent(l));
        if (p < 0) throw std::invalid_argument("label set not closed under parents");
        parent_[v] = p;
        children_[p].push_back(v);
      }
    }
    // children are pushed in increasing order; subtree ends via reverse scan
    for (int v = n - 1; v >= 0; --v) {
      int e = v + 1;
      if (!children_[v].empty()) e = end_[children_[v].back()];
      end_[v] = e;
    }
  }

  int height_ = 0;
  std::vector<Label> labels_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> level_;
  std::vector<int> end_;
};

// ---------------------------------------------------------------------------
// leaves, closures

inline std::vector<int> leaves(const OrderedForest& F) {
  std::vector<int> out;
  for (int v = 0; v < (int)F.size(); ++v)
    if (F.is_leaf(v)) out.push_back(v);
  return out;
}

// vertex indices of A^F(S), sorted
inline std::vector<int> ancestor_set(const OrderedForest& F, const std::vector<int>& S) {
  std::vector<char> mark(F.size(), 0);
  for (int v : S) {
    if (v < 0 || v >= (int)F.size()) throw std::out_of_range("ancestor_closure: vertex not in forest");
    for (int u = v; u >= 0 && !mark[u]; u = F.parent(u)) mark[u] = 1;
  }
  std::vector<int> out;
  for (int v = 0; v < (int)F.size(); ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

inline OrderedForest ancestor_closure(const OrderedForest& F, const std::vector<int>& S) {
  return F.induced(ancestor_set(F, S));
}

// Relabel with consecutive child numbers per the standard labelling.
inline OrderedForest canonical_relabel(const OrderedForest& F) {
  std::vector<Label> ls(F.size());
  int nroot = 0;
  for (int v = 0; v < (int)F.size(); ++v) {
    if (F.is_root(v)) {
      ls[v].assign(F.height() + 1, 0);
      ls[v][0] = ++nroot;
    }
    const auto& ch = F.children(v);
    for (int j = 0; j < (int)ch.size(); ++j) {
      ls[ch[j]] = ls[v];
      ls[ch[j]][F.level(v) + 1] = j + 1;
    }
  }
  return OrderedForest(F.height(), std::move(ls));
}

// F with its roots removed, relabelled; old_index maps new vertex -> F vertex.
inline OrderedForest forest_minus(const OrderedForest& F, std::vector<int>* old_index = nullptr) {
  std::vector<Label> ls;
  std::vector<int> idx;
  int h = std::max(0, F.height() - 1);
  std::vector<Label> lab(F.size());
  int nroot = 0;
  for (int v = 0; v < (int)F.size(); ++v) {
    if (F.is_root(v)) continue;
    int pv = F.parent(v);
    if (F.is_root(pv)) {
      lab[v].assign(h + 1, 0);
      lab[v][0] = ++nroot;
    } else {
      lab[v] = lab[pv];
      const auto& sib = F.children(pv);
      int j = (int)(std::find(sib.begin(), sib.end(), v) - sib.begin());
      lab[v][F.level(pv)] = j + 1;
    }
    ls.push_back(lab[v]);
    idx.push_back(v);
  }
  if (old_index) *old_index = idx;
  return OrderedForest(h, std::move(ls));
}

// ---------------------------------------------------------------------------
// types

struct ForestType {
  // preorder child counts, roots in order
  std::vector<int> code;
  auto operator<=>(const ForestType&) const = default;
  bool operator==(const ForestType&) const = default;
};

inline ForestType type_code(const OrderedForest& F) {
  ForestType t;
  t.code.reserve(F.size());
  for (int v = 0; v < (int)F.size(); ++v) t.code.push_back((int)F.children(v).size());
  return t;
}

inline ForestType type_of(const OrderedForest& F, const std::vector<int>& e) {
  for (int v : e)
    if (v < 0 || v >= (int)F.size() || !F.is_leaf(v)) throw std::invalid_argument("type_of: not a leaf set");
  return type_code(ancestor_closure(F, e));
}

// parent array of the forest encoded by a code; throws on malformed input
inline std::vector<int> code_parents(const ForestType& t) {
  std::vector<int> par(t.code.size(), -1);
  std::vector<std::pair<int, int>> st;  // vertex, remaining children
  for (int v = 0; v < (int)t.code.size(); ++v) {
    if (t.code[v] < 0) throw std::invalid_argument("negative child count");
    while (!st.empty() && st.back().second == 0) st.pop_back();
    if (!st.empty()) {
      par[v] = st.back().first;
      --st.back().second;
    }
    st.push_back({v, t.code[v]});
  }
  while (!st.empty() && st.back().second == 0) st.pop_back();
  if (!st.empty()) throw std::invalid_argument("truncated forest code");
  return par;
}

inline OrderedForest forest_from_code(const ForestType& t, int height = -1) {
  auto par = code_parents(t);
  std::vector<int> lv(par.size(), 0);
  int mx = 0;
  for (int v = 0; v < (int)par.size(); ++v) {
    lv[v] = par[v] < 0 ? 0 : lv[par[v]] + 1;
    mx = std::max(mx, lv[v]);
  }
  if (height < 0) height = mx;
  if (height < mx) throw std::invalid_argument("forest_from_code: height too small");
  std::vector<Label> ls(par.size());
  std::vector<int> nch(par.size(), 0);
  int nroot = 0;
  for (int v = 0; v < (int)par.size(); ++v) {
    if (par[v] < 0) {
      ls[v].assign(height + 1, 0);
      ls[v][0] = ++nroot;
    } else {
      ls[v] = ls[par[v]];
      ls[v][lv[v]] = ++nch[par[v]];
    }
  }
  return OrderedForest(height, std::move(ls));
}

inline int type_roots(const ForestType& t) {
  auto par = code_parents(t);
  return (int)std::count(par.begin(), par.end(), -1);
}

inline int type_leaves(const ForestType& t) { return (int)std::count(t.code.begin(), t.code.end(), 0); }

inline int type_height(const ForestType& t) {
  if (t.code.empty()) return 0;
  return forest_from_code(t).max_level();
}

inline ForestType type_minus(const ForestType& t) {
  if (t.code.empty() || type_height(t) == 0) throw std::invalid_argument("type_minus: height-0 type");
  // dropping the root entries of a preorder code leaves the code of F^-
  auto par = code_parents(t);
  ForestType m;
  for (int v = 0; v < (int)t.code.size(); ++v)
    if (par[v] >= 0) m.code.push_back(t.code[v]);
  return m;
}

namespace detail {
// ordered trees with depth <= h and between 1 and r leaves, as codes
inline void gen_trees(int h, int r, std::map<std::pair<int, int>, std::vector<std::pair<std::vector<int>, int>>>& memo,
                      std::vector<std::pair<std::vector<int>, int>>& out) {
  auto key = std::make_pair(h, r);
  auto it = memo.find(key);
  if (it != memo.end()) {
    out = it->second;
    return;
  }
  std::vector<std::pair<std::vector<int>, int>> res;
  res.push_back({{0}, 1});
  if (h > 0) {
    std::vector<std::pair<std::vector<int>, int>> sub;
    gen_trees(h - 1, r, memo, sub);
    // sequences of k >= 1 subtrees with total leaves <= r
    std::vector<std::pair<std::vector<int>, int>> seqs;  // concatenated code, leaves; children count tracked apart
    struct Item {
      std::vector<int> body;
      int leaves;
      int k;
    };
    std::vector<Item> frontier{{{}, 0, 0}};
    while (!frontier.empty()) {
      std::vector<Item> next;
      for (auto& it2 : frontier) {
        for (auto& s : sub) {
          if (it2.leaves + s.second > r) continue;
          Item n{it2.body, it2.leaves + s.second, it2.k + 1};
          n.body.insert(n.body.end(), s.first.begin(), s.first.end());
          std::vector<int> code{n.k};
          code.insert(code.end(), n.body.begin(), n.body.end());
          res.push_back({code, n.leaves});
          next.push_back(std::move(n));
        }
      }
      frontier = std::move(next);
    }
  }
  memo[key] = res;
  out = res;
}
}  // namespace detail

// Types of leaf subsets of size 1..r in ordered trees of height <= h: every
// ordered tree with depth <= h and at most r leaves arises as A(e).
inline std::vector<ForestType> types_up_to(int h, int r) {
  std::map<std::pair<int, int>, std::vector<std::pair<std::vector<int>, int>>> memo;
  std::vector<std::pair<std::vector<int>, int>> trees;
  detail::gen_trees(h, r, memo, trees);
  std::set<ForestType> s;
  for (auto& t : trees) s.insert(ForestType{t.first});
  return {s.begin(), s.end()};
}

// Balanced d-ary forest with the given number of roots and standard labels.
inline OrderedForest full_forest(int roots, int d, int h) {
  std::vector<Label> ls;
  std::function<void(Label, int)> grow = [&](Label l, int lv) {
    ls.push_back(l);
    if (lv == h) return;
    for (int j = 1; j <= d; ++j) {
      Label c = l;
      c[lv + 1] = j;
      grow(c, lv + 1);
    }
  };
  for (int r = 1; r <= roots; ++r) {
    Label l(h + 1, 0);
    l[0] = r;
    grow(l, 0);
  }
  return OrderedForest(h, std::move(ls));
}

// Balanced trees of height exactly h with between 1 and r leaves.
inline std::vector<ForestType> balanced_tree_types(int h, int r) {
  std::vector<ForestType> out;
  for (auto& t : types_up_to(h, r)) {
    OrderedForest f = forest_from_code(t);
    if (f.max_level() == h && f.is_balanced()) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// monomorphisms

struct Monomorphism {
  std::vector<int> img;  // source vertex -> target vertex
  bool operator==(const Monomorphism&) const = default;
};

inline bool is_monomorphism(const OrderedForest& F, const OrderedForest& G, const Monomorphism& m) {
  if (m.img.size() != F.size()) return false;
  for (int v = 0; v < (int)F.size(); ++v) {
    int w = m.img[v];
    if (w < 0 || w >= (int)G.size()) return false;
    if (v > 0 && !(m.img[v - 1] < w)) return false;  // order preserving, hence injective
    if (F.parent(v) >= 0 && G.parent(w) != m.img[F.parent(v)]) return false;
  }
  return true;
}

namespace detail {
struct MonoSearch {
  const OrderedForest& F;
  const OrderedForest& G;
  const std::vector<int>* fixed;
  std::size_t limit;
  std::vector<Monomorphism>& out;
  std::vector<int> img;
  std::uint64_t nodes = 0;
  std::uint64_t node_budget;
  std::vector<int> next_fixed;  // next pinned source index after i, or -1

  void run(int i) {
    if (out.size() >= limit || nodes > node_budget) return;
    ++nodes;
    const int m = (int)F.size(), n = (int)G.size();
    if (i == m) {
      out.push_back({img});
      return;
    }
    int lo = i == 0 ? 0 : img[i - 1] + 1;
    int hi = n - (m - i);  // leave room for the rest
    if (!next_fixed.empty() && next_fixed[i] >= 0) hi = std::min(hi, (*fixed)[next_fixed[i]] - (next_fixed[i] - i));
    auto try_w = [&](int w) {
      if (w < lo || w > hi) return;
      img[i] = w;
      run(i + 1);
    };
    if (fixed && (*fixed)[i] >= 0) {
      int w = (*fixed)[i];
      int p = F.parent(i);
      if (p >= 0 && G.parent(w) != img[p]) return;
      try_w(w);
      return;
    }
    int p = F.parent(i);
    if (p >= 0) {
      for (int w : G.children(img[p])) {
        if (w > hi) break;
        if (w >= lo) try_w(w);
        if (out.size() >= limit) return;
      }
    } else {
      for (int w = lo; w <= hi; ++w) {
        try_w(w);
        if (out.size() >= limit) return;
      }
    }
  }
};
}  // namespace detail

// All order- and edge-preserving injections F -> G, up to limit; a fixed
// entry >= 0 pins the image of that source vertex.
inline std::vector<Monomorphism> find_monomorphisms(const OrderedForest& F, const OrderedForest& G,
                                                    std::size_t limit = 1000,
                                                    const std::vector<int>* fixed = nullptr,
                                                    std::uint64_t node_budget = 50'000'000) {
  std::vector<Monomorphism> out;
  if (F.size() > G.size()) return out;
  if (fixed && fixed->size() != F.size()) throw std::invalid_argument("fixed map size mismatch");
  detail::MonoSearch s{F, G, fixed, limit, out, std::vector<int>(F.size(), -1), 0, node_budget, {}};
  if (fixed) {
    s.next_fixed.assign(F.size(), -1);
    for (int i = (int)F.size() - 2; i >= 0; --i)
      s.next_fixed[i] = (*fixed)[i + 1] >= 0 ? i + 1 : s.next_fixed[i + 1];
  }
  s.run(0);
  return out;
}

inline std::vector<Monomorphism> find_isomorphisms(const OrderedForest& F, const OrderedForest& G,
                                                   std::size_t limit = 10) {
  // a bijective monomorphism is an isomorphism once the edge counts agree
  if (F.size() != G.size() || F.roots().size() != G.roots().size()) return {};
  return find_monomorphisms(F, G, limit);
}

inline bool isomorphic(const OrderedForest& F, const OrderedForest& G) { return type_code(F) == type_code(G); }

// ---------------------------------------------------------------------------
// extendible paths and P-extensions (trees need not be balanced here)

using TreePath = std::vector<int>;

inline int latest_child(const OrderedForest& S, int v) {
  const auto& ch = S.children(v);
  return ch.empty() ? -1 : ch.back();
}

inline TreePath extendible_path_from(const OrderedForest& S, int v) {
  TreePath p{v};
  for (int c = latest_child(S, v); c >= 0; c = latest_child(S, c)) p.push_back(c);
  return p;
}

inline std::vector<TreePath> extendible_paths(const OrderedForest& S) {
  std::vector<TreePath> out;
  for (int v = 0; v < (int)S.size(); ++v) out.push_back(extendible_path_from(S, v));
  return out;
}

// Definition check: increasing parent chain, and no vertex after v_k is comparable to v_1.
inline bool is_extendible(const OrderedForest& S, const TreePath& P) {
  if (P.empty()) return false;
  for (std::size_t i = 1; i < P.size(); ++i)
    if (S.parent(P[i]) != P[i - 1]) return false;
  for (int x = P.back() + 1; x < (int)S.size(); ++x)
    if (S.comparable(x, P.front())) return false;
  return true;
}

// Label for a new last child of v.
inline Label fresh_child_label(const OrderedForest& S, int v) {
  int lv = S.level(v);
  if (lv + 1 > S.height()) throw std::invalid_argument("fresh_child_label: no room below vertex");
  Label l = S.label(v);
  int c = latest_child(S, v);
  l[lv + 1] = c < 0 ? 1 : S.label(c)[lv + 1] + 1;
  return l;
}

inline OrderedForest p_extension(const OrderedForest& S, const TreePath& P, const Label& y) {
  if (!is_extendible(S, P)) throw std::invalid_argument("p_extension: path not extendible");
  if (S.contains(y)) throw std::invalid_argument("p_extension: label collision");
  if ((int)y.size() != S.height() + 1) throw std::invalid_argument("p_extension: label dimension");
  if (label_parent(y) != S.label(P.front()) || label_level(y) != S.level(P.front()) + 1)
    throw std::invalid_argument("p_extension: new vertex is not a child of v_1");
  std::vector<Label> ls = S.labels();
  ls.push_back(y);
  OrderedForest T(S.height(), std::move(ls));
  int yi = T.find(y);
  if (yi == 0 || T.label(yi - 1) != S.label(P.back()))
    throw std::invalid_argument("p_extension: new vertex is not the successor of v_k");
  return T;
}

inline OrderedForest p_extension(const OrderedForest& S, const TreePath& P) {
  return p_extension(S, P, fresh_child_label(S, P.front()));
}

// One more leaf y in S; no constraint on where y sits among its siblings.
inline OrderedForest add_leaf(const OrderedForest& S, const Label& y) {
  if (S.contains(y)) throw std::invalid_argument("add_leaf: label collision");
  if ((int)y.size() != S.height() + 1) throw std::invalid_argument("add_leaf: label dimension");
  if (label_level(y) < 1 || !S.contains(label_parent(y))) throw std::invalid_argument("add_leaf: parent missing");
  std::vector<Label> ls = S.labels();
  ls.push_back(y);
  return OrderedForest(S.height(), std::move(ls));
}

// If T is a P-extension of S, the path P (as vertices of S); otherwise empty.
inline TreePath p_extension_path(const OrderedForest& S, const OrderedForest& T) {
  if (T.size() != S.size() + 1 || T.height() != S.height()) return {};
  int y = -1;
  for (int v = 0; v < (int)T.size(); ++v)
    if (!S.contains(T.label(v))) {
      if (y >= 0) return {};
      y = v;
    }
  if (y < 0 || T.is_root(y)) return {};
  for (const auto& l : S.labels())
    if (!T.contains(l)) return {};
  TreePath P = extendible_path_from(S, S.find(T.label(T.parent(y))));
  if (T.label(y - 1) != S.label(P.back())) return {};
  return P;
}

struct ExtensionStep {
  Label parent;        // v_1, the parent of the new vertex
  Label vertex;        // the added vertex
  bool p_extension;    // the step is a P-extension along the latest-child path from v_1
};

// S <= T sharing a root; one-leaf steps (increasing order) that rebuild T from S.
inline std::vector<ExtensionStep> extension_sequence(const OrderedForest& S, const OrderedForest& T) {
  if (!S.is_tree() || !T.is_tree() || S.label(0) != T.label(0) || S.height() != T.height())
    throw std::invalid_argument("extension_sequence: trees must share root and height");
  for (const auto& l : S.labels())
    if (!T.contains(l)) throw std::invalid_argument("extension_sequence: S is not a subtree of T");
  std::vector<ExtensionStep> seq;
  OrderedForest cur = S;
  for (const auto& l : T.labels()) {
    if (S.contains(l)) continue;
    OrderedForest nxt = add_leaf(cur, l);
    bool pe = !p_extension_path(cur, nxt).empty();
    seq.push_back({label_parent(l), l, pe});
    cur = std::move(nxt);
  }
  return seq;
}

inline OrderedForest replay_extensions(const OrderedForest& S, const std::vector<ExtensionStep>& seq) {
  OrderedForest cur = S;
  for (const auto& st : seq) {
    int v1 = cur.find(st.parent);
    if (v1 < 0) throw std::invalid_argument("replay: parent missing");
    if (st.p_extension)
      cur = p_extension(cur, extendible_path_from(cur, v1), st.vertex);
    else
      cur = add_leaf(cur, st.vertex);
  }
  return cur;
}

// f: S -> T isomorphism; S2 a P_S-extension of S, T2 a P_T-extension of T.
inline Monomorphism extend_isomorphism(const OrderedForest& S, const OrderedForest& T, const Monomorphism& f,
                                       const OrderedForest& S2, const OrderedForest& T2) {
  if (S.size() != T.size() || !is_monomorphism(S, T, f)) throw std::invalid_argument("extend_isomorphism: f not an isomorphism");
  if (S2.size() != S.size() + 1 || T2.size() != T.size() + 1) throw std::invalid_argument("extend_isomorphism: not one-vertex extensions");
  auto added = [](const OrderedForest& A, const OrderedForest& B) {
    for (int v = 0; v < (int)B.size(); ++v)
      if (!A.contains(B.label(v))) return v;
    return -1;
  };
  int s2 = added(S, S2), t2 = added(T, T2);
  if (s2 < 0 || t2 < 0) throw std::invalid_argument("extend_isomorphism: S2/T2 do not extend S/T");
  TreePath ps = extendible_path_from(S, S.find(S2.label(S2.parent(s2))));
  TreePath pt = extendible_path_from(T, T.find(T2.label(T2.parent(t2))));
  if (ps.size() != pt.size()) throw std::invalid_argument("extend_isomorphism: f(P_S) != P_T");
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (f.img[ps[i]] != pt[i]) throw std::invalid_argument("extend_isomorphism: f(P_S) != P_T");
  Monomorphism g;
  g.img.assign(S2.size(), -1);
  for (int v = 0; v < (int)S2.size(); ++v) {
    if (v == s2) {
      g.img[v] = t2;
      continue;
    }
    int sv = S.find(S2.label(v));
    g.img[v] = T2.find(T.label(f.img[sv]));
  }
  if (!is_monomorphism(S2, T2, g)) throw std::logic_error("extend_isomorphism: result does not verify");
  return g;
}

// ---------------------------------------------------------------------------
// text form: one line per vertex, comma separated label

inline std::string to_text(const OrderedForest& F) {
  std::ostringstream os;
  os << "height " << F.height() << '\n';
  for (const auto& l : F.labels()) {
    for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
    os << '\n';
  }
  return os.str();
}

inline OrderedForest forest_from_text(const std::string& s) {
  std::istringstream is(s);
  std::string word;
  int h = -1;
  is >> word >> h;
  if (word != "height" || h < 0) throw std::invalid_argument("forest text: missing height line");
  std::vector<Label> ls;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Label l;
    std::istringstream ls2(line);
    std::string tok;
    while (std::getline(ls2, tok, ',')) l.push_back(std::stoi(tok));
    ls.push_back(l);
  }
  return OrderedForest(h, std::move(ls));
}

}  // namespace tpr

#endif  // TPR_FOREST_HPP
