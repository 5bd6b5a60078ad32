#ifndef TPR_SFOREST_HPP
#define TPR_SFOREST_HPP

// Forests over pairs (x,s) of a ground set [n], plus the ground graph and its
// BFS distance oracle.

#include <tpr/forest.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tpr {

constexpr int INF = std::numeric_limits<int>::max() / 4;

class GroundGraph {
 public:
  GroundGraph() : cache_(std::make_shared<Cache>()) {}
  explicit GroundGraph(int n) : adj_(n), cache_(std::make_shared<Cache>()) { cache_->rows.resize(n); }
  GroundGraph(int n, const std::vector<std::pair<int, int>>& edges) : GroundGraph(n) {
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
      if (u == v) continue;
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
  }

  int n() const { return (int)adj_.size(); }
  const std::vector<int>& adj(int v) const { return adj_[v]; }
  int degree(int v) const { return (int)adj_[v].size(); }
  int max_degree() const {
    int m = 0;
    for (auto& a : adj_) m = std::max(m, (int)a.size());
    return m;
  }
  bool has_edge(int u, int v) const { return std::binary_search(adj_[u].begin(), adj_[u].end(), v); }
  std::size_t edge_count() const {
    std::size_t m = 0;
    for (auto& a : adj_) m += a.size();
    return m / 2;
  }
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n(); ++u)
      for (int v : adj_[u])
        if (u < v) out.push_back({u, v});
    return out;
  }

  // BFS row from s, cached; INF marks unreachable vertices
  const std::vector<int>& distances_from(int s) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto& row = cache_->rows[s];
    if (!row) {
      auto d = std::make_unique<std::vector<int>>(n(), INF);
      std::queue<int> q;
      (*d)[s] = 0;
      q.push(s);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : adj_[u])
          if ((*d)[w] == INF) {
            (*d)[w] = (*d)[u] + 1;
            q.push(w);
          }
      }
      row = std::move(d);
    }
    return *row;
  }
  int dist(int u, int v) const { return distances_from(u)[v]; }

  std::vector<int> ball(int v, int k) const {
    std::vector<int> out;
    const auto& d = distances_from(v);
    for (int u = 0; u < n(); ++u)
      if (d[u] <= k) out.push_back(u);
    return out;
  }

  // N(X): vertices outside X with a neighbour in X
  std::vector<int> neighbourhood(const std::vector<int>& X) const {
    std::vector<char> in(n(), 0), mark(n(), 0);
    for (int x : X) in[x] = 1;
    std::vector<int> out;
    for (int x : X)
      for (int w : adj_[x])
        if (!in[w] && !mark[w]) {
          mark[w] = 1;
          out.push_back(w);
        }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool connected() const {
    if (n() == 0) return true;
    const auto& d = distances_from(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x == INF; });
  }

  int diameter() const {
    int m = 0;
    for (int v = 0; v < n(); ++v)
      for (int x : distances_from(v)) m = std::max(m, x);
    return m;
  }

  // G^k: u ~ v iff 1 <= d(u,v) <= k
  GroundGraph power(int k) const {
    std::vector<std::pair<int, int>> es;
    for (int u = 0; u < n(); ++u) {
      const auto& d = distances_from(u);
      for (int v = u + 1; v < n(); ++v)
        if (d[v] <= k) es.push_back({u, v});
    }
    return GroundGraph(n(), es);
  }

  GroundGraph induced(const std::vector<int>& verts) const {
    std::vector<int> idx(n(), -1);
    for (int i = 0; i < (int)verts.size(); ++i) idx[verts[i]] = i;
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i < (int)verts.size(); ++i)
      for (int w : adj_[verts[i]])
        if (idx[w] > i) es.push_back({i, idx[w]});
    return GroundGraph((int)verts.size(), es);
  }

  std::string to_text() const {
    std::ostringstream os;
    auto es = edges();
    os << n() << ' ' << es.size() << '\n';
    for (auto [u, v] : es) os << u << ' ' << v << '\n';
    return os.str();
  }

  static GroundGraph from_text(const std::string& s) {
    std::istringstream is(s);
    int n = -1;
    std::size_t m = 0;
    if (!(is >> n >> m) || n < 0) throw std::invalid_argument("graph text: bad header");
    std::vector<std::pair<int, int>> es(m);
    for (auto& e : es)
      if (!(is >> e.first >> e.second)) throw std::invalid_argument("graph text: truncated edge list");
    return GroundGraph(n, es);
  }

 private:
  struct Cache {
    std::mutex mu;
    std::vector<std::unique_ptr<std::vector<int>>> rows;
  };
  std::vector<std::vector<int>> adj_;
  std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------

// An S-forest on the ground set [n]: the tree of root s carries label
// coordinate x_0 = s+1, and pi holds the first coordinate of every vertex.
class SForest {
 public:
  SForest() = default;

  SForest(int ground, OrderedForest f, std::vector<int> pi) : n_(ground), f_(std::move(f)), pi_(std::move(pi)) {
    validate();
  }

  // Build from (label, pi) rows in any order.
  static SForest from_rows(int ground, int height, std::vector<std::pair<Label, int>> rows) {
    std::sort(rows.begin(), rows.end());
    std::vector<Label> ls;
    std::vector<int> p;
    for (auto& [l, x] : rows) {
      if (!ls.empty() && ls.back() == l) throw std::invalid_argument("repeated vertex label");
      ls.push_back(l);
      p.push_back(x);
    }
    return SForest(ground, OrderedForest(height, std::move(ls)), std::move(p));
  }

  // Empty forest of the given height.
  static SForest empty(int ground, int height) { return SForest(ground, OrderedForest(height, {}), {}); }

  int ground_size() const { return n_; }
  int height() const { return f_.height(); }
  std::size_t size() const { return f_.size(); }
  const OrderedForest& forest() const { return f_; }
  const std::vector<int>& pi_array() const { return pi_; }

  int pi(int v) const { return pi_[v]; }
  int pi0(int v) const { return f_.label(v)[0] - 1; }
  int pi_level(int v, int i) const {
    if (i < 0 || i > f_.level(v)) throw std::invalid_argument("projection level above vertex level");
    return pi_[f_.ancestor_at(v, i)];
  }
  std::pair<int, int> pair(int v) const { return {pi_[v], pi0(v)}; }

  int root_vertex(int s) const {
    if (s < 0 || s >= n_) return -1;
    Label l(height() + 1, 0);
    l[0] = s + 1;
    return f_.find(l);
  }
  bool has_root(int s) const { return root_vertex(s) >= 0; }

  std::vector<int> root_set() const {
    std::vector<int> out;
    for (int r : f_.roots()) out.push_back(pi0(r));
    return out;
  }

  // vertex with pair (x, s), or -1
  int find_pair(int x, int s) const {
    int r = root_vertex(s);
    if (r < 0) return -1;
    for (int v = r; v < f_.subtree_end(r); ++v)
      if (pi_[v] == x) return v;
    return -1;
  }

  // vertex indices of F(s), in order
  std::vector<int> tree_vertices(int s) const {
    int r = root_vertex(s);
    if (r < 0) throw std::invalid_argument("no tree rooted at this element");
    std::vector<int> out;
    for (int v = r; v < f_.subtree_end(r); ++v) out.push_back(v);
    return out;
  }

  std::vector<int> tree_leaves(int s) const {
    std::vector<int> out;
    for (int v : tree_vertices(s))
      if (f_.is_leaf(v)) out.push_back(v);
    return out;
  }

  // Sub-S-forest on a prefix-closed vertex subset; labels and pi kept.
  SForest induced(std::vector<int> verts) const {
    std::sort(verts.begin(), verts.end());
    std::vector<Label> ls;
    std::vector<int> p;
    for (int v : verts) {
      ls.push_back(f_.label(v));
      p.push_back(pi_[v]);
    }
    return SForest(n_, OrderedForest(height(), std::move(ls)), std::move(p));
  }

  SForest tree_at(int s) const { return induced(tree_vertices(s)); }

  // index in this forest of each vertex of a sub-S-forest (matching labels)
  std::vector<int> locate(const SForest& sub) const {
    std::vector<int> out;
    for (int v = 0; v < (int)sub.size(); ++v) out.push_back(f_.find(sub.forest().label(v)));
    return out;
  }

  bool operator==(const SForest& o) const { return n_ == o.n_ && f_ == o.f_ && pi_ == o.pi_; }

  SForest with_height(int h) const { return SForest(n_, f_.with_height(h), pi_); }

 private:
  void validate() {
    if (pi_.size() != f_.size()) throw std::invalid_argument("pi array size mismatch");
    for (int v = 0; v < (int)f_.size(); ++v) {
      int s = f_.label(v)[0] - 1;
      if (s < 0 || s >= n_) throw std::invalid_argument("root coordinate outside ground set");
      if (pi_[v] < 0 || pi_[v] >= n_) throw std::invalid_argument("vertex outside ground set");
      if (f_.is_root(v) && pi_[v] != s) throw std::invalid_argument("root is not of the form (s,s)");
    }
    // pairs are distinct: pi is injective inside each tree
    for (int r : f_.roots()) {
      std::vector<int> seen;
      for (int v = r; v < f_.subtree_end(r); ++v) seen.push_back(pi_[v]);
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument("repeated pair (x,s) inside a tree");
    }
  }

  int n_ = 0;
  OrderedForest f_;
  std::vector<int> pi_;
};

// Combine trees with distinct roots into one forest (heights padded to the max).
inline SForest forest_of_trees(int ground, const std::vector<SForest>& trees) {
  int h = 0;
  for (const auto& t : trees) h = std::max(h, t.height());
  std::vector<std::pair<Label, int>> rows;
  for (const auto& t : trees)
    for (int v = 0; v < (int)t.size(); ++v) {
      Label l = t.forest().label(v);
      l.resize(h + 1, 0);
      rows.push_back({l, t.pi(v)});
    }
  return SForest::from_rows(ground, h, std::move(rows));
}

// Star forest: root s with children (c, s) for the listed c, in order.
inline SForest star_forest(int ground, const std::vector<std::pair<int, std::vector<int>>>& stars) {
  std::vector<std::pair<Label, int>> rows;
  for (const auto& [s, kids] : stars) {
    rows.push_back({{s + 1, 0}, s});
    for (int j = 0; j < (int)kids.size(); ++j) rows.push_back({{s + 1, j + 1}, kids[j]});
  }
  return SForest::from_rows(ground, 1, std::move(rows));
}

inline OrderedForest subtree_at(const SForest& F, int s) { return F.tree_at(s).forest(); }

inline int project(const SForest& F, int v, int i) { return F.pi_level(v, i); }

// max over pairs of d_G between root projections; INF if some pair is unreachable
inline int norm(const GroundGraph& G, const SForest& F, const std::vector<int>& e) {
  std::vector<int> roots;
  for (int v : e) roots.push_back(F.pi0(v));
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  int m = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& d = G.distances_from(roots[i]);
    for (std::size_t j = i + 1; j < roots.size(); ++j) m = std::max(m, d[roots[j]]);
  }
  return m;
}

// rd((x,y)) = (x, pi_1((x,y))) for non-root vertices
inline std::pair<int, int> root_delete(const SForest& F, int v) {
  if (F.forest().is_root(v)) throw std::invalid_argument("root_delete applied to a root");
  return {F.pi(v), F.pi_level(v, 1)};
}

// (v; T_1; ...; T_k). Trees are single-tree S-forests, passed in increasing root order.
inline SForest augment_tree(int v, const std::vector<SForest>& trees) {
  if (trees.empty()) throw std::invalid_argument("augment_tree: no subtrees");
  int n = trees[0].ground_size();
  int h = 0;
  std::vector<char> used(n, 0);
  used[v] = 1;
  int prev_root = -1;
  for (const auto& t : trees) {
    if (t.ground_size() != n) throw std::invalid_argument("augment_tree: ground sets differ");
    if (!t.forest().is_tree()) throw std::invalid_argument("augment_tree: input is not a single tree");
    int u = t.pi0(0);
    if (u == v) throw std::invalid_argument("augment_tree: subtree rooted at the new root");
    if (u <= prev_root) throw std::invalid_argument("augment_tree: subtrees not in increasing root order");
    prev_root = u;
    for (int w = 0; w < (int)t.size(); ++w) {
      if (used[t.pi(w)]) throw std::invalid_argument("augment_tree: pi-images not pairwise disjoint");
      used[t.pi(w)] = 1;
    }
    h = std::max(h, t.height());
  }
  std::vector<Label> ls;
  std::vector<int> pi;
  Label root(h + 2, 0);
  root[0] = v + 1;
  ls.push_back(root);
  pi.push_back(v);
  for (int j = 0; j < (int)trees.size(); ++j) {
    const auto& t = trees[j];
    for (int w = 0; w < (int)t.size(); ++w) {
      const Label& old = t.forest().label(w);
      Label l(h + 2, 0);
      l[0] = v + 1;
      l[1] = j + 1;
      for (int c = 1; c < (int)old.size(); ++c) l[c + 1] = old[c];
      ls.push_back(l);
      pi.push_back(t.pi(w));
    }
  }
  return SForest(n, OrderedForest(h + 1, std::move(ls)), std::move(pi));
}

struct AugmentationReport {
  bool ok = true;
  int root = -1;    // offending root element
  int vertex = -1;  // offending vertex of Fnew
  std::string reason;
};

// Fnew augments Fold: for each root v, rd maps Fnew(v)^- into Fold as a monomorphism.
inline AugmentationReport is_augmentation(const SForest& Fnew, const SForest& Fold) {
  AugmentationReport rep;
  auto fail = [&](int s, int v, std::string why) {
    rep.ok = false;
    rep.root = s;
    rep.vertex = v;
    rep.reason = std::move(why);
    return rep;
  };
  if (Fnew.ground_size() != Fold.ground_size()) return fail(-1, -1, "ground sets differ");
  const auto& F = Fnew.forest();
  const auto& G = Fold.forest();
  for (int r : F.roots()) {
    int s = Fnew.pi0(r);
    int prev = -1;
    for (int v = r + 1; v < F.subtree_end(r); ++v) {
      auto [x, y] = root_delete(Fnew, v);
      int w = Fold.find_pair(x, y);
      if (w < 0) return fail(s, v, "rd lands outside the old forest");
      if (w <= prev) return fail(s, v, "rd does not preserve order");
      prev = w;
      int p = F.parent(v);
      if (!F.is_root(p)) {
        auto [px, py] = root_delete(Fnew, p);
        if (G.parent(w) != Fold.find_pair(px, py)) return fail(s, v, "rd does not map an edge to an edge");
      }
    }
  }
  return rep;
}

inline bool is_k_short(const SForest& F, const GroundGraph& G, int i, int k) {
  if (i < 1 || i > F.height()) throw std::invalid_argument("is_k_short: level out of range");
  const auto& f = F.forest();
  for (int v = 0; v < (int)f.size(); ++v)
    if (f.level(v) == i && G.dist(F.pi(f.parent(v)), F.pi(v)) > k) return false;
  return true;
}

inline bool all_levels_k_short(const SForest& F, const GroundGraph& G, int k) {
  for (int i = 1; i <= F.height(); ++i)
    if (!is_k_short(F, G, i, k)) return false;
  return true;
}

struct SeparationReport {
  bool ok = true;
  int u = -1, v = -1;  // roots
  int shared = -1;     // common pi value
};

inline SeparationReport is_d_separated(const SForest& F, const GroundGraph& G, int d) {
  SeparationReport rep;
  auto roots = F.root_set();
  std::vector<std::vector<int>> img(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (int v : F.tree_vertices(roots[i])) img[i].push_back(F.pi(v));
    std::sort(img[i].begin(), img[i].end());
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& dist = G.distances_from(roots[i]);
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (dist[roots[j]] > d) continue;
      std::vector<int> common;
      std::set_intersection(img[i].begin(), img[i].end(), img[j].begin(), img[j].end(), std::back_inserter(common));
      if (!common.empty()) {
        rep.ok = false;
        rep.u = roots[i];
        rep.v = roots[j];
        rep.shared = common[0];
        return rep;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// edges of G^t (x) F in the norm form: r-sets of leaves with ||e|| <= t

// Calls fn on each edge (sorted leaf indices) until fn returns false or the
// budget is spent; returns true iff the enumeration ran to completion.
inline bool for_each_norm_edge(const GroundGraph& G, const SForest& F, int t, int r,
                               const std::function<bool(const std::vector<int>&)>& fn,
                               std::uint64_t budget = 100'000'000) {
  auto L = leaves(F.forest());
  std::vector<int> cur;
  std::vector<int> roots;  // root of each chosen leaf
  std::uint64_t steps = 0;
  bool stop = false;
  std::function<void(std::size_t)> go = [&](std::size_t from) {
    if (stop) return;
    if ((int)cur.size() == r) {
      if (!fn(cur)) stop = true;
      return;
    }
    for (std::size_t i = from; i + (r - cur.size()) <= L.size(); ++i) {
      if (++steps > budget) {
        stop = true;
        return;
      }
      int s = F.pi0(L[i]);
      bool ok = true;
      for (int q : roots)
        if (G.dist(q, s) > t) {
          ok = false;
          break;
        }
      if (!ok) continue;
      cur.push_back(L[i]);
      roots.push_back(s);
      go(i + 1);
      cur.pop_back();
      roots.pop_back();
      if (stop) return;
    }
  };
  go(0);
  return steps <= budget;
}

// ---------------------------------------------------------------------------

struct AugmentationPropertiesReport {
  bool pi_commutes = true;          // (i)
  bool norm_drop_bounded = true;    // (ii)
  bool edges_to_edges = true;       // (iii)
  bool norm_exhaustive = true;      // (ii) checked on every pair
  bool edges_exhaustive = true;     // (iii) checked on every edge
  std::size_t pairs_checked = 0;
  std::size_t edges_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return pi_commutes && norm_drop_bounded && edges_to_edges; }
};

// (ii) reduces to pairs: ||S|| and ||rd(S)|| are both maxima over pairs.
inline AugmentationPropertiesReport augmentation_properties_check(const SForest& Fnew, const SForest& Fold,
                                                                  const GroundGraph& G, int k, int s, int t, int r,
                                                                  std::size_t threshold = 10'000,
                                                                  std::uint64_t seed = 1) {
  auto aug = is_augmentation(Fnew, Fold);
  if (!aug.ok) throw std::invalid_argument("augmentation_properties_check: not an augmentation (" + aug.reason + ")");
  if (Fnew.height() >= 1 && !is_k_short(Fnew, G, 1, k))
    throw std::invalid_argument("augmentation_properties_check: level 1 not k-short");
  if (!is_d_separated(Fnew, G, s).ok) throw std::invalid_argument("augmentation_properties_check: not s-separated");
  if (t < s + 2 * k) throw std::invalid_argument("augmentation_properties_check: t < s + 2k");

  AugmentationPropertiesReport rep;
  const auto& f = Fnew.forest();
  for (int v = 0; v < (int)f.size(); ++v) {
    if (f.is_root(v)) continue;
    auto [x, y] = root_delete(Fnew, v);
    int w = Fold.find_pair(x, y);
    if (w < 0 || Fold.pi(w) != Fnew.pi(v) || Fold.pi0(w) != Fnew.pi_level(v, 1)) {
      rep.pi_commutes = false;
      rep.violations.push_back("(i) at vertex " + std::to_string(v));
    }
  }

  auto L = leaves(f);
  auto pair_ok = [&](int a, int b) {
    int lhs = G.dist(Fnew.pi0(a), Fnew.pi0(b));
    int rhs = G.dist(Fnew.pi_level(a, 1), Fnew.pi_level(b, 1));
    ++rep.pairs_checked;
    if (rhs < INF && lhs < rhs - 2 * k) {
      rep.norm_drop_bounded = false;
      rep.violations.push_back("(ii) at leaves " + std::to_string(a) + "," + std::to_string(b));
    }
  };
  std::size_t npairs = L.size() * (L.size() - (L.empty() ? 0 : 1)) / 2;
  std::mt19937_64 rng(seed);
  if (npairs <= threshold) {
    for (std::size_t i = 0; i < L.size(); ++i)
      for (std::size_t j = i + 1; j < L.size(); ++j) pair_ok(L[i], L[j]);
  } else {
    rep.norm_exhaustive = false;
    std::uniform_int_distribution<std::size_t> pick(0, L.size() - 1);
    for (std::size_t it = 0; it < threshold; ++it) {
      std::size_t i = pick(rng), j = pick(rng);
      if (i != j) pair_ok(L[i], L[j]);
    }
  }

  const auto& g = Fold.forest();
  auto edge_ok = [&](const std::vector<int>& e) {
    ++rep.edges_checked;
    std::vector<int> img;
    for (int v : e) {
      auto [x, y] = root_delete(Fnew, v);
      int w = Fold.find_pair(x, y);
      if (w < 0 || !g.is_leaf(w)) {
        img.clear();
        break;
      }
      img.push_back(w);
    }
    std::sort(img.begin(), img.end());
    bool good = (int)img.size() == r && std::adjacent_find(img.begin(), img.end()) == img.end() &&
                norm(G, Fold, img) <= t;
    if (!good) {
      rep.edges_to_edges = false;
      std::string msg = "(iii) at edge";
      for (int v : e) msg += " " + std::to_string(v);
      rep.violations.push_back(msg);
    }
    return rep.violations.size() < 50 && rep.edges_checked < threshold;
  };
  bool complete = for_each_norm_edge(G, Fnew, s, r, edge_ok);
  if (!complete || rep.edges_checked >= threshold) rep.edges_exhaustive = false;
  return rep;
}

// ---------------------------------------------------------------------------
// text form: "sforest <n> <height>" then one "x label" line per vertex

inline std::string to_text(const SForest& F) {
  std::ostringstream os;
  os << "sforest " << F.ground_size() << ' ' << F.height() << '\n';
  for (int v = 0; v < (int)F.size(); ++v) {
    os << F.pi(v);
    const auto& l = F.forest().label(v);
    for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : " ") << l[i];
    os << '\n';
  }
  return os.str();
}

inline SForest sforest_from_text(const std::string& s) {
  std::istringstream is(s);
  std::string word;
  int n = -1, h = -1;
  if (!(is >> word >> n >> h) || word != "sforest" || n < 0 || h < 0)
    throw std::invalid_argument("sforest text: bad header");
  std::vector<std::pair<Label, int>> rows;
  int x;
  std::string lab;
  while (is >> x >> lab) {
    Label l;
    std::istringstream ls(lab);
    std::string tok;
    while (std::getline(ls, tok, ',')) l.push_back(std::stoi(tok));
    rows.push_back({l, x});
  }
  return SForest::from_rows(n, h, std::move(rows));
}

}  // namespace tpr

#endif  // TPR_SFOREST_HPP
