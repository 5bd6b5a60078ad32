#ifndef TPR_HYPERGRAPH_HPP
#define TPR_HYPERGRAPH_HPP

// r-uniform hypergraphs on [n], tight walks, powers, tensors with S-forests
// and blow-ups.

#include <tpr/sforest.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace tpr {

using Edge = std::vector<int>;  // sorted, distinct

struct EdgeHash {
  std::size_t operator()(const std::vector<int>& e) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int x : e) {
      h ^= (std::uint64_t)(unsigned)x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return (std::size_t)h;
  }
};

class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(int r, int n) : r_(r), n_(n), inc_(n) {
    if (r < 2) throw std::invalid_argument("uniformity must be at least 2");
  }
  Hypergraph(int r, int n, std::vector<Edge> edges) : Hypergraph(r, n) {
    for (auto& e : edges) add_edge(std::move(e));
  }

  int r() const { return r_; }
  int n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_[i]; }
  const std::vector<int>& incident(int v) const { return inc_[v]; }
  int degree(int v) const { return (int)inc_[v].size(); }
  int max_degree() const {
    int m = 0;
    for (auto& a : inc_) m = std::max(m, (int)a.size());
    return m;
  }

  // index of the edge on this vertex set (any order), or -1
  int edge_index(std::vector<int> e) const {
    std::sort(e.begin(), e.end());
    auto it = index_.find(e);
    return it == index_.end() ? -1 : it->second;
  }
  bool has_edge(const std::vector<int>& e) const { return edge_index(e) >= 0; }

  // returns the edge index; duplicates are ignored
  int add_edge(Edge e) {
    std::sort(e.begin(), e.end());
    if ((int)e.size() != r_) throw std::invalid_argument("edge size differs from uniformity");
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw std::invalid_argument("edge with repeated vertex");
    for (int x : e)
      if (x < 0 || x >= n_) throw std::out_of_range("edge vertex out of range");
    auto it = index_.find(e);
    if (it != index_.end()) return it->second;
    int id = (int)edges_.size();
    for (int x : e) inc_[x].push_back(id);
    index_.emplace(e, id);
    edges_.push_back(std::move(e));
    return id;
  }

  bool operator==(const Hypergraph& o) const {
    if (r_ != o.r_ || n_ != o.n_ || edges_.size() != o.edges_.size()) return false;
    for (const auto& e : edges_)
      if (!o.has_edge(e)) return false;
    return true;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << r_ << ' ' << n_ << ' ' << edges_.size() << '\n';
    for (const auto& e : edges_) {
      for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
      os << '\n';
    }
    return os.str();
  }

  static Hypergraph from_text(const std::string& s) {
    std::istringstream is(s);
    int r = 0, n = 0;
    std::size_t m = 0;
    if (!(is >> r >> n >> m)) throw std::invalid_argument("hypergraph text: bad header");
    Hypergraph H(r, n);
    for (std::size_t i = 0; i < m; ++i) {
      Edge e(r);
      for (auto& x : e)
        if (!(is >> x)) throw std::invalid_argument("hypergraph text: truncated edge list");
      H.add_edge(e);
    }
    return H;
  }

 private:
  int r_ = 2, n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> inc_;
  std::unordered_map<Edge, int, EdgeHash> index_;
};

// Colours 0..s-1 indexed by edge index of the host.
struct Colouring {
  int palette = 1;
  std::vector<int> colour;

  int of(const Hypergraph& H, const std::vector<int>& e) const {
    int i = H.edge_index(e);
    if (i < 0) throw std::invalid_argument("colouring queried on a non-edge");
    return colour[i];
  }

  static Colouring constant(const Hypergraph& H, int c = 0, int palette = 1) {
    return {palette, std::vector<int>(H.edge_count(), c)};
  }

  static Colouring from_function(const Hypergraph& H, int palette, const std::function<int(const Edge&)>& f) {
    Colouring c{palette, {}};
    for (const auto& e : H.edges()) {
      int x = f(e);
      if (x < 0 || x >= palette) throw std::out_of_range("colour outside palette");
      c.colour.push_back(x);
    }
    return c;
  }

  std::string to_text(const Hypergraph& H) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < H.edge_count(); ++i) {
      for (int x : H.edge((int)i)) os << x << ' ';
      os << colour[i] << '\n';
    }
    return os.str();
  }

  static Colouring from_text(const Hypergraph& H, const std::string& s, int palette) {
    Colouring c{palette, std::vector<int>(H.edge_count(), -1)};
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::vector<int> xs;
      int x;
      while (ls >> x) xs.push_back(x);
      if (xs.empty()) continue;
      if ((int)xs.size() != H.r() + 1) throw std::invalid_argument("colouring text: bad line");
      int col = xs.back();
      xs.pop_back();
      int i = H.edge_index(xs);
      if (i < 0) throw std::invalid_argument("colouring text: not an edge");
      if (col < 0 || col >= palette) throw std::out_of_range("colouring text: colour outside palette");
      c.colour[i] = col;
    }
    for (int v : c.colour)
      if (v < 0) throw std::invalid_argument("colouring text: some edge has no colour");
    return c;
  }
};

// ---------------------------------------------------------------------------

// r-sets of V(G) pairwise within distance t
inline Hypergraph power_hypergraph(const GroundGraph& G, int t, int r) {
  if (r > G.n()) throw std::invalid_argument("power_hypergraph: r exceeds the vertex count");
  Hypergraph H(r, G.n());
  std::vector<int> cur;
  std::function<void(const std::vector<int>&)> go = [&](const std::vector<int>& cand) {
    if ((int)cur.size() == r) {
      H.add_edge(cur);
      return;
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (cand.size() - i < (std::size_t)(r - cur.size())) break;
      int v = cand[i];
      std::vector<int> next;
      const auto& d = G.distances_from(v);
      for (std::size_t j = i + 1; j < cand.size(); ++j)
        if (d[cand[j]] <= t) next.push_back(cand[j]);
      cur.push_back(v);
      go(next);
      cur.pop_back();
    }
  };
  std::vector<int> all(G.n());
  std::iota(all.begin(), all.end(), 0);
  go(all);
  return H;
}

// H (x)_r F by the definition: vertices are forest vertex indices (only leaves
// lie on edges); e is an edge when pi_0(e) sits inside an edge of H.
inline Hypergraph tensor(const Hypergraph& H, const SForest& F, int r) {
  if (F.ground_size() != H.n()) throw std::invalid_argument("tensor: ground sets differ");
  if (!F.forest().is_balanced()) throw std::invalid_argument("tensor: forest not balanced");
  Hypergraph T(r, (int)F.size());
  std::vector<std::vector<int>> leaves_of(H.n());
  for (int v : leaves(F.forest())) leaves_of[F.pi0(v)].push_back(v);
  std::vector<int> cur;
  for (const auto& f : H.edges()) {
    std::vector<int> pool;
    for (int u : f) pool.insert(pool.end(), leaves_of[u].begin(), leaves_of[u].end());
    std::sort(pool.begin(), pool.end());
    std::function<void(std::size_t)> go = [&](std::size_t from) {
      if ((int)cur.size() == r) {
        T.add_edge(cur);
        return;
      }
      for (std::size_t i = from; i + (r - cur.size()) <= pool.size(); ++i) {
        cur.push_back(pool[i]);
        go(i + 1);
        cur.pop_back();
      }
    };
    go(0);
  }
  return T;
}

// G^t (x)_r F in the norm form: r-sets of leaves with ||e||_G <= t.
inline Hypergraph norm_tensor(const GroundGraph& G, const SForest& F, int t, int r) {
  Hypergraph T(r, (int)F.size());
  for_each_norm_edge(G, F, t, r, [&](const std::vector<int>& e) {
    T.add_edge(e);
    return true;
  });
  return T;
}

// Can the root set R (pairwise within t) be completed to r vertices pairwise within t?
inline bool root_set_extends(const GroundGraph& G, std::vector<int> R, int t, int r) {
  std::sort(R.begin(), R.end());
  R.erase(std::unique(R.begin(), R.end()), R.end());
  for (std::size_t i = 0; i < R.size(); ++i)
    for (std::size_t j = i + 1; j < R.size(); ++j)
      if (G.dist(R[i], R[j]) > t) return false;
  if ((int)R.size() >= r) return (int)R.size() == r;
  std::vector<int> cand;
  for (int v = 0; v < G.n(); ++v) {
    if (std::binary_search(R.begin(), R.end(), v)) continue;
    bool ok = true;
    for (int u : R) ok = ok && G.dist(u, v) <= t;
    if (ok) cand.push_back(v);
  }
  int need = r - (int)R.size();
  std::vector<int> cur;
  std::function<bool(std::size_t)> go = [&](std::size_t from) {
    if ((int)cur.size() == need) return true;
    for (std::size_t i = from; i < cand.size(); ++i) {
      bool ok = true;
      for (int w : cur) ok = ok && G.dist(w, cand[i]) <= t;
      if (!ok) continue;
      cur.push_back(cand[i]);
      if (go(i + 1)) return true;
      cur.pop_back();
    }
    return false;
  };
  return go(0);
}

// H[t]: vertex v[i] (i in [0,t)) has index v*t + i
inline Hypergraph blow_up(const Hypergraph& H, int t) {
  if (t < 1) throw std::invalid_argument("blow_up: t must be positive");
  Hypergraph B(H.r(), H.n() * t);
  std::vector<int> cur;
  for (const auto& e : H.edges()) {
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == e.size()) {
        B.add_edge(cur);
        return;
      }
      for (int c = 0; c < t; ++c) {
        cur.push_back(e[i] * t + c);
        go(i + 1);
        cur.pop_back();
      }
    };
    go(0);
  }
  return B;
}

// ---------------------------------------------------------------------------
// tight walks

struct TightWalk {
  std::vector<int> verts;
  bool path = false;
  bool operator==(const TightWalk&) const = default;
  std::size_t order() const { return verts.size(); }
  std::size_t length() const { return verts.empty() ? 0 : verts.size() - 1; }
};

struct WalkCheck {
  bool ok = true;
  int window = -1;  // first window (0-based start index) that is not an edge
  std::string reason;
};

// Generic check against an edge predicate. Walks have at least r-1 vertices;
// sorted start and end tuples are required when require_sorted_ends is set.
inline WalkCheck validate_walk(int r, const std::function<bool(const std::vector<int>&)>& is_edge,
                               const TightWalk& W, bool require_sorted_ends = true) {
  WalkCheck c;
  auto fail = [&](int w, std::string why) {
    c.ok = false;
    c.window = w;
    c.reason = std::move(why);
    return c;
  };
  const auto& v = W.verts;
  if ((int)v.size() < r - 1) return fail(-1, "walk shorter than r-1");
  if (require_sorted_ends) {
    for (int i = 0; i + 1 < r - 1; ++i)
      if (!(v[i] < v[i + 1])) return fail(-1, "start tuple not sorted");
    for (int i = (int)v.size() - (r - 1); i + 1 < (int)v.size(); ++i)
      if (!(v[i] < v[i + 1])) return fail(-1, "end tuple not sorted");
  }
  for (int i = 0; i + r <= (int)v.size(); ++i) {
    std::vector<int> w(v.begin() + i, v.begin() + i + r);
    std::sort(w.begin(), w.end());
    if (std::adjacent_find(w.begin(), w.end()) != w.end() || !is_edge(w))
      return fail(i, "window " + std::to_string(i) + " is not an edge");
  }
  if (W.path) {
    std::vector<int> s = v;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) return fail(-1, "path repeats a vertex");
  }
  return c;
}

inline WalkCheck validate_walk(const Hypergraph& H, const TightWalk& W, bool require_sorted_ends = true) {
  return validate_walk(
      H.r(), [&](const std::vector<int>& e) { return H.has_edge(e); }, W, require_sorted_ends);
}

// every window also has colour c
inline WalkCheck validate_mono_walk(const Hypergraph& H, const Colouring& chi, int c, const TightWalk& W,
                                    bool require_sorted_ends = true) {
  return validate_walk(
      H.r(),
      [&](const std::vector<int>& e) {
        int i = H.edge_index(e);
        return i >= 0 && chi.colour[i] == c;
      },
      W, require_sorted_ends);
}

// The windows of W G^p in the r-uniform power of G: r distinct vertices pairwise within p.
inline WalkCheck validate_power_walk(const GroundGraph& G, int p, int r, const TightWalk& W,
                                     bool require_sorted_ends = false) {
  return validate_walk(
      r,
      [&](const std::vector<int>& e) {
        for (std::size_t i = 0; i < e.size(); ++i)
          for (std::size_t j = i + 1; j < e.size(); ++j)
            if (G.dist(e[i], e[j]) > p) return false;
        return true;
      },
      W, require_sorted_ends);
}

inline TightWalk concat(const TightWalk& P, const TightWalk& Q, int r) {
  int k = r - 1;
  if ((int)P.verts.size() < k || (int)Q.verts.size() < k) throw std::invalid_argument("concat: walk too short");
  if (!std::equal(P.verts.end() - k, P.verts.end(), Q.verts.begin()))
    throw std::invalid_argument("concat: end of P differs from start of Q");
  TightWalk W;
  W.verts = P.verts;
  W.verts.insert(W.verts.end(), Q.verts.begin() + k, Q.verts.end());
  return W;
}

// ---------------------------------------------------------------------------

struct MonoPathResult {
  std::vector<TightWalk> best;   // per colour; empty verts when none
  bool exhaustive = true;        // false when the node budget ran out
  std::uint64_t nodes = 0;
};

// Longest tight path per colour by DFS over ordered extensions from every sorted
// (r-1)-tuple; exact when the budget is not exhausted, otherwise topped up by
// random greedy extension.
inline MonoPathResult longest_mono_tight_path(const Hypergraph& H, const Colouring& chi,
                                              std::uint64_t budget = 10'000'000, std::uint64_t seed = 1,
                                              int restarts = 200) {
  const int r = H.r();
  MonoPathResult res;
  res.best.assign(chi.palette, TightWalk{{}, true});
  for (int c = 0; c < chi.palette; ++c) {
    // (r-1)-set -> completing vertices, within colour c
    std::unordered_map<std::vector<int>, std::vector<int>, EdgeHash> ext;
    for (std::size_t i = 0; i < H.edge_count(); ++i) {
      if (chi.colour[i] != c) continue;
      const auto& e = H.edge((int)i);
      for (int j = 0; j < r; ++j) {
        std::vector<int> key;
        for (int a = 0; a < r; ++a)
          if (a != j) key.push_back(e[a]);
        ext[key].push_back(e[j]);
      }
    }
    if (ext.empty()) continue;
    std::vector<int> seq;
    std::vector<char> used(H.n(), 0);
    TightWalk& best = res.best[c];
    auto sorted_end = [&]() {
      for (std::size_t i = seq.size() - (r - 1); i + 1 < seq.size(); ++i)
        if (!(seq[i] < seq[i + 1])) return false;
      return true;
    };
    std::function<void()> dfs = [&]() {
      if (++res.nodes > budget) {
        res.exhaustive = false;
        return;
      }
      if ((int)seq.size() >= r && seq.size() > best.verts.size() && sorted_end()) best.verts = seq;
      if (best.verts.size() == (std::size_t)H.n()) return;
      std::vector<int> key(seq.end() - (r - 1), seq.end());
      std::sort(key.begin(), key.end());
      auto it = ext.find(key);
      if (it == ext.end()) return;
      for (int v : it->second) {
        if (used[v]) continue;
        used[v] = 1;
        seq.push_back(v);
        dfs();
        seq.pop_back();
        used[v] = 0;
        if (!res.exhaustive) return;
      }
    };
    std::vector<std::vector<int>> starts;
    for (auto& [k, _] : ext) starts.push_back(k);
    std::sort(starts.begin(), starts.end());
    for (const auto& s : starts) {
      seq = s;
      for (int x : s) used[x] = 1;
      dfs();
      for (int x : s) used[x] = 0;
      if (!res.exhaustive) break;
    }
  }
  if (!res.exhaustive) {
    // randomized greedy restarts; keeps whatever the DFS found so far
    std::mt19937_64 g(seed);
    for (int c = 0; c < chi.palette; ++c) {
      std::unordered_map<std::vector<int>, std::vector<int>, EdgeHash> ext;
      std::vector<int> ids;
      for (std::size_t i = 0; i < H.edge_count(); ++i) {
        if (chi.colour[i] != c) continue;
        ids.push_back((int)i);
        const auto& e = H.edge((int)i);
        for (int j = 0; j < r; ++j) {
          std::vector<int> key;
          for (int a = 0; a < r; ++a)
            if (a != j) key.push_back(e[a]);
          ext[key].push_back(e[j]);
        }
      }
      if (ids.empty()) continue;
      for (int rep = 0; rep < restarts; ++rep) {
        const auto& e0 = H.edge(ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(g)]);
        std::vector<int> seq(e0.begin(), e0.end());
        std::vector<char> used(H.n(), 0);
        for (int x : seq) used[x] = 1;
        std::vector<int> best_here;
        auto end_sorted = [&]() {
          for (std::size_t i = seq.size() - (r - 1); i + 1 < seq.size(); ++i)
            if (!(seq[i] < seq[i + 1])) return false;
          return true;
        };
        if (end_sorted()) best_here = seq;
        for (;;) {
          std::vector<int> key(seq.end() - (r - 1), seq.end());
          std::sort(key.begin(), key.end());
          auto it = ext.find(key);
          if (it == ext.end()) break;
          std::vector<int> opts;
          for (int v : it->second)
            if (!used[v]) opts.push_back(v);
          if (opts.empty()) break;
          int v = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(g)];
          used[v] = 1;
          seq.push_back(v);
          if (end_sorted()) best_here = seq;
        }
        if (best_here.size() > res.best[c].verts.size()) res.best[c].verts = best_here;
      }
    }
  }
  return res;
}

// Greedy proper colouring of the line graph, edges in index order.
inline std::vector<std::vector<int>> matching_decomposition(const Hypergraph& H) {
  std::vector<int> cls(H.edge_count(), -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < (int)H.edge_count(); ++i) {
    std::set<int> taken;
    for (int v : H.edge(i))
      for (int j : H.incident(v))
        if (cls[j] >= 0) taken.insert(cls[j]);
    int c = 0;
    while (taken.count(c)) ++c;
    cls[i] = c;
    if (c >= (int)out.size()) out.resize(c + 1);
    out[c].push_back(i);
  }
  return out;
}

struct ProjectionResult {
  bool ok = true;
  TightWalk walk;
  std::string reason;
  int u = -1, v = -1;  // failing pair of walk positions
};

// pi-image of a walk in G^t (x) F, checked as a walk in the r-uniform G^p.
inline ProjectionResult project_walk(const TightWalk& W, const SForest& F, const GroundGraph& G, int t, int k, int p,
                                     int r) {
  ProjectionResult res;
  auto sep = is_d_separated(F, G, t);
  if (!sep.ok) {
    res.ok = false;
    res.reason = "forest not t-separated";
    return res;
  }
  if (F.height() > 0 && !all_levels_k_short(F, G, k)) {
    res.ok = false;
    res.reason = "some level is not k-short";
    return res;
  }
  if (p < t + 2 * F.height() * k) {
    res.ok = false;
    res.reason = "p < t + 2hk";
    return res;
  }
  for (int v : W.verts) res.walk.verts.push_back(F.pi(v));
  auto chk = validate_power_walk(G, p, r, res.walk, false);
  if (!chk.ok) {
    res.ok = false;
    res.reason = chk.reason;
    res.u = chk.window;
  }
  return res;
}

}  // namespace tpr

#endif  // TPR_HYPERGRAPH_HPP
