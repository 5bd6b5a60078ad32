#ifndef TPR_VERSATILE_HPP
#define TPR_VERSATILE_HPP

// Versatile leaf sets: the nested sequence T_0 >= ... >= T_k, the inverse
// monomorphisms it provides, and rerouting tight walks between such sets.

#include <tpr/trees.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tpr {

// Vertices of T_0 are addressed by rank labels: coordinate j is the 1-based
// position of the level-j ancestor among its siblings. T_i keeps the vertices
// whose coordinates all lie in X_i = 2^i [d_i].
struct VersatileSequence {
  int h = 0, k = 0, s = 0, d = 0;
  std::vector<int> arity;                // d_i
  std::vector<std::vector<int>> X;       // X_i, increasing
  std::vector<std::vector<int>> levels;  // vertex lists of T_i in T_0
  std::vector<Label> rank;               // per T_0 vertex
  std::map<Label, int> by_rank;

  bool in_level(int v, int i) const {
    const Label& r = rank[v];
    for (int j = 1; j < (int)r.size() && r[j]; ++j)
      if (!allowed(r[j], i)) return false;
    return true;
  }
  bool allowed(int x, int i) const { return x % (1 << i) == 0 && x / (1 << i) >= 1 && x / (1 << i) <= arity[i]; }
  int vertex(const Label& r) const {
    auto it = by_rank.find(r);
    return it == by_rank.end() ? -1 : it->second;
  }
};

inline int versatile_arity(int k, int s) { return (1 << k) * (s + 1) - 1; }

inline std::vector<Label> rank_labels(const OrderedForest& T) {
  std::vector<Label> out(T.size());
  for (int v = 0; v < (int)T.size(); ++v) {
    Label r(T.height() + 1, 0);
    r[0] = 1;
    for (int u = v; !T.is_root(u); u = T.parent(u)) {
      const auto& ch = T.children(T.parent(u));
      r[T.level(u)] = (int)(std::find(ch.begin(), ch.end(), u) - ch.begin()) + 1;
    }
    out[v] = r;
  }
  return out;
}

inline VersatileSequence build_versatile_sequence(const OrderedForest& T0, int k, int s) {
  if (!T0.is_tree() || !T0.is_balanced()) throw std::invalid_argument("versatile sequence: T_0 must be a balanced tree");
  if (k < 0 || s < 1 || k > 20) throw std::invalid_argument("versatile sequence: need k >= 0 and s >= 1");
  VersatileSequence q;
  q.h = T0.height();
  q.k = k;
  q.s = s;
  q.d = versatile_arity(k, s);
  if (q.h > 0 && T0.min_arity() < q.d)
    throw std::invalid_argument("versatile sequence: T_0 needs arity " + std::to_string(q.d));
  for (int i = 0; i <= k; ++i) {
    q.arity.push_back(versatile_arity(k - i, s));
    std::vector<int> x;
    for (int j = 1; j <= q.arity[i]; ++j) x.push_back(j << i);
    q.X.push_back(x);
  }
  q.rank = rank_labels(T0);
  for (int v = 0; v < (int)T0.size(); ++v) q.by_rank[q.rank[v]] = v;
  q.levels.assign(k + 1, {});
  for (int v = 0; v < (int)T0.size(); ++v)
    for (int i = 0; i <= k; ++i)
      if (q.in_level(v, i)) q.levels[i].push_back(v);
  return q;
}

// Rank for a new child of w inserted at position pos among the existing child
// ranks (all in X_m); the result lies in X_{m-1} strictly between neighbours.
inline int star_rank(const std::vector<int>& sib, std::size_t pos, int m) {
  if (m < 1) throw std::invalid_argument("star_rank: no coarser level left");
  const int half = 1 << (m - 1);
  if (sib.empty()) return half;
  if (pos < sib.size()) return sib[pos] - half;
  return sib.back() + half;
}

struct StarCheck {
  bool ok = true;
  bool exhaustive = true;
  std::size_t subtrees = 0, paths = 0, insertions = 0;
  std::string reason;
};

namespace detail {

// The y of the extension for S (vertex list of T_0, sorted) and new parent w
// at sibling position pos; -1 if the rank label leaves T_0.
inline int star_vertex(const OrderedForest& T0, const VersatileSequence& q, const std::vector<char>& inS, int w,
                       std::size_t pos, int m) {
  std::vector<int> sib;
  const int lv = T0.level(w);
  for (int c : T0.children(w))
    if (inS[c]) sib.push_back(q.rank[c][lv + 1]);
  Label r = q.rank[w];
  r[lv + 1] = star_rank(sib, pos, m);
  return q.vertex(r);
}

inline void check_one_subtree(const OrderedForest& T0, const VersatileSequence& q, int i, const std::vector<int>& S,
                              StarCheck& out) {
  if (!out.ok) return;
  ++out.subtrees;
  std::vector<char> inS(T0.size(), 0);
  for (int v : S) inS[v] = 1;
  OrderedForest SF = T0.induced(S);
  auto fail = [&](std::string why) {
    out.ok = false;
    out.reason = std::move(why) + " (T_" + std::to_string(i) + ", " + std::to_string(S.size()) + " vertices)";
  };
  for (int sv = 0; sv < (int)SF.size() && out.ok; ++sv) {
    int w = S[sv];
    if (T0.level(w) == T0.height()) continue;
    int nch = (int)SF.children(sv).size();
    for (int pos = 0; pos <= nch && out.ok; ++pos) {
      ++out.insertions;
      int y = star_vertex(T0, q, inS, w, pos, i);
      if (y < 0) return fail("extension vertex outside T_0");
      if (inS[y]) return fail("extension vertex already in S");
      if (!q.in_level(y, i - 1)) return fail("extension vertex outside T_{i-1}");
      if (T0.parent(y) != w) return fail("extension vertex has the wrong parent");
      OrderedForest ext = add_leaf(SF, T0.label(y));
      int yi = ext.find(T0.label(y));
      const auto& ch = ext.children(ext.find(T0.label(w)));
      if (std::find(ch.begin(), ch.end(), yi) - ch.begin() != pos) return fail("extension vertex out of sibling order");
      if (pos == nch) {
        // the last position is the P-extension along the latest-child path
        ++out.paths;
        TreePath P = extendible_path_from(SF, sv);
        if (p_extension_path(SF, ext) != P) return fail("not a P-extension");
      }
    }
  }
}

inline double count_rooted_subtrees(const OrderedForest& T0, const std::vector<char>& in, int v) {
  double c = 1;
  for (int u : T0.children(v))
    if (in[u]) c *= 1 + count_rooted_subtrees(T0, in, u);
  return c;
}

}  // namespace detail

// Property (*) between T_i and T_{i-1}: every subtree S of T_i sharing the
// root, every vertex of S and every sibling position gets its new child inside
// T_{i-1}; the last position is the P-extension. Exhaustive when the number
// of subtrees is at most limit, otherwise `samples` random subtrees.
inline StarCheck check_star_property(const OrderedForest& T0, const VersatileSequence& q, int i,
                                     std::size_t limit = 100000, std::size_t samples = 2000,
                                     std::uint64_t seed = 1) {
  if (i < 1 || i > q.k) throw std::invalid_argument("check_star_property: level out of range");
  StarCheck out;
  std::vector<char> in(T0.size(), 0);
  for (int v : q.levels[i]) in[v] = 1;
  std::vector<int> S;
  if (detail::count_rooted_subtrees(T0, in, 0) <= (double)limit) {
    // every subtree of T_i through the root, by include/skip over preorder
    std::vector<char> take(T0.size(), 0);
    std::function<void(int)> go = [&](int v) {
      if (!out.ok) return;
      if (v >= (int)T0.size()) {
        S.clear();
        for (int u = 0; u < (int)T0.size(); ++u)
          if (take[u]) S.push_back(u);
        detail::check_one_subtree(T0, q, i, S, out);
        return;
      }
      bool can = in[v] && (T0.is_root(v) || take[T0.parent(v)]);
      if (!can) return go(v + 1);
      if (!T0.is_root(v)) go(v + 1);
      take[v] = 1;
      go(v + 1);
      take[v] = 0;
    };
    go(0);
    return out;
  }
  out.exhaustive = false;
  std::mt19937_64 g(seed);
  for (std::size_t it = 0; it < samples && out.ok; ++it) {
    S.clear();
    std::vector<char> take(T0.size(), 0);
    for (int v = 0; v < (int)T0.size(); ++v) {
      if (!in[v]) continue;
      if (T0.is_root(v) || (take[T0.parent(v)] && (g() & 1))) take[v] = 1, S.push_back(v);
    }
    detail::check_one_subtree(T0, q, i, S, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// versatile sets

struct VersatileWitness {
  bool ok = false;
  OrderedForest T;
  std::vector<int> e;           // leaves of T
  std::vector<int> S;           // A(e), vertex indices of T
  ForestType tau;
  int t = 0;
  std::string mode;             // "constructed" or "brute"
  int k = 0, s = 0, d = 0;
  std::size_t trees_checked = 0, maps_checked = 0;
  std::string reason;
};

// psi: T' -> T with psi o phi = id, replaying the extensions from phi(S) to T'.
// S lies inside T_k of the sequence; phi maps T.induced(S) into T'.
inline std::optional<Monomorphism> versatile_psi(const OrderedForest& T, const VersatileSequence& q,
                                                 const std::vector<int>& S, const OrderedForest& Tp,
                                                 const Monomorphism& phi, std::string* why = nullptr) {
  auto fail = [&](std::string w) -> std::optional<Monomorphism> {
    if (why) *why = std::move(w);
    return std::nullopt;
  };
  if (phi.img.size() != S.size()) return fail("phi has the wrong domain");
  std::vector<int> base;
  for (int x : phi.img) base.push_back(x);
  OrderedForest A0 = Tp.induced(base);
  std::vector<ExtensionStep> steps;
  try {
    steps = extension_sequence(A0, Tp);
  } catch (const std::invalid_argument& ex) {
    return fail(ex.what());
  }
  if ((int)steps.size() > q.k) return fail("T' needs more extensions than the sequence has levels");
  std::map<Label, int> psi;
  for (std::size_t x = 0; x < S.size(); ++x) psi[Tp.label(phi.img[x])] = S[x];
  std::set<Label> cur;
  for (int x : base) cur.insert(Tp.label(x));
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const int m = q.k - (int)j;
    const auto& st = steps[j];
    int p = Tp.find(st.parent);
    std::vector<int> sib;
    std::size_t pos = 0;
    for (int c : Tp.children(p)) {
      if (!cur.count(Tp.label(c))) continue;
      int img = psi.at(Tp.label(c));
      int rk = q.rank[img][T.level(img)];
      if (rk % (1 << m)) return fail("image left T_m");
      sib.push_back(rk);
      if (Tp.label(c) < st.vertex) ++pos;
    }
    int w = psi.at(st.parent);
    Label r = q.rank[w];
    r[T.level(w) + 1] = star_rank(sib, pos, m);
    int y = q.vertex(r);
    if (y < 0) return fail("extension rank outside T");
    psi[st.vertex] = y;
    cur.insert(st.vertex);
  }
  Monomorphism out;
  out.img.resize(Tp.size());
  for (int v = 0; v < (int)Tp.size(); ++v) out.img[v] = psi.at(Tp.label(v));
  if (!is_monomorphism(Tp, T, out)) return fail("psi is not a monomorphism");
  for (std::size_t x = 0; x < S.size(); ++x)
    if (out.img[phi.img[x]] != S[x]) return fail("psi o phi != id");
  return out;
}

// Brute force: every height-h tree T' with at most t leaves and every
// monomorphism phi: A(e) -> T' admits psi: T' -> T with psi o phi = id.
struct VersatileCheck {
  bool ok = true;
  bool budget_hit = false;
  std::size_t trees = 0, maps = 0;
  ForestType failing_tree;
  Monomorphism failing_phi;
};

inline VersatileCheck verify_versatile_report(const OrderedForest& T, const std::vector<int>& e, int t,
                                              std::uint64_t budget = 5'000'000) {
  VersatileCheck out;
  if (!T.is_tree() || !T.is_balanced()) throw std::invalid_argument("verify_versatile: T must be a balanced tree");
  const int h = T.height();
  std::vector<int> S = ancestor_set(T, e);
  OrderedForest A = T.induced(S);
  for (const auto& tau : balanced_tree_types(h, t)) {
    OrderedForest Tp = forest_from_code(tau, h);
    ++out.trees;
    for (const auto& phi : find_monomorphisms(A, Tp, 1u << 20)) {
      if (++out.maps > budget) {
        out.budget_hit = true;
        out.ok = false;
        return out;
      }
      std::vector<int> fixed(Tp.size(), -1);
      for (std::size_t x = 0; x < S.size(); ++x) fixed[phi.img[x]] = S[x];
      if (find_monomorphisms(Tp, T, 1, &fixed).empty()) {
        out.ok = false;
        out.failing_tree = tau;
        out.failing_phi = phi;
        return out;
      }
    }
  }
  return out;
}

inline bool verify_versatile(const OrderedForest& T, const std::vector<int>& e, int t) {
  return verify_versatile_report(T, e, t).ok;
}

// Every psi built by the sequence is checked on all pairs (T', phi).
inline bool check_constructed(const VersatileWitness& w, const VersatileSequence& q, std::size_t* maps = nullptr,
                              std::string* why = nullptr) {
  OrderedForest A = w.T.induced(w.S);
  std::size_t n = 0;
  for (const auto& tau : balanced_tree_types(w.T.height(), w.t)) {
    OrderedForest Tp = forest_from_code(tau, w.T.height());
    for (const auto& phi : find_monomorphisms(A, Tp, 1u << 20)) {
      ++n;
      if (!versatile_psi(w.T, q, w.S, Tp, phi, why)) {
        if (maps) *maps = n;
        return false;
      }
    }
  }
  if (maps) *maps = n;
  return true;
}

inline int type_arity(const ForestType& tau) {
  int s = 0;
  for (int c : tau.code) s = std::max(s, c);
  return std::max(s, 1);
}

// e = L(S) for a type-tau subtree S of T_{ht}; every psi of the construction is
// replayed and checked when check is set.
inline VersatileWitness find_versatile_set(const OrderedForest& T, const ForestType& tau, int t, bool check = true) {
  VersatileWitness w;
  w.T = T;
  w.tau = tau;
  w.t = t;
  w.mode = "constructed";
  if (!T.is_tree() || !T.is_balanced()) throw std::invalid_argument("find_versatile_set: T must be a balanced tree");
  const int h = T.height();
  OrderedForest St = forest_from_code(tau, h);
  if (!St.is_tree() || !St.is_balanced() || St.max_level() != h)
    throw std::invalid_argument("find_versatile_set: tau must be a balanced tree type of height h");
  w.s = type_arity(tau);
  w.k = h * t;
  if (w.k > 20) {
    w.reason = "sequence too long";
    return w;
  }
  w.d = versatile_arity(w.k, w.s);
  if (h > 0 && T.min_arity() < w.d) {
    w.reason = "T needs arity " + std::to_string(w.d);
    return w;
  }
  VersatileSequence q = build_versatile_sequence(T, w.k, w.s);
  OrderedForest Tk = T.induced(q.levels[w.k]);
  auto emb = find_monomorphisms(St, Tk, 1);
  if (emb.empty()) {
    w.reason = "no copy of tau in T_k";
    return w;
  }
  for (int x : emb[0].img) w.S.push_back(q.levels[w.k][x]);
  for (int v : w.S)
    if (T.is_leaf(v)) w.e.push_back(v);
  if (check) {
    std::string why;
    if (!check_constructed(w, q, &w.maps_checked, &why)) {
      w.reason = "constructed psi failed: " + why;
      return w;
    }
    w.trees_checked = balanced_tree_types(h, t).size();
  }
  w.ok = true;
  return w;
}

// Versatile set found by scanning type-tau leaf sets of T in order and keeping
// the first one that passes the brute-force check.
inline VersatileWitness search_versatile_set(const OrderedForest& T, const ForestType& tau, int t,
                                             std::size_t candidates = 2000) {
  VersatileWitness w;
  w.T = T;
  w.tau = tau;
  w.t = t;
  w.mode = "brute";
  OrderedForest St = forest_from_code(tau, T.height());
  std::size_t seen = 0;
  std::vector<char> all(T.size(), 1);
  for_each_copy(St, T, T.roots(), all, -1, [&](const std::vector<int>& img) {
    if (++seen > candidates) return false;
    std::vector<int> e;
    for (int v : img)
      if (T.is_leaf(v)) e.push_back(v);
    auto rep = verify_versatile_report(T, e, t);
    w.maps_checked += rep.maps;
    if (!rep.ok) return true;
    w.e = e;
    w.S = ancestor_set(T, e);
    w.trees_checked = rep.trees;
    w.ok = true;
    return false;
  });
  if (!w.ok) w.reason = seen > candidates ? "candidate budget exhausted" : "no versatile set of this type";
  return w;
}

// ---------------------------------------------------------------------------
// rerouting

struct RerouteResult {
  bool ok = false;
  TightWalk walk;
  Monomorphism psi_a, psi_b;  // on the ancestor sets A and B, listed in order
  std::vector<int> A, B;
  std::size_t windows = 0;
  std::string reason;
};

namespace detail {

inline int common_root(const OrderedForest& F, const std::vector<int>& xs) {
  int r = -1;
  for (int v : xs) {
    int u = F.root_of(v);
    if (r >= 0 && u != r) return -2;
    r = u;
  }
  return r;
}

// psi on A with psi o phi = id, where phi: A(a') -> A(a) is the type isomorphism
inline std::optional<Monomorphism> reroute_side(const OrderedForest& F, const std::vector<int>& Aset,
                                                const std::vector<int>& a, const std::vector<int>& ap) {
  auto Sa = ancestor_set(F, a), Sap = ancestor_set(F, ap);
  if (Sa.size() != Sap.size()) return std::nullopt;
  OrderedForest A = F.induced(Aset);
  std::vector<int> fixed(Aset.size(), -1);
  for (std::size_t i = 0; i < Sa.size(); ++i) {
    auto it = std::lower_bound(Aset.begin(), Aset.end(), Sa[i]);
    fixed[it - Aset.begin()] = Sap[i];
  }
  auto m = find_monomorphisms(A, F, 1, &fixed);
  if (m.empty()) return std::nullopt;
  return m[0];
}

}  // namespace detail

// Walk from a' to b' whose i-th window has the root set and type of the i-th
// window of P. root_edge decides which root sets carry edges of the tensor.
inline RerouteResult reroute_walk(int r, const std::function<bool(const std::vector<int>&)>& root_edge,
                                  const SForest& F, const TightWalk& P, std::vector<int> ap, std::vector<int> bp) {
  RerouteResult res;
  const auto& Fo = F.forest();
  const auto& v = P.verts;
  auto fail = [&](std::string why) {
    res.reason = std::move(why);
    return res;
  };
  if ((int)v.size() < r) return fail("walk shorter than r");
  std::vector<int> a(v.begin(), v.begin() + (r - 1)), b(v.end() - (r - 1), v.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::sort(ap.begin(), ap.end());
  std::sort(bp.begin(), bp.end());
  int ua = detail::common_root(Fo, a), ub = detail::common_root(Fo, b);
  if (ua < 0 || ub < 0) return fail("start or end tuple spans several trees");
  if (ua == ub) return fail("start and end lie in the same tree");
  if (detail::common_root(Fo, ap) != ua || detail::common_root(Fo, bp) != ub)
    return fail("a' or b' outside the trees of a and b");
  if (type_of(Fo, ap) != type_of(Fo, a) || type_of(Fo, bp) != type_of(Fo, b)) return fail("type mismatch");
  std::vector<int> inA, inB;
  for (int x : v) {
    if (Fo.root_of(x) == ua) inA.push_back(x);
    if (Fo.root_of(x) == ub) inB.push_back(x);
  }
  res.A = ancestor_set(Fo, inA);
  res.B = ancestor_set(Fo, inB);
  auto pa = detail::reroute_side(Fo, res.A, a, ap);
  auto pb = detail::reroute_side(Fo, res.B, b, bp);
  if (!pa || !pb) return fail("no inverse monomorphism: versatility budget too small");
  res.psi_a = *pa;
  res.psi_b = *pb;
  std::map<int, int> psi;
  for (std::size_t i = 0; i < res.A.size(); ++i) psi[res.A[i]] = pa->img[i];
  for (std::size_t i = 0; i < res.B.size(); ++i) psi[res.B[i]] = pb->img[i];
  for (int x : v) res.walk.verts.push_back(psi.count(x) ? psi[x] : x);
  res.walk.path = P.path;
  // window by window: an edge of H (x) F with the same root set and type
  for (int i = 0; i + r <= (int)v.size(); ++i) {
    std::vector<int> e(v.begin() + i, v.begin() + i + r), f(res.walk.verts.begin() + i, res.walk.verts.begin() + i + r);
    std::sort(e.begin(), e.end());
    std::sort(f.begin(), f.end());
    if (std::adjacent_find(f.begin(), f.end()) != f.end()) return fail("window " + std::to_string(i) + " repeats");
    if (root_set_of(F, e) != root_set_of(F, f)) return fail("window " + std::to_string(i) + " changed root set");
    if (type_of(Fo, e) != type_of(Fo, f)) return fail("window " + std::to_string(i) + " changed type");
    if (!root_edge(root_set_of(F, f))) return fail("window " + std::to_string(i) + " is not an edge");
    ++res.windows;
  }
  std::vector<int> s(res.walk.verts.begin(), res.walk.verts.begin() + (r - 1));
  std::vector<int> t(res.walk.verts.end() - (r - 1), res.walk.verts.end());
  std::sort(s.begin(), s.end());
  std::sort(t.begin(), t.end());
  if (s != ap || t != bp) return fail("rerouted walk does not run from a' to b'");
  res.ok = true;
  return res;
}

// P lives on leaves of F and its windows are edges of H (x) F.
inline RerouteResult reroute_walk(const Hypergraph& H, const SForest& F, const TightWalk& P, std::vector<int> ap,
                                  std::vector<int> bp) {
  return reroute_walk(
      H.r(), [&](const std::vector<int>& R) { return inside_some_edge(H, R); }, F, P, std::move(ap), std::move(bp));
}

}  // namespace tpr

#endif  // TPR_VERSATILE_HPP
