#ifndef TPR_RAMSEY_HPP
#define TPR_RAMSEY_HPP

// Constructive Ramsey statements for paths against bicliques, multipartite
// cliques and cliques in expander powers. Every outcome is re-verified.

#include <tpr/expander.hpp>
#include <tpr/sforest.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpr {

enum class OutcomeKind { Path, Biclique, MultipartiteClique, Clique, CliqueCover, Failure };

inline const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Path: return "path";
    case OutcomeKind::Biclique: return "biclique";
    case OutcomeKind::MultipartiteClique: return "multipartite_clique";
    case OutcomeKind::Clique: return "clique";
    case OutcomeKind::CliqueCover: return "clique_cover";
    case OutcomeKind::Failure: return "failure";
  }
  return "?";
}

// For Path: parts = {path}; Biclique: {A, B}; MultipartiteClique: the parts;
// Clique: {vertices}; CliqueCover: one part per clique.
struct RamseyOutcome {
  OutcomeKind kind = OutcomeKind::Failure;
  int colour = -1;
  std::vector<std::vector<int>> parts;
  bool verified = false;
  std::string note;
};

// Symmetric edge colouring of a complete graph on [n]; colour(u,u) unused.
struct CompleteColouring {
  int n = 0;
  std::vector<int> c;
  int at(int u, int v) const { return c[(std::size_t)u * n + v]; }
  void set(int u, int v, int x) { c[(std::size_t)u * n + v] = c[(std::size_t)v * n + u] = x; }
  static CompleteColouring constant(int n, int x) { return {n, std::vector<int>((std::size_t)n * n, x)}; }
  template <class F>
  static CompleteColouring from(int n, F f) {
    CompleteColouring k = constant(n, -1);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) k.set(u, v, f(u, v));
    return k;
  }
  template <class G>
  static CompleteColouring random(int n, int colours, G& g) {
    std::uniform_int_distribution<int> d(0, colours - 1);
    return from(n, [&](int, int) { return d(g); });
  }
};

// ---------------------------------------------------------------------------
// path partition: V = P + A + B, |A| = |B|, no A-B edge, P a path

struct PathPartition {
  std::vector<int> path, A, B;
};

inline bool verify_path_partition(const GroundGraph& G, const PathPartition& pp) {
  std::vector<int> seen(G.n(), 0);
  for (auto* s : {&pp.path, &pp.A, &pp.B})
    for (int v : *s) {
      if (v < 0 || v >= G.n() || seen[v]) return false;
      seen[v] = 1;
    }
  for (int x : seen)
    if (!x) return false;
  if (pp.A.size() != pp.B.size()) return false;
  for (std::size_t i = 1; i < pp.path.size(); ++i)
    if (!G.has_edge(pp.path[i - 1], pp.path[i])) return false;
  for (int a : pp.A)
    for (int b : pp.B)
      if (G.has_edge(a, b)) return false;
  return true;
}

// DFS with unvisited S, finished T and the stack U as the path; stop when |S| = |T|.
inline PathPartition path_partition_dfs(const GroundGraph& G) {
  const int n = G.n();
  std::vector<int> state(n, 0);  // 0 in S, 1 on stack, 2 in T
  std::vector<int> stack;
  std::vector<std::size_t> it(n, 0);
  int s_count = n, t_count = 0;
  auto snapshot = [&]() {
    PathPartition pp;
    pp.path = stack;
    for (int v = 0; v < n; ++v) {
      if (state[v] == 0) pp.A.push_back(v);
      if (state[v] == 2) pp.B.push_back(v);
    }
    return pp;
  };
  int next_root = 0;
  for (;;) {
    if (s_count == t_count) return snapshot();
    if (stack.empty()) {
      while (state[next_root] != 0) ++next_root;
      state[next_root] = 1;
      stack.push_back(next_root);
      --s_count;
      continue;
    }
    int v = stack.back();
    const auto& a = G.adj(v);
    while (it[v] < a.size() && state[a[it[v]]] != 0) ++it[v];
    if (it[v] < a.size()) {
      int u = a[it[v]];
      state[u] = 1;
      stack.push_back(u);
      --s_count;
    } else {
      state[v] = 2;
      stack.pop_back();
      ++t_count;
    }
  }
}

// Exhaustive search over paths (as vertex sequences) and splits of the rest;
// returns a partition with a shortest possible path. n <= 12.
inline std::optional<PathPartition> path_partition_exhaustive(const GroundGraph& G) {
  const int n = G.n();
  if (n > 12) throw std::invalid_argument("path_partition_exhaustive: n too large");
  std::vector<std::uint32_t> nb(n, 0);
  for (int v = 0; v < n; ++v)
    for (int u : G.adj(v)) nb[v] |= 1u << u;
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  // splits(rest): A subset of rest with |A| = |rest| / 2 and no edge to rest \ A
  auto split = [&](std::uint32_t rest) -> std::optional<std::pair<std::uint32_t, std::uint32_t>> {
    int k = __builtin_popcount(rest);
    if (k % 2) return std::nullopt;
    for (std::uint32_t A = rest;; A = (A - 1) & rest) {
      if (__builtin_popcount(A) == k / 2) {
        std::uint32_t B = rest & ~A, na = 0;
        for (int v = 0; v < n; ++v)
          if (A >> v & 1) na |= nb[v];
        if (!(na & B)) return std::pair{A, B};
      }
      if (A == 0) break;
    }
    return std::nullopt;
  };
  auto build = [&](const std::vector<int>& path, std::uint32_t A, std::uint32_t B) {
    PathPartition pp;
    pp.path = path;
    for (int v = 0; v < n; ++v) {
      if (A >> v & 1) pp.A.push_back(v);
      if (B >> v & 1) pp.B.push_back(v);
    }
    return pp;
  };
  if (auto s = split(full)) return build({}, s->first, s->second);
  // ham[mask] bit v: some path covers exactly mask and ends at v
  std::vector<std::uint32_t> ham(1u << n, 0);
  for (int v = 0; v < n; ++v) ham[1u << v] = 1u << v;
  for (std::uint32_t m = 1; m <= full; ++m)
    for (int v = 0; v < n; ++v)
      if (ham[m] >> v & 1)
        for (int u = 0; u < n; ++u)
          if (!(m >> u & 1) && (nb[v] >> u & 1)) ham[m | 1u << u] |= 1u << u;
  auto trace = [&](std::uint32_t m) {
    std::vector<int> path;
    int v = __builtin_ctz(ham[m]);
    while (m) {
      path.push_back(v);
      std::uint32_t prev = m & ~(1u << v);
      if (!prev) break;
      int u = 0;
      while (!((ham[prev] >> u & 1) && (nb[u] >> v & 1))) ++u;
      m = prev;
      v = u;
    }
    return path;
  };
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 1; m <= full; ++m)
    if (ham[m]) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t x, std::uint32_t y) { return __builtin_popcount(x) < __builtin_popcount(y); });
  for (auto m : masks)
    if (auto s = split(full & ~m)) return build(trace(m), s->first, s->second);
  return std::nullopt;
}

inline PathPartition path_partition(const GroundGraph& G) {
  auto pp = path_partition_dfs(G);
  if (verify_path_partition(G, pp)) return pp;
  if (G.n() <= 12)
    if (auto e = path_partition_exhaustive(G)) return *e;
  throw std::logic_error("path_partition: no verified partition");
}

// ---------------------------------------------------------------------------
// bipartite hosts: X = [0, N), Y = [N, 2N)

struct BipartiteColouring {
  int N = 0;
  std::vector<int> c;  // c[x * N + y]
  int at(int x, int y) const { return c[(std::size_t)x * N + y]; }
  // colour of the edge between global vertices u in X and v in Y (either order)
  int edge(int u, int v) const { return u < N ? at(u, v - N) : at(v, u - N); }
  template <class G>
  static BipartiteColouring random(int N, int colours, G& g) {
    std::uniform_int_distribution<int> d(0, colours - 1);
    BipartiteColouring b{N, std::vector<int>((std::size_t)N * N)};
    for (auto& x : b.c) x = d(g);
    return b;
  }
  static BipartiteColouring constant(int N, int x) { return {N, std::vector<int>((std::size_t)N * N, x)}; }
};

// Checks an outcome against a bipartite colouring restricted to the global vertex set `host`.
inline bool verify_bipartite_outcome(const BipartiteColouring& chi, const RamseyOutcome& o, int n) {
  auto side = [&](int v) { return v < chi.N ? 0 : 1; };
  if (o.kind == OutcomeKind::Path) {
    const auto& P = o.parts.at(0);
    if ((int)P.size() < n) return false;
    std::vector<char> seen(2 * chi.N, 0);
    for (int v : P) {
      if (v < 0 || v >= 2 * chi.N || seen[v]) return false;
      seen[v] = 1;
    }
    for (std::size_t i = 1; i < P.size(); ++i)
      if (side(P[i - 1]) == side(P[i]) || chi.edge(P[i - 1], P[i]) != o.colour) return false;
    return true;
  }
  if (o.kind == OutcomeKind::Biclique) {
    const auto& A = o.parts.at(0);
    const auto& B = o.parts.at(1);
    if ((int)A.size() < n || (int)B.size() < n) return false;
    for (int a : A)
      if (side(a) != 0) return false;
    for (int b : B)
      if (side(b) != 1) return false;
    for (int a : A)
      for (int b : B)
        if (chi.edge(a, b) != o.colour) return false;
    return true;
  }
  return false;
}

namespace detail {

// colour `c` path or colour-not-`c` biclique inside X' x Y' (global ids), |X'| = |Y'| = 3m
inline RamseyOutcome bipartite_step(const BipartiteColouring& chi, const std::vector<int>& Xs,
                                    const std::vector<int>& Ys, int m, int c) {
  std::vector<int> all = Xs;
  all.insert(all.end(), Ys.begin(), Ys.end());
  std::vector<int> idx(2 * chi.N, -1);
  for (int i = 0; i < (int)all.size(); ++i) idx[all[i]] = i;
  std::vector<std::pair<int, int>> red;
  for (int x : Xs)
    for (int y : Ys)
      if (chi.edge(x, y) == c) red.push_back({idx[x], idx[y]});
  GroundGraph R((int)all.size(), red);
  auto pp = path_partition(R);
  RamseyOutcome o;
  if ((int)pp.path.size() >= m) {
    o.kind = OutcomeKind::Path;
    o.colour = c;
    std::vector<int> P;
    for (int i = 0; i < m; ++i) P.push_back(all[pp.path[i]]);
    o.parts = {P};
    return o;
  }
  std::vector<int> AX, AY, BX, BY;
  int nx = (int)Xs.size();
  for (int v : pp.A) (v < nx ? AX : AY).push_back(all[v]);
  for (int v : pp.B) (v < nx ? BX : BY).push_back(all[v]);
  std::vector<int> L = AX, Rt = BY;
  if (AX.size() < BX.size()) L = BX, Rt = AY;
  if ((int)L.size() < m || (int)Rt.size() < m) {
    o.kind = OutcomeKind::Failure;
    o.note = "path partition arithmetic failed";
    return o;
  }
  L.resize(m);
  Rt.resize(m);
  o.kind = OutcomeKind::Biclique;
  o.colour = -1;  // no red edge inside; the caller fixes the colour meaning
  o.parts = {L, Rt};
  return o;
}

}  // namespace detail

// 2-colouring (colour 0 red, 1 blue) of K_{3n,3n}: red P_n or blue K_{n,n}.
inline RamseyOutcome bipartite_path_or_biclique(const BipartiteColouring& chi, int n) {
  if (chi.N != 3 * n) throw std::invalid_argument("bipartite_path_or_biclique: host must be K_{3n,3n}");
  std::vector<int> X(chi.N), Y(chi.N);
  std::iota(X.begin(), X.end(), 0);
  std::iota(Y.begin(), Y.end(), chi.N);
  auto o = detail::bipartite_step(chi, X, Y, n, 0);
  if (o.kind == OutcomeKind::Biclique) o.colour = 1;
  o.verified = verify_bipartite_outcome(chi, o, n);
  return o;
}

inline long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// (r+1)-colouring with colours 0..r of K_{3^r n, 3^r n}: a P_n in some colour < r
// or a K_{n,n} in colour r.
inline RamseyOutcome multicolour_bipartite(const BipartiteColouring& chi, int n, int r) {
  if (chi.N != ipow(3, r) * n) throw std::invalid_argument("multicolour_bipartite: host must be K_{3^r n,3^r n}");
  std::vector<int> X(chi.N), Y(chi.N);
  std::iota(X.begin(), X.end(), 0);
  std::iota(Y.begin(), Y.end(), chi.N);
  RamseyOutcome o;
  for (int c = 0; c < r; ++c) {
    int m = (int)(ipow(3, r - c - 1) * n);
    o = detail::bipartite_step(chi, X, Y, m, c);
    if (o.kind == OutcomeKind::Path) {
      o.parts[0].resize(n);
      break;
    }
    if (o.kind == OutcomeKind::Failure) return o;
    X = o.parts[0];
    Y = o.parts[1];
  }
  if (r == 0) o.parts = {X, Y};
  if (o.kind != OutcomeKind::Path) {
    o.kind = OutcomeKind::Biclique;
    o.colour = r;
    o.parts = {X, Y};
  }
  o.verified = verify_bipartite_outcome(chi, o, n);
  return o;
}

inline long long multipartite_a(int r, int s) { return ipow(2 * ipow(3, r), s - 1); }

inline bool verify_complete_outcome(const CompleteColouring& chi, const RamseyOutcome& o, int n, int s) {
  std::vector<char> seen(chi.n, 0);
  for (const auto& p : o.parts)
    for (int v : p) {
      if (v < 0 || v >= chi.n || seen[v]) return false;
      seen[v] = 1;
    }
  if (o.kind == OutcomeKind::Path) {
    const auto& P = o.parts.at(0);
    if ((int)P.size() < n) return false;
    for (std::size_t i = 1; i < P.size(); ++i)
      if (chi.at(P[i - 1], P[i]) != o.colour) return false;
    return true;
  }
  if (o.kind == OutcomeKind::MultipartiteClique) {
    if ((int)o.parts.size() < s) return false;
    for (const auto& p : o.parts)
      if ((int)p.size() < n) return false;
    for (std::size_t i = 0; i < o.parts.size(); ++i)
      for (std::size_t j = i + 1; j < o.parts.size(); ++j)
        for (int u : o.parts[i])
          for (int v : o.parts[j])
            if (chi.at(u, v) != o.colour) return false;
    return true;
  }
  return false;
}

namespace detail {

// the induction on s over the vertex list V (|V| = a_s n)
inline RamseyOutcome multipartite_rec(const CompleteColouring& chi, const std::vector<int>& V, int n, int r, int s) {
  long long as1 = multipartite_a(r, s - 1);
  int half = (int)V.size() / 2;
  std::vector<int> A(V.begin(), V.begin() + half), B(V.begin() + half, V.end());
  // the bipartite graph between the halves, peeled colour by colour
  int m0 = (int)(as1 * n);  // biclique target
  BipartiteColouring bc{half, std::vector<int>((std::size_t)half * half)};
  for (int x = 0; x < half; ++x)
    for (int y = 0; y < half; ++y) bc.c[(std::size_t)x * half + y] = chi.at(A[x], B[y]);
  RamseyOutcome bo = multicolour_bipartite(bc, m0, r);
  RamseyOutcome o;
  auto glob = [&](int v) { return v < half ? A[v] : B[v - half]; };
  if (bo.kind == OutcomeKind::Path) {
    o.kind = OutcomeKind::Path;
    o.colour = bo.colour;
    std::vector<int> P;
    for (int i = 0; i < n; ++i) P.push_back(glob(bo.parts[0][i]));
    o.parts = {P};
    return o;
  }
  if (bo.kind != OutcomeKind::Biclique) return bo;
  std::vector<int> L, R;
  for (int v : bo.parts[0]) L.push_back(glob(v));
  for (int v : bo.parts[1]) R.push_back(glob(v));
  std::sort(L.begin(), L.end());
  std::sort(R.begin(), R.end());
  if (s == 2) {
    L.resize(n);
    R.resize(n);
    o.kind = OutcomeKind::MultipartiteClique;
    o.colour = r;
    o.parts = {L, R};
    return o;
  }
  RamseyOutcome left = multipartite_rec(chi, L, n, r, s - 1);
  if (left.kind != OutcomeKind::MultipartiteClique) return left;
  RamseyOutcome right = multipartite_rec(chi, R, n, r, s - 1);
  if (right.kind != OutcomeKind::MultipartiteClique) return right;
  o.kind = OutcomeKind::MultipartiteClique;
  o.colour = r;
  o.parts = left.parts;
  o.parts.push_back(right.parts[0]);
  return o;
}

}  // namespace detail

// (r+1)-colouring, colours 0..r, of K_{a_s n}: P_n in a colour < r or K_n^s in colour r.
inline RamseyOutcome multipartite_ramsey(const CompleteColouring& chi, int n, int r, int s) {
  if (s < 2) throw std::invalid_argument("multipartite_ramsey: s must be at least 2");
  if (chi.n != multipartite_a(r, s) * n) throw std::invalid_argument("multipartite_ramsey: host must be K_{a_s n}");
  std::vector<int> V(chi.n);
  std::iota(V.begin(), V.end(), 0);
  auto o = detail::multipartite_rec(chi, V, n, r, s);
  o.verified = verify_complete_outcome(chi, o, n, s);
  return o;
}

// ---------------------------------------------------------------------------
// expander powers

// Colouring of the edges of a graph (here a power G^c), keyed by sorted pair.
struct GraphColouring {
  const GroundGraph* host = nullptr;
  std::vector<std::vector<int>> col;  // col[u][i] = colour of host->adj(u)[i]
  int at(int u, int v) const {
    const auto& a = host->adj(u);
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) return -1;
    return col[u][it - a.begin()];
  }
  template <class F>
  static GraphColouring from(const GroundGraph& H, F f) {
    GraphColouring g{&H, std::vector<std::vector<int>>(H.n())};
    for (int u = 0; u < H.n(); ++u)
      for (int v : H.adj(u)) g.col[u].push_back(f(std::min(u, v), std::max(u, v)));
    return g;
  }
};

inline bool verify_graph_path(const GraphColouring& chi, const std::vector<int>& P, int colour) {
  std::vector<char> seen(chi.host->n(), 0);
  for (int v : P) {
    if (seen[v]) return false;
    seen[v] = 1;
  }
  for (std::size_t i = 1; i < P.size(); ++i)
    if (chi.at(P[i - 1], P[i]) != colour) return false;
  return true;
}

inline bool verify_graph_clique(const GraphColouring& chi, const std::vector<int>& K, int colour) {
  for (std::size_t i = 0; i < K.size(); ++i)
    for (std::size_t j = i + 1; j < K.size(); ++j)
      if (K[i] == K[j] || chi.at(K[i], K[j]) != colour) return false;
  return true;
}

// Longest monochromatic path found by depth-first extension under a node budget.
inline std::vector<int> long_mono_path(const GraphColouring& chi, int colour, const std::vector<int>& allowed,
                                       std::uint64_t budget = 200000) {
  const auto& H = *chi.host;
  std::vector<char> ok(H.n(), 0), used(H.n(), 0);
  for (int v : allowed) ok[v] = 1;
  std::vector<int> best, cur;
  std::uint64_t nodes = 0;
  std::function<void(int)> go = [&](int v) {
    if (++nodes > budget) return;
    if (cur.size() > best.size()) best = cur;
    if (best.size() == allowed.size()) return;
    // prefer neighbours with few onward options (Warnsdorff-like)
    std::vector<std::pair<int, int>> nxt;
    const auto& a = H.adj(v);
    for (std::size_t i = 0; i < a.size(); ++i) {
      int u = a[i];
      if (!ok[u] || used[u] || chi.col[v][i] != colour) continue;
      int deg = 0;
      const auto& b = H.adj(u);
      for (std::size_t j = 0; j < b.size(); ++j)
        if (ok[b[j]] && !used[b[j]] && chi.col[u][j] == colour) ++deg;
      nxt.push_back({deg, u});
    }
    std::sort(nxt.begin(), nxt.end());
    for (auto [_, u] : nxt) {
      used[u] = 1;
      cur.push_back(u);
      go(u);
      cur.pop_back();
      used[u] = 0;
      if (nodes > budget) return;
    }
  };
  for (int s : allowed) {
    if (nodes > budget) break;
    used[s] = 1;
    cur = {s};
    go(s);
    used[s] = 0;
  }
  return best;
}

struct ExpanderRamseyReport {
  RamseyOutcome outcome;
  double epsilon = 0;     // expansion of H^c promised by boosting
  int kept = 0;           // |V(H)|
  int part_size = 0;      // n' used for the multipartite step
  bool rainbow_precondition = false;
  long long path_target = 0;  // n / c
};

// chi colours the edges of G^c with 0..d, colour d playing the clique role.
inline ExpanderRamseyReport expander_ramsey_one(const GroundGraph& G, int c, int d, const GraphColouring& chi) {
  ExpanderRamseyReport rep;
  const int n = G.n();
  rep.path_target = (n + c - 1) / c;
  auto boost = boost_expansion(G, c, 2000);
  rep.epsilon = boost.epsilon;
  rep.kept = (int)boost.kept.size();
  const auto& kept = boost.kept;
  long long ad = d >= 2 ? multipartite_a(d, d) : 1;
  int np = (int)(kept.size() / ad);
  rep.part_size = np;
  RamseyOutcome& out = rep.outcome;
  if (d < 2 || np < 1) {
    // fall back on a direct path search over the kept vertices
    int best_c = -1;
    std::vector<int> best;
    for (int col = 0; col < d; ++col) {
      auto P = long_mono_path(chi, col, kept);
      if (P.size() > best.size()) best = P, best_c = col;
    }
    if (best_c >= 0 && (long long)best.size() >= rep.path_target) {
      out.kind = OutcomeKind::Path;
      out.colour = best_c;
      out.parts = {best};
      out.verified = verify_graph_path(chi, best, best_c);
    } else {
      out.kind = OutcomeKind::Failure;
      out.note = "multipartite host too small for these parameters";
    }
    return rep;
  }
  auto Hc = boost.H.power(c);
  // complete colouring on the first a_d n' kept vertices; non-edges of H^c merge into colour d
  int m = (int)(ad * np);
  auto K = CompleteColouring::from(m, [&](int u, int v) {
    if (!Hc.has_edge(u, v)) return d;
    int col = chi.at(kept[u], kept[v]);
    return col < 0 ? d : col;
  });
  auto mo = multipartite_ramsey(K, np, d, d);
  if (mo.kind == OutcomeKind::Path) {
    std::vector<int> P;
    for (int v : mo.parts[0]) P.push_back(kept[v]);
    // extend greedily inside the colour class for the n/c target
    auto longer = long_mono_path(chi, mo.colour, kept);
    if (longer.size() > P.size()) P = longer;
    out.kind = OutcomeKind::Path;
    out.colour = mo.colour;
    out.parts = {P};
    out.verified = verify_graph_path(chi, P, mo.colour);
    if ((long long)P.size() < rep.path_target) out.note = "path shorter than n/c";
    return rep;
  }
  if (mo.kind != OutcomeKind::MultipartiteClique) {
    out = mo;
    out.verified = false;
    return rep;
  }
  // rainbow path in H across the parts
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < d; ++i) sets.push_back(mo.parts[i]);
  auto rp = rainbow_path(boost.H, sets, rep.epsilon);
  rep.rainbow_precondition = rp.precondition;
  if (!rp.ok) rp = rainbow_path(Hc, sets, rep.epsilon);
  if (!rp.ok) {
    out.kind = OutcomeKind::Failure;
    out.note = "rainbow path: " + rp.reason;
    return rep;
  }
  std::vector<int> Kd;
  for (int v : rp.path) Kd.push_back(kept[v]);
  out.kind = OutcomeKind::Clique;
  out.colour = d;
  out.parts = {Kd};
  out.verified = verify_graph_clique(chi, Kd, d);
  return rep;
}

// Lexicographically least colour-`colour` d-cliques, taken greedily and disjointly.
inline std::vector<std::vector<int>> greedy_clique_cover(const GraphColouring& chi, int colour, int d,
                                                         const std::vector<int>& U, std::uint64_t budget = 2000000) {
  const auto& H = *chi.host;
  std::vector<char> avail(H.n(), 0);
  for (int v : U) avail[v] = 1;
  std::vector<std::vector<int>> out;
  std::uint64_t nodes = 0;
  for (int v : U) {
    if (!avail[v]) continue;
    std::vector<int> cand;
    const auto& a = H.adj(v);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (avail[a[i]] && a[i] > v && chi.col[v][i] == colour) cand.push_back(a[i]);
    std::vector<int> cur{v};
    std::function<bool(std::size_t)> go = [&](std::size_t from) {
      if ((int)cur.size() == d) return true;
      if (++nodes > budget) return false;
      for (std::size_t i = from; i < cand.size(); ++i) {
        int u = cand[i];
        bool ok = true;
        for (int w : cur)
          if (w != v && chi.at(w, u) != colour) {
            ok = false;
            break;
          }
        if (!ok) continue;
        cur.push_back(u);
        if (go(i + 1)) return true;
        cur.pop_back();
      }
      return false;
    };
    if (d == 1 || go(0)) {
      for (int w : cur) avail[w] = 0;
      out.push_back(cur);
    }
  }
  return out;
}

struct ExpanderMainReport {
  RamseyOutcome outcome;
  double coverage = 0;  // covered / |U|
  double target = 0;    // 1 - 200 eps
};

// chi colours G[U]^c with 0..s; colour s is the clique colour.
inline ExpanderMainReport expander_ramsey_main(const GroundGraph& G, const std::vector<int>& U,
                                               const GraphColouring& chi, int s, int d, int c, double eps) {
  ExpanderMainReport rep;
  rep.target = 1 - 200 * eps;
  auto cover = greedy_clique_cover(chi, s, d, U);
  std::size_t covered = cover.size() * (std::size_t)d;
  rep.coverage = U.empty() ? 1.0 : (double)covered / U.size();
  long long target_len = (G.n() + c - 1) / c;
  if (rep.coverage >= rep.target) {
    rep.outcome.kind = OutcomeKind::CliqueCover;
    rep.outcome.colour = s;
    rep.outcome.parts = cover;
    bool ok = true;
    std::vector<char> seen(G.n(), 0);
    for (const auto& K : cover) {
      ok = ok && (int)K.size() == d && verify_graph_clique(chi, K, s);
      for (int v : K) ok = ok && !seen[v], seen[v] = 1;
    }
    rep.outcome.verified = ok;
    return rep;
  }
  // the rest of U carries no colour-s K_d; look for a long path in the other colours
  std::vector<char> used(G.n(), 0);
  for (const auto& K : cover)
    for (int v : K) used[v] = 1;
  std::vector<int> rest;
  for (int v : U)
    if (!used[v]) rest.push_back(v);
  std::vector<int> best;
  int best_c = -1;
  for (int col = 0; col < s; ++col) {
    auto P = long_mono_path(chi, col, rest);
    if (P.size() > best.size()) best = P, best_c = col;
  }
  if (best_c >= 0 && (long long)best.size() >= target_len) {
    rep.outcome.kind = OutcomeKind::Path;
    rep.outcome.colour = best_c;
    rep.outcome.parts = {best};
    rep.outcome.verified = verify_graph_path(chi, best, best_c);
    return rep;
  }
  rep.outcome.kind = OutcomeKind::CliqueCover;
  rep.outcome.colour = s;
  rep.outcome.parts = cover;
  rep.outcome.note = "coverage below 1 - 200 eps and no path of order n/c found";
  bool ok = true;
  for (const auto& K : cover) ok = ok && verify_graph_clique(chi, K, s);
  rep.outcome.verified = ok;
  return rep;
}

}  // namespace tpr

#endif  // TPR_RAMSEY_HPP
