#ifndef TPR_EXPANDER_HPP
#define TPR_EXPANDER_HPP

// Bounded-degree expanders: generation, verification, boosting and rainbow paths.

#include <tpr/sforest.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace tpr {

inline double binomial_double(int n, int k) {
  if (k < 0 || k > n) return 0;
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

struct ExpanderCertificate {
  double epsilon = 0;
  int set_size = 0;  // ceil(eps * n) unless overridden
  std::string mode;  // "exhaustive" or "sampled"
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool verdict = false;
  std::vector<int> A, B;  // witness when the verdict is false
  double edge_constant = 0;
  int attempts = 0;
};

enum class VerifyMode { Exhaustive, Sampled };

constexpr double EXHAUSTIVE_PAIR_LIMIT = 1e8;

inline bool exhaustive_feasible(int n, int a) {
  double c = binomial_double(n, a);
  return c * c <= EXHAUSTIVE_PAIR_LIMIT;
}

namespace detail {

// B = the first `a` vertices outside A and N(A), if there are that many
inline std::optional<std::vector<int>> missing_partner(const GroundGraph& G, const std::vector<int>& A, int a,
                                                       std::vector<char>& mark) {
  std::fill(mark.begin(), mark.end(), 0);
  for (int v : A) {
    mark[v] = 1;
    for (int u : G.adj(v)) mark[u] = 1;
  }
  std::vector<int> B;
  for (int v = 0; v < G.n() && (int)B.size() < a; ++v)
    if (!mark[v]) B.push_back(v);
  if ((int)B.size() < a) return std::nullopt;
  return B;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

// Any two disjoint sets of size a = set_size have an edge between them. A pair
// fails exactly when some a-set A leaves a vertices outside A and N(A), so both
// modes range over A only.
inline ExpanderCertificate verify_expansion_sized(const GroundGraph& G, int a, VerifyMode mode,
                                                  std::uint64_t trials = 100000, std::uint64_t seed = 1,
                                                  unsigned threads = 0) {
  const int n = G.n();
  ExpanderCertificate cert;
  cert.set_size = a;
  cert.epsilon = n ? (double)a / n : 0;
  cert.seed = seed;
  cert.verdict = true;
  if (a <= 0) throw std::invalid_argument("verify_expansion: set size must be positive");
  if (2 * a > n) {
    cert.mode = mode == VerifyMode::Exhaustive ? "exhaustive" : "sampled";
    return cert;  // no disjoint pair exists
  }
  if (mode == VerifyMode::Exhaustive) {
    if (!exhaustive_feasible(n, a)) throw std::invalid_argument("verify_expansion: exhaustive mode above threshold");
    cert.mode = "exhaustive";
    std::vector<int> A(a);
    std::iota(A.begin(), A.end(), 0);
    std::vector<char> mark(n);
    for (;;) {
      ++cert.trials;
      if (auto B = detail::missing_partner(G, A, a, mark)) {
        cert.verdict = false;
        cert.A = A;
        cert.B = *B;
        return cert;
      }
      int i = a - 1;
      while (i >= 0 && A[i] == n - a + i) --i;
      if (i < 0) break;
      ++A[i];
      for (int j = i + 1; j < a; ++j) A[j] = A[j - 1] + 1;
    }
    return cert;
  }
  cert.mode = "sampled";
  cert.trials = trials;
  // chunks of fixed size with their own seeds; the lowest failing trial wins
  constexpr std::uint64_t CHUNK = 1024;
  std::uint64_t chunks = (trials + CHUNK - 1) / CHUNK;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = (unsigned)std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1));
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> first_fail{std::numeric_limits<std::uint64_t>::max()};
  std::vector<std::pair<std::vector<int>, std::vector<int>>> found(chunks);
  std::vector<std::uint64_t> found_at(chunks, std::numeric_limits<std::uint64_t>::max());
  auto work = [&]() {
    std::vector<char> mark(n);
    std::vector<int> perm(n), A;
    for (;;) {
      std::uint64_t c = next++;
      if (c >= chunks || c * CHUNK > first_fail.load()) return;
      std::mt19937_64 g(detail::mix64(seed ^ detail::mix64(c)));
      for (std::uint64_t t = c * CHUNK; t < std::min(trials, (c + 1) * CHUNK); ++t) {
        A.clear();
        if (t % 2 == 0) {
          std::iota(perm.begin(), perm.end(), 0);
          for (int i = 0; i < a; ++i) {
            int j = std::uniform_int_distribution<int>(i, n - 1)(g);
            std::swap(perm[i], perm[j]);
            A.push_back(perm[i]);
          }
        } else {
          // breadth-first blob around a random vertex, topped up at random
          int s = std::uniform_int_distribution<int>(0, n - 1)(g);
          const auto& d = G.distances_from(s);
          std::vector<int> order(n);
          std::iota(order.begin(), order.end(), 0);
          std::shuffle(order.begin(), order.end(), g);
          std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
          A.assign(order.begin(), order.begin() + a);
        }
        std::sort(A.begin(), A.end());
        if (auto B = detail::missing_partner(G, A, a, mark)) {
          found[c] = {A, *B};
          found_at[c] = t;
          std::uint64_t cur = first_fail.load();
          while (t < cur && !first_fail.compare_exchange_weak(cur, t)) {
          }
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t c = 0; c < chunks; ++c)
    if (found_at[c] < best) {
      best = found_at[c];
      cert.verdict = false;
      cert.A = found[c].first;
      cert.B = found[c].second;
    }
  return cert;
}

inline int expansion_set_size(int n, double eps) { return std::max(1, (int)std::ceil(eps * n - 1e-9)); }

inline ExpanderCertificate verify_expansion(const GroundGraph& G, double eps, VerifyMode mode,
                                            std::uint64_t trials = 100000, std::uint64_t seed = 1,
                                            unsigned threads = 0) {
  auto c = verify_expansion_sized(G, expansion_set_size(G.n(), eps), mode, trials, seed, threads);
  c.epsilon = eps;
  return c;
}

inline VerifyMode default_mode(int n, double eps) {
  return exhaustive_feasible(n, expansion_set_size(n, eps)) ? VerifyMode::Exhaustive : VerifyMode::Sampled;
}

inline int degree_cap(double eps) { return (int)std::ceil(1.0 / (eps * eps) - 1e-9); }

struct GenerateOptions {
  double edge_constant = 0;  // 0: 4 / eps^2
  int retries = 50;
  std::uint64_t trials = 100000;
  std::optional<VerifyMode> mode;  // default: exhaustive when feasible
  int min_n = 0;                   // 0: ceil(2 / eps)
  unsigned threads = 0;
};

struct GeneratedExpander {
  GroundGraph graph;
  ExpanderCertificate certificate;
  bool ok = false;
  std::string diagnostics;
};

// Sample G(n, C/n), strip edges at vertices above the degree cap, join the
// components, and verify; repeat with fresh randomness until verification passes.
inline GeneratedExpander generate_expander(int n, double eps, std::uint64_t seed, const GenerateOptions& opt = {}) {
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("generate_expander: eps must lie in (0,1]");
  int floor_n = opt.min_n ? opt.min_n : (int)std::ceil(2 / eps);
  if (n < floor_n) throw std::invalid_argument("generate_expander: n below the floor for this eps");
  const int cap = degree_cap(eps);
  const double C = opt.edge_constant > 0 ? opt.edge_constant : 4 / (eps * eps);
  const double p = std::min(1.0, C / n);
  VerifyMode mode = opt.mode.value_or(default_mode(n, eps));
  std::mt19937_64 g(seed);
  GeneratedExpander out;
  std::string diag;
  for (int attempt = 1; attempt <= opt.retries; ++attempt) {
    std::bernoulli_distribution coin(p);
    std::vector<std::vector<int>> adj(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (coin(g)) {
          adj[u].push_back(v);
          adj[v].push_back(u);
        }
    auto drop = [&](int u, int v) {
      adj[u].erase(std::find(adj[u].begin(), adj[u].end(), v));
      adj[v].erase(std::find(adj[v].begin(), adj[v].end(), u));
    };
    for (int u = 0; u < n; ++u)
      while ((int)adj[u].size() > cap) {
        int v = adj[u][std::uniform_int_distribution<std::size_t>(0, adj[u].size() - 1)(g)];
        drop(u, v);
      }
    // join components by an edge between their lowest-index vertices with spare degree
    auto components = [&]() {
      std::vector<int> comp(n, -1);
      int c = 0;
      for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> st{s};
        comp[s] = c;
        while (!st.empty()) {
          int x = st.back();
          st.pop_back();
          for (int y : adj[x])
            if (comp[y] < 0) comp[y] = c, st.push_back(y);
        }
        ++c;
      }
      return std::pair{comp, c};
    };
    bool patched = true;
    for (;;) {
      auto [comp, nc] = components();
      if (nc == 1) break;
      std::vector<int> rep(nc, -1);
      for (int v = 0; v < n; ++v)
        if (rep[comp[v]] < 0 && (int)adj[v].size() < cap) rep[comp[v]] = v;
      int with_room = 0;
      for (int c = 0; c < nc; ++c) with_room += rep[c] >= 0;
      if (with_room < 2) {
        // free two slots inside a saturated component by removing one of its edges
        int v = -1;
        for (int x = 0; x < n && v < 0; ++x)
          if (rep[comp[x]] < 0 && !adj[x].empty()) v = x;
        if (v < 0 || cap < 2) {
          patched = false;
          break;
        }
        drop(v, adj[v].back());
        continue;
      }
      int prev = -1;
      for (int c = 0; c < nc; ++c) {
        if (rep[c] < 0) continue;
        if (prev >= 0 && (int)adj[prev].size() < cap && (int)adj[rep[c]].size() < cap) {
          adj[prev].push_back(rep[c]);
          adj[rep[c]].push_back(prev);
        }
        prev = rep[c];
      }
    }
    std::vector<std::pair<int, int>> es;
    for (int u = 0; u < n; ++u)
      for (int v : adj[u])
        if (u < v) es.push_back({u, v});
    GroundGraph G(n, es);
    if (!patched || !G.connected() || G.max_degree() > cap) {
      diag += "attempt " + std::to_string(attempt) + ": could not connect within the degree cap\n";
      continue;
    }
    auto cert = verify_expansion(G, eps, mode, opt.trials, detail::mix64(seed + attempt), opt.threads);
    cert.edge_constant = C;
    cert.attempts = attempt;
    if (cert.verdict) {
      out.graph = G;
      out.certificate = cert;
      out.ok = true;
      out.diagnostics = diag;
      return out;
    }
    diag += "attempt " + std::to_string(attempt) + ": expansion witness found\n";
    out.graph = G;
    out.certificate = cert;
  }
  out.ok = false;
  out.diagnostics = diag + "retry budget exhausted";
  return out;
}

// ---------------------------------------------------------------------------

// Greedy maximal S-T matching: each s in order takes its lowest free neighbour in T.
inline std::vector<std::pair<int, int>> maximal_matching(const GroundGraph& G, const std::vector<int>& S,
                                                         const std::vector<int>& T) {
  std::vector<char> inT(G.n(), 0), used(G.n(), 0);
  for (int t : T) inT[t] = 1;
  std::vector<std::pair<int, int>> M;
  for (int s : S) {
    if (used[s]) continue;
    for (int t : G.adj(s))
      if (inT[t] && !used[t] && t != s) {
        used[s] = used[t] = 1;
        M.push_back({s, t});
        break;
      }
  }
  return M;
}

struct RainbowPathResult {
  bool ok = false;
  bool precondition = true;  // disjoint and |S_i| >= r eps n
  std::vector<int> path;
  std::vector<int> matching_sizes;
  std::string reason;
};

inline RainbowPathResult rainbow_path(const GroundGraph& G, const std::vector<std::vector<int>>& sets, double eps) {
  RainbowPathResult res;
  const int r = (int)sets.size();
  if (r == 0) {
    res.reason = "no sets";
    return res;
  }
  std::vector<int> owner(G.n(), -1);
  for (int i = 0; i < r; ++i)
    for (int v : sets[i]) {
      if (owner[v] >= 0 && owner[v] != i) {
        res.precondition = false;
        res.reason = "sets are not disjoint";
      }
      owner[v] = i;
    }
  if (!res.precondition) return res;
  for (const auto& S : sets)
    if ((double)S.size() < r * eps * G.n()) res.precondition = false;
  if (r == 1) {
    if (sets[0].empty()) {
      res.reason = "empty set";
      return res;
    }
    res.ok = true;
    res.path = {sets[0][0]};
    return res;
  }
  std::vector<std::vector<std::pair<int, int>>> M(r - 1);
  M[0] = maximal_matching(G, sets[0], sets[1]);
  res.matching_sizes.push_back((int)M[0].size());
  for (int i = 1; i < r - 1; ++i) {
    std::vector<int> Si;
    for (auto [a, b] : M[i - 1]) Si.push_back(b);
    std::sort(Si.begin(), Si.end());
    M[i] = maximal_matching(G, Si, sets[i + 1]);
    res.matching_sizes.push_back((int)M[i].size());
  }
  if (M[r - 2].empty()) {
    res.reason = "last matching is empty";
    return res;
  }
  std::vector<int> path(r);
  path[r - 2] = M[r - 2][0].first;
  path[r - 1] = M[r - 2][0].second;
  for (int i = r - 3; i >= 0; --i) {
    for (auto [a, b] : M[i])
      if (b == path[i + 1]) path[i] = a;
  }
  res.path = path;
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------

inline double boosted_epsilon(int k) { return std::min(1.0, 1.0 / (5 * std::pow(2.0, k / 2.0 - 2))); }

struct BoostReport {
  std::vector<int> X;        // |X| <= n/4 and |N(X)| <= 2|X|, maximal
  std::vector<int> kept;     // V(H) in increasing order, as G-vertices
  GroundGraph H;             // induced on `kept`, relabelled 0..|kept|-1
  bool exact_search = false;
  double ratio = 0;          // |V(H)| / n
  bool ratio_ok = false;     // ratio >= 0.97
  double epsilon = 0;        // for H^k
  int set_size = 0;          // ceil(epsilon * n) with n = |V(G)|
  std::optional<ExpanderCertificate> power_check;
};

namespace detail {

inline bool low_expansion(const GroundGraph& G, const std::vector<char>& inX, int size) {
  if (size == 0) return true;
  int nb = 0;
  std::vector<char> seen(G.n(), 0);
  for (int v = 0; v < G.n(); ++v)
    if (inX[v])
      for (int u : G.adj(v))
        if (!inX[u] && !seen[u]) seen[u] = 1, ++nb;
  return nb <= 2 * size;
}

}  // namespace detail

inline BoostReport boost_expansion(const GroundGraph& G, int k, std::uint64_t trials = 20000, std::uint64_t seed = 1) {
  const int n = G.n();
  const int lim = n / 4;
  BoostReport rep;
  std::vector<char> inX(n, 0);
  if (n <= 24) {
    rep.exact_search = true;
    std::vector<std::uint32_t> nb(n, 0);
    for (int v = 0; v < n; ++v)
      for (int u : G.adj(v)) nb[v] |= 1u << u;
    std::uint32_t best = 0;
    int best_size = 0;
    // subsets of size <= n/4 in lexicographic order of their element lists
    std::function<void(int, std::uint32_t, std::uint32_t, int)> go = [&](int from, std::uint32_t X, std::uint32_t N,
                                                                        int sz) {
      if (sz > best_size && __builtin_popcount(N & ~X) <= 2 * sz) {
        best = X;
        best_size = sz;
      }
      if (sz == lim) return;
      for (int v = from; v < n; ++v) go(v + 1, X | 1u << v, N | nb[v], sz + 1);
    };
    go(0, 0, 0, 0);
    for (int v = 0; v < n; ++v)
      if (best >> v & 1) inX[v] = 1;
  } else {
    // greedy: keep adding balls while the invariant holds
    int size = 0;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int rad = 0; rad <= 2 && !grew; ++rad)
        for (int v = 0; v < n && !grew; ++v) {
          auto Y = G.ball(v, rad);
          std::vector<int> add;
          for (int y : Y)
            if (!inX[y]) add.push_back(y);
          if (add.empty() || size + (int)add.size() > lim) continue;
          for (int y : add) inX[y] = 1;
          if (detail::low_expansion(G, inX, size + (int)add.size())) {
            size += (int)add.size();
            grew = true;
          } else {
            for (int y : add) inX[y] = 0;
          }
        }
    }
  }
  std::vector<char> gone = inX;
  for (int v = 0; v < n; ++v)
    if (inX[v]) {
      rep.X.push_back(v);
      for (int u : G.adj(v)) gone[u] = 1;
    }
  for (int v = 0; v < n; ++v)
    if (!gone[v]) rep.kept.push_back(v);
  rep.H = G.induced(rep.kept);
  rep.ratio = n ? (double)rep.kept.size() / n : 0;
  rep.ratio_ok = rep.ratio >= 0.97;
  rep.epsilon = boosted_epsilon(k);
  rep.set_size = expansion_set_size(n, rep.epsilon);
  if (!rep.kept.empty()) {
    auto Hk = rep.H.power(k);
    auto mode = exhaustive_feasible(Hk.n(), rep.set_size) ? VerifyMode::Exhaustive : VerifyMode::Sampled;
    rep.power_check = verify_expansion_sized(Hk, rep.set_size, mode, trials, seed);
    rep.power_check->epsilon = rep.epsilon;
  }
  return rep;
}

}  // namespace tpr

#endif  // TPR_EXPANDER_HPP
