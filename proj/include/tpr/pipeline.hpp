#ifndef TPR_PIPELINE_HPP
#define TPR_PIPELINE_HPP

// The iterative colouring/structure engine: parameter schedules, per-level
// states whose properties are re-verified, the auxiliary colouring with grey,
// both branches of a step, the end-to-end run, and the blow-up reduction.

#include <tpr/ramsey.hpp>
#include <tpr/versatile.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tpr {

using json = nlohmann::json;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)x);
  return buf;
}

// ---------------------------------------------------------------------------
// schedules

struct ParamSchedule {
  int r = 3, s = 2, h = 3, n = 300;
  int p = 73, pp = 72;  // pp is p'
  double eps = 0.3;
  std::vector<int> a, b, c, d;  // level i sits at index i-1

  int delta() const { return degree_cap(eps); }
  int A(int i) const { return a.at(i - 1); }
  int B(int i) const { return b.at(i - 1); }
  int C(int i) const { return c.at(i - 1); }
  int D(int i) const { return d.at(i - 1); }

  // smallest integers with strict gaps and c_i - 2a_i >= c_{i+1}
  static ParamSchedule desk(int n = 300) {
    ParamSchedule S;
    S.n = n;
    S.a = {24, 8, 4};
    S.c = {69, 21, 5};
    S.b = {70, 22, 6};
    S.d = {71, 23, 7};
    return S;
  }

  // one message per failed inequality; empty when valid
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) out.push_back(what);
    };
    need(r >= 2, "r >= 2 fails");
    need(s >= 1, "s >= 1 fails");
    need(h >= 1, "h >= 1 fails");
    need(n >= r, "n >= r fails");
    need(eps > 0 && eps < 1, "0 < eps < 1 fails");
    if (h < 1 || (int)a.size() != h || (int)b.size() != h || (int)c.size() != h || (int)d.size() != h) {
      out.push_back("level arrays a, b, c, d must have length h");
      return out;
    }
    auto num = [](double x) {
      std::ostringstream os;
      os << x;
      return os.str();
    };
    std::vector<std::pair<std::string, double>> chain{{"p", p}, {"p'", pp}};
    for (int i = 1; i <= h; ++i) {
      auto k = std::to_string(i);
      chain.push_back({"d_" + k, D(i)});
      chain.push_back({"b_" + k, B(i)});
      chain.push_back({"c_" + k, C(i)});
      chain.push_back({"a_" + k, A(i)});
    }
    chain.push_back({"1/eps", 1.0 / eps});
    chain.push_back({"max(h,r,s)", (double)std::max({h, r, s})});
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      auto [x, vx] = chain[i];
      auto [y, vy] = chain[i + 1];
      need(vx > vy, x + " > " + y + " fails: " + num(vx) + " <= " + num(vy));
    }
    for (int i = 1; i < h; ++i)
      need(C(i) - 2 * A(i) >= C(i + 1), "c_" + std::to_string(i) + " - 2a_" + std::to_string(i) + " >= c_" +
                                            std::to_string(i + 1) + " fails: " + std::to_string(C(i) - 2 * A(i)) +
                                            " < " + std::to_string(C(i + 1)));
    return out;
  }
  bool valid() const { return violations().empty(); }

  json to_json() const {
    return json{{"r", r}, {"s", s}, {"h", h},     {"n", n}, {"p", p}, {"p_prime", pp},
                {"eps", eps}, {"a", a}, {"b", b}, {"c", c}, {"d", d}};
  }
  static ParamSchedule from_json(const json& j) {
    ParamSchedule S;
    S.r = j.at("r").get<int>();
    S.s = j.at("s").get<int>();
    S.h = j.at("h").get<int>();
    S.n = j.at("n").get<int>();
    S.p = j.at("p").get<int>();
    S.pp = j.at("p_prime").get<int>();
    S.eps = j.at("eps").get<double>();
    S.a = j.at("a").get<std::vector<int>>();
    S.b = j.at("b").get<std::vector<int>>();
    S.c = j.at("c").get<std::vector<int>>();
    S.d = j.at("d").get<std::vector<int>>();
    return S;
  }
  std::string hash() const { return hex64(fnv1a(to_json().dump())); }
};

// ---------------------------------------------------------------------------
// distances and colourings of H = G^{p'}

struct DistTable {
  int n = 0;
  std::vector<int> d;

  DistTable() = default;
  explicit DistTable(const GroundGraph& G) : n(G.n()), d((std::size_t)G.n() * G.n()) {
    for (int u = 0; u < n; ++u) {
      const auto& row = G.distances_from(u);
      std::copy(row.begin(), row.end(), d.begin() + (std::size_t)u * n);
    }
  }
  int operator()(int u, int v) const { return d[(std::size_t)u * n + v]; }
  int spread(const std::vector<int>& xs) const {
    int m = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) m = std::max(m, (*this)(xs[i], xs[j]));
    return m;
  }
};

// sorted, distinct, pairwise within pp
inline bool host_edge(const DistTable& D, int pp, const std::vector<int>& e) {
  if (std::adjacent_find(e.begin(), e.end()) != e.end()) return false;
  return D.spread(e) <= pp;
}

// Colours of sorted r-sets of V(G).
struct HostColouring {
  std::string kind = "mono";  // mono, random, band, parity, table
  int s = 2;
  std::uint64_t seed = 0;
  int width = 1;  // band: colour = (spread / width) mod s
  std::map<std::vector<int>, int> table;
  int fallback = 0;

  int colour(const std::vector<int>& e, const DistTable& D) const {
    if (kind == "mono") return 0;
    if (kind == "random") {
      std::uint64_t x = detail::mix64(seed ^ 0x51ED2701A3C5B9E7ULL);
      for (int v : e) x = detail::mix64(x + (std::uint64_t)v + 1);
      return (int)(x % (std::uint64_t)s);
    }
    if (kind == "band") return (D.spread(e) / std::max(1, width)) % s;
    if (kind == "parity") {
      long long t = 0;
      for (int v : e) t += v;
      return (int)(t % s);
    }
    if (kind == "table") {
      auto it = table.find(e);
      return it == table.end() ? fallback : it->second;
    }
    throw std::invalid_argument("unknown colouring kind: " + kind);
  }

  json to_json() const {
    json j{{"kind", kind}, {"s", s}, {"seed", seed}, {"width", width}};
    if (kind == "table") {
      json rows = json::array();
      for (const auto& [e, c] : table) {
        auto row = e;
        row.push_back(c);
        rows.push_back(row);
      }
      j["table"] = rows;
      j["fallback"] = fallback;
    }
    return j;
  }
  static HostColouring from_json(const json& j) {
    HostColouring h;
    h.kind = j.at("kind").get<std::string>();
    h.s = j.at("s").get<int>();
    h.seed = j.value("seed", (std::uint64_t)0);
    h.width = j.value("width", 1);
    if (h.kind == "table") {
      h.fallback = j.value("fallback", 0);
      for (const auto& row : j.at("table")) {
        auto v = row.get<std::vector<int>>();
        if (v.size() < 2) throw std::invalid_argument("colouring table: short row");
        int c = v.back();
        v.pop_back();
        std::sort(v.begin(), v.end());
        h.table[v] = c;
      }
    }
    if (h.kind != "mono" && h.kind != "random" && h.kind != "band" && h.kind != "parity" && h.kind != "table")
      throw std::invalid_argument("unknown colouring kind: " + h.kind);
    return h;
  }
  // "mono", "random", "band", "band:W", "parity"
  static HostColouring parse(const std::string& spec, int s, std::uint64_t seed) {
    HostColouring h;
    h.s = s;
    h.seed = seed;
    auto colon = spec.find(':');
    h.kind = spec.substr(0, colon);
    if (colon != std::string::npos) h.width = std::stoi(spec.substr(colon + 1));
    if (h.kind != "mono" && h.kind != "random" && h.kind != "band" && h.kind != "parity")
      throw std::invalid_argument("unknown colouring kind: " + spec);
    return h;
  }
};

// Colour of an edge of G^t (x) F in norm form: chi_H of pi(e) when ||e|| <= t
// and pi(e) is an edge of H, otherwise -1.
struct TensorColouring {
  const SForest* F = nullptr;
  const DistTable* D = nullptr;
  const HostColouring* chi = nullptr;
  int t = 0, pp = 0;

  int operator()(const std::vector<int>& e) const {
    for (std::size_t i = 0; i < e.size(); ++i) {
      int ri = F->pi0(e[i]);
      for (std::size_t j = 0; j < i; ++j)
        if ((*D)(ri, F->pi0(e[j])) > t) return -1;
    }
    thread_local std::vector<int> img;
    img.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) img[i] = F->pi(e[i]);
    std::sort(img.begin(), img.end());
    if (!host_edge(*D, pp, img)) return -1;
    return chi->colour(img, *D);
  }
};

// ---------------------------------------------------------------------------
// bounded monochromatic walk search in G^t (x) F

struct WalkQuery {
  std::vector<int> start;  // sorted (r-1)-set of leaves
  std::vector<int> pool;   // candidate next vertices, tried in this order
  std::function<bool(const std::vector<int>&)> accept;  // on the sorted end tuple
  int colour = 0;
  int max_order = 9;
  int norm_cap = 0;  // roots of the whole walk pairwise within this
  std::uint64_t budget = 100000;
};

struct WalkSearch {
  bool found = false;
  bool exhaustive = true;
  TightWalk walk;
  std::uint64_t checks = 0;
};

// Depth-first over walks of order at most max_order whose windows have the
// query colour; col returns -1 on non-edges.
inline WalkSearch search_mono_walk(const SForest& F, const DistTable& D, const LeafSetColouring& col, int r,
                                   const WalkQuery& q) {
  WalkSearch res;
  std::vector<int> seq = q.start, roots;
  for (int v : seq) roots.push_back(F.pi0(v));
  if ((int)seq.size() != r - 1 || D.spread(roots) > q.norm_cap) return res;
  std::vector<int> w(r);
  std::function<bool()> go = [&]() -> bool {
    if ((int)seq.size() >= r) {
      std::vector<int> tail(seq.end() - (r - 1), seq.end());
      if (std::adjacent_find(tail.begin(), tail.end(), std::greater_equal<int>()) == tail.end() && q.accept(tail))
        return true;
    }
    if ((int)seq.size() >= q.max_order) return false;
    for (int x : q.pool) {
      if (++res.checks > q.budget) {
        res.exhaustive = false;
        return false;
      }
      if (std::find(seq.end() - (r - 1), seq.end(), x) != seq.end()) continue;
      int rx = F.pi0(x);
      bool far = false;
      for (int y : roots)
        if (D(y, rx) > q.norm_cap) {
          far = true;
          break;
        }
      if (far) continue;
      std::copy(seq.end() - (r - 1), seq.end(), w.begin());
      w[r - 1] = x;
      std::sort(w.begin(), w.end());
      if (col(w) != q.colour) continue;
      seq.push_back(x);
      roots.push_back(rx);
      if (go()) return true;
      seq.pop_back();
      roots.pop_back();
      if (!res.exhaustive) return false;
    }
    return false;
  };
  if (go()) {
    res.found = true;
    res.walk.verts = seq;
  }
  return res;
}

inline int walk_norm(const SForest& F, const DistTable& D, const TightWalk& W) {
  std::vector<int> roots;
  for (int v : W.verts) roots.push_back(F.pi0(v));
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return D.spread(roots);
}

// lowest common ancestor of a nonempty vertex set
inline int lca_of(const OrderedForest& T, const std::vector<int>& e) {
  int a = e[0];
  for (int v : e)
    while (a >= 0 && !T.is_ancestor(a, v)) a = T.parent(a);
  return a;
}

// Calls fn on the k-subsets of xs (sorted) in lexicographic order until fn returns false.
inline void for_each_subset(const std::vector<int>& xs, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  if (k > (int)xs.size() || k < 0) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> cur(k);
  while (true) {
    for (int i = 0; i < k; ++i) cur[i] = xs[idx[i]];
    if (!fn(cur)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == (int)xs.size() - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// ---------------------------------------------------------------------------
// k-disconnectedness

struct DisconnectionReport {
  bool ok = true;          // no violating walk was found
  bool exhaustive = true;  // the scan finished within budget
  int root = -1;           // ground vertex of the violating tree
  std::vector<int> S, T;
  TightWalk walk;
  int colour = -1, norm = -1;
  std::uint64_t starts = 0, checks = 0;
  std::string reason;
};

// Every monochromatic walk of order <= 3r between independent same-type
// (r-1)-sets of one tree must have norm >= k. col colours G^t (x) F with
// 0..palette-1 and returns -1 on non-edges.
inline DisconnectionReport check_disconnected(const SForest& F, const DistTable& D, const LeafSetColouring& col,
                                              int palette, int r, int k, std::uint64_t budget = 5'000'000) {
  DisconnectionReport rep;
  if (k <= 0) {
    rep.reason = "norms are nonnegative";
    return rep;
  }
  const auto& T = F.forest();
  std::vector<int> all_leaves = leaves(T);
  for (int root : T.roots()) {
    int v = F.pi0(root);
    std::vector<int> level_count(T.height() + 1, 0);
    for (int x = root; x < T.subtree_end(root); ++x) ++level_count[T.level(x)];
    auto L = F.tree_leaves(v);
    std::vector<int> pool = L;
    for (int x : all_leaves)
      if (F.pi0(x) != v && D(v, F.pi0(x)) < k) pool.push_back(x);
    bool stop = false;
    for_each_subset(L, r - 1, [&](const std::vector<int>& S) {
      int l = lca_of(T, S);
      // an independent set of the same type needs another vertex on the level of lca(S)
      if (level_count[T.level(l)] < 2) return true;
      ++rep.starts;
      auto tau = type_of(T, S);
      for (int c = 0; c < palette; ++c) {
        WalkQuery q;
        q.start = S;
        q.pool = pool;
        q.colour = c;
        q.max_order = 3 * r;
        q.norm_cap = k - 1;
        q.budget = budget > rep.checks ? budget - rep.checks : 0;
        q.accept = [&](const std::vector<int>& tail) {
          for (int x : tail)
            if (F.pi0(x) != v) return false;
          return independent_leaf_sets(T, S, tail) && type_of(T, tail) == tau;
        };
        auto ws = search_mono_walk(F, D, col, r, q);
        rep.checks += ws.checks;
        if (ws.found) {
          rep.ok = false;
          rep.root = v;
          rep.S = S;
          rep.T.assign(ws.walk.verts.end() - (r - 1), ws.walk.verts.end());
          rep.walk = ws.walk;
          rep.colour = c;
          rep.norm = walk_norm(F, D, ws.walk);
          rep.reason = "monochromatic walk of norm " + std::to_string(rep.norm) + " < " + std::to_string(k);
          stop = true;
          return false;
        }
        if (!ws.exhaustive) {
          rep.exhaustive = false;
          rep.reason = "budget exhausted after " + std::to_string(rep.checks) + " checks";
          stop = true;
          return false;
        }
      }
      return true;
    });
    if (stop) break;
  }
  if (rep.ok && rep.exhaustive && rep.starts == 0) rep.reason = "no independent same-type pairs";
  return rep;
}

// ---------------------------------------------------------------------------
// states and their properties

enum class FlagStatus { Holds, Violated, Unknown };

inline const char* status_name(FlagStatus s) {
  switch (s) {
    case FlagStatus::Holds: return "holds";
    case FlagStatus::Violated: return "violated";
    default: return "unknown";
  }
}

struct Flag {
  std::string name;
  FlagStatus status = FlagStatus::Unknown;
  std::string mode;  // how the status was decided
  json witness;      // violation data, or the counts behind the verdict
  json to_json() const { return {{"name", name}, {"status", status_name(status)}, {"mode", mode}, {"witness", witness}}; }
};

struct PipelineState {
  int i = 1;
  std::vector<int> U;
  SForest F;
  std::array<Flag, 6> flags;
  std::vector<std::string> notes;  // best-effort substitutions made while building F
  json to_json() const {
    json fl = json::array();
    for (const auto& f : flags) fl.push_back(f.to_json());
    return {{"i", i},           {"U_size", U.size()}, {"forest_size", F.size()},
            {"forest_hash", hex64(fnv1a(to_text(F)))}, {"flags", fl}, {"notes", notes}};
  }
};

struct StageReport {
  std::string stage;
  std::string property;  // the state property that failed or could not be established
  std::string reason;
  bool fatal = false;
  json detail;
  json to_json() const {
    return {{"stage", stage}, {"property", property}, {"reason", reason}, {"fatal", fatal}, {"detail", detail}};
  }
};

struct PipelineOptions {
  std::uint64_t seed = 1;
  std::uint64_t aux_budget = 512;         // walk-search checks per (edge, label, orientation)
  std::uint64_t disc_budget = 2'000'000;  // check_disconnected
  std::uint64_t clean_budget = 200'000;   // exhaustive cleanliness scan
  std::uint64_t clean_samples = 20000;
  std::uint64_t path_budget = 20000;      // long_mono_path nodes per label
  std::size_t tensor_limit = 200'000;     // materialize G^c (x) F only below this many edges
  int materialize_n = 64;                 // and only when n is at most this
  bool strict = false;                    // stop at the first stage that misses its guarantee
};

struct PipelineContext {
  ParamSchedule S;
  const GroundGraph* G = nullptr;
  DistTable D;
  HostColouring chi;
  PipelineOptions opt;

  PipelineContext(ParamSchedule s, const GroundGraph& g, HostColouring c, PipelineOptions o = {})
      : S(std::move(s)), G(&g), D(g), chi(std::move(c)), opt(o) {}

  TensorColouring tensor(const SForest& F, int t) const { return {&F, &D, &chi, t, S.pp}; }
  LeafSetColouring leaf_colouring(const SForest& F, int t) const {
    auto tc = tensor(F, t);
    return [tc](const std::vector<int>& e) { return tc(e); };
  }
};

// first k vertices other than v in (distance, index) order, within radius
inline std::vector<int> nearest_first(const DistTable& D, int v, int k, int radius) {
  std::vector<std::pair<int, int>> c;
  for (int u = 0; u < D.n; ++u)
    if (u != v && D(v, u) <= radius) c.push_back({D(v, u), u});
  std::sort(c.begin(), c.end());
  std::vector<int> out;
  for (int i = 0; i < (int)c.size() && i < k; ++i) out.push_back(c[i].second);
  return out;
}

// first a children at every vertex
inline SForest trim_arity(const SForest& F, int a) {
  const auto& T = F.forest();
  std::vector<char> mask(F.size(), 1), out(F.size(), 0);
  for (int r : T.roots()) trim_tree(T, mask, r, a, out);
  return F.induced(mask_to_list(out));
}

inline json pair_json(const SForest& F, int v) { return json::array({F.pi(v), F.pi0(v)}); }

inline double size_target(const ParamSchedule& S, int i) {
  return S.n * std::pow(std::max(0.0, 1.0 - 200.0 * S.eps), i);
}

namespace detail {

inline Flag flag_size(const ParamSchedule& S, const PipelineState& st) {
  Flag f{"F1"};
  double target = size_target(S, st.i);
  f.mode = "exact";
  f.witness = {{"size", st.U.size()}, {"target", target}};
  f.status = (double)st.U.size() >= target ? FlagStatus::Holds : FlagStatus::Violated;
  return f;
}

inline Flag flag_shape(const ParamSchedule& S, const PipelineState& st) {
  Flag f{"F2"};
  f.mode = "exact";
  const auto& T = st.F.forest();
  const int c = S.C(st.i);
  auto bad = [&](json w) {
    f.status = FlagStatus::Violated;
    f.witness = std::move(w);
    return f;
  };
  if (st.F.root_set() != st.U) return bad({{"kind", "roots"}, {"roots", st.F.root_set().size()}, {"U", st.U.size()}});
  if (T.height() != st.i) return bad({{"kind", "height"}, {"height", T.height()}});
  for (int v = 0; v < (int)T.size(); ++v) {
    if (T.is_leaf(v) && T.level(v) != st.i) return bad({{"kind", "leaf level"}, {"vertex", pair_json(st.F, v)}, {"level", T.level(v)}});
    if (!T.is_leaf(v) && (int)T.children(v).size() != c)
      return bad({{"kind", "arity"}, {"vertex", pair_json(st.F, v)}, {"arity", T.children(v).size()}, {"want", c}});
  }
  f.status = FlagStatus::Holds;
  f.witness = {{"vertices", T.size()}};
  return f;
}

inline Flag flag_short_separated(const PipelineContext& cx, const PipelineState& st) {
  Flag f{"F3"};
  f.mode = "exact";
  const auto& T = st.F.forest();
  const int d1 = cx.S.D(1), b = cx.S.B(st.i);
  for (int v = 0; v < (int)T.size(); ++v) {
    if (T.is_root(v)) continue;
    int p = T.parent(v), dist = cx.D(st.F.pi(p), st.F.pi(v));
    if (dist > d1) {
      f.status = FlagStatus::Violated;
      f.witness = {{"kind", "short"}, {"parent", pair_json(st.F, p)}, {"child", pair_json(st.F, v)}, {"dist", dist}, {"k", d1}};
      return f;
    }
  }
  auto sep = is_d_separated(st.F, *cx.G, b);
  if (!sep.ok) {
    f.status = FlagStatus::Violated;
    f.witness = {{"kind", "separation"}, {"u", sep.u}, {"v", sep.v}, {"shared", sep.shared}, {"b", b}};
    return f;
  }
  f.status = FlagStatus::Holds;
  return f;
}

inline Flag flag_clean(const PipelineContext& cx, const PipelineState& st) {
  Flag f{"F4"};
  const int c = cx.S.C(st.i), r = cx.S.r;
  if (cx.chi.kind == "mono") {
    f.status = FlagStatus::Holds;
    f.mode = "constant host colouring";
    return f;
  }
  auto tc = cx.tensor(st.F, c);
  const auto& T = st.F.forest();
  std::map<std::pair<std::vector<int>, ForestType>, std::pair<std::vector<int>, int>> seen;
  std::uint64_t edges = 0;
  bool clash = false;
  json w;
  bool done = for_each_norm_edge(
      *cx.G, st.F, c, r,
      [&](const std::vector<int>& e) {
        int col = tc(e);
        if (col < 0) return true;
        ++edges;
        auto key = std::make_pair(root_set_of(st.F, e), type_of(T, e));
        auto [it, fresh] = seen.try_emplace(key, e, col);
        if (!fresh && it->second.second != col) {
          clash = true;
          w = {{"e", it->second.first}, {"f", e}, {"colours", {it->second.second, col}}};
          return false;
        }
        return true;
      },
      cx.opt.clean_budget);
  if (clash) {
    f.status = FlagStatus::Violated;
    f.mode = "scan";
    f.witness = w;
    return f;
  }
  if (done) {
    f.status = FlagStatus::Holds;
    f.mode = "exhaustive";
    f.witness = {{"coloured_edges", edges}};
    return f;
  }
  // sampled: swap leaves inside their own trees and compare
  std::mt19937_64 rng(cx.opt.seed ^ 0xC1EA7ULL);
  auto L = leaves(T);
  for (std::uint64_t k = 0; k < cx.opt.clean_samples && !L.empty(); ++k) {
    int x = L[rng() % L.size()];
    std::vector<int> e{x};
    for (int tries = 0; tries < 8 * r && (int)e.size() < r; ++tries) {
      int y = L[rng() % L.size()];
      if (std::find(e.begin(), e.end(), y) == e.end() && cx.D(st.F.pi0(x), st.F.pi0(y)) <= c) e.push_back(y);
    }
    if ((int)e.size() < r) continue;
    std::sort(e.begin(), e.end());
    std::vector<int> g = e;
    int j = (int)(rng() % r);
    auto same = st.F.tree_leaves(st.F.pi0(g[j]));
    g[j] = same[rng() % same.size()];
    std::sort(g.begin(), g.end());
    if (std::adjacent_find(g.begin(), g.end()) != g.end() || g == e) continue;
    int ce = tc(e), cg = tc(g);
    if (ce < 0 || cg < 0 || ce == cg) continue;
    if (type_of(T, e) != type_of(T, g)) continue;
    f.status = FlagStatus::Violated;
    f.mode = "sampled";
    f.witness = {{"e", e}, {"f", g}, {"colours", {ce, cg}}};
    return f;
  }
  f.mode = "sampled";
  f.witness = {{"scanned_edges", edges}, {"samples", cx.opt.clean_samples}};
  return f;
}

inline json disconnection_json(const DisconnectionReport& d) {
  return {{"root", d.root},     {"S", d.S},         {"T", d.T},       {"walk", d.walk.verts},
          {"colour", d.colour}, {"norm", d.norm},   {"starts", d.starts}, {"checks", d.checks}};
}

inline Flag flag_disconnected(const PipelineContext& cx, const PipelineState& st) {
  Flag f{"F5"};
  const int c = cx.S.C(st.i);
  auto rep = check_disconnected(st.F, cx.D, cx.leaf_colouring(st.F, c), cx.S.s, cx.S.r, c, cx.opt.disc_budget);
  f.witness = disconnection_json(rep);
  if (!rep.ok) {
    f.status = FlagStatus::Violated;
    f.mode = "search";
  } else if (rep.exhaustive) {
    f.status = FlagStatus::Holds;
    f.mode = rep.starts == 0 ? "vacuous" : "exhaustive";
  } else {
    f.mode = "budget";
  }
  return f;
}

inline Flag flag_augmentation(const PipelineState& st, const PipelineState* prev) {
  Flag f{"F6"};
  f.mode = "exact";
  if (st.i == 1 || !prev) {
    f.status = FlagStatus::Holds;
    f.mode = "vacuous";
    return f;
  }
  auto rep = is_augmentation(st.F, prev->F);
  f.status = rep.ok ? FlagStatus::Holds : FlagStatus::Violated;
  if (!rep.ok) f.witness = {{"root", rep.root}, {"vertex", rep.vertex}, {"reason", rep.reason}};
  return f;
}

}  // namespace detail

// (F1)-(F6) recomputed from U_i and F_i alone.
inline void verify_flags(const PipelineContext& cx, PipelineState& st, const PipelineState* prev) {
  st.flags[0] = detail::flag_size(cx.S, st);
  st.flags[1] = detail::flag_shape(cx.S, st);
  st.flags[2] = detail::flag_short_separated(cx, st);
  st.flags[3] = detail::flag_clean(cx, st);
  st.flags[4] = detail::flag_disconnected(cx, st);
  st.flags[5] = detail::flag_augmentation(st, prev);
}

// Re-checks each violated flag's witness from scratch; holding flags must name
// how they were decided. Returns the problems found (empty when all flags are backed).
inline std::vector<std::string> confirm_flags(const PipelineContext& cx, const PipelineState& st,
                                              const PipelineState* prev) {
  std::vector<std::string> bad;
  const auto& T = st.F.forest();
  for (const auto& f : st.flags) {
    if (f.status == FlagStatus::Unknown) {
      bad.push_back(f.name + ": no verdict (" + f.mode + ")");
      continue;
    }
    if (f.status == FlagStatus::Holds) {
      if (f.mode.empty()) bad.push_back(f.name + ": holds without a method");
      continue;
    }
    const auto& w = f.witness;
    bool ok = false;
    try {
      if (f.name == "F1") {
        ok = (double)st.U.size() < size_target(cx.S, st.i);
      } else if (f.name == "F2") {
        auto kind = w.at("kind").get<std::string>();
        if (kind == "roots") ok = st.F.root_set() != st.U;
        if (kind == "height") ok = T.height() != st.i;
        if (kind == "leaf level" || kind == "arity") {
          auto pr = w.at("vertex").get<std::vector<int>>();
          int v = st.F.find_pair(pr[0], pr[1]);
          ok = v >= 0 && (kind == "arity" ? !T.is_leaf(v) && (int)T.children(v).size() != cx.S.C(st.i)
                                          : T.is_leaf(v) && T.level(v) != st.i);
        }
      } else if (f.name == "F3") {
        if (w.at("kind") == "short") {
          auto p = w.at("parent").get<std::vector<int>>(), c = w.at("child").get<std::vector<int>>();
          int pv = st.F.find_pair(p[0], p[1]), cv = st.F.find_pair(c[0], c[1]);
          ok = pv >= 0 && cv >= 0 && T.parent(cv) == pv && cx.D(p[0], c[0]) > cx.S.D(1);
        } else {
          int u = w.at("u"), v = w.at("v"), x = w.at("shared");
          bool in_u = false, in_v = false;
          for (int y : st.F.tree_vertices(u)) in_u = in_u || st.F.pi(y) == x;
          for (int y : st.F.tree_vertices(v)) in_v = in_v || st.F.pi(y) == x;
          ok = u != v && in_u && in_v && cx.D(u, v) <= cx.S.B(st.i);
        }
      } else if (f.name == "F4") {
        auto e = w.at("e").get<std::vector<int>>(), g = w.at("f").get<std::vector<int>>();
        auto tc = cx.tensor(st.F, cx.S.C(st.i));
        int ce = tc(e), cg = tc(g);
        ok = ce >= 0 && cg >= 0 && ce != cg && root_set_of(st.F, e) == root_set_of(st.F, g) &&
             type_of(T, e) == type_of(T, g);
      } else if (f.name == "F5") {
        TightWalk W{w.at("walk").get<std::vector<int>>()};
        auto S = w.at("S").get<std::vector<int>>(), Tt = w.at("T").get<std::vector<int>>();
        int c = w.at("colour"), k = cx.S.C(st.i), r = cx.S.r;
        auto tc = cx.tensor(st.F, k);
        auto chk = validate_walk(r, [&](const std::vector<int>& e) { return tc(e) == c; }, W, true);
        std::vector<int> s0(W.verts.begin(), W.verts.begin() + (r - 1)), t0(W.verts.end() - (r - 1), W.verts.end());
        ok = chk.ok && s0 == S && t0 == Tt && (int)W.order() <= 3 * r && walk_norm(st.F, cx.D, W) < k &&
             independent_leaf_sets(T, S, Tt) && type_of(T, S) == type_of(T, Tt);
      } else if (f.name == "F6") {
        ok = prev && !is_augmentation(st.F, prev->F).ok;
      }
    } catch (const std::exception& ex) {
      bad.push_back(f.name + ": malformed witness (" + ex.what() + ")");
      continue;
    }
    if (!ok) bad.push_back(f.name + ": witness does not confirm the violation");
  }
  return bad;
}

// ---------------------------------------------------------------------------
// separation and cleaning stages

namespace detail {

inline std::size_t full_tree_size(int a, int h) {
  std::size_t s = 1, lv = 1;
  for (int i = 0; i < h; ++i) s += (lv *= (std::size_t)a);
  return s;
}

}  // namespace detail

// b-separation of F followed by trimming to b-ary. A counting witness (roots
// pairwise within b whose disjoint trees cannot fit in V(G)) short-circuits
// the search.
inline SForest separate_stage(const PipelineContext& cx, const SForest& F, int i, std::vector<StageReport>& reports,
                              bool& failed) {
  const int b = cx.S.B(i);
  failed = false;
  std::size_t need = detail::full_tree_size(b, i);
  for (int v : F.root_set()) {
    std::size_t in_ball = 0;
    for (int u : F.root_set()) in_ball += (2 * cx.D(u, v) <= b);
    if (in_ball * need > (std::size_t)cx.S.n) {
      reports.push_back({"separation", "F3", "b-separated b-ary trees cannot fit: pairwise-close roots need disjoint images",
                         cx.opt.strict, {{"centre", v}, {"roots_within_b/2", in_ball}, {"tree_size", need}, {"n", cx.S.n}, {"b", b}}});
      failed = true;
      return trim_arity(F, b);
    }
  }
  auto res = separate_forest(F, *cx.G, b, cx.opt.seed + 1000003ULL * i);
  if (res.ok) return res.forest;
  reports.push_back({"separation", "F3", res.reason, cx.opt.strict,
                     {{"failing_edge", {res.failing_edge.first, res.failing_edge.second}}, {"passes", res.passes}}});
  failed = true;
  return trim_arity(F, b);
}

// Clean c-ary subforest of G^{c_i} (x) F. Uncoloured tensor edges form an extra colour class.
inline SForest clean_stage(const PipelineContext& cx, const SForest& F, int i, std::vector<StageReport>& reports,
                           bool& failed) {
  const int c = cx.S.C(i), r = cx.S.r;
  failed = false;
  std::size_t edges = 0;
  bool small = cx.S.n <= cx.opt.materialize_n &&
               for_each_norm_edge(*cx.G, F, c, r, [&](const std::vector<int>&) { return ++edges <= cx.opt.tensor_limit; });
  small = small && edges <= cx.opt.tensor_limit;
  if (!small) {
    reports.push_back({"cleaning", "F4", "tensor too large to materialize; trimmed without cleaning", cx.opt.strict,
                       {{"tensor_edges_at_least", edges}, {"limit", cx.opt.tensor_limit}}});
    failed = true;
    return trim_arity(F, c);
  }
  auto H = power_hypergraph(*cx.G, c, r);
  auto tc = cx.tensor(F, c);
  const int s = cx.S.s;
  LeafSetColouring col = [tc, s](const std::vector<int>& e) {
    int x = tc(e);
    return x < 0 ? s : x;
  };
  auto res = clean_forest(H, F, col, c, s + 1);
  if (res.ok) return res.forest;
  reports.push_back({"cleaning", "F4", res.reason, cx.opt.strict, {{"method", res.method}, {"budget_hit", res.budget_hit}}});
  failed = true;
  return trim_arity(F, c);
}

// U_1 = V(G); stars on the d_1 nearest vertices, then separation and cleaning.
inline std::optional<PipelineState> initial_state(const PipelineContext& cx, std::vector<StageReport>& reports) {
  const int n = cx.G->n(), d1 = cx.S.D(1);
  std::vector<std::pair<int, std::vector<int>>> stars;
  for (int v = 0; v < n; ++v) {
    auto kids = nearest_first(cx.D, v, d1, d1);
    if ((int)kids.size() < d1) {
      reports.push_back({"initial stars", "F2", "G^{d_1} has a vertex of degree below d_1", true, {{"vertex", v}}});
      return std::nullopt;
    }
    std::sort(kids.begin(), kids.end());
    stars.push_back({v, kids});
  }
  PipelineState st;
  st.i = 1;
  st.U.resize(n);
  std::iota(st.U.begin(), st.U.end(), 0);
  SForest F = star_forest(n, stars);
  bool failed = false;
  F = separate_stage(cx, F, 1, reports, failed);
  if (failed) {
    st.notes.push_back("separation skipped: trimmed to b_1-ary");
    if (cx.opt.strict) return std::nullopt;
  }
  F = clean_stage(cx, F, 1, reports, failed);
  if (failed) {
    st.notes.push_back("cleaning skipped: trimmed to c_1-ary");
    if (cx.opt.strict) return std::nullopt;
  }
  st.F = std::move(F);
  verify_flags(cx, st, nullptr);
  return st;
}

// ---------------------------------------------------------------------------
// auxiliary colouring of G^{a_i}[U_i]

struct AuxLabel {
  int colour = 0, type = 0;                    // type indexes AuxColouring::types
  std::optional<TightWalk> forward, backward;  // F(u) to F(v), and F(v) to F(u), for u < v
};

struct AuxEdge {
  int u = -1, v = -1;
  std::vector<AuxLabel> labels;  // increasing (colour, type)
  bool grey = false, unknown = false;
  std::uint64_t checks = 0;
  const AuxLabel* label(int c, int t) const {
    for (const auto& L : labels)
      if (L.colour == c && L.type == t) return &L;
    return nullptr;
  }
};

struct AuxColouring {
  int i = 0, a = 0;
  std::vector<ForestType> types;  // of (r-1)-sets inside one height-i tree
  GroundGraph host;               // G^{a_i}[U_i], on the vertex set of G
  std::vector<AuxEdge> edges;     // sorted by (u, v)
  std::map<std::pair<int, int>, int> index;
  std::size_t grey = 0, unknown = 0, labelled = 0;

  const AuxEdge* edge(int u, int v) const {
    auto it = index.find({std::min(u, v), std::max(u, v)});
    return it == index.end() ? nullptr : &edges[it->second];
  }
  json summary() const {
    return {{"i", i}, {"a", a}, {"types", types.size()}, {"edges", edges.size()},
            {"grey", grey}, {"unknown", unknown}, {"labelled", labelled}};
  }
};

inline std::vector<ForestType> leaf_set_types(int i, int k) {
  std::vector<ForestType> out;
  for (auto& t : balanced_tree_types(i, k))
    if (type_leaves(t) == k) out.push_back(t);
  return out;
}

namespace detail {

// first `cap` (r-1)-subsets of L(F(root)) of each type; complete[t] when none were dropped
struct StartSets {
  std::vector<std::vector<std::vector<int>>> by_type;
  std::vector<char> complete;
};

inline StartSets start_sets(const SForest& F, int root, int k, const std::vector<ForestType>& types, std::size_t cap,
                            std::size_t scan_cap = 50000) {
  StartSets ss;
  ss.by_type.resize(types.size());
  ss.complete.assign(types.size(), 1);
  const auto& T = F.forest();
  std::size_t scanned = 0;
  bool cut = false;
  for_each_subset(F.tree_leaves(root), k, [&](const std::vector<int>& S) {
    if (++scanned > scan_cap) {
      cut = true;
      return false;
    }
    auto it = std::find(types.begin(), types.end(), type_of(T, S));
    if (it == types.end()) return true;
    auto t = it - types.begin();
    if (ss.by_type[t].size() < cap) ss.by_type[t].push_back(S);
    else ss.complete[t] = 0;
    return true;
  });
  if (cut) std::fill(ss.complete.begin(), ss.complete.end(), 0);
  return ss;
}

// colour-c walk of order <= 3r and norm <= c_i from a type-t set of F(from) to one of F(to);
// the search stays on the leaves of these two trees
inline WalkSearch aux_search(const PipelineContext& cx, const PipelineState& st, const LeafSetColouring& col,
                             const StartSets& starts, int from, int to, int c, int t, const ForestType& tau,
                             std::uint64_t budget) {
  const auto& T = st.F.forest();
  const int r = cx.S.r;
  auto pool = st.F.tree_leaves(to);
  auto Lf = st.F.tree_leaves(from);
  pool.insert(pool.end(), Lf.begin(), Lf.end());
  WalkSearch out;
  for (const auto& S : starts.by_type[t]) {
    WalkQuery q;
    q.start = S;
    q.pool = pool;
    q.colour = c;
    q.max_order = 3 * r;
    q.norm_cap = cx.S.C(st.i);
    q.budget = budget > out.checks ? budget - out.checks : 0;
    q.accept = [&](const std::vector<int>& tail) {
      for (int x : tail)
        if (st.F.pi0(x) != to) return false;
      return type_of(T, tail) == tau;
    };
    auto ws = search_mono_walk(st.F, cx.D, col, r, q);
    out.checks += ws.checks;
    if (ws.found) {
      out.found = true;
      out.walk = ws.walk;
      return out;
    }
    if (!ws.exhaustive) {
      out.exhaustive = false;
      return out;
    }
  }
  out.exhaustive = out.exhaustive && starts.complete[t];
  return out;
}

}  // namespace detail

inline AuxColouring build_aux_colouring(const PipelineContext& cx, const PipelineState& st) {
  AuxColouring ax;
  ax.i = st.i;
  ax.a = cx.S.A(st.i);
  ax.types = leaf_set_types(st.i, cx.S.r - 1);
  std::vector<std::pair<int, int>> es;
  for (std::size_t x = 0; x < st.U.size(); ++x)
    for (std::size_t y = x + 1; y < st.U.size(); ++y)
      if (cx.D(st.U[x], st.U[y]) <= ax.a) es.push_back({st.U[x], st.U[y]});
  ax.host = GroundGraph(cx.G->n(), es);
  auto col = cx.leaf_colouring(st.F, cx.S.C(st.i));
  const std::uint64_t budget = cx.opt.aux_budget;
  std::map<int, detail::StartSets> starts;
  auto starts_of = [&](int v) -> const detail::StartSets& {
    auto it = starts.find(v);
    if (it == starts.end()) it = starts.emplace(v, detail::start_sets(st.F, v, cx.S.r - 1, ax.types, budget)).first;
    return it->second;
  };
  for (auto [u, v] : es) {
    AuxEdge E;
    E.u = u;
    E.v = v;
    bool settled = true;
    for (int c = 0; c < cx.S.s; ++c)
      for (int t = 0; t < (int)ax.types.size(); ++t) {
        auto f = detail::aux_search(cx, st, col, starts_of(u), u, v, c, t, ax.types[t], budget);
        auto b = detail::aux_search(cx, st, col, starts_of(v), v, u, c, t, ax.types[t], budget);
        E.checks += f.checks + b.checks;
        if (f.found || b.found) {
          AuxLabel L;
          L.colour = c;
          L.type = t;
          if (f.found) L.forward = f.walk;
          if (b.found) L.backward = b.walk;
          E.labels.push_back(std::move(L));
        } else {
          settled = settled && f.exhaustive && b.exhaustive;
        }
      }
    E.grey = E.labels.empty() && settled;
    E.unknown = E.labels.empty() && !settled;
    ax.grey += E.grey;
    ax.unknown += E.unknown;
    ax.labelled += !E.labels.empty();
    ax.index[{u, v}] = (int)ax.edges.size();
    ax.edges.push_back(std::move(E));
  }
  return ax;
}

// host colouring with colour 1 on the edges selected by pick
inline GraphColouring aux_indicator(const AuxColouring& ax, const std::function<bool(const AuxEdge&)>& pick) {
  return GraphColouring::from(ax.host, [&](int u, int v) {
    const AuxEdge* e = ax.edge(u, v);
    return e && pick(*e) ? 1 : 0;
  });
}

// ---------------------------------------------------------------------------
// certificates

struct WalkCertificate {
  std::vector<int> walk;  // a tight walk in H = G^{p'}
  int r = 3, colour = -1, n = 0, p = 0, pp = 0, level = 0;
  double target = 0;  // n / p
  std::map<int, int> multiplicity;
  std::uint64_t seed = 0;
  std::string schedule_hash, graph_hash;
  json colouring;  // HostColouring
  json bounds;
  std::string verdict;

  json to_json() const {
    json m = json::object();
    for (auto [v, k] : multiplicity) m[std::to_string(v)] = k;
    return {{"walk", walk},         {"r", r},           {"colour", colour},   {"n", n},
            {"p", p},               {"p_prime", pp},    {"level", level},     {"target", target},
            {"multiplicity", m},    {"seed", seed},     {"schedule_hash", schedule_hash},
            {"graph_hash", graph_hash}, {"colouring", colouring}, {"bounds", bounds}, {"verdict", verdict}};
  }
  static WalkCertificate from_json(const json& j) {
    WalkCertificate c;
    c.walk = j.at("walk").get<std::vector<int>>();
    c.r = j.at("r");
    c.colour = j.at("colour");
    c.n = j.at("n");
    c.p = j.at("p");
    c.pp = j.at("p_prime");
    c.level = j.value("level", 0);
    c.target = j.at("target");
    for (auto& [k, v] : j.at("multiplicity").items()) c.multiplicity[std::stoi(k)] = v.get<int>();
    c.seed = j.value("seed", (std::uint64_t)0);
    c.schedule_hash = j.value("schedule_hash", "");
    c.graph_hash = j.value("graph_hash", "");
    c.colouring = j.at("colouring");
    c.bounds = j.value("bounds", json::object());
    c.verdict = j.value("verdict", "");
    return c;
  }
};

inline std::string graph_hash(const GroundGraph& G) { return hex64(fnv1a(G.to_text())); }

struct CertificateCheck {
  bool ok = true;
  int window = -1;  // first offending window, when the failure is local
  std::string reason;
};

// Independent re-validation against G and the host colouring named in the certificate.
inline CertificateCheck verify_certificate(const WalkCertificate& C, const GroundGraph& G) {
  CertificateCheck res;
  auto fail = [&](int w, std::string why) {
    res.ok = false;
    res.window = w;
    res.reason = std::move(why);
    return res;
  };
  if (!C.graph_hash.empty() && C.graph_hash != graph_hash(G)) return fail(-1, "graph hash mismatch");
  HostColouring chi;
  try {
    chi = HostColouring::from_json(C.colouring);
  } catch (const std::exception& e) {
    return fail(-1, std::string("bad colouring: ") + e.what());
  }
  if (C.r < 2 || (int)C.walk.size() < C.r) return fail(-1, "walk shorter than r");
  for (int v : C.walk)
    if (v < 0 || v >= G.n()) return fail(-1, "vertex outside V(G)");
  DistTable D(G);
  for (int i = 0; i + C.r <= (int)C.walk.size(); ++i) {
    std::vector<int> w(C.walk.begin() + i, C.walk.begin() + i + C.r);
    std::sort(w.begin(), w.end());
    if (std::adjacent_find(w.begin(), w.end()) != w.end())
      return fail(i, "window " + std::to_string(i) + " repeats a vertex");
    if (D.spread(w) > C.pp) return fail(i, "window " + std::to_string(i) + " is not an edge of G^{p'}");
    if (chi.colour(w, D) != C.colour)
      return fail(i, "window " + std::to_string(i) + " has colour " + std::to_string(chi.colour(w, D)));
  }
  std::map<int, int> m;
  for (int v : C.walk) ++m[v];
  if (m != C.multiplicity) return fail(-1, "multiplicity map does not match the walk");
  for (auto [v, k] : m)
    if (k > C.p) return fail(-1, "vertex " + std::to_string(v) + " used " + std::to_string(k) + " > p times");
  if ((double)C.walk.size() < C.target) return fail(-1, "walk order below n/p");
  return res;
}

// ---------------------------------------------------------------------------
// one iteration

struct StepResult {
  std::optional<WalkCertificate> certificate;
  std::optional<PipelineState> next;
  json aux, branch;
  std::vector<StageReport> reports;
};

namespace detail {

inline WalkCertificate make_certificate(const PipelineContext& cx, const std::vector<int>& walk, int colour,
                                        int level) {
  WalkCertificate C;
  C.walk = walk;
  C.r = cx.S.r;
  C.colour = colour;
  C.n = cx.G->n();
  C.p = cx.S.p;
  C.pp = cx.S.pp;
  C.level = level;
  C.target = (double)C.n / C.p;
  for (int v : walk) ++C.multiplicity[v];
  C.seed = cx.opt.seed;
  C.schedule_hash = cx.S.hash();
  C.graph_hash = graph_hash(*cx.G);
  C.colouring = cx.chi.to_json();
  const int radius = cx.S.C(level) + cx.S.h * cx.S.D(1);
  std::size_t ball = 0;
  for (int v = 0; v < C.n; ++v) {
    std::size_t b = 0;
    for (int u = 0; u < C.n; ++u) b += cx.D(u, v) <= radius;
    ball = std::max(ball, b);
  }
  int observed = 0;
  for (auto [v, k] : C.multiplicity) observed = std::max(observed, k);
  C.bounds = {{"paper_log10", std::log10(3.0 * C.r) + radius * std::log10(cx.S.delta() + 1.0)},
              {"ball", 3 * C.r * ball},
              {"observed", observed}};
  return C;
}

// Non-grey path p_1 ... p_m of colour (c, t) to a colour-c walk of G^{c_i} (x) F_i through
// versatile sets; the longest convertible stretch is kept.
inline std::optional<TightWalk> convert_path(const PipelineContext& cx, const PipelineState& st,
                                             const AuxColouring& ax, int c, int t, const std::vector<int>& P,
                                             json& log) {
  const int r = cx.S.r, ci = cx.S.C(st.i);
  const auto& tau = ax.types[t];
  auto tc = cx.tensor(st.F, ci);
  LeafSetColouring col = [tc](const std::vector<int>& e) { return tc(e); };
  std::map<ForestType, std::optional<std::vector<int>>> cache;
  std::vector<std::optional<std::vector<int>>> A(P.size());
  for (std::size_t j = 0; j < P.size(); ++j) {
    auto tree = st.F.tree_at(P[j]).forest();
    auto key = type_code(tree);
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto w = search_versatile_set(tree, tau, 3 * r);
      it = cache.emplace(key, w.ok ? std::optional<std::vector<int>>(w.e) : std::nullopt).first;
    }
    if (!it->second) continue;
    auto verts = st.F.tree_vertices(P[j]);
    std::vector<int> g;
    for (int x : *it->second) g.push_back(verts[x]);
    A[j] = g;
  }
  auto root_edge = [&](const std::vector<int>& R) { return cx.D.spread(R) <= ci; };
  std::vector<std::optional<TightWalk>> Q(P.size() > 0 ? P.size() - 1 : 0);
  std::size_t rerouted = 0, direct = 0, missing = 0;
  for (std::size_t j = 0; j + 1 < P.size(); ++j) {
    if (!A[j] || !A[j + 1]) {
      ++missing;
      continue;
    }
    const AuxEdge* e = ax.edge(P[j], P[j + 1]);
    const AuxLabel* L = e ? e->label(c, t) : nullptr;
    const auto& Pj = L ? (P[j] < P[j + 1] ? L->forward : L->backward) : std::optional<TightWalk>();
    if (Pj) {
      auto rr = reroute_walk(r, root_edge, st.F, *Pj, *A[j], *A[j + 1]);
      if (rr.ok && validate_walk(r, [&](const std::vector<int>& w) { return tc(w) == c; }, rr.walk, true).ok) {
        Q[j] = rr.walk;
        ++rerouted;
        continue;
      }
    }
    WalkQuery q;
    q.start = *A[j];
    q.pool = st.F.tree_leaves(P[j + 1]);
    auto Lf = st.F.tree_leaves(P[j]);
    q.pool.insert(q.pool.end(), Lf.begin(), Lf.end());
    q.colour = c;
    q.max_order = 3 * r;
    q.norm_cap = ci;
    q.budget = 8 * cx.opt.aux_budget;
    const auto& target = *A[j + 1];
    q.accept = [&](const std::vector<int>& tail) { return tail == target; };
    auto ws = search_mono_walk(st.F, cx.D, col, r, q);
    if (ws.found) {
      Q[j] = ws.walk;
      ++direct;
    } else {
      ++missing;
    }
  }
  std::size_t best_lo = 0, best_len = 0;
  for (std::size_t lo = 0; lo < Q.size();) {
    if (!Q[lo]) {
      ++lo;
      continue;
    }
    std::size_t hi = lo;
    while (hi < Q.size() && Q[hi]) ++hi;
    if (hi - lo > best_len) best_lo = lo, best_len = hi - lo;
    lo = hi;
  }
  log = {{"path_vertices", P.size()}, {"rerouted", rerouted}, {"direct", direct},
         {"missing", missing},        {"kept_segments", best_len}};
  if (best_len == 0) return std::nullopt;
  TightWalk W = *Q[best_lo];
  for (std::size_t j = best_lo + 1; j < best_lo + best_len; ++j) W = concat(W, *Q[j], r);
  return W;
}

inline std::optional<std::vector<int>> find_rd(const SForest& Fnew, const SForest& Fold, const std::vector<int>& xs) {
  std::vector<int> out;
  for (int x : xs) {
    auto [a, b] = root_delete(Fnew, x);
    int w = Fold.find_pair(a, b);
    if (w < 0) return std::nullopt;
    out.push_back(w);
  }
  return out;
}

}  // namespace detail

// Branch (b): grey cliques become the next level.
inline std::optional<PipelineState> grey_step(const PipelineContext& cx, const PipelineState& st,
                                              const AuxColouring& ax, const std::vector<std::vector<int>>& cover,
                                              json& log, std::vector<StageReport>& reports) {
  const int n = cx.G->n(), i = st.i;
  PipelineState nx;
  nx.i = i + 1;
  for (const auto& K : cover) nx.U.insert(nx.U.end(), K.begin(), K.end());
  std::sort(nx.U.begin(), nx.U.end());
  double need = std::max(0.0, 1.0 - 200.0 * cx.S.eps) * st.U.size();
  log["covered"] = nx.U.size();
  log["coverage_target"] = need;
  log["coverage_ok"] = (double)nx.U.size() >= need;
  std::vector<SForest> trees;
  bool contained = true;
  for (const auto& K : cover) {
    for (std::size_t j = 0; j < K.size(); ++j) {
      std::vector<SForest> sub;
      for (std::size_t k = 0; k < K.size(); ++k)
        if (k != j) sub.push_back(st.F.tree_at(K[k]));
      try {
        trees.push_back(augment_tree(K[j], sub));
      } catch (const std::invalid_argument& e) {
        reports.push_back({"augmentation", "F3", std::string("grey clique trees overlap: ") + e.what(), true,
                           {{"clique", K}, {"root", K[j]}}});
        return std::nullopt;
      }
      const auto& Tn = trees.back().forest();
      for (int ch : Tn.children(0)) contained = contained && std::find(K.begin(), K.end(), trees.back().pi(ch)) != K.end() &&
                                                  trees.back().pi(ch) != K[j];
    }
  }
  log["children_in_clique"] = contained;
  if (!contained) {
    reports.push_back({"augmentation", "F6", "children of a new root leave its grey clique", true, {}});
    return std::nullopt;
  }
  SForest F2 = forest_of_trees(n, trees);
  log["pre_augmentation"] = is_augmentation(F2, st.F).ok;
  bool failed = false;
  F2 = separate_stage(cx, F2, i + 1, reports, failed);
  if (failed) {
    nx.notes.push_back("separation skipped: trimmed to b-ary");
    if (cx.opt.strict) return std::nullopt;
  }
  F2 = clean_stage(cx, F2, i + 1, reports, failed);
  if (failed) {
    nx.notes.push_back("cleaning skipped: trimmed to c-ary");
    if (cx.opt.strict) return std::nullopt;
  }
  nx.F = std::move(F2);
  verify_flags(cx, nx, &st);
  // a disconnection witness at level i+1 pulls back to a walk against F_i
  const auto& f5 = nx.flags[4];
  if (f5.status == FlagStatus::Violated) {
    auto Wv = f5.witness.at("walk").get<std::vector<int>>();
    auto rd = detail::find_rd(nx.F, st.F, Wv);
    json chain{{"norm", f5.witness.at("norm")}};
    if (rd) {
      TightWalk R{*rd};
      int nr = walk_norm(st.F, cx.D, R), np = f5.witness.at("norm");
      chain["norm_rd"] = nr;
      chain["lower"] = nr - 2 * cx.S.A(i);
      chain["strict_drop_holds"] = np > nr - 2 * cx.S.A(i);
      chain["c_i-2a_i"] = cx.S.C(i) - 2 * cx.S.A(i);
      chain["c_next"] = cx.S.C(i + 1);
      int x = st.F.pi0((*rd)[0]), y = st.F.pi0(rd->back());
      chain["x"] = x;
      chain["y"] = y;
      if (x != y) {
        const AuxEdge* e = ax.edge(x, y);
        chain["xy_grey"] = e && e->grey;
        chain["xy_unknown"] = e && e->unknown;
      }
      chain["rd_below_c_i"] = nr < cx.S.C(i);
    } else {
      chain["rd"] = "outside F_i";
    }
    log["disconnection_chain"] = chain;
  }
  return nx;
}

inline StepResult pipeline_step(const PipelineContext& cx, const PipelineState& st) {
  StepResult res;
  const int i = st.i;
  auto ax = build_aux_colouring(cx, st);
  res.aux = ax.summary();
  // non-grey monochromatic path, one search per label in lexicographic order
  const long long want = (cx.G->n() + cx.S.A(i) - 1) / cx.S.A(i);
  std::vector<int> best;
  int bc = -1, bt = -1;
  for (int c = 0; c < cx.S.s; ++c)
    for (int t = 0; t < (int)ax.types.size(); ++t) {
      auto chi = aux_indicator(ax, [&](const AuxEdge& e) { return e.label(c, t) != nullptr; });
      auto P = long_mono_path(chi, 1, st.U, cx.opt.path_budget);
      if (P.size() > best.size()) best = P, bc = c, bt = t;
    }
  res.branch["longest_path"] = best.size();
  res.branch["path_target"] = want;
  if (bc >= 0 && (long long)best.size() >= want && best.size() >= 2) {
    res.branch["kind"] = "non-grey path";
    res.branch["label"] = {bc, bt};
    json log;
    auto W = detail::convert_path(cx, st, ax, bc, bt, best, log);
    res.branch["conversion"] = log;
    if (W) {
      auto tc = cx.tensor(st.F, cx.S.C(i));
      bool mono = validate_walk(cx.S.r, [&](const std::vector<int>& w) { return tc(w) == bc; }, *W, true).ok;
      auto proj = project_walk(*W, st.F, *cx.G, cx.S.C(i), cx.S.D(1), cx.S.pp, cx.S.r);
      res.branch["project_walk"] = proj.ok ? "ok" : proj.reason;
      std::vector<int> img;
      for (int v : W->verts) img.push_back(st.F.pi(v));
      auto C = detail::make_certificate(cx, img, bc, i);
      auto chk = verify_certificate(C, *cx.G);
      C.verdict = chk.ok ? "valid" : chk.reason;
      res.branch["tensor_walk_monochromatic"] = mono;
      if (chk.ok && mono) {
        res.certificate = C;
        return res;
      }
      res.reports.push_back({"walk extraction", "certificate", chk.reason, cx.opt.strict, {{"order", img.size()}}});
    } else {
      res.reports.push_back({"walk extraction", "F4", "no stretch of the path could be converted", cx.opt.strict, log});
    }
    if (cx.opt.strict) return res;
  }
  // grey cliques
  auto grey = aux_indicator(ax, [](const AuxEdge& e) { return e.grey; });
  auto cover = greedy_clique_cover(grey, 1, cx.S.D(i + 1) + 1, st.U);
  res.branch["kind"] = "grey cliques";
  res.branch["cliques"] = cover.size();
  if (cover.empty()) {
    res.reports.push_back({"grey cliques", "F1", "no grey K_{d_{i+1}+1} in the auxiliary colouring", true,
                           {{"grey_edges", ax.grey}, {"unknown_edges", ax.unknown}}});
    return res;
  }
  json log;
  res.next = grey_step(cx, st, ax, cover, log, res.reports);
  res.branch["grey_step"] = log;
  return res;
}

// ---------------------------------------------------------------------------
// end to end

struct RunResult {
  std::string kind;   // "certificate", "structure" or "failure"
  std::string label;  // for structure reports
  std::optional<WalkCertificate> certificate;
  std::vector<PipelineState> states;
  std::vector<json> steps;
  std::vector<StageReport> reports;

  json to_json() const {
    json st = json::array(), rp = json::array();
    for (const auto& s : states) st.push_back(s.to_json());
    for (const auto& r : reports) rp.push_back(r.to_json());
    json j{{"kind", kind}, {"label", label}, {"states", st}, {"steps", steps}, {"reports", rp}};
    if (certificate) j["certificate"] = certificate->to_json();
    return j;
  }
};

inline RunResult run_theorem_walk(const PipelineContext& cx) {
  RunResult out;
  auto bad = cx.S.violations();
  if (!bad.empty()) {
    out.kind = "failure";
    out.reports.push_back({"schedule", "hierarchy", bad[0], true, {{"violations", bad}}});
    return out;
  }
  if (cx.G->n() != cx.S.n) {
    out.kind = "failure";
    out.reports.push_back({"schedule", "n", "graph order differs from the schedule", true, {{"graph_n", cx.G->n()}}});
    return out;
  }
  auto s1 = initial_state(cx, out.reports);
  if (!s1) {
    out.kind = "failure";
    return out;
  }
  out.states.push_back(*s1);
  for (int i = 1; i < cx.S.h; ++i) {
    auto step = pipeline_step(cx, out.states.back());
    out.steps.push_back({{"i", i}, {"aux", step.aux}, {"branch", step.branch}});
    for (auto& r : step.reports) out.reports.push_back(r);
    if (step.certificate) {
      out.kind = "certificate";
      out.certificate = step.certificate;
      return out;
    }
    if (!step.next) {
      out.kind = "failure";
      return out;
    }
    out.states.push_back(*step.next);
  }
  const auto& last = out.states.back();
  auto rep = check_disconnected(last.F, cx.D, cx.leaf_colouring(last.F, cx.S.C(last.i)), cx.S.s, cx.S.r, 1,
                                cx.opt.disc_budget);
  out.kind = "structure";
  out.label = rep.ok && rep.exhaustive ? "paper-contradiction at desk scale"
                                       : (rep.ok ? "height h reached; 1-disconnectedness undecided"
                                                 : "height h reached; not 1-disconnected");
  out.steps.push_back({{"final_disconnection", detail::disconnection_json(rep)}});
  return out;
}

// ---------------------------------------------------------------------------
// blow-up reduction

// w_i -> w_i[m_i] with m_i the number of occurrences of w_i among w_1..w_i; vertex v[k] of H[t] is v*t + k
// (0-based k). Empty when some vertex occurs more than t times.
inline std::optional<TightWalk> lift_walk(const TightWalk& W, int t) {
  std::map<int, int> seen;
  TightWalk out;
  out.path = true;
  for (int w : W.verts) {
    int m = ++seen[w];
    if (m > t) return std::nullopt;
    out.verts.push_back(w * t + (m - 1));
  }
  return out;
}

inline std::map<int, int> multiplicities(const TightWalk& W) {
  std::map<int, int> m;
  for (int v : W.verts) ++m[v];
  return m;
}

// colour and walk in H; the walk need not have sorted ends
using HostWalk = std::pair<int, TightWalk>;
using WalkOracle = std::function<std::optional<HostWalk>(const Hypergraph&, const Colouring&)>;

// Longest monochromatic tight walk found by DFS over (r-1)-tuples, each vertex used at most p times.
// Stops at the first walk of order >= target.
inline std::optional<HostWalk> find_mono_walk(const Hypergraph& H, const Colouring& chi, int p, int target,
                                              std::uint64_t budget = 2'000'000) {
  const int r = H.r();
  std::optional<HostWalk> best;
  std::uint64_t checks = 0;
  for (int c = 0; c < chi.palette; ++c) {
    std::unordered_map<std::vector<int>, std::vector<int>, EdgeHash> next;
    for (int i = 0; i < (int)H.edge_count(); ++i) {
      if (chi.colour[i] != c) continue;
      const auto& e = H.edge(i);
      for (int j = 0; j < r; ++j) {
        std::vector<int> k;
        for (int x = 0; x < r; ++x)
          if (x != j) k.push_back(e[x]);
        next[k].push_back(e[j]);
      }
    }
    std::vector<int> seq, use(H.n(), 0);
    TightWalk top;
    std::function<bool()> go = [&]() -> bool {
      if (seq.size() > top.verts.size()) top.verts = seq;
      if ((int)seq.size() >= target) return true;
      std::vector<int> k(seq.end() - (r - 1), seq.end());
      std::sort(k.begin(), k.end());
      auto it = next.find(k);
      if (it == next.end()) return false;
      for (int x : it->second) {
        if (++checks > budget) return false;
        if (use[x] >= p) continue;
        seq.push_back(x);
        ++use[x];
        if (go()) return true;
        --use[x];
        seq.pop_back();
      }
      return false;
    };
    for (int i = 0; i < (int)H.edge_count() && checks <= budget; ++i) {
      if (chi.colour[i] != c) continue;
      const auto& e = H.edge(i);
      seq.assign(e.begin(), e.end() - 1);
      for (int x : seq) ++use[x];
      bool done = go();
      for (int x : seq) --use[x];
      if (done) break;
    }
    if (top.verts.size() >= (std::size_t)r && (!best || top.verts.size() > best->second.verts.size()))
      best = HostWalk{c, top};
    if (best && (int)best->second.verts.size() >= target) break;
  }
  return best;
}

struct BlowupResult {
  bool ok = false;
  std::string stage, reason;
  int colour = -1;
  std::vector<std::vector<int>> copies;  // copies[v]: indices j of the clean copies v[j] of H[d], sorted
  TightWalk walk;                         // in H, monochromatic under the induced colouring
  TightWalk path;                         // in H[p]
  TightWalk path_d;                       // the same path in H[d]
  CleanResult clean;
  WalkCheck check;

  json to_json() const {
    return {{"ok", ok},          {"stage", stage},         {"reason", reason},   {"colour", colour},
            {"copies", copies},  {"walk", walk.verts},     {"path", path.verts}, {"path_in_d", path_d.verts},
            {"clean_method", clean.method}, {"window", check.window}};
  }
};

// chi colours the r-sets of H[d] (vertex v[j] = v*d + j, sorted) with s colours.
inline BlowupResult blowup_reduction(const Hypergraph& H, const std::function<int(const std::vector<int>&)>& chi,
                                     int s, int d, int p, const WalkOracle& oracle,
                                     std::uint64_t budget = 20'000'000) {
  BlowupResult res;
  const int n = H.n(), r = H.r();
  auto fail = [&](std::string stage, std::string why) {
    res.stage = std::move(stage);
    res.reason = std::move(why);
    return res;
  };
  if (p < 1 || d < p) return fail("input", "need 1 <= p <= d");
  if (d > n - 1) return fail("input", "star of size d needs d distinct leaf images");
  std::vector<std::pair<int, std::vector<int>>> stars;
  for (int v = 0; v < n; ++v) {
    std::vector<int> kids;
    for (int j = 0; j < d; ++j) kids.push_back((v + 1 + j) % n);
    stars.push_back({v, kids});
  }
  SForest S = star_forest(n, stars);
  // phi^{-1}: leaf index -> copy index
  std::vector<int> copy_of(S.size(), -1);
  for (int v = 0; v < n; ++v) {
    int root = S.root_vertex(v);
    const auto& kids = S.forest().children(root);
    for (int j = 0; j < (int)kids.size(); ++j) copy_of[kids[j]] = v * d + j;
  }
  // edges of H (x) S with a repeated root have no preimage in H[d]
  LeafSetColouring f = [&](const std::vector<int>& e) {
    std::vector<int> x;
    for (int v : e) x.push_back(copy_of[v]);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (x[i] / d == x[j] / d) return 0;
    std::sort(x.begin(), x.end());
    return chi(x);
  };
  res.clean = clean_forest(H, S, f, p, s, budget);
  if (!res.clean.ok) return fail("clean", res.clean.reason);
  res.copies.assign(n, {});
  for (int v : res.clean.vertices) {
    if (S.forest().is_leaf(v)) res.copies[S.pi0(v)].push_back(copy_of[v] % d);
  }
  for (auto& c : res.copies) {
    std::sort(c.begin(), c.end());
    if ((int)c.size() != p) return fail("clean", "cleaned star does not have p leaves");
  }
  auto lift = [&](int v, int k) { return v * d + res.copies[v][k]; };
  Colouring chi1 = Colouring::from_function(H, s, [&](const Edge& e) {
    std::vector<int> x;
    for (int v : e) x.push_back(lift(v, 0));
    std::sort(x.begin(), x.end());
    return chi(x);
  });
  auto hw = oracle(H, chi1);
  if (!hw) return fail("walk", "walk oracle returned nothing");
  res.colour = hw->first;
  res.walk = hw->second;
  res.check = validate_mono_walk(H, chi1, res.colour, res.walk, false);
  if (!res.check.ok) return fail("walk", "oracle walk: " + res.check.reason);
  auto P = lift_walk(res.walk, p);
  if (!P) return fail("walk", "a vertex is used more than p times");
  res.path = *P;
  res.path_d.path = true;
  for (int x : res.path.verts) res.path_d.verts.push_back(lift(x / p, x % p));
  res.check = validate_walk(
      r,
      [&](const std::vector<int>& e) {
        std::vector<int> u;
        for (int x : e) u.push_back(x / d);
        std::sort(u.begin(), u.end());
        return H.has_edge(u) && chi(e) == res.colour;
      },
      res.path_d, false);
  if (!res.check.ok) return fail("verify", res.check.reason);
  res.ok = true;
  return res;
}

inline BlowupResult blowup_reduction(const Hypergraph& H, const Colouring& chi, int d, int p,
                                     const WalkOracle& oracle, std::uint64_t budget = 20'000'000) {
  Hypergraph B = blow_up(H, d);
  return blowup_reduction(
      H, [&](const std::vector<int>& e) { return chi.of(B, e); }, chi.palette, d, p, oracle, budget);
}

}  // namespace tpr


#endif  // TPR_PIPELINE_HPP
