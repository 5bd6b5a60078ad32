#ifndef TPR_TREES_HPP
#define TPR_TREES_HPP

// Separation and cleaning of forests, Ramsey for copies of a subforest, and
// the X/Y/Z leaf sets inside one tree.

#include <tpr/hypergraph.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace tpr {

constexpr std::uint64_t DEMAND_CAP = 1'000'000'000'000'000'000ULL;

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > DEMAND_CAP / b) return DEMAND_CAP;
  return std::min(DEMAND_CAP, a * b);
}

inline std::uint64_t sat_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double x = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    x = x * (long double)(n - i) / (long double)(i + 1);
    if (x >= (long double)DEMAND_CAP) return DEMAND_CAP;
  }
  return (std::uint64_t)std::llround(x);
}

inline std::uint64_t sat_pow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e-- > 0) {
    r = sat_mul(r, b);
    if (r >= DEMAND_CAP) return DEMAND_CAP;
  }
  return r;
}

// Upper bound on the s-colour Ramsey number for r-sets and a monochromatic n-set.
inline std::uint64_t ramsey_bound(int r, std::uint64_t n, int s) {
  if (n == 0) return 0;
  if (r <= 0 || s <= 1 || n <= (std::uint64_t)r) return std::max<std::uint64_t>(n, r);
  if (r == 1) return sat_mul(s, n - 1) + 1;
  if (r == 2 && s == 2 && n == 3) return 6;
  if (r == 2 && s == 2 && n == 4) return 18;
  if (r == 2 && s == 3 && n == 3) return 17;
  std::uint64_t m = ramsey_bound(r - 1, n - 1, s);
  if (m >= DEMAND_CAP) return DEMAND_CAP;
  std::uint64_t e = sat_binom(m, r - 1);
  if (e >= 64) return DEMAND_CAP;
  return std::min(DEMAND_CAP, sat_pow(s, e) + r - 1);
}

// ---------------------------------------------------------------------------
// copies of a forest S inside a masked subforest of F

// Calls cb(img) for each order-preserving embedding of S with roots into
// `roots` and other vertices into `mask`; pin >= 0 forces img.back() == pin.
template <class CB>
void for_each_copy(const OrderedForest& S, const OrderedForest& F, const std::vector<int>& roots,
                   const std::vector<char>& mask, int pin, CB&& cb) {
  const int m = (int)S.size();
  if (m == 0) {
    cb(std::vector<int>{});
    return;
  }
  std::vector<char> is_root(F.size(), 0);
  for (int v : roots) is_root[v] = 1;
  std::vector<int> img(m, -1);
  bool stop = false;
  std::function<void(int)> go = [&](int i) {
    if (stop) return;
    if (i == m) {
      if (pin >= 0 && img[m - 1] != pin) return;
      if (!cb(img)) stop = true;
      return;
    }
    int lo = i == 0 ? -1 : img[i - 1];
    auto take = [&](int w) {
      if (w <= lo || (pin >= 0 && w > pin)) return;
      img[i] = w;
      go(i + 1);
    };
    if (S.is_root(i)) {
      for (int w : roots) {
        if (stop) return;
        if (is_root[w]) take(w);
      }
    } else {
      for (int w : F.children(img[S.parent(i)])) {
        if (stop) return;
        if (mask[w]) take(w);
      }
    }
  };
  go(0);
}

inline std::vector<std::vector<int>> all_copies(const OrderedForest& S, const OrderedForest& F,
                                                const std::vector<int>& roots, const std::vector<char>& mask,
                                                int pin = -1) {
  std::vector<std::vector<int>> out;
  for_each_copy(S, F, roots, mask, pin, [&](const std::vector<int>& img) {
    out.push_back(img);
    return true;
  });
  return out;
}

// S split as first tree and the rest
inline std::pair<OrderedForest, OrderedForest> split_first_tree(const OrderedForest& S) {
  std::vector<int> a, b;
  for (int v = 0; v < (int)S.size(); ++v) (v < S.subtree_end(0) ? a : b).push_back(v);
  return {S.induced(a), S.induced(b)};
}

// copies of a balanced tree R in a balanced d-ary tree of the same height
inline std::uint64_t copies_in_full_tree(const OrderedForest& R, int v, std::uint64_t d) {
  const auto& ch = R.children(v);
  if (ch.empty()) return 1;
  std::uint64_t c = sat_binom(d, ch.size());
  for (int u : ch) c = sat_mul(c, copies_in_full_tree(R, u, d));
  return c;
}

// Arity the recursion needs so that a d-ary monochromatic subforest is forced
// for any s-colouring of copies of S.
inline std::uint64_t ramsey_trees_demand(const OrderedForest& S, std::uint64_t d, int s) {
  if (d >= DEMAND_CAP) return DEMAND_CAP;
  int k = (int)S.roots().size();
  int h = S.empty() ? 0 : S.max_level();
  if (k == 0 || h == 0) return d;
  auto iterate = [&](const OrderedForest& Sp, std::uint64_t times, std::uint64_t x) {
    for (std::uint64_t i = 0; i < times; ++i) {
      std::uint64_t y = ramsey_trees_demand(Sp, x, s);
      if (y >= DEMAND_CAP) return DEMAND_CAP;
      if (y == x) break;
      x = y;
    }
    return x;
  };
  if (k == 1 && h == 1) return std::max<std::uint64_t>(d, ramsey_bound((int)S.children(0).size(), d, s));
  if (k == 1) {
    int l = (int)S.children(0).size();
    std::uint64_t alpha = std::max<std::uint64_t>(d, ramsey_bound(l, d, s));
    std::uint64_t t = sat_binom(alpha, l);
    return std::max(alpha, iterate(forest_minus(S), t, d));
  }
  auto [R, rest] = split_first_tree(S);
  std::uint64_t dp = ramsey_trees_demand(R, d, s);
  std::uint64_t t = copies_in_full_tree(R, 0, dp);
  return std::max(dp, iterate(rest, t, d));
}

// d points whose r-subsets share one colour; lexicographically least; nullopt if none within budget.
inline std::optional<std::vector<int>> mono_subset(int n, int r, int d,
                                                   const std::function<int(const std::vector<int>&)>& colour,
                                                   std::uint64_t budget = 5'000'000) {
  if (d > n) return std::nullopt;
  std::vector<int> cur;
  if (d < r || r <= 0) {
    for (int i = 0; i < d; ++i) cur.push_back(i);
    return cur;
  }
  int fixed = -1;
  std::uint64_t nodes = 0;
  std::vector<int> sub;
  std::function<bool(int)> go = [&](int from) {
    if ((int)cur.size() == d) return true;
    if (++nodes > budget) return false;
    for (int j = from; j + (d - (int)cur.size()) <= n; ++j) {
      // all r-subsets of cur + {j} containing j
      bool ok = true;
      int set_here = -1;
      std::vector<int> pick;
      std::function<void(int)> rec = [&](int pos) {
        if (!ok) return;
        if ((int)pick.size() == r - 1) {
          sub = pick;
          sub.push_back(j);
          int c = colour(sub);
          if (fixed < 0) fixed = c, set_here = c;
          if (c != fixed) ok = false;
          return;
        }
        for (int q = pos; q < (int)cur.size(); ++q) {
          pick.push_back(cur[q]);
          rec(q + 1);
          pick.pop_back();
        }
      };
      rec(0);
      if (ok) {
        cur.push_back(j);
        if (go(j + 1)) return true;
        cur.pop_back();
      }
      if (set_here >= 0) fixed = -1;
      if (nodes > budget) return false;
    }
    return false;
  };
  if (go(0)) return cur;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// subforest helpers (vertex sets of F as masks)

inline std::vector<int> mask_children(const OrderedForest& F, const std::vector<char>& mask, int v) {
  std::vector<int> out;
  for (int u : F.children(v))
    if (mask[u]) out.push_back(u);
  return out;
}

// first d children per vertex below v inside `mask`, written into out
inline void trim_tree(const OrderedForest& F, const std::vector<char>& mask, int v, int d, std::vector<char>& out) {
  out[v] = 1;
  int taken = 0;
  for (int u : F.children(v)) {
    if (taken == d) break;
    if (!mask[u]) continue;
    trim_tree(F, mask, u, d, out);
    ++taken;
  }
}

inline void clear_tree(const OrderedForest& F, int v, std::vector<char>& m) {
  for (int u = v; u < F.subtree_end(v); ++u) m[u] = 0;
}

inline void copy_tree(const OrderedForest& F, int v, const std::vector<char>& from, std::vector<char>& to) {
  for (int u = v; u < F.subtree_end(v); ++u) to[u] = from[u];
}

// minimum arity over non-leaf-level vertices of the masked trees at `roots` (leaf level = F.height())
inline int masked_arity(const OrderedForest& F, const std::vector<char>& mask, const std::vector<int>& roots) {
  int best = std::numeric_limits<int>::max();
  for (int r : roots)
    for (int v = r; v < F.subtree_end(r); ++v)
      if (mask[v] && F.level(v) < F.height()) best = std::min(best, (int)mask_children(F, mask, v).size());
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

inline bool masked_balanced_d_ary(const OrderedForest& F, const std::vector<char>& mask, const std::vector<int>& roots,
                                  int d) {
  for (int r : roots) {
    if (!mask[r]) return false;
    for (int v = r; v < F.subtree_end(r); ++v) {
      if (!mask[v]) continue;
      if (v != r && !mask[F.parent(v)]) return false;
      if (F.level(v) < F.height() && (int)mask_children(F, mask, v).size() != d) return false;
    }
  }
  return true;
}

inline std::vector<int> mask_to_list(const std::vector<char>& m) {
  std::vector<int> out;
  for (int v = 0; v < (int)m.size(); ++v)
    if (m[v]) out.push_back(v);
  return out;
}

// Exact search for a d-ary subforest at `roots` inside `mask`, built in
// preorder; on_leaf(x) is asked whenever a leaf-level vertex x joins (x is then
// the largest chosen vertex) and undo() reverts an accepted leaf.
template <class OnLeaf, class Undo>
std::optional<std::vector<char>> preorder_subforest_search(const OrderedForest& F, const std::vector<int>& roots,
                                                           const std::vector<char>& mask, int d, OnLeaf&& on_leaf,
                                                           Undo&& undo, std::uint64_t budget, bool& budget_hit,
                                                           std::vector<char>& chosen) {
  struct Frame {
    int v, count, next;
  };
  const int hF = F.height();
  chosen.assign(F.size(), 0);
  std::uint64_t nodes = 0;
  budget_hit = false;
  auto add = [&](int u) {
    chosen[u] = 1;
    if (F.level(u) == hF && !on_leaf(u)) {
      chosen[u] = 0;
      return false;
    }
    return true;
  };
  auto remove = [&](int u) {
    if (F.level(u) == hF) undo();
    chosen[u] = 0;
  };
  std::function<bool(std::vector<Frame>, std::size_t)> go = [&](std::vector<Frame> st, std::size_t rp) -> bool {
    if (++nodes > budget) {
      budget_hit = true;
      return false;
    }
    while (!st.empty() && (F.level(st.back().v) == hF || st.back().count == d)) st.pop_back();
    if (st.empty()) {
      if (rp == roots.size()) return true;
      int r = roots[rp];
      if (!add(r)) return false;
      if (go({{r, 0, 0}}, rp + 1)) return true;
      remove(r);
      return false;
    }
    Frame f = st.back();
    st.pop_back();
    auto ch = mask_children(F, mask, f.v);
    int need = d - f.count;
    for (int j = f.next; j + need <= (int)ch.size(); ++j) {
      int u = ch[j];
      if (!add(u)) continue;
      auto st2 = st;
      st2.push_back({f.v, f.count + 1, j + 1});
      st2.push_back({u, 0, 0});
      if (go(st2, rp)) return true;
      remove(u);
      if (budget_hit) return false;
    }
    return false;
  };
  if (go({}, 0)) return chosen;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ramsey for copies of S

using CopyColouring = std::function<int(const std::vector<int>&)>;

struct RamseyTreesResult {
  bool ok = false;
  std::vector<int> vertices;  // F' as F-vertices
  int colour = -1;            // common colour, -1 when F' has no copy of S
  std::string method;         // "recursion" or "exact"
  std::uint64_t required_arity = 0;
  int input_arity = 0;
  bool budget_hit = false;
  bool verified = false;
  std::size_t copies = 0;
  std::string note;
};

namespace detail {

struct TreeRamsey {
  const OrderedForest& F;
  int s;
  std::uint64_t budget;

  int first_copy_colour(const OrderedForest& S, const std::vector<int>& roots, const std::vector<char>& mask,
                        const CopyColouring& chi) {
    int c = -1;
    for_each_copy(S, F, roots, mask, -1, [&](const std::vector<int>& img) {
      c = chi(img);
      return false;
    });
    return c < 0 ? 0 : c;
  }

  // Follows the induction; `mask` holds the current trees at `roots`.
  std::optional<std::vector<char>> rec(const std::vector<int>& roots, const std::vector<char>& mask,
                                       const OrderedForest& S, const CopyColouring& chi, int d) {
    const int k = (int)roots.size();
    const int h = S.empty() ? 0 : S.max_level();
    std::vector<char> out(F.size(), 0);
    if (h == 0) {
      for (int r : roots) trim_tree(F, mask, r, d, out);
      return out;
    }
    if (k == 1 && h == 1) {
      int root = roots[0];
      auto L = mask_children(F, mask, root);
      int rr = (int)S.children(0).size();
      auto pick = mono_subset((int)L.size(), rr, d, [&](const std::vector<int>& idx) {
        std::vector<int> img{root};
        for (int i : idx) img.push_back(L[i]);
        return chi(img);
      }, budget);
      if (!pick) return std::nullopt;
      out[root] = 1;
      for (int i : *pick) trim_tree(F, mask, L[i], d, out);
      return out;
    }
    if (k == 1) {
      int root = roots[0];
      int l = (int)S.children(0).size();
      OrderedForest Sp = forest_minus(S);
      std::uint64_t alpha = std::max<std::uint64_t>(d, ramsey_bound(l, d, s));
      auto kids = mask_children(F, mask, root);
      if (alpha > kids.size()) return std::nullopt;
      std::uint64_t t = sat_binom(alpha, l);
      if (t > 1'000'000) return std::nullopt;
      std::vector<int> di(t + 1);
      di[t] = d;
      for (std::uint64_t i = t; i > 0; --i) {
        std::uint64_t x = ramsey_trees_demand(Sp, di[i], s);
        if (x > (std::uint64_t)F.size()) return std::nullopt;
        di[i - 1] = (int)x;
      }
      std::vector<int> A(kids.begin(), kids.begin() + alpha);
      std::vector<char> cur(F.size(), 0);
      for (int a : A) trim_tree(F, mask, a, di[0], cur);
      if (masked_arity(F, cur, A) < di[0]) return std::nullopt;
      std::map<std::vector<int>, int> cls;
      std::vector<int> comb(l);
      std::iota(comb.begin(), comb.end(), 0);
      for (std::uint64_t i = 1; i <= t; ++i) {
        std::vector<int> Ai;
        for (int c : comb) Ai.push_back(A[c]);
        CopyColouring chi2 = [&](const std::vector<int>& img) {
          std::vector<int> full{root};
          full.insert(full.end(), img.begin(), img.end());
          return chi(full);
        };
        auto res = rec(Ai, cur, Sp, chi2, di[i]);
        if (!res) return std::nullopt;
        std::vector<char> next(F.size(), 0);
        for (int a : A) {
          if (std::find(Ai.begin(), Ai.end(), a) != Ai.end())
            copy_tree(F, a, *res, next);
          else
            trim_tree(F, cur, a, di[i], next);
        }
        cur = std::move(next);
        cls[comb] = first_copy_colour(Sp, Ai, cur, chi2);
        // next l-subset in lexicographic order
        int p = l - 1;
        while (p >= 0 && comb[p] == (int)alpha - l + p) --p;
        if (p < 0) break;
        ++comb[p];
        for (int q = p + 1; q < l; ++q) comb[q] = comb[q - 1] + 1;
      }
      auto pick = mono_subset((int)alpha, l, d, [&](const std::vector<int>& idx) { return cls.at(idx); }, budget);
      if (!pick) return std::nullopt;
      out[root] = 1;
      for (int i : *pick) copy_tree(F, A[i], cur, out);
      return out;
    }
    auto [R, rest] = split_first_tree(S);
    std::vector<int> rest_roots(roots.begin() + 1, roots.end());
    std::uint64_t dp = ramsey_trees_demand(R, d, s);
    if (dp > (std::uint64_t)F.size()) return std::nullopt;
    std::vector<char> Tp(F.size(), 0);
    trim_tree(F, mask, roots[0], (int)dp, Tp);
    if (masked_arity(F, Tp, {roots[0]}) < (int)dp) return std::nullopt;
    auto Rcopies = all_copies(R, F, {roots[0]}, Tp);
    std::size_t t = Rcopies.size();
    std::vector<std::uint64_t> di(t + 1);
    di[t] = d;
    for (std::size_t i = t; i > 0; --i) {
      di[i - 1] = ramsey_trees_demand(rest, di[i], s);
      if (di[i - 1] > (std::uint64_t)F.size()) return std::nullopt;
    }
    std::vector<char> cur(F.size(), 0);
    for (int r : rest_roots) trim_tree(F, mask, r, (int)di[0], cur);
    if (masked_arity(F, cur, rest_roots) < (int)di[0]) return std::nullopt;
    std::map<std::vector<int>, int> cls;
    for (std::size_t i = 1; i <= t; ++i) {
      const auto& Ri = Rcopies[i - 1];
      CopyColouring chi2 = [&](const std::vector<int>& img) {
        std::vector<int> full = Ri;
        full.insert(full.end(), img.begin(), img.end());
        return chi(full);
      };
      auto res = rec(rest_roots, cur, rest, chi2, (int)di[i]);
      if (!res) return std::nullopt;
      cur = *res;
      cls[Ri] = first_copy_colour(rest, rest_roots, cur, chi2);
    }
    CopyColouring chiR = [&](const std::vector<int>& img) { return cls.at(img); };
    auto Tpp = rec({roots[0]}, Tp, R, chiR, d);
    if (!Tpp) return std::nullopt;
    out = *Tpp;
    for (int r : rest_roots) copy_tree(F, r, cur, out);
    return out;
  }
};

}  // namespace detail

// Checks that all copies of S in the masked subforest share a colour.
inline std::pair<bool, int> copies_monochromatic(const OrderedForest& F, const std::vector<int>& roots,
                                                 const std::vector<char>& mask, const OrderedForest& S,
                                                 const CopyColouring& chi, std::size_t* count = nullptr) {
  int c = -1;
  bool ok = true;
  std::size_t n = 0;
  for_each_copy(S, F, roots, mask, -1, [&](const std::vector<int>& img) {
    ++n;
    int x = chi(img);
    if (c < 0) c = x;
    if (x != c) ok = false;
    return ok;
  });
  if (count) *count = n;
  return {ok, c};
}

// F balanced with its roots in `roots` (all of F when empty); S a balanced
// forest of the same height with |roots| components.
inline RamseyTreesResult ramsey_trees(const OrderedForest& F, const OrderedForest& S, const CopyColouring& chi, int d,
                                      int colours, std::vector<int> roots = {}, std::uint64_t budget = 20'000'000) {
  RamseyTreesResult res;
  if (roots.empty()) roots = F.roots();
  if (S.roots().size() != roots.size()) throw std::invalid_argument("ramsey_trees: S and F need the same component count");
  std::vector<char> mask(F.size(), 0);
  for (int r : roots)
    for (int v = r; v < F.subtree_end(r); ++v) mask[v] = 1;
  res.input_arity = masked_arity(F, mask, roots);
  res.required_arity = ramsey_trees_demand(S, d, colours);
  std::optional<std::vector<char>> out;
  if (res.required_arity <= (std::uint64_t)res.input_arity) {
    detail::TreeRamsey tr{F, colours, budget};
    out = tr.rec(roots, mask, S, chi, d);
    if (out) res.method = "recursion";
  }
  if (!out) {
    int fixed = -1;
    std::vector<char> set_here;
    std::vector<char> chosen;
    auto on_leaf = [&](int x) {
      int c = fixed;
      bool ok = true;
      for_each_copy(S, F, roots, chosen, x, [&](const std::vector<int>& img) {
        int y = chi(img);
        if (c < 0) c = y;
        if (y != c) ok = false;
        return ok;
      });
      if (!ok) return false;
      set_here.push_back(fixed < 0 && c >= 0);
      fixed = c;
      return true;
    };
    auto undo = [&]() {
      if (set_here.back()) fixed = -1;
      set_here.pop_back();
    };
    bool hit = false;
    out = preorder_subforest_search(F, roots, mask, d, on_leaf, undo, budget, hit, chosen);
    res.budget_hit = hit;
    if (out) res.method = "exact";
  }
  if (!out) {
    res.note = res.budget_hit ? "search budget exhausted" : "no monochromatic d-ary subforest exists";
    return res;
  }
  res.vertices = mask_to_list(*out);
  auto [mono, c] = copies_monochromatic(F, roots, *out, S, chi, &res.copies);
  res.colour = c;
  res.verified = mono && masked_balanced_d_ary(F, *out, roots, d);
  res.ok = res.verified;
  return res;
}

// ---------------------------------------------------------------------------
// separation

inline int separation_D(int h, int dp) {
  for (int d = std::max(1, 3 * dp);; ++d)
    if (h * std::log((double)d) - d / 36.0 < std::log(0.5)) return d;
}

// largest a such that the tree at root has a balanced a-ary subtree inside `allowed`
inline int best_arity(const OrderedForest& F, int root, const std::vector<char>& allowed) {
  const int hF = F.height();
  auto feasible = [&](int a) {
    std::vector<char> good(F.size(), 0);
    for (int v = F.subtree_end(root) - 1; v >= root; --v) {
      if (!allowed[v] && v != root) continue;
      if (F.level(v) == hF) {
        good[v] = 1;
        continue;
      }
      int c = 0;
      for (int u : F.children(v)) c += good[u];
      good[v] = c >= a;
    }
    return (bool)good[root];
  };
  int lo = 0, hi = (int)F.size();
  if (F.level(root) == hF) return hi;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (feasible(mid)) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

inline void extract_subtree(const OrderedForest& F, int root, const std::vector<char>& allowed, int a,
                            std::vector<char>& out) {
  const int hF = F.height();
  std::vector<char> good(F.size(), 0);
  for (int v = F.subtree_end(root) - 1; v >= root; --v) {
    if (!allowed[v] && v != root) continue;
    if (F.level(v) == hF) {
      good[v] = 1;
      continue;
    }
    int c = 0;
    for (int u : F.children(v)) c += good[u];
    good[v] = c >= a;
  }
  std::function<void(int)> take = [&](int v) {
    out[v] = 1;
    int n = 0;
    for (int u : F.children(v)) {
      if (n == a) break;
      if (good[u]) take(u), ++n;
    }
  };
  if (good[root]) take(root);
}

struct SeparateTwoResult {
  bool ok = false;
  std::vector<int> T1, T2;  // F-vertices of the new trees
  int arity1 = 0, arity2 = 0;
  int tries = 0;
  bool quota_held = false;  // every non-leaf kept >= d_i/3 children assigned i
  int D1 = 0, D2 = 0;       // D(h, d_i') from the union bound, report only
  std::string reason;
};

namespace detail {

// tree vertices of F(x) currently in `mask`
inline std::vector<int> tree_members(const SForest& F, int x, const std::vector<char>& mask) {
  std::vector<int> out;
  int r = F.root_vertex(x);
  if (r < 0) return out;
  for (int v = r; v < F.forest().subtree_end(r); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

}  // namespace detail

// Random side labels on shared ground values; retries until both trees keep
// subtrees of arities >= d1p, d2p with disjoint pi-sets. `mask` restricts F.
inline SeparateTwoResult separate_two_trees(const SForest& F, int x, int y, int d1p, int d2p, std::uint64_t seed,
                                            const std::vector<char>* mask_in = nullptr, int tries = 200) {
  SeparateTwoResult res;
  if (x == y) throw std::invalid_argument("separate_two_trees: roots must be distinct");
  const auto& T = F.forest();
  std::vector<char> mask = mask_in ? *mask_in : std::vector<char>(F.size(), 1);
  int r1 = F.root_vertex(x), r2 = F.root_vertex(y);
  if (r1 < 0 || r2 < 0) throw std::invalid_argument("separate_two_trees: missing tree");
  const int h = F.height();
  res.D1 = separation_D(h, d1p);
  res.D2 = separation_D(h, d2p);
  auto m1 = detail::tree_members(F, x, mask), m2 = detail::tree_members(F, y, mask);
  std::vector<int> in1(F.ground_size(), 0), in2(F.ground_size(), 0);
  for (int v : m1) in1[F.pi(v)] = 1;
  for (int v : m2) in2[F.pi(v)] = 1;
  int d1 = masked_arity(T, mask, {r1}), d2 = masked_arity(T, mask, {r2});
  std::mt19937_64 g(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<int> side(F.ground_size(), 0);
  for (res.tries = 1; res.tries <= tries; ++res.tries) {
    for (int u = 0; u < F.ground_size(); ++u) side[u] = in1[u] && in2[u] ? (coin(g) ? 1 : 2) : (in1[u] ? 1 : 2);
    side[x] = 1;
    side[y] = 2;
    std::vector<char> a1(F.size(), 0), a2(F.size(), 0);
    for (int v : m1) a1[v] = v == r1 || side[F.pi(v)] == 1;
    for (int v : m2) a2[v] = v == r2 || side[F.pi(v)] == 2;
    int b1 = best_arity(T, r1, a1), b2 = best_arity(T, r2, a2);
    if (b1 < d1p || b2 < d2p) continue;
    bool quota = true;
    for (auto [ms, ai, di] : {std::tuple{&m1, &a1, d1}, std::tuple{&m2, &a2, d2}})
      for (int v : *ms)
        if (T.level(v) < h && (*ai)[v]) {
          int c = 0;
          for (int u : T.children(v)) c += mask[u] && (*ai)[u];
          quota = quota && 3 * c >= di;
        }
    res.quota_held = quota;
    std::vector<char> o1(F.size(), 0), o2(F.size(), 0);
    extract_subtree(T, r1, a1, b1, o1);
    extract_subtree(T, r2, a2, b2, o2);
    res.T1 = mask_to_list(o1);
    res.T2 = mask_to_list(o2);
    res.arity1 = b1;
    res.arity2 = b2;
    std::vector<char> seen(F.ground_size(), 0);
    bool disjoint = true;
    for (int v : res.T1) seen[F.pi(v)] = 1;
    for (int v : res.T2) disjoint = disjoint && !seen[F.pi(v)];
    res.ok = disjoint;
    if (!disjoint) res.reason = "output trees intersect";
    return res;
  }
  res.reason = "retry budget exhausted";
  return res;
}

struct SeparateForestResult {
  bool ok = false;
  SForest forest;
  std::vector<int> vertices;  // kept vertices of the input forest
  int passes = 0;
  std::pair<int, int> failing_edge{-1, -1};
  std::string reason;
  bool verified = false;
};

// One pass per edge xy of G^b with overlapping trees, then trim to b-ary.
inline SeparateForestResult separate_forest(const SForest& F, const GroundGraph& G, int b, std::uint64_t seed) {
  SeparateForestResult res;
  const auto& T = F.forest();
  std::vector<char> mask(F.size(), 1);
  auto Gb = G.power(b);
  std::uint64_t salt = 0;
  for (auto [x, y] : Gb.edges()) {
    if (!F.has_root(x) || !F.has_root(y)) continue;
    auto m1 = detail::tree_members(F, x, mask), m2 = detail::tree_members(F, y, mask);
    std::vector<char> seen(F.ground_size(), 0);
    bool overlap = false;
    for (int v : m1) seen[F.pi(v)] = 1;
    for (int v : m2) overlap = overlap || seen[F.pi(v)];
    if (!overlap) continue;
    ++res.passes;
    auto st = separate_two_trees(F, x, y, b, b, seed + 0x9E3779B97F4A7C15ULL * ++salt, &mask);
    if (!st.ok) {
      res.failing_edge = {x, y};
      res.reason = "arity exhausted: " + st.reason;
      return res;
    }
    clear_tree(T, F.root_vertex(x), mask);
    clear_tree(T, F.root_vertex(y), mask);
    for (int v : st.T1) mask[v] = 1;
    for (int v : st.T2) mask[v] = 1;
  }
  std::vector<char> out(F.size(), 0);
  for (int r : T.roots()) {
    if (masked_arity(T, mask, {r}) < b && T.level(r) < T.height()) {
      res.failing_edge = {F.pi(r), -1};
      res.reason = "tree below arity b";
      return res;
    }
    trim_tree(T, mask, r, b, out);
  }
  res.vertices = mask_to_list(out);
  res.forest = F.induced(res.vertices);
  res.verified = is_d_separated(res.forest, G, b).ok && res.forest.forest().is_d_ary(b) &&
                 res.forest.root_set() == F.root_set();
  res.ok = res.verified;
  return res;
}

// ---------------------------------------------------------------------------
// cleaning

using LeafSetColouring = std::function<int(const std::vector<int>&)>;

// pi0 set of e is contained in some edge of H
inline bool inside_some_edge(const Hypergraph& H, const std::vector<int>& roots) {
  if (roots.empty()) return false;
  for (int i : H.incident(roots[0])) {
    const auto& f = H.edge(i);
    if (std::includes(f.begin(), f.end(), roots.begin(), roots.end())) return true;
  }
  return false;
}

inline std::vector<int> root_set_of(const SForest& F, const std::vector<int>& e) {
  std::vector<int> R;
  for (int v : e) R.push_back(F.pi0(v));
  std::sort(R.begin(), R.end());
  R.erase(std::unique(R.begin(), R.end()), R.end());
  return R;
}

struct CleanCheck {
  bool ok = true;
  std::vector<int> e, f;  // same root set and type, different colours
  std::size_t edges = 0;
};

// Cleanliness of H (x) F[verts] under a colouring of leaf sets of F.
inline CleanCheck is_clean(const Hypergraph& H, const SForest& F, const std::vector<int>& verts,
                           const LeafSetColouring& chi) {
  CleanCheck cc;
  SForest sub = F.induced(verts);
  auto T = tensor(H, sub, H.r());
  std::map<std::pair<std::vector<int>, ForestType>, std::pair<int, std::vector<int>>> seen;
  for (const auto& e : T.edges()) {
    ++cc.edges;
    std::vector<int> orig;
    for (int v : e) orig.push_back(verts[v]);
    auto key = std::make_pair(root_set_of(F, orig), type_of(F.forest(), orig));
    int c = chi(orig);
    auto [it, fresh] = seen.try_emplace(key, c, orig);
    if (!fresh && it->second.first != c) {
      cc.ok = false;
      cc.e = it->second.second;
      cc.f = orig;
      return cc;
    }
  }
  return cc;
}

// balanced height-h forest types with exactly r leaves and k roots
inline std::vector<ForestType> forest_types(int h, int r, int k) {
  auto trees = balanced_tree_types(h, r);
  std::vector<ForestType> out;
  std::vector<int> pick;
  std::function<void(int)> go = [&](int left) {
    if ((int)pick.size() == k) {
      if (left == 0) {
        ForestType t;
        for (int i : pick) t.code.insert(t.code.end(), trees[i].code.begin(), trees[i].code.end());
        out.push_back(t);
      }
      return;
    }
    for (int i = 0; i < (int)trees.size(); ++i) {
      int l = type_leaves(trees[i]);
      if (l > left) continue;
      pick.push_back(i);
      go(left - l);
      pick.pop_back();
    }
  };
  if (h == 0) {
    if (r == k) out.push_back(ForestType{std::vector<int>(k, 0)});
    return out;
  }
  go(r);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t count_forest_types(int h, int r) {
  std::size_t n = 0;
  for (int k = 1; k <= r; ++k) n += forest_types(h, r, k).size();
  return n;
}

struct CleanResult {
  bool ok = false;
  SForest forest;
  std::vector<int> vertices;
  std::string method;  // "schedule" or "exact"
  std::size_t sigma = 0, rho = 0, matchings = 0, rounds = 0;
  std::uint64_t required_arity = 0;
  bool budget_hit = false;
  CleanCheck check;
  std::string reason;
};

// Matchings of the traces of H on the vertices with nonempty trees.
inline std::vector<std::vector<std::vector<int>>> trace_matchings(const Hypergraph& H, const SForest& F) {
  std::vector<std::vector<int>> tr;
  for (const auto& f : H.edges()) {
    std::vector<int> t;
    for (int v : f)
      if (F.has_root(v)) t.push_back(v);
    if (!t.empty()) tr.push_back(t);
  }
  std::sort(tr.begin(), tr.end());
  tr.erase(std::unique(tr.begin(), tr.end()), tr.end());
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<char>> used;
  for (const auto& t : tr) {
    std::size_t m = 0;
    for (; m < out.size(); ++m) {
      bool clash = false;
      for (int v : t) clash = clash || used[m][v];
      if (!clash) break;
    }
    if (m == out.size()) out.emplace_back(), used.emplace_back(H.n(), 0);
    out[m].push_back(t);
    for (int v : t) used[m][v] = 1;
  }
  return out;
}

inline CleanResult clean_forest(const Hypergraph& H, const SForest& F, const LeafSetColouring& chi, int b,
                                int colours, std::uint64_t budget = 20'000'000) {
  CleanResult res;
  const auto& T = F.forest();
  const int h = F.height(), r = H.r();
  res.sigma = ((std::size_t)1 << r) * count_forest_types(h, r);
  res.rho = (std::size_t)r * H.max_degree() + 1;
  auto M = trace_matchings(H, F);
  res.matchings = M.size();
  struct Round {
    std::vector<int> roots;  // ground vertices
    ForestType tau;
  };
  std::vector<Round> rounds;
  for (const auto& Mi : M)
    for (const auto& e : Mi) {
      // subsets of e, larger first
      std::vector<std::vector<int>> subs;
      for (std::uint32_t m = 1; m < (1u << e.size()); ++m) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < e.size(); ++i)
          if (m >> i & 1) sub.push_back(e[i]);
        subs.push_back(sub);
      }
      std::stable_sort(subs.begin(), subs.end(), [](const auto& a, const auto& b2) { return a.size() > b2.size(); });
      for (const auto& sub : subs)
        for (const auto& tau : forest_types(h, r, (int)sub.size())) rounds.push_back({sub, tau});
    }
  res.rounds = rounds.size();
  // arities each round must leave behind, computed backwards per tree
  std::vector<std::uint64_t> need(F.ground_size(), b), target(rounds.size());
  for (std::size_t j = rounds.size(); j-- > 0;) {
    std::uint64_t tg = 0;
    for (int v : rounds[j].roots) tg = std::max(tg, need[v]);
    target[j] = tg;
    std::uint64_t dm = ramsey_trees_demand(forest_from_code(rounds[j].tau, h), tg, colours);
    for (int v : rounds[j].roots) need[v] = std::max(need[v], dm);
  }
  res.required_arity = b;
  for (int v = 0; v < F.ground_size(); ++v)
    if (F.has_root(v)) res.required_arity = std::max(res.required_arity, need[v]);
  int arity = T.min_arity();
  std::vector<char> mask(F.size(), 1);
  bool scheduled = h > 0 && res.required_arity <= (std::uint64_t)arity;
  if (scheduled) {
    for (std::size_t j = 0; j < rounds.size() && scheduled; ++j) {
      std::vector<int> rts;
      for (int v : rounds[j].roots) rts.push_back(F.root_vertex(v));
      OrderedForest S = forest_from_code(rounds[j].tau, h);
      CopyColouring cc = [&](const std::vector<int>& img) {
        std::vector<int> lv;
        for (int v : img)
          if (T.level(v) == h) lv.push_back(v);
        return chi(lv);
      };
      // ramsey_trees on the masked union of the trees
      std::vector<int> keep;
      for (int rt : rts)
        for (int v = rt; v < T.subtree_end(rt); ++v)
          if (mask[v]) keep.push_back(v);
      OrderedForest U = T.induced(keep);
      std::vector<int> uroots = U.roots();
      CopyColouring cu = [&](const std::vector<int>& img) {
        std::vector<int> o;
        for (int v : img) o.push_back(keep[v]);
        return cc(o);
      };
      auto rt = ramsey_trees(U, S, cu, (int)target[j], colours, uroots, budget);
      if (!rt.ok || rt.method != "recursion") {
        scheduled = false;
        break;
      }
      for (int x : rts) clear_tree(T, x, mask);
      for (int v : rt.vertices) mask[keep[v]] = 1;
    }
    if (scheduled) res.method = "schedule";
  }
  std::vector<char> out(F.size(), 0);
  if (scheduled) {
    for (int rt : T.roots()) trim_tree(T, mask, rt, b, out);
  } else {
    // exact search: class (root set, type) -> colour, kept consistent leaf by leaf
    mask.assign(F.size(), 1);
    std::map<std::pair<std::vector<int>, ForestType>, std::pair<int, int>> cls;  // colour, refcount
    std::vector<std::vector<std::pair<std::vector<int>, ForestType>>> added;
    std::vector<char> chosen;
    auto on_leaf = [&](int x) {
      int px = F.pi0(x);
      std::vector<char> near(F.ground_size(), 0);
      near[px] = 1;
      for (int i : H.incident(px))
        for (int u : H.edge(i)) near[u] = 1;
      std::vector<int> cand;
      for (int v = 0; v < x; ++v)
        if (chosen[v] && T.level(v) == h && near[F.pi0(v)]) cand.push_back(v);
      std::vector<std::pair<std::vector<int>, ForestType>> mine;
      std::map<std::pair<std::vector<int>, ForestType>, int> local;
      std::vector<int> pick;
      bool ok = true;
      std::function<void(std::size_t)> go = [&](std::size_t from) {
        if (!ok) return;
        if ((int)pick.size() == r - 1) {
          std::vector<int> e = pick;
          e.push_back(x);
          auto R = root_set_of(F, e);
          if (!inside_some_edge(H, R)) return;
          auto key = std::make_pair(R, type_of(T, e));
          int c = chi(e);
          auto it = cls.find(key);
          if (it != cls.end() && it->second.first != c) ok = false;
          auto lt = local.find(key);
          if (lt != local.end() && lt->second != c) ok = false;
          if (ok && it == cls.end() && lt == local.end()) local[key] = c, mine.push_back(key);
          return;
        }
        for (std::size_t i = from; i < cand.size(); ++i) {
          pick.push_back(cand[i]);
          go(i + 1);
          pick.pop_back();
        }
      };
      go(0);
      if (!ok) return false;
      for (auto& key : mine) cls[key] = {local[key], 1};
      added.push_back(std::move(mine));
      return true;
    };
    auto undo = [&]() {
      for (auto& key : added.back()) cls.erase(key);
      added.pop_back();
    };
    bool hit = false;
    auto res_mask = preorder_subforest_search(T, T.roots(), mask, b, on_leaf, undo, budget, hit, chosen);
    res.budget_hit = hit;
    if (!res_mask) {
      res.reason = hit ? "search budget exhausted" : "no clean b-ary subforest";
      return res;
    }
    out = *res_mask;
    res.method = "exact";
  }
  res.vertices = mask_to_list(out);
  res.forest = F.induced(res.vertices);
  res.check = is_clean(H, F, res.vertices, chi);
  res.ok = res.check.ok && res.forest.forest().is_d_ary(b) && res.forest.root_set() == F.root_set();
  if (!res.ok && res.reason.empty()) res.reason = res.check.ok ? "output not b-ary" : "output not clean";
  return res;
}

inline CleanResult clean_forest(const Hypergraph& H, const SForest& F, const Hypergraph& tensorHF,
                                const Colouring& chi, int b, std::uint64_t budget = 20'000'000) {
  LeafSetColouring f = [&](const std::vector<int>& e) { return chi.of(tensorHF, e); };
  return clean_forest(H, F, f, b, chi.palette, budget);
}

// ---------------------------------------------------------------------------
// X / Y / Z inside one tree

struct XYZResult {
  bool ok = false;
  std::vector<int> X, Y, Z;
  int colour = -1;
  std::vector<int> binary_subtree;
  TightWalk walk;  // X Y Z
  std::string reason;
};

inline bool independent_leaf_sets(const OrderedForest& T, const std::vector<int>& e, const std::vector<int>& f) {
  auto lca = [&](const std::vector<int>& s) {
    int a = s[0];
    for (int v : s)
      while (!T.is_ancestor(a, v)) a = T.parent(a);
    return a;
  };
  if (e.empty() || f.empty()) return false;
  int ve = lca(e), vf = lca(f);
  if (ve < 0 || vf < 0) return false;
  return !T.comparable(ve, vf);
}

// chi colours r-sets of leaves of the tree T (sorted T-indices), s colours.
inline XYZResult trees_tight_xyz(const OrderedForest& T, const CopyColouring& chi, int r, int l, int colours,
                                 std::uint64_t budget = 20'000'000) {
  XYZResult res;
  if (!T.is_tree()) throw std::invalid_argument("trees_tight_xyz: T must be a tree");
  const int h = T.height();
  if (l < 1 || l > r) throw std::invalid_argument("trees_tight_xyz: need 1 <= l <= r");
  if (h < 2 * l) {
    res.reason = "height below 2l";
    return res;
  }
  // binary subtree whose r-sets of leaves are coloured by type
  std::map<ForestType, int> cls;
  std::vector<std::vector<ForestType>> added;
  std::vector<char> chosen;
  auto on_leaf = [&](int x) {
    std::vector<int> cand;
    for (int v = 0; v < x; ++v)
      if (chosen[v] && T.level(v) == h) cand.push_back(v);
    std::map<ForestType, int> local;
    std::vector<int> pick;
    bool ok = true;
    std::function<void(std::size_t)> go = [&](std::size_t from) {
      if (!ok) return;
      if ((int)pick.size() == r - 1) {
        auto e = pick;
        e.push_back(x);
        auto key = type_of(T, e);
        int c = chi(e);
        auto it = cls.find(key);
        if (it != cls.end() && it->second != c) ok = false;
        auto lt = local.find(key);
        if (lt != local.end() && lt->second != c) ok = false;
        if (ok && it == cls.end()) local[key] = c;
        return;
      }
      for (std::size_t i = from; i < cand.size(); ++i) {
        pick.push_back(cand[i]);
        go(i + 1);
        pick.pop_back();
      }
    };
    go(0);
    if (!ok) return false;
    std::vector<ForestType> mine;
    for (auto& [k, c] : local) cls[k] = c, mine.push_back(k);
    added.push_back(std::move(mine));
    return true;
  };
  auto undo = [&]() {
    for (auto& k : added.back()) cls.erase(k);
    added.pop_back();
  };
  bool hit = false;
  std::vector<char> all(T.size(), 1);
  auto bin = preorder_subforest_search(T, {0}, all, 2, on_leaf, undo, budget, hit, chosen);
  if (!bin) {
    res.reason = hit ? "cleaning budget exhausted" : "no clean binary subtree";
    return res;
  }
  const auto& B = *bin;
  res.binary_subtree = mask_to_list(B);
  // spine v_0 .. v_h and last leaves u_i
  int v0 = -1;
  for (int v = 0; v < (int)T.size() && v0 < 0; ++v)
    if (B[v] && T.level(v) == h) v0 = v;
  std::vector<int> vs(h + 1), us(h + 1);
  for (int i = 0; i <= h; ++i) {
    vs[i] = T.ancestor_at(v0, h - i);
    int last = -1;
    for (int v = vs[i]; v < T.subtree_end(vs[i]); ++v)
      if (B[v] && T.level(v) == h) last = v;
    us[i] = last;
  }
  auto A = mono_subset(h + 1, r, 2 * l + 1, [&](const std::vector<int>& idx) {
    std::vector<int> e;
    for (int i : idx) e.push_back(us[i]);
    return chi(e);
  }, budget);
  if (!A) {
    res.reason = "no monochromatic (2l+1)-subset of the spine leaves";
    return res;
  }
  std::vector<int> w;
  for (int i : *A) w.push_back(us[i]);
  res.X.assign(w.begin(), w.begin() + l);
  res.Y.assign(w.begin() + l + 1, w.end());
  int x = res.X[0];
  for (int v : res.X)
    while (!T.is_ancestor(x, v)) x = T.parent(x);
  int y = T.parent(x);
  if (y < 0) {
    res.reason = "X spans the whole tree";
    return res;
  }
  auto kids = mask_children(T, B, y);
  int xp = kids[0] == x ? kids[1] : kids[0];
  // same left/right moves below x'
  for (int wv : res.X) {
    std::vector<int> moves;
    for (int u = wv; u != x; u = T.parent(u)) {
      auto sib = mask_children(T, B, T.parent(u));
      moves.push_back(sib[0] == u ? 0 : 1);
    }
    int z = xp;
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) z = mask_children(T, B, z)[*it];
    res.Z.push_back(z);
  }
  std::sort(res.Z.begin(), res.Z.end());
  // verification
  std::vector<int> XY = res.X, YZ = res.Y;
  XY.insert(XY.end(), res.Y.begin(), res.Y.end());
  YZ.insert(YZ.end(), res.Z.begin(), res.Z.end());
  std::sort(XY.begin(), XY.end());
  std::sort(YZ.begin(), YZ.end());
  bool ok = independent_leaf_sets(T, res.X, res.Z) && type_of(T, res.X) == type_of(T, res.Z);
  std::vector<int> all3 = XY;
  all3.insert(all3.end(), res.Z.begin(), res.Z.end());
  std::sort(all3.begin(), all3.end());
  ok = ok && std::adjacent_find(all3.begin(), all3.end()) == all3.end();
  int c = -1;
  for (const auto* S : {&XY, &YZ}) {
    std::vector<int> pick;
    std::function<void(std::size_t)> go = [&](std::size_t from) {
      if (!ok) return;
      if ((int)pick.size() == r) {
        int x2 = chi(pick);
        if (c < 0) c = x2;
        if (x2 != c) ok = false;
        return;
      }
      for (std::size_t i = from; i < S->size(); ++i) {
        pick.push_back((*S)[i]);
        go(i + 1);
        pick.pop_back();
      }
    };
    go(0);
  }
  res.colour = c;
  res.walk.verts = res.X;
  res.walk.verts.insert(res.walk.verts.end(), res.Y.begin(), res.Y.end());
  res.walk.verts.insert(res.walk.verts.end(), res.Z.begin(), res.Z.end());
  res.ok = ok;
  if (!ok) res.reason = "witness failed verification";
  return res;
}

}  // namespace tpr

#endif  // TPR_TREES_HPP
