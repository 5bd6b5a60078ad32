#include <tpr/pipeline.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace tpr;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string schedule, out;
  std::uint64_t budget = 0;  // 0: command default
  bool json = false;
};

Globals G;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void save(const std::string& name, const std::string& text) {
  if (G.out.empty()) return;
  fs::create_directories(G.out);
  std::ofstream(fs::path(G.out) / name) << text;
}

// prints the result and returns the exit status
int report(const json& j, bool ok, const std::string& summary, const std::string& artifact = "") {
  if (!artifact.empty()) save(artifact, j.dump(2) + "\n");
  if (G.json || !ok) std::cout << j.dump(2) << "\n";
  else std::cout << summary << "\n";
  return ok ? 0 : 1;
}

GroundGraph load_graph(const std::string& path) {
  try {
    return GroundGraph::from_text(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

ParamSchedule load_schedule(int n) {
  if (G.schedule.empty()) return ParamSchedule::desk(n);
  try {
    return ParamSchedule::from_json(json::parse(read_file(G.schedule)));
  } catch (const json::exception& e) {
    throw UsageError(G.schedule + ": " + e.what());
  }
}

json cert_json(const ExpanderCertificate& c) {
  return {{"epsilon", c.epsilon}, {"set_size", c.set_size}, {"mode", c.mode}, {"trials", c.trials},
          {"seed", c.seed},       {"verdict", c.verdict},   {"A", c.A},       {"B", c.B}};
}

// ---------------------------------------------------------------------------
// lemma drivers: seeded random instances, every output re-verified

struct Tally {
  std::string name;
  int trials = 0, verified = 0, reported = 0, invalid = 0;
  std::map<std::string, int> kinds;
  json failures = json::array();

  void add(bool claimed, bool checks, const std::string& kind, const json& detail = {}) {
    ++trials;
    ++kinds[kind];
    if (!claimed) ++reported;
    else if (checks) ++verified;
    else {
      ++invalid;
      if (failures.size() < 5) failures.push_back(detail);
    }
  }
  json to_json() const {
    return {{"lemma", name},       {"trials", trials}, {"verified", verified}, {"reported", reported},
            {"invalid", invalid},  {"kinds", kinds},   {"failures", failures}};
  }
};

struct LemmaArgs {
  std::string name;
  int n = 3, r = 2, s = 2, d = 2, c = 4, h = 2, trials = 100;
};

using Rng = std::mt19937_64;

SForest shared_stars(int n, const std::vector<int>& roots, const std::vector<int>& pool) {
  std::vector<std::pair<int, std::vector<int>>> st;
  for (int s : roots) {
    std::vector<int> kids;
    for (int x : pool)
      if (x != s) kids.push_back(x);
    st.push_back({s, kids});
  }
  return star_forest(n, st);
}

GroundGraph random_graph(Rng& g, int n, double p) {
  std::bernoulli_distribution b(p);
  std::vector<std::pair<int, int>> es;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (b(g)) es.push_back({u, v});
  return GroundGraph(n, es);
}

bool outcome_claimed(const RamseyOutcome& o) { return o.kind != OutcomeKind::Failure; }

Tally run_lemma(const LemmaArgs& a) {
  Tally t;
  t.name = a.name;
  Rng g(G.seed);
  const auto& nm = a.name;
  if (nm == "path-partition") {
    for (int it = 0; it < a.trials; ++it) {
      auto Gr = random_graph(g, std::max(2, a.n), 0.3);
      auto pp = path_partition(Gr);
      t.add(true, verify_path_partition(Gr, pp), "partition", {{"graph", Gr.to_text()}});
    }
  } else if (nm == "bipartite") {
    for (int it = 0; it < a.trials; ++it) {
      auto chi = BipartiteColouring::random(3 * a.n, 2, g);
      auto o = bipartite_path_or_biclique(chi, a.n);
      t.add(true, outcome_claimed(o) && verify_bipartite_outcome(chi, o, a.n), outcome_name(o.kind), {{"trial", it}});
    }
  } else if (nm == "multicolour") {
    for (int it = 0; it < a.trials; ++it) {
      auto chi = BipartiteColouring::random((int)ipow(3, a.r) * a.n, a.r + 1, g);
      auto o = multicolour_bipartite(chi, a.n, a.r);
      bool good = outcome_claimed(o) && verify_bipartite_outcome(chi, o, a.n) &&
                  (o.kind == OutcomeKind::Path ? o.colour < a.r : o.colour == a.r);
      t.add(true, good, outcome_name(o.kind), {{"trial", it}});
    }
  } else if (nm == "multipartite") {
    for (int it = 0; it < a.trials; ++it) {
      auto chi = CompleteColouring::random((int)multipartite_a(a.r, a.s) * a.n, a.r + 1, g);
      auto o = multipartite_ramsey(chi, a.n, a.r, a.s);
      t.add(true, outcome_claimed(o) && verify_complete_outcome(chi, o, a.n, a.s), outcome_name(o.kind),
            {{"trial", it}});
    }
  } else if (nm == "expander-ramsey" || nm == "expander-main") {
    auto ex = generate_expander(std::max(a.n, 20), 0.3, G.seed);
    auto P = ex.graph.power(a.c);
    std::vector<int> U(ex.graph.n());
    std::iota(U.begin(), U.end(), 0);
    const int last = nm == "expander-main" ? a.s : a.d;
    for (int it = 0; it < a.trials; ++it) {
      std::uniform_int_distribution<int> dc(0, last);
      auto chi = GraphColouring::from(P, [&](int, int) { return dc(g); });
      RamseyOutcome o = nm == "expander-main" ? expander_ramsey_main(ex.graph, U, chi, a.s, a.d, a.c, 0.3).outcome
                                               : expander_ramsey_one(ex.graph, a.c, a.d, chi).outcome;
      bool good = true;
      if (o.kind == OutcomeKind::Path) {
        good = o.colour < last && verify_graph_path(chi, o.parts[0], o.colour);
      } else if (o.kind == OutcomeKind::Clique || o.kind == OutcomeKind::CliqueCover) {
        std::set<int> seen;
        for (const auto& K : o.parts) {
          good = good && (int)K.size() == a.d && verify_graph_clique(chi, K, last);
          for (int v : K) good = good && seen.insert(v).second;
        }
      }
      t.add(outcome_claimed(o), good, outcome_name(o.kind), {{"trial", it}});
    }
  } else if (nm == "separate-two") {
    std::vector<int> pool;
    for (int x = 2; x < 14; ++x) pool.push_back(x);
    auto F = shared_stars(14, {0, 1}, pool);
    for (int it = 0; it < a.trials; ++it) {
      auto res = separate_two_trees(F, 0, 1, a.d, a.d, G.seed + it);
      std::set<int> im;
      bool good = res.arity1 >= a.d && res.arity2 >= a.d;
      for (auto* T : {&res.T1, &res.T2})
        for (int v : *T)
          if (!F.forest().is_root(v)) good = good && im.insert(F.pi(v)).second;
      t.add(res.ok, good, res.ok ? "disjoint" : "reported", {{"trial", it}});
    }
  } else if (nm == "separate") {
    for (int it = 0; it < a.trials; ++it) {
      auto Gr = random_graph(g, 30, 0.06);
      std::vector<int> roots, pool(30);
      for (int v = 0; v < 30; v += 5) roots.push_back(v);
      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), g);
      pool.resize(24);
      auto F = shared_stars(30, roots, pool);
      auto res = separate_forest(F, Gr, a.d, G.seed + it);
      bool good = res.ok && is_d_separated(res.forest, Gr, a.d).ok && res.forest.root_set() == F.root_set();
      t.add(res.ok, good, res.ok ? "separated" : "reported", {{"trial", it}});
    }
  } else if (nm == "ramsey-trees") {
    auto F = full_forest(1, 6, 1);
    auto S = full_forest(1, a.r, 1);
    for (int it = 0; it < a.trials; ++it) {
      std::map<std::vector<int>, int> col;
      CopyColouring chi = [&](const std::vector<int>& e) {
        auto f = col.find(e);
        if (f != col.end()) return f->second;
        return col[e] = (int)(g() % a.s);
      };
      auto res = ramsey_trees(F, S, chi, a.d, a.s);
      // copies of the r-leaf star: r leaves of the kept root, in order
      bool good = res.ok;
      if (res.ok) {
        std::vector<int> kept;
        for (int v : res.vertices)
          if (F.is_leaf(v)) kept.push_back(v);
        good = (int)kept.size() >= a.d;
        int c0 = -2;
        for_each_subset(kept, a.r, [&](const std::vector<int>& e) {
          std::vector<int> img{0};
          img.insert(img.end(), e.begin(), e.end());
          int c = chi(img);
          if (c0 == -2) c0 = c;
          good = good && c == c0;
          return good;
        });
      }
      t.add(res.ok, good, res.method.empty() ? "reported" : res.method, {{"trial", it}});
    }
  } else if (nm == "clean") {
    Hypergraph H(2, 12, {{0, 1}});
    auto F = shared_stars(12, {0, 1}, {2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
    auto T = tensor(H, F, 2);
    for (int it = 0; it < a.trials; ++it) {
      auto chi = Colouring::from_function(T, a.s, [&](const Edge&) { return (int)(g() % a.s); });
      LeafSetColouring f = [&](const std::vector<int>& e) { return chi.of(T, e); };
      auto res = clean_forest(H, F, T, chi, a.d);
      bool good = res.ok && is_clean(H, F, res.vertices, f).ok && res.forest.forest().is_d_ary(a.d);
      t.add(res.ok, good, res.ok ? res.method : "reported", {{"trial", it}});
    }
  } else if (nm == "versatile-sequence") {
    int k = std::max(1, a.n > 3 ? 2 : a.n - 1), s = 1;
    auto T0 = full_forest(1, (1 << k) * (s + 1) - 1, a.h);
    auto q = build_versatile_sequence(T0, k, s);
    for (int it = 0; it < a.trials; ++it) {
      int i = 1 + it % k;
      auto c = check_star_property(T0, q, i, 200, 100, G.seed + it);
      t.add(true, c.ok, "star-property", {{"step", i}, {"reason", c.reason}});
    }
  } else if (nm == "versatile") {
    auto T = full_forest(1, 47, 2);
    auto types = balanced_tree_types(2, 2);
    for (int it = 0; it < a.trials; ++it) {
      const auto& tau = types[it % types.size()];
      auto w = find_versatile_set(T, tau, 2);
      bool good = w.ok && type_of(T, w.e) == tau && verify_versatile(T, w.e, 2);
      t.add(w.ok, good, w.ok ? w.mode : "reported", {{"trial", it}, {"reason", w.reason}});
    }
  } else if (nm == "reroute") {
    Hypergraph H(3, 8, {{0, 1, 2}});
    auto F = shared_stars(8, {0, 1}, {2, 3, 4, 5, 6, 7});
    auto L0 = F.tree_leaves(0), L1 = F.tree_leaves(1);
    auto T = tensor(H, F, 3);
    TightWalk P{{L0[1], L0[3], L0[2], L1[2], L1[4]}, true};
    for (int it = 0; it < a.trials; ++it) {
      std::vector<int> ap{L0[g() % L0.size()], L0[g() % L0.size()]}, bp{L1[g() % L1.size()], L1[g() % L1.size()]};
      std::sort(ap.begin(), ap.end());
      std::sort(bp.begin(), bp.end());
      if (ap[0] == ap[1] || bp[0] == bp[1]) {
        --it;
        continue;
      }
      auto res = reroute_walk(H, F, P, ap, bp);
      bool good = res.ok && validate_walk(T, res.walk, false).ok && res.walk.order() == P.order();
      for (std::size_t i = 0; good && i + 3 <= P.order(); ++i) {
        std::vector<int> e(P.verts.begin() + i, P.verts.begin() + i + 3), f(res.walk.verts.begin() + i,
                                                                            res.walk.verts.begin() + i + 3);
        std::sort(e.begin(), e.end());
        std::sort(f.begin(), f.end());
        std::multiset<int> pe, pf;
        for (int x : e) pe.insert(F.pi0(x));
        for (int x : f) pf.insert(F.pi0(x));
        good = pe == pf && type_of(F.forest(), e) == type_of(F.forest(), f);
      }
      t.add(res.ok, good, res.ok ? "rerouted" : "reported", {{"a", ap}, {"b", bp}});
    }
  } else if (nm == "xyz") {
    auto T = full_forest(1, 3, std::max(a.h, 2 * 1 + 1));
    for (int it = 0; it < a.trials; ++it) {
      std::map<ForestType, int> by_type;
      CopyColouring chi = [&](const std::vector<int>& e) {
        auto key = type_of(T, e);
        auto f = by_type.find(key);
        if (f != by_type.end()) return f->second;
        return by_type[key] = (int)(g() % a.s);
      };
      auto res = trees_tight_xyz(T, chi, a.r, 1, a.s);
      bool good = res.ok && independent_leaf_sets(T, res.X, res.Z) && type_of(T, res.X) == type_of(T, res.Z) &&
                  validate_walk(a.r, [&](const std::vector<int>& e) { return chi(e) == res.colour; }, res.walk,
                                false)
                      .ok;
      t.add(res.ok, good, res.ok ? "xyz" : "reported", {{"trial", it}, {"reason", res.reason}});
    }
  } else {
    throw UsageError("unknown lemma '" + nm + "'");
  }
  return t;
}

// ---------------------------------------------------------------------------

int cmd_gen_expander(int n, double eps) {
  auto ex = generate_expander(n, eps, G.seed);
  json j{{"n", n},
         {"eps", eps},
         {"seed", G.seed},
         {"ok", ex.ok},
         {"max_degree", ex.graph.max_degree()},
         {"connected", ex.graph.connected()},
         {"certificate", cert_json(ex.certificate)},
         {"graph_hash", graph_hash(ex.graph)},
         {"diagnostics", ex.diagnostics}};
  save("graph.txt", ex.graph.to_text());
  if (!G.json && G.out.empty() && ex.ok) {
    std::cout << ex.graph.to_text();
    return 0;
  }
  return report(j, ex.ok, "expander n=" + std::to_string(n) + " " + graph_hash(ex.graph), "expander.json");
}

int cmd_verify_expansion(const std::string& path, double eps, const std::string& mode, std::uint64_t trials) {
  auto Gr = load_graph(path);
  VerifyMode m;
  if (mode == "exhaustive") m = VerifyMode::Exhaustive;
  else if (mode == "sampled") m = VerifyMode::Sampled;
  else if (mode == "auto") m = exhaustive_feasible(Gr.n(), expansion_set_size(Gr.n(), eps)) ? VerifyMode::Exhaustive
                                                                                            : VerifyMode::Sampled;
  else throw UsageError("mode must be exhaustive, sampled or auto");
  auto c = verify_expansion(Gr, eps, m, G.budget ? G.budget : trials, G.seed);
  auto j = cert_json(c);
  return report(j, c.verdict, std::string("expansion ") + (c.verdict ? "holds" : "fails") + " (" + c.mode + ")",
                "expansion.json");
}

int cmd_lemma(const LemmaArgs& a) {
  auto t = run_lemma(a);
  std::ostringstream os;
  os << a.name << ": " << t.verified << " verified, " << t.reported << " reported, " << t.invalid << " invalid of "
     << t.trials;
  return report(t.to_json(), t.invalid == 0, os.str(), "lemma-" + a.name + ".json");
}

int cmd_check_disconnected(const std::string& gpath, const std::string& fpath, const std::string& colouring, int s,
                           int r, int t, int pp, int k) {
  auto Gr = load_graph(gpath);
  SForest F;
  try {
    F = sforest_from_text(read_file(fpath));
  } catch (const std::invalid_argument& e) {
    throw UsageError(fpath + ": " + e.what());
  }
  if (F.ground_size() != Gr.n()) throw UsageError("forest and graph have different ground sets");
  DistTable D(Gr);
  auto chi = HostColouring::parse(colouring, s, G.seed);
  TensorColouring tc{&F, &D, &chi, t, pp};
  LeafSetColouring col = [tc](const std::vector<int>& e) { return tc(e); };
  auto rep = check_disconnected(F, D, col, s, r, k, G.budget ? G.budget : 5'000'000);
  auto j = detail::disconnection_json(rep);
  j["ok"] = rep.ok;
  j["exhaustive"] = rep.exhaustive;
  j["reason"] = rep.reason;
  j["k"] = k;
  bool good = rep.ok && rep.exhaustive;
  return report(j, good, std::to_string(k) + "-disconnected (" + std::to_string(rep.starts) + " start sets)",
                "disconnection.json");
}

int cmd_run_pipeline(const std::string& gpath, int n, double eps, const std::string& colouring, bool strict) {
  GroundGraph Gr;
  if (!gpath.empty()) Gr = load_graph(gpath);
  else {
    auto ex = generate_expander(n, eps, G.seed);
    if (!ex.ok) return report({{"stage", "expander"}, {"diagnostics", ex.diagnostics}}, false, "");
    Gr = ex.graph;
  }
  auto S = load_schedule(Gr.n());
  S.n = Gr.n();
  PipelineOptions opt;
  opt.seed = G.seed;
  if (G.budget) opt.aux_budget = G.budget;
  opt.strict = strict;
  PipelineContext cx(S, Gr, HostColouring::parse(colouring, S.s, G.seed), opt);
  auto res = run_theorem_walk(cx);
  auto j = res.to_json();
  save("run.json", j.dump(2) + "\n");
  if (res.certificate) save("certificate.json", res.certificate->to_json().dump(2) + "\n");
  bool good = res.kind != "failure";
  std::string summary = res.kind == "certificate"
                            ? "certificate: order " + std::to_string(res.certificate->walk.size()) + ", colour " +
                                  std::to_string(res.certificate->colour) + ", level " +
                                  std::to_string(res.certificate->level) + ", " + res.certificate->verdict
                            : res.kind + (res.label.empty() ? "" : ": " + res.label);
  if (G.json || !good) std::cout << j.dump(2) << "\n";
  else std::cout << summary << "\n";
  return good ? 0 : 1;
}

int cmd_blowup(const std::string& hpath, const std::string& cpath, int s, int d, int p, int order) {
  Hypergraph H;
  try {
    H = Hypergraph::from_text(read_file(hpath));
  } catch (const std::invalid_argument& e) {
    throw UsageError(hpath + ": " + e.what());
  }
  Hypergraph B = blow_up(H, d);
  Colouring chi;
  if (cpath.empty()) chi = Colouring::constant(B, 0, s);
  else {
    try {
      chi = Colouring::from_text(B, read_file(cpath), s);
    } catch (const std::exception& e) {
      throw UsageError(cpath + ": " + e.what());
    }
  }
  if (order <= 0) order = (H.n() + p - 1) / p;
  auto res = blowup_reduction(
      H, [&](const std::vector<int>& e) { return chi.of(B, e); }, s, d, p,
      [&](const Hypergraph& Hh, const Colouring& c) { return find_mono_walk(Hh, c, p, order); },
      G.budget ? G.budget : 20'000'000);
  auto j = res.to_json();
  return report(j, res.ok, "tight path of order " + std::to_string(res.path.order()) + " in colour " +
                               std::to_string(res.colour),
                "blowup.json");
}

int cmd_verify_certificate(const std::string& cpath, const std::string& gpath) {
  auto Gr = load_graph(gpath);
  WalkCertificate C;
  try {
    C = WalkCertificate::from_json(json::parse(read_file(cpath)));
  } catch (const json::exception& e) {
    throw UsageError(cpath + ": " + e.what());
  }
  auto chk = verify_certificate(C, Gr);
  json j{{"ok", chk.ok}, {"window", chk.window}, {"reason", chk.reason}, {"order", C.walk.size()}};
  return report(j, chk.ok, "certificate valid: order " + std::to_string(C.walk.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tight-path Ramsey toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", G.seed, "random seed");
  app.add_option("--schedule", G.schedule, "schedule JSON file");
  app.add_option("--budget", G.budget, "search budget override");
  app.add_option("--out", G.out, "directory for artifacts");
  app.add_flag("--json", G.json, "print JSON results");

  int n = 300, s = 2, r = 3, t = 20, pp = 72, k = 1, d = 4, p = 2, order = 0;
  double eps = 0.3;
  std::uint64_t trials = 100000;
  std::string graph, forest, colouring = "mono", mode = "auto", cert, hyper, hcol;
  bool strict = false;
  std::function<int()> action;

  auto* ge = app.add_subcommand("gen-expander", "generate a verified expander");
  ge->add_option("--n", n)->required();
  ge->add_option("--eps", eps);
  ge->callback([&] { action = [&] { return cmd_gen_expander(n, eps); }; });

  auto* ve = app.add_subcommand("verify-expansion", "check the expansion property of a graph file");
  ve->add_option("--graph", graph)->required();
  ve->add_option("--eps", eps);
  ve->add_option("--mode", mode, "exhaustive, sampled or auto");
  ve->add_option("--trials", trials);
  ve->callback([&] { action = [&] { return cmd_verify_expansion(graph, eps, mode, trials); }; });

  LemmaArgs la;
  auto* lm = app.add_subcommand("lemma", "run a lemma on seeded random instances and verify every output");
  lm->add_option("name", la.name,
                 "path-partition, bipartite, multicolour, multipartite, expander-ramsey, expander-main, "
                 "separate-two, separate, ramsey-trees, clean, versatile-sequence, versatile, reroute, xyz")
      ->required();
  lm->add_option("--n", la.n);
  lm->add_option("--r", la.r);
  lm->add_option("--s", la.s);
  lm->add_option("--d", la.d);
  lm->add_option("--c", la.c);
  lm->add_option("--height", la.h);
  lm->add_option("--random", la.trials, "number of random instances");
  lm->callback([&] { action = [&] { return cmd_lemma(la); }; });

  auto* cd = app.add_subcommand("check-disconnected", "check k-disconnectedness of G^t (x) F");
  cd->add_option("--graph", graph)->required();
  cd->add_option("--forest", forest)->required();
  cd->add_option("--colouring", colouring, "mono, random, band[:W] or parity");
  cd->add_option("--s", s);
  cd->add_option("--r", r);
  cd->add_option("--t", t);
  cd->add_option("--pp", pp);
  cd->add_option("--k", k);
  cd->callback([&] { action = [&] { return cmd_check_disconnected(graph, forest, colouring, s, r, t, pp, k); }; });

  auto* rp = app.add_subcommand("run-pipeline", "run the walk theorem pipeline end to end");
  rp->add_option("--graph", graph, "graph file; generated from --n/--eps/--seed when absent");
  rp->add_option("--n", n);
  rp->add_option("--eps", eps);
  rp->add_option("--colouring", colouring, "mono, random, band[:W] or parity");
  rp->add_flag("--strict", strict, "stop at the first stage that misses its guarantee");
  rp->callback([&] { action = [&] { return cmd_run_pipeline(graph, n, eps, colouring, strict); }; });

  auto* bu = app.add_subcommand("blowup-reduce", "turn a walk into a tight path of H[p]");
  bu->add_option("--hypergraph", hyper)->required();
  bu->add_option("--colouring", hcol, "colouring file of H[d]; constant when absent");
  bu->add_option("--s", s);
  bu->add_option("--d", d);
  bu->add_option("--p", p);
  bu->add_option("--order", order, "target walk order; n/p when absent");
  bu->callback([&] { action = [&] { return cmd_blowup(hyper, hcol, s, d, p, order); }; });

  auto* vc = app.add_subcommand("verify-certificate", "re-validate a walk certificate");
  vc->add_option("--certificate", cert)->required();
  vc->add_option("--graph", graph)->required();
  vc->callback([&] { action = [&] { return cmd_verify_certificate(cert, graph); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
