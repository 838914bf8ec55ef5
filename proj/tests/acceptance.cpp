// Acceptance suite: one line per criterion. Known failures are reported as FAIL but do not
// change the exit status; any other failure does.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cliqueforge/decomp.hpp"
#include "cliqueforge/divfixer.hpp"
#include "cliqueforge/fractional.hpp"
#include "cliqueforge/gadgets.hpp"
#include "cliqueforge/pipeline.hpp"
#include "test_util.hpp"

using namespace cliqueforge;
using testutil::Gen;

namespace {

// Runtime limits in seconds, per criterion.
constexpr double kLimit[11] = {0, 5, 10, 60, 60, 30, 5, 120, 300, 60 * 20, 120};
// Per-trial limit for the large pipeline regression.
constexpr double kTrialLimit = 60;
constexpr std::size_t kMinAuditedPackings = 500;

struct Outcome {
  bool pass = true;
  bool known_failure = false;  // expected to fail; reported, not counted
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << " first failure: " << what << ";";
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Ratio half_q_plus_one(int q) { return Ratio(q + 1, 2); }

// criterion 1
void gadget_densities(Outcome& out) {
  bool fake_ok = true;
  std::ostringstream fake;
  for (int q = 3; q <= 6; ++q) {
    const Ratio want = half_q_plus_one(q);
    const Ratio anti = rooted_2_density(anti_edge(q).rooted).value;
    out.require(anti == want, "anti-edge q=" + std::to_string(q) + " gives " + anti.str());
    const Ratio fe = rooted_2_density(fake_edge(q).rooted).value;
    fake << " q=" << q << ": " << fe.str() << " vs " << want.str() << ";";
    if (fe != want) fake_ok = false;
  }
  out.detail << " anti-edge " << (out.pass ? "ok" : "wrong") << "; fake-edge measured vs expected" << fake.str();
  if (out.pass && !fake_ok) {
    out.pass = false;
    out.known_failure = true;
  } else if (out.pass) {
    out.detail << " (fake-edge half now matches; known-failure note is stale)";
  }
}

// criterion 2
void transformers(Outcome& out) {
  for (int k : {2, 4, 6}) {
    const auto t = star_transformer(3, k);
    out.require(verify_transformer(t).valid, "q=3 k=" + std::to_string(k) + " certificates");
    const Ratio m = rooted_2_density(t.T).value;
    out.require(m <= Ratio(3 * k + 1, k), "q=3 k=" + std::to_string(k) + " density " + m.str());
    out.detail << " q=3,k=" << k << ":" << m.str();
  }
  for (int q : {4, 5}) {
    const auto t = star_transformer(q);
    out.require(verify_transformer(t).valid, "q=" + std::to_string(q) + " certificates");
    const Ratio m = rooted_2_density(t.T).value;
    out.require(m <= Ratio(2 * q + 1, 2), "q=" + std::to_string(q) + " density " + m.str());
    out.detail << " q=" << q << ":" << m.str();
  }
}

// criterion 3
void absorbers(Outcome& out) {
  for (int q : {3, 4}) {
    const auto b = anti_clique_absorber(q, 2);
    out.require(verify_absorber(b).valid, "anti-clique absorber q=" + std::to_string(q));
    out.require(low_degree_vertices(b).empty(), "low degree vertex, q=" + std::to_string(q));
    out.detail << " anti-clique q=" << q << ": v=" << b.A.graph().vertex_count() << " e=" << b.A.graph().edge_count()
               << ";";
  }
  const auto booster = anti_clique_absorber(3, 2);
  const auto nab = nabla_absorber(booster.L, booster, booster);
  out.require(verify_absorber(nab).valid, "nabla construction");
  out.require(low_degree_vertices(nab).empty(), "low degree vertex in the nabla construction");
  out.detail << " nabla: e=" << nab.A.graph().edge_count();
}

// Independent residue check of a selection.
bool selection_ok(const FixerBlueprint& bp, const SelectRequest& req, const MultiGraph& f) {
  const std::uint64_t big = static_cast<std::uint64_t>(bp.q * (bp.q - 1)), small = static_cast<std::uint64_t>(bp.q - 1);
  if (f.edge_count() % big != req.m) return false;
  for (Vertex v = 0; v < bp.n; ++v)
    if (f.degree(v) % small != req.d[v]) return false;
  for (const auto& [e, k] : f.multiplicities())
    if (k > bp.base.multiplicity(e.u, e.v)) return false;
  return true;
}

// criterion 4
void fixers(Outcome& out) {
  struct Case {
    int q;
    std::size_t n;
  };
  for (Case c : {Case{3, 6}, Case{4, 7}}) {
    const auto bp = build_fixer_blueprint(c.q, c.n);
    const std::uint64_t small = static_cast<std::uint64_t>(c.q - 1), big = static_cast<std::uint64_t>(c.q * (c.q - 1));
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < c.n; ++i) total *= small;
    std::size_t requests = 0, bad = 0;
    std::vector<std::uint32_t> d(c.n);
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t rest = code, sum = 0;
      for (auto& x : d) {
        x = static_cast<std::uint32_t>(rest % small);
        sum += x;
        rest /= small;
      }
      for (std::uint64_t m = 0; m < big; ++m) {
        if (sum % small != (2 * m) % small) continue;
        ++requests;
        const SelectRequest req{m, d};
        if (!selection_ok(bp, req, inductive_select(bp, req))) ++bad;
      }
    }
    out.require(bad == 0, "congruence q=" + std::to_string(c.q));
    out.detail << " q=" << c.q << ",n=" << c.n << ": " << requests << " requests;";
  }
  out.require(out.pass, "exhaustive selection");

  // The embedded simple fixer needs room for its fake edges, hence the host sizes.
  std::map<std::pair<int, int>, EmbeddedFixer> cache;
  for (Case c : {Case{3, 16}, Case{4, 120}}) {
    Gen gen(static_cast<std::uint64_t>(c.q) * 7919);
    std::size_t ok = 0;
    for (int host = 0; host < 100; ++host) {
      const std::pair<int, int> key{c.q, host / 10};
      if (!cache.count(key)) {
        const auto bp = simplify_fixer(build_fixer_blueprint(c.q, c.n));
        std::vector<Vertex> id(c.n);
        std::iota(id.begin(), id.end(), Vertex{0});
        auto ef = embed_fixer(bp, complete_graph(c.n), id, EmbedOptions{static_cast<std::uint64_t>(host / 10 + 1)});
        if (!ef) {
          out.require(false, "embedding q=" + std::to_string(c.q));
          return;
        }
        cache.emplace(key, std::move(*ef));
      }
      const EmbeddedFixer& ef = cache.at(key);
      Graph g = ef.graph;
      const double p = 0.1 + 0.8 * static_cast<double>(gen.below(1000)) / 1000.0;
      for (Vertex a = 0; a < c.n; ++a)
        for (Vertex b = a + 1; b < c.n; ++b)
          if (gen.coin(p)) g.add_edge(a, b);
      const auto res = apply_fixer(g, ef, c.q);
      const bool good = is_kq_divisible(res.graph, c.q) && res.deleted.size() <= ef.graph.edge_count() &&
                        res.graph.edge_count() + res.deleted.size() == g.edge_count();
      ok += good;
    }
    out.require(ok == 100, "apply_fixer q=" + std::to_string(c.q));
    out.detail << " apply q=" << c.q << ": " << ok << "/100 divisible;";
  }
}

std::vector<Clique> cliques_of(const Graph& g, int q) { return enumerate_cliques(g, q).cliques; }

// criterion 5
void fractional(Outcome& out) {
  {
    const std::vector<Vertex> e{0, 1}, J{2, 3, 4};
    const EdgeGadget gad = edge_gadget(3, 2, e, J);
    // unit mass on e, zero on every other pair of e + J
    std::map<Edge, mpq_class> mass;
    for (const auto& [c, w] : gad.psi)
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) mass[Edge(c[i], c[j])] += w;
    bool unit = true;
    for (Vertex a = 0; a < 5; ++a)
      for (Vertex b = a + 1; b < 5; ++b) {
        const mpq_class want = (a == 0 && b == 1) ? 1 : 0;
        if (mass[Edge(a, b)] != want) unit = false;
      }
    out.require(unit, "edge gadget incidence");
    bool bounded = true;
    for (const auto& [c, w] : gad.psi)
      if (abs(w) > 8) bounded = false;
    out.require(bounded && gad.within_bound, "edge gadget bound");
    out.detail << " gadget max|psi|=" << gad.max_abs.get_str() << ";";
  }
  {
    const Graph k7 = complete_graph(7);
    std::map<Edge, mpq_class> phi;
    for (const Edge& e : k7.edges()) phi[e] = 1;
    const BoostResult r = boost(k7, 3, cliques_of(k7, 3), cliques_of(k7, 5), phi, 5);
    bool uniform = r.weighting.weights.size() == 35;
    for (const auto& [c, w] : r.weighting.weights)
      if (w != mpq_class(1, 5)) uniform = false;
    out.require(uniform, "K7 boost is not uniform 1/5");
    out.require(verify_fractional(k7, r.weighting, FractionalMode::decomposition), "K7 fractional verification");
  }
  Gen gen(606);
  std::size_t instances = 0, exact = 0;
  while (instances < 50) {
    const std::size_t n = 7 + gen.below(9);
    const int q = n <= 10 && gen.coin(0.3) ? 4 : 3;
    const Graph g = gen.graph(n, 0.85);
    const auto H = cliques_of(g, q), Q = cliques_of(g, q + 2);
    std::set<Edge> covered;
    for (const Clique& c : Q)
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) covered.insert(Edge(c[i], c[j]));
    if (covered.size() != g.edge_count()) continue;  // boost needs every edge in a (q+2)-clique
    ++instances;
    std::map<Edge, mpq_class> phi;
    for (const Edge& e : g.edges()) {
      phi[e] = mpq_class(static_cast<long>(gen.below(11)), 10);
      phi[e].canonicalize();
    }
    mpq_class d(static_cast<long>(1 + gen.below(40)), static_cast<long>(1 + gen.below(4)));
    d.canonicalize();
    const BoostResult r = boost(g, q, H, Q, phi, d);
    std::map<Edge, mpq_class> psi;
    for (const auto& [c, w] : r.weighting.weights)
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) psi[Edge(c[i], c[j])] += w;
    bool same = true;
    for (const Edge& e : g.edges())
      if (psi[e] != phi[e]) same = false;
    exact += same;
  }
  out.require(exact == instances, "boost identity");
  out.detail << " boost identity " << exact << "/" << instances;
}

// criterion 6
void design_arithmetic(Outcome& out) {
  for (std::size_t n = 5; n <= 12; ++n) {
    const auto h = design_hypergraph(complete_graph(n), 3);
    out.require(h.min_degree() == n - 2 && h.max_degree() == n - 2, "K_" + std::to_string(n) + " triangle degree");
    out.require(h.max_codegree() <= 1, "K_" + std::to_string(n) + " triangle codegree");
  }
  for (std::size_t n = 6; n <= 12; ++n) {
    const auto h = design_hypergraph(complete_graph(n), 4);
    const std::size_t want = binom(n - 2, 2);
    out.require(h.min_degree() == want && h.max_degree() == want, "K_" + std::to_string(n) + " K4 degree");
  }
  out.detail << " K_n with q=3 (n=5..12) and q=4 (n=6..12)";
}

// criterion 7, first part: extra packings so the audit has a meaningful sample
void leave_bound_runs(Outcome& out) {
  const Graph k4 = complete_graph(4), k7 = complete_graph(7);
  const auto m4 = min_leave_packing(k4, 3), m7 = min_leave_packing(k7, 3);
  out.require(m4.optimal && m4.leave == 3, "K4 min leave");
  out.require(m7.optimal && m7.leave == 0, "K7 min leave");
  out.detail << " K4 leave " << m4.leave << ", K7 leave " << m7.leave << ";";

  Gen gen(77);
  for (int t = 0; t < 300; ++t) {
    const Graph g = gen.graph(8 + gen.below(5), 0.3 + 0.6 * static_cast<double>(gen.below(100)) / 100.0);
    const auto m = min_leave_packing(g, 3, SolveBudget{200'000, 1e9});
    out.require(m.leave >= optimal_leave_number(g, 3), "min leave below the bound");
  }
  PackOptions small;
  small.climb_steps = 20'000;
  small.climb_stall = 5'000;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const std::size_t n = 15 + s % 20;
    const PackResult r = s % 2 ? pack_gnp(n, Probability(1 + s % 4, 5), 3, s, small) : pack_gnd(n - n % 2, 4 + s % 3, 3, s, small);
    out.require(r.report.valid, "pipeline packing invalid, seed " + std::to_string(s));
  }
}

struct Certificate {
  std::string name;
  Graph graph;
  int q;
  Packing packing;
};

// criterion 8
void oracle_equivalence(Outcome& out) {
  std::vector<Certificate> certs;
  auto add_transformer = [&](const std::string& name, const TransformerBundle& t) {
    certs.push_back({name + " T+L", t.T.graph().united(t.L), t.q, t.decomp_TL});
    certs.push_back({name + " T+L'", t.T.graph().united(t.L_prime), t.q, t.decomp_TL_prime});
  };
  auto add_absorber = [&](const std::string& name, const AbsorberBundle& b) {
    certs.push_back({name + " A", b.A.graph(), b.q, b.decomp_A});
    certs.push_back({name + " L+A", b.A.graph().united(b.L), b.q, b.decomp_LA});
  };
  for (int k : {2, 4, 6}) add_transformer("transformer q=3 k=" + std::to_string(k), star_transformer(3, k));
  for (int q : {4, 5, 6}) add_transformer("transformer q=" + std::to_string(q), star_transformer(q));
  for (int q : {3, 4}) add_absorber("anti-clique q=" + std::to_string(q), anti_clique_absorber(q, 2));
  const auto booster = anti_clique_absorber(3, 2);
  add_absorber("nabla K3", nabla_absorber(complete_graph(3), trivial_absorber(complete_graph(3), 3), booster));
  for (std::size_t n : {3, 7, 9}) add_absorber("trivial K" + std::to_string(n), trivial_absorber(complete_graph(n), 3));
  for (int q = 3; q <= 5; ++q) {
    const auto nb = nabla(q, complete_graph(static_cast<std::size_t>(q)));
    certs.push_back({"tilde-nabla K" + std::to_string(q), tilde_nabla(q, complete_graph(static_cast<std::size_t>(q))), q,
                     Packing{q, nb.tilde_cliques()}});
  }
  {
    const auto om = naive_omni_absorber(complete_graph(3), 3);
    for (const auto& entry : om.table) {
      Graph l(om.A.graph().vertex_count());
      for (const Edge& e : entry.L) l.add_edge(e.u, e.v);
      certs.push_back({"omni K3, L+A for e(L)=" + std::to_string(entry.L.size()), om.A.graph().united(l), 3,
                       om.decomposition_for(entry.L)});
    }
  }

  std::size_t checked = 0, agreed = 0;
  for (const auto& c : certs) {
    if (c.graph.edge_count() > 60) continue;
    ++checked;
    const bool cert_ok = is_decomposition(c.graph, c.packing);
    const auto found = exact_decomposition(c.graph, c.q);
    const bool oracle_ok = found.status == SolveStatus::found && is_decomposition(c.graph, found.packing);
    if (cert_ok && oracle_ok) {
      ++agreed;
    } else {
      out.require(false, c.name + " (certificate " + (cert_ok ? "ok" : "bad") + ", solver " + to_string(found.status) +
                             ")");
    }
  }
  out.require(checked > 0, "no certificates on at most 60 edges");
  out.detail << " " << agreed << "/" << checked << " certificates rediscovered";
}

// criterion 9
void pipeline_regression(Outcome& out) {
  double total_leave = 0, worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const PackResult r = pack_gnp(300, Probability(3, 10), 3, seed);
    const double secs = seconds_since(t0);
    worst = std::max(worst, secs);
    out.require(secs < kTrialLimit, "gnp trial over the time limit, seed " + std::to_string(seed));
    out.require(r.report.valid && verify_packing(r.graph, r.packing).valid, "gnp packing invalid");
    total_leave += static_cast<double>(r.report.leave);
    std::fprintf(stderr, "  gnp(300,0.3) seed %llu: leave %zu, %.1f s\n", static_cast<unsigned long long>(seed),
                 r.report.leave, secs);
  }
  const double mean = total_leave / 10;
  out.require(mean <= 2 * 300, "mean leave above 2n");
  std::size_t gnd_leave = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PackResult r = pack_gnd(60, 12, 3, seed);
    out.require(r.report.valid && verify_packing(r.graph, r.packing).valid, "gnd packing invalid");
    out.require(r.report.leave >= optimal_leave_number(r.graph, 3), "gnd leave below the bound");
    gnd_leave += r.report.leave;
  }
  std::ostringstream m;
  m.precision(1);
  m << std::fixed << " gnp(300,0.3) mean leave " << mean << " (bound 600), slowest trial " << worst
    << " s; gnd(60,12) mean leave " << static_cast<double>(gnd_leave) / 10;
  out.detail << m.str();
}

// criterion 10
void determinism(Outcome& out) {
  BenchConfig cfg;
  BenchRow a, b;
  a.model = "gnp", a.n = 60, a.p = Probability(1, 2);
  b.model = "gnd", b.n = 40, b.d = 6;
  cfg.rows = {a, b};
  cfg.trials = 10;
  cfg.master_seed = 20240;
  std::string first;
  for (std::size_t threads : {1, 2, 8}) {
    cfg.threads = threads;
    const std::string json = bench(cfg);
    if (first.empty()) first = json;
    out.require(json == first, "output differs at " + std::to_string(threads) + " threads");
  }
  out.detail << " " << first.size() << " bytes, identical at 1/2/8 threads";
}

}  // namespace

int main() {
  reset_packing_audit();
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"gadget densities", gadget_densities},  {"transformers", transformers},
      {"absorbers", absorbers},                {"fixers", fixers},
      {"fractional", fractional},              {"design hypergraph arithmetic", design_arithmetic},
      {"leave bound", leave_bound_runs},       {"oracle equivalence", oracle_equivalence},
      {"pipeline regression", pipeline_regression}, {"determinism", determinism},
  };
  std::vector<Outcome> outcomes(criteria.size());
  std::vector<double> times(criteria.size());
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::fprintf(stderr, "running %zu: %s\n", i + 1, criteria[i].first);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(outcomes[i]);
    } catch (const std::exception& e) {
      outcomes[i].require(false, std::string("exception: ") + e.what());
    }
    times[i] = seconds_since(t0);
    if (times[i] > kLimit[i + 1]) outcomes[i].require(false, "over the time limit");
  }

  // The leave audit covers every packing produced by the whole run.
  const auto audit = packing_audit_counters();
  outcomes[6].require(audit.violations == 0, std::to_string(audit.violations) + " audit violations");
  outcomes[6].require(audit.packings >= kMinAuditedPackings, "only " + std::to_string(audit.packings) + " packings");
  outcomes[6].detail << " " << audit.packings << " packings audited, " << audit.violations << " violations";

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Outcome& o = outcomes[i];
    const char* verdict = o.pass ? "PASS" : (o.known_failure ? "FAIL (known)" : "FAIL");
    std::printf("criterion %zu %-29s %-12s %6.1f s /%4.0f s |%s\n", i + 1, criteria[i].first, verdict, times[i],
                kLimit[i + 1], o.detail.str().c_str());
    if (!o.pass && !o.known_failure) ++unexpected;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
