#include "cliqueforge/gadgets.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace cliqueforge {

const char* to_string(GadgetKind k) {
  switch (k) {
    case GadgetKind::anti_edge:
      return "anti-edge";
    case GadgetKind::fake_edge:
      return "fake-edge";
    case GadgetKind::transformer:
      return "transformer";
    case GadgetKind::absorber:
      return "absorber";
  }
  return "?";
}

namespace {

void require_q(int q) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
}

std::vector<Vertex> support(const Graph& g) {
  std::vector<Vertex> vs;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 0) vs.push_back(v);
  return vs;
}

Clique sorted_clique(Clique c) {
  std::sort(c.begin(), c.end());
  return c;
}

void add_clique(Graph& g, const std::vector<Vertex>& vs) {
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) g.add_edge(vs[a], vs[b]);
}

void require_valid(const AbsorberBundle& b, const char* what) {
  auto r = verify_absorber(b);
  if (!r.valid) throw std::logic_error(std::string(what) + " failed validation: " + r.violations.front());
}

}  // namespace

std::vector<Vertex> add_anti_edge(Graph& g, int q, Vertex a, Vertex b) {
  require_q(q);
  std::vector<Vertex> all{a, b};
  std::vector<Vertex> fresh;
  for (int i = 0; i < q - 2; ++i) {
    fresh.push_back(g.add_vertex());
    all.push_back(fresh.back());
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!(i == 0 && j == 1)) g.add_edge(all[i], all[j]);
  return fresh;
}

FakeEdgeParts add_fake_edge(Graph& g, int q, Vertex a, Vertex b) {
  require_q(q);
  FakeEdgeParts parts;
  for (int i = 0; i < q - 2; ++i) parts.hubs.push_back(g.add_vertex());
  std::vector<Vertex> w{a, b};
  w.insert(w.end(), parts.hubs.begin(), parts.hubs.end());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (i == 0 && j == 1) continue;
      parts.pairs.emplace_back(w[i], w[j]);
      parts.internals.push_back(add_anti_edge(g, q, w[i], w[j]));
    }
  return parts;
}

GadgetGraph anti_edge(int q) {
  Graph g(2);
  add_anti_edge(g, q, 0, 1);
  return {RootedGraph(std::move(g), {0, 1}), GadgetKind::anti_edge, q};
}

GadgetGraph fake_edge(int q) {
  Graph g(2);
  add_fake_edge(g, q, 0, 1);
  return {RootedGraph(std::move(g), {0, 1}), GadgetKind::fake_edge, q};
}

std::vector<Clique> NablaResult::tilde_cliques() const {
  std::vector<Clique> out;
  for (std::size_t i = 0; i < base_edges.size(); ++i) {
    Clique c{base_edges[i].u, base_edges[i].v};
    c.insert(c.end(), internals[i].begin(), internals[i].end());
    out.push_back(sorted_clique(std::move(c)));
  }
  return out;
}

const std::vector<Vertex>& NablaResult::internals_of(Vertex a, Vertex b) const {
  Edge e(a, b);
  auto it = std::lower_bound(base_edges.begin(), base_edges.end(), e);
  if (it == base_edges.end() || *it != e) throw InvalidParameter("not a base edge");
  return internals[static_cast<std::size_t>(it - base_edges.begin())];
}

NablaResult nabla(int q, const Graph& x) {
  require_q(q);
  NablaResult r;
  r.graph = Graph(x.vertex_count());
  r.base_edges = x.edges();
  for (const Edge& e : r.base_edges) r.internals.push_back(add_anti_edge(r.graph, q, e.u, e.v));
  return r;
}

Graph tilde_nabla(int q, const Graph& x) { return nabla(q, x).graph.united(x); }

TransformerBundle star_transformer(int q, int k) {
  require_q(q);
  TransformerBundle b;
  b.q = q;
  Graph t;
  std::vector<Clique> tl, tlp;
  auto swap_centres = [](Clique c) {
    for (Vertex& v : c) v = v == 0 ? 1 : v == 1 ? 0 : v;
    return c;
  };
  if (q == 3) {
    if (k < 2 || k % 2 != 0) throw InvalidParameter("k must be an even integer >= 2");
    t = Graph(4 + static_cast<std::size_t>(k));
    auto v = [k](int i) -> Vertex {
      if (i == 0) return 2;
      if (i == k + 1) return 3;
      return static_cast<Vertex>(3 + i);
    };
    for (int i = 1; i <= k + 1; ++i) t.add_edge(v(i - 1), v(i));
    for (int i = 1; i <= k; ++i) {
      t.add_edge(0, v(i));
      t.add_edge(1, v(i));
    }
    for (int i = 0; i <= k / 2; ++i) tl.push_back({0, v(2 * i), v(2 * i + 1)});
    for (int i = 1; i <= k / 2; ++i) tl.push_back({1, v(2 * i - 1), v(2 * i)});
  } else {
    const int s = q - 1;
    t = Graph(2 + static_cast<std::size_t>(s * s));
    auto v = [s](int i, int j) { return static_cast<Vertex>(2 + (i - 1) * s + (j - 1)); };
    for (int j = 1; j <= s; ++j) {
      Clique col;
      for (int i = 1; i <= s; ++i) col.push_back(v(i, j));
      add_clique(t, col);
      col.push_back(0);
      tl.push_back(col);
    }
    for (int i = 2; i <= s; ++i) {
      Clique row;
      for (int j = 1; j <= s; ++j) {
        row.push_back(v(i, j));
        t.add_edge(0, v(i, j));
        t.add_edge(1, v(i, j));
      }
      add_clique(t, row);
      row.push_back(1);
      tl.push_back(row);
    }
  }
  for (auto& c : tl) {
    tlp.push_back(sorted_clique(swap_centres(c)));
    c = sorted_clique(c);
  }
  std::vector<Vertex> roots{0, 1};
  b.L = Graph(t.vertex_count());
  b.L_prime = Graph(t.vertex_count());
  for (Vertex leaf = 2; leaf <= static_cast<Vertex>(q); ++leaf) {
    roots.push_back(leaf);
    b.L.add_edge(0, leaf);
    b.L_prime.add_edge(1, leaf);
  }
  b.T = RootedGraph(std::move(t), roots);
  b.decomp_TL = Packing{q, std::move(tl)};
  b.decomp_TL_prime = Packing{q, std::move(tlp)};
  auto r = verify_transformer(b);
  if (!r.valid) throw std::logic_error("star transformer failed validation: " + r.violations.front());
  return b;
}

AbsorberBundle anti_clique_absorber(int q, int k) {
  require_q(q);
  const TransformerBundle star = star_transformer(q, k);
  Graph full(0);

  // One tower K_q -> nabla K_q -> nabla^2 K_q in a contiguous block of vertices.
  struct Tower {
    std::vector<Edge> s0, s1, s2;
    NablaResult n1, n2;  // base edges and internals (internal ids are in `full`)
    Vertex begin = 0, end = 0;
  };
  auto build_tower = [&](Tower& tw) {
    tw.begin = static_cast<Vertex>(full.vertex_count());
    std::vector<Vertex> kq;
    for (int i = 0; i < q; ++i) kq.push_back(full.add_vertex());
    for (std::size_t a = 0; a < kq.size(); ++a)
      for (std::size_t b = a + 1; b < kq.size(); ++b) tw.s0.emplace_back(kq[a], kq[b]);
    auto apply = [&](const std::vector<Edge>& base, NablaResult& nr, std::vector<Edge>& out) {
      nr.base_edges = base;
      std::sort(nr.base_edges.begin(), nr.base_edges.end());
      Graph before = full;
      for (const Edge& e : nr.base_edges) nr.internals.push_back(add_anti_edge(full, q, e.u, e.v));
      out = full.minus(before).edges();
    };
    apply(tw.s0, tw.n1, tw.s1);
    apply(tw.s1, tw.n2, tw.s2);
    tw.end = static_cast<Vertex>(full.vertex_count());
  };
  Tower un, pr;
  build_tower(un);
  build_tower(pr);
  const Vertex shift = pr.begin - un.begin;
  auto phi = [shift](Vertex v) { return v + shift; };

  std::vector<Clique> decomp_a, decomp_la;
  // A2 / L certificates
  Clique s0;
  for (int i = 0; i < q; ++i) s0.push_back(pr.begin + static_cast<Vertex>(i));
  add_clique(full, s0);
  decomp_a.push_back(s0);
  for (const Clique& c : NablaResult{Graph(), pr.n2.base_edges, pr.n2.internals}.tilde_cliques()) decomp_a.push_back(c);
  for (const Clique& c : NablaResult{Graph(), un.n2.base_edges, un.n2.internals}.tilde_cliques()) decomp_la.push_back(c);
  for (const Clique& c : NablaResult{Graph(), pr.n1.base_edges, pr.n1.internals}.tilde_cliques()) decomp_la.push_back(c);

  // A3: Q_e complete to the ends of e and phi(e)
  std::vector<Edge> s2 = un.s2;
  std::sort(s2.begin(), s2.end());
  std::map<Edge, std::vector<Vertex>> qv;
  for (const Edge& e : s2) {
    std::vector<Vertex> qe;
    for (int i = 0; i < q - 2; ++i) qe.push_back(full.add_vertex());
    add_clique(full, qe);
    for (Vertex x : qe)
      for (Vertex end : {e.u, e.v, phi(e.u), phi(e.v)}) full.add_edge(x, end);
    Clique with_e = qe, with_phi = qe;
    with_e.insert(with_e.end(), {e.u, e.v});
    with_phi.insert(with_phi.end(), {phi(e.u), phi(e.v)});
    decomp_a.push_back(sorted_clique(with_e));
    decomp_la.push_back(sorted_clique(with_phi));
    qv[e] = std::move(qe);
  }

  // A4: star transformers per (v, class M_{v,j}, i)
  std::vector<Vertex> s2_vertices;
  {
    std::set<Vertex> vs;
    for (const Edge& e : s2) vs.insert({e.u, e.v});
    s2_vertices.assign(vs.begin(), vs.end());
  }
  const Graph& st = star.T.graph();
  for (Vertex v : s2_vertices) {
    std::vector<Edge> inc;
    for (const Edge& e : s2)
      if (e.u == v || e.v == v) inc.push_back(e);
    if (inc.size() % static_cast<std::size_t>(q - 1) != 0) throw std::logic_error("S2 degree not divisible");
    for (std::size_t j = 0; j < inc.size(); j += static_cast<std::size_t>(q - 1)) {
      for (int i = 0; i < q - 2; ++i) {
        std::vector<Vertex> map(st.vertex_count());
        map[0] = v;
        map[1] = phi(v);
        for (int l = 0; l < q - 1; ++l) map[2 + static_cast<std::size_t>(l)] = qv[inc[j + static_cast<std::size_t>(l)]][static_cast<std::size_t>(i)];
        for (std::size_t x = static_cast<std::size_t>(q) + 1; x < map.size(); ++x) map[x] = full.add_vertex();
        for (const Edge& e : st.edges()) full.add_edge(map[e.u], map[e.v]);
        for (const Clique& c : star.decomp_TL.cliques) {
          Clique m;
          for (Vertex x : c) m.push_back(map[x]);
          decomp_la.push_back(sorted_clique(m));
        }
        for (const Clique& c : star.decomp_TL_prime.cliques) {
          Clique m;
          for (Vertex x : c) m.push_back(map[x]);
          decomp_a.push_back(sorted_clique(m));
        }
      }
    }
  }

  AbsorberBundle b;
  b.q = q;
  b.L = Graph(full.vertex_count());
  for (const Edge& e : un.s1) b.L.add_edge(e.u, e.v);
  b.A = RootedGraph(full.minus(b.L), support(b.L));
  b.decomp_A = Packing{q, std::move(decomp_a)};
  b.decomp_LA = Packing{q, std::move(decomp_la)};
  require_valid(b, "anti-clique absorber");
  return b;
}

AbsorberBundle nabla_absorber(const Graph& L, const AbsorberBundle& base, const AbsorberBundle& booster) {
  const int q = base.q;
  if (booster.q != q) throw InvalidParameter("base and booster use different q");
  if (!is_kq_divisible(L, q)) throw InvalidParameter("L is not divisible");
  if (!verify_absorber(base).valid) throw InvalidParameter("base absorber does not validate");
  if (!verify_absorber(booster).valid) throw InvalidParameter("booster does not validate");
  if (L.edges() != base.L.edges()) throw InvalidParameter("base absorber is for a different L");
  const NablaResult kq = nabla(q, complete_graph(static_cast<std::size_t>(q)));
  if (booster.L.edges() != kq.graph.edges()) throw InvalidParameter("booster is not an absorber for nabla K_q");

  const Graph& a = base.A.graph();
  Graph full(std::max(a.vertex_count(), L.vertex_count()));
  std::map<Edge, std::vector<Vertex>> internals;
  std::vector<Clique> decomp_a, decomp_la;
  for (const Edge& e : L.edges()) {
    internals[e] = add_anti_edge(full, q, e.u, e.v);
    Clique c = internals[e];
    c.insert(c.end(), {e.u, e.v});
    decomp_la.push_back(sorted_clique(c));
  }
  for (const Edge& e : a.edges()) internals[e] = add_anti_edge(full, q, e.u, e.v);

  const Graph& bg = booster.A.graph();
  const std::size_t booster_roots = kq.graph.vertex_count();
  auto attach = [&](const Clique& raw, bool host_in_first) {
    Clique qc = sorted_clique(raw);
    std::vector<Vertex> map(bg.vertex_count());
    for (std::size_t i = 0; i < qc.size(); ++i) map[i] = qc[i];
    for (std::size_t idx = 0; idx < kq.base_edges.size(); ++idx) {
      const Edge& ke = kq.base_edges[idx];
      const auto& host = internals.at(Edge(qc[ke.u], qc[ke.v]));
      for (std::size_t t = 0; t < host.size(); ++t) map[kq.internals[idx][t]] = host[t];
    }
    for (std::size_t x = booster_roots; x < map.size(); ++x) map[x] = full.add_vertex();
    for (const Edge& e : bg.edges()) full.add_edge(map[e.u], map[e.v]);
    auto mapped = [&](const Packing& p) {
      std::vector<Clique> out;
      for (const Clique& c : p.cliques) {
        Clique m;
        for (Vertex x : c) m.push_back(map[x]);
        out.push_back(sorted_clique(m));
      }
      return out;
    };
    auto b1 = mapped(booster.decomp_A);
    auto b2 = mapped(booster.decomp_LA);
    // Q from Q1: B1 goes to A', B2 to L + A'. Q from Q2: the other way round.
    auto& to_a = host_in_first ? b1 : b2;
    auto& to_la = host_in_first ? b2 : b1;
    decomp_a.insert(decomp_a.end(), to_a.begin(), to_a.end());
    decomp_la.insert(decomp_la.end(), to_la.begin(), to_la.end());
  };
  for (const Clique& c : base.decomp_A.cliques) attach(c, true);
  for (const Clique& c : base.decomp_LA.cliques) attach(c, false);

  AbsorberBundle b;
  b.q = q;
  b.L = Graph(full.vertex_count());
  for (const Edge& e : L.edges()) b.L.add_edge(e.u, e.v);
  b.A = RootedGraph(std::move(full), support(L));
  b.decomp_A = Packing{q, std::move(decomp_a)};
  b.decomp_LA = Packing{q, std::move(decomp_la)};
  require_valid(b, "nabla absorber");
  return b;
}

AbsorberBundle trivial_absorber(const Graph& L, int q, const SolveBudget& budget) {
  auto res = exact_decomposition(L, q, budget);
  if (res.status != SolveStatus::found)
    throw InvalidParameter(std::string("L has no decomposition (") + to_string(res.status) + ")");
  AbsorberBundle b;
  b.q = q;
  b.L = L;
  b.A = RootedGraph(Graph(L.vertex_count()), support(L));
  b.decomp_A = Packing{q, {}};
  b.decomp_LA = res.packing;
  return b;
}

std::vector<Vertex> low_degree_vertices(const AbsorberBundle& b) {
  std::vector<Vertex> out;
  const Graph& a = b.A.graph();
  for (Vertex v = 0; v < a.vertex_count(); ++v) {
    if (a.degree(v) == 0) continue;
    if (v < b.L.vertex_count() && b.L.degree(v) > 0) continue;
    if (a.degree(v) < static_cast<std::size_t>(2 * b.q - 2)) out.push_back(v);
  }
  return out;
}

namespace {

std::vector<std::vector<Edge>> divisible_subsets(const std::vector<Edge>& xe, std::size_t n, int q) {
  std::vector<std::vector<Edge>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xe.size()); ++mask) {
    Graph l(n);
    std::vector<Edge> chosen;
    for (std::size_t i = 0; i < xe.size(); ++i)
      if (mask >> i & 1) {
        l.add_edge(xe[i].u, xe[i].v);
        chosen.push_back(xe[i]);
      }
    if (is_kq_divisible(l, q)) out.push_back(std::move(chosen));
  }
  return out;
}

}  // namespace

OmniReport verify_omni_absorber(const Graph& X, const RootedGraph& A, int q, const OmniOptions& opts) {
  require_q(q);
  if (X.edge_count() > opts.edge_cap)
    throw InvalidParameter("X has " + std::to_string(X.edge_count()) + " edges; cap is " +
                           std::to_string(opts.edge_cap));
  const Graph& a = A.graph();
  const std::size_t n = std::max(X.vertex_count(), a.vertex_count());
  Graph base = a;
  base.ensure_vertices(n);
  for (const Edge& e : X.edges())
    if (a.vertex_count() > std::max(e.u, e.v) && a.has_edge(e.u, e.v))
      throw InvalidParameter("X and A share an edge");

  OmniReport rep;
  std::map<std::uint64_t, std::set<Clique>> through;
  for (auto& l : divisible_subsets(X.edges(), n, q)) {
    ++rep.divisible_subgraphs;
    Graph host = base;
    for (const Edge& e : l) host.add_edge(e.u, e.v);
    OmniCase c{l, SolveStatus::none};
    Packing used;
    if (opts.family && opts.family->count(l)) {
      used = opts.family->at(l);
      c.status = is_decomposition(host, used) ? SolveStatus::found : SolveStatus::none;
      if (c.status == SolveStatus::found) audit_packing(host, used);
    } else {
      auto res = exact_decomposition(host, q, opts.budget);
      c.status = res.status;
      used = res.packing;
    }
    if (c.status == SolveStatus::found) {
      for (const Clique& k : used.cliques) {
        Clique s = sorted_clique(k);
        for (std::size_t i = 0; i < s.size(); ++i)
          for (std::size_t j = i + 1; j < s.size(); ++j) through[Edge(s[i], s[j]).key()].insert(s);
      }
    } else if (c.status == SolveStatus::none) {
      ++rep.failures;
    } else {
      ++rep.budget_exhausted;
    }
    rep.cases.push_back(std::move(c));
  }
  for (const auto& [key, cliques] : through) rep.refinement = std::max(rep.refinement, cliques.size());
  rep.valid = rep.failures == 0 && rep.budget_exhausted == 0;
  return rep;
}

namespace {

// Private absorber search for a nonempty triangle-divisible L on local vertices
// 0..r-1 with `m` fresh vertices r..r+m-1.
struct PrivateSearch {
  std::size_t r, m, total;
  std::vector<char> is_l;                // per local pair
  std::vector<std::array<Vertex, 3>> tri;
  std::vector<std::array<std::size_t, 3>> tri_pairs;
  std::vector<std::vector<std::uint32_t>> by_pair;
  std::vector<int> c1, c2;
  std::vector<std::uint32_t> q1, q2;
  std::size_t used_fresh = 0;
  std::uint64_t nodes = 0, max_nodes;

  std::size_t pair(Vertex a, Vertex b) const {
    if (a > b) std::swap(a, b);
    return a * total + b;
  }

  PrivateSearch(std::size_t r_, std::size_t m_, const std::vector<Edge>& l, std::uint64_t budget)
      : r(r_), m(m_), total(r_ + m_), max_nodes(budget) {
    is_l.assign(total * total, 0);
    for (const Edge& e : l) is_l[pair(e.u, e.v)] = 1;
    auto allowed = [&](Vertex a, Vertex b) { return a >= r || b >= r || is_l[pair(a, b)]; };
    by_pair.assign(total * total, {});
    for (Vertex a = 0; a < total; ++a)
      for (Vertex b = a + 1; b < total; ++b)
        for (Vertex c = b + 1; c < total; ++c)
          if (allowed(a, b) && allowed(a, c) && allowed(b, c)) {
            auto id = static_cast<std::uint32_t>(tri.size());
            tri.push_back({a, b, c});
            tri_pairs.push_back({pair(a, b), pair(a, c), pair(b, c)});
            for (auto p : tri_pairs.back()) by_pair[p].push_back(id);
          }
    c1.assign(total * total, 0);
    c2.assign(total * total, 0);
  }

  bool has_l_edge(std::uint32_t t) const {
    for (auto p : tri_pairs[t])
      if (is_l[p]) return true;
    return false;
  }

  // Fresh vertices must be introduced in increasing order.
  bool fresh_ok(std::uint32_t t, std::size_t& grown) const {
    std::size_t next = used_fresh;
    for (Vertex v : tri[t]) {
      if (v < r) continue;
      std::size_t f = v - r;
      if (f < used_fresh) continue;
      if (f != next) return false;
      ++next;
    }
    grown = next;
    return true;
  }

  bool place(std::uint32_t t, bool first) {
    auto& cnt = first ? c1 : c2;
    for (auto p : tri_pairs[t])
      if (cnt[p] != 0) return false;
    if (first && has_l_edge(t)) return false;
    return true;
  }

  bool search() {
    if (++nodes > max_nodes) return false;
    // an L edge still uncovered by Q2, else an unbalanced host edge
    std::size_t target = SIZE_MAX;
    bool need_first = false;
    for (std::size_t p = 0; p < is_l.size() && target == SIZE_MAX; ++p)
      if (is_l[p] && c2[p] == 0) target = p;
    if (target == SIZE_MAX)
      for (std::size_t p = 0; p < c1.size(); ++p)
        if (!is_l[p] && c1[p] != c2[p]) {
          target = p;
          need_first = c2[p] > c1[p];
          break;
        }
    if (target == SIZE_MAX) return true;
    for (std::uint32_t t : by_pair[target]) {
      std::size_t grown = 0;
      if (!place(t, need_first) || !fresh_ok(t, grown)) continue;
      auto& cnt = need_first ? c1 : c2;
      auto& list = need_first ? q1 : q2;
      std::size_t saved = used_fresh;
      used_fresh = grown;
      for (auto p : tri_pairs[t]) cnt[p] = 1;
      list.push_back(t);
      if (search()) return true;
      list.pop_back();
      for (auto p : tri_pairs[t]) cnt[p] = 0;
      used_fresh = saved;
      if (nodes > max_nodes) return false;
    }
    return false;
  }
};

}  // namespace

Packing NaiveOmniAbsorber::decomposition_for(const std::vector<Edge>& l) const {
  Packing p{3, {}};
  bool matched = l.empty();
  for (const auto& entry : table) {
    const Packing& use = entry.L == l ? entry.decomp_LA_L : entry.decomp_A_L;
    matched = matched || entry.L == l;
    p.cliques.insert(p.cliques.end(), use.cliques.begin(), use.cliques.end());
  }
  if (!matched) throw InvalidParameter("subgraph is not a divisible subgraph of X");
  std::sort(p.cliques.begin(), p.cliques.end());
  return p;
}

NaiveOmniAbsorber naive_omni_absorber(const Graph& X, int q, const NaiveOmniOptions& opts) {
  if (q != 3) throw InvalidParameter("naive omni-absorber supports q = 3 only");
  if (X.edge_count() > 6) throw InvalidParameter("naive omni-absorber needs e(X) <= 6");
  Graph a(X.vertex_count());
  NaiveOmniAbsorber out;
  for (auto& l : divisible_subsets(X.edges(), X.vertex_count(), q)) {
    if (l.empty()) continue;
    std::set<Vertex> vs;
    for (const Edge& e : l) vs.insert({e.u, e.v});
    std::vector<Vertex> local_to_global(vs.begin(), vs.end());
    std::map<Vertex, Vertex> g2l;
    for (std::size_t i = 0; i < local_to_global.size(); ++i) g2l[local_to_global[i]] = static_cast<Vertex>(i);
    std::vector<Edge> local_l;
    for (const Edge& e : l) local_l.emplace_back(g2l[e.u], g2l[e.v]);

    bool found = false;
    for (std::size_t m = 1; m <= opts.max_fresh && !found; ++m) {
      PrivateSearch s(local_to_global.size(), m, local_l, opts.budget.max_nodes);
      if (!s.search()) continue;
      found = true;
      std::vector<Vertex> map = local_to_global;
      for (std::size_t f = 0; f < s.used_fresh; ++f) map.push_back(a.add_vertex());
      NaiveOmniEntry entry;
      entry.L = l;
      entry.fresh = s.used_fresh;
      entry.decomp_A_L.q = entry.decomp_LA_L.q = 3;
      for (auto t : s.q1) {
        Clique c{map[s.tri[t][0]], map[s.tri[t][1]], map[s.tri[t][2]]};
        add_clique(a, c);
        entry.decomp_A_L.cliques.push_back(sorted_clique(c));
      }
      for (auto t : s.q2)
        entry.decomp_LA_L.cliques.push_back(
            sorted_clique({map[s.tri[t][0]], map[s.tri[t][1]], map[s.tri[t][2]]}));
      out.table.push_back(std::move(entry));
    }
    if (!found) {
      std::string name;
      for (const Edge& e : l) name += " " + std::to_string(e.u) + "-" + std::to_string(e.v);
      throw SearchCapExceeded("no private absorber within " + std::to_string(opts.max_fresh) +
                              " fresh vertices for L =" + name);
    }
  }
  std::vector<Vertex> roots;
  for (Vertex v = 0; v < X.vertex_count(); ++v) roots.push_back(v);
  out.A = RootedGraph(std::move(a), roots);
  return out;
}

std::string gadget_sidecar(GadgetKind kind, int q, const std::vector<Vertex>& roots,
                           const std::map<std::string, Packing>& certificates) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  j["q"] = q;
  j["roots"] = roots;
  nlohmann::ordered_json certs = nlohmann::ordered_json::object();
  for (const auto& [name, p] : certificates) certs[name] = p.cliques;
  j["certificates"] = certs;
  return j.dump(2) + "\n";
}

}  // namespace cliqueforge
