#include <algorithm>
#include <set>

#include "cliqueforge/gadgets.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace cliqueforge;
using testutil::Gen;

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

// residue pattern: roots have degree = sign mod (q-1), others 0; e = sign mod C(q,2)
bool residue_pattern(const RootedGraph& h, int q, int sign) {
  const Graph& g = h.graph();
  const std::int64_t c = static_cast<std::int64_t>(q) * (q - 1) / 2;
  if (mod(static_cast<std::int64_t>(g.edge_count()), c) != mod(sign, c)) return false;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::int64_t want = h.is_root(v) ? mod(sign, q - 1) : 0;
    if (mod(static_cast<std::int64_t>(g.degree(v)), q - 1) != want) return false;
  }
  return true;
}

bool is_cycle(const Graph& g) {
  if (g.edge_count() != g.vertex_count()) return false;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != 2) return false;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : g.neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
  }
  return reached == g.vertex_count();
}

std::size_t shared_cliques(const Packing& a, const Packing& b) {
  std::set<Clique> s;
  for (auto c : a.cliques) {
    std::sort(c.begin(), c.end());
    s.insert(c);
  }
  std::size_t n = 0;
  for (auto c : b.cliques) {
    std::sort(c.begin(), c.end());
    n += s.count(c);
  }
  return n;
}

}  // namespace

TEST_CASE("anti-edge counts and residues") {
  const std::size_t verts[] = {1, 2, 3, 4};
  const std::size_t edges[] = {2, 5, 9, 14};
  for (int q = 3; q <= 6; ++q) {
    auto ae = anti_edge(q);
    CHECK(ae.kind == GadgetKind::anti_edge);
    CHECK(ae.rooted.graph().vertex_count() - 2 == verts[q - 3]);
    CHECK(ae.rooted.graph().edge_count() == edges[q - 3]);
    CHECK_FALSE(ae.rooted.graph().has_edge(0, 1));
    CHECK(residue_pattern(ae.rooted, q, -1));
  }
}

TEST_CASE("fake edge counts and residues") {
  auto f3 = fake_edge(3);
  CHECK(f3.rooted.graph().vertex_count() == 5);
  CHECK(f3.rooted.graph().edge_count() == 4);
  auto f4 = fake_edge(4);
  CHECK(f4.rooted.graph().vertex_count() == 14);
  CHECK(f4.rooted.graph().edge_count() == 25);
  CHECK(f4.rooted.graph().degree(0) == 4);
  for (int q = 3; q <= 6; ++q) {
    auto fe = fake_edge(q);
    CHECK(residue_pattern(fe.rooted, q, +1));
    Graph probe(2);
    auto parts = add_fake_edge(probe, q, 0, 1);
    CHECK(parts.hubs.size() == static_cast<std::size_t>(q - 2));
    for (const Edge& p : parts.pairs) CHECK_FALSE(probe.has_edge(p.u, p.v));
  }
}

TEST_CASE("nabla") {
  auto n = nabla(3, complete_graph(3));
  CHECK(n.graph.vertex_count() == 6);
  CHECK(n.graph.edge_count() == 6);
  CHECK(is_cycle(n.graph));
  CHECK(n.internals_of(0, 2).size() == 1);
  CHECK_THROWS_AS(n.internals_of(0, 5), InvalidParameter);

  Graph edge = testutil::from_pairs(2, {{0, 1}});
  Graph t = tilde_nabla(3, edge);
  CHECK(t.vertex_count() == 3);
  CHECK(t.edges() == complete_graph(3).edges());

  CHECK(is_kq_divisible(nabla(4, complete_graph(4)).graph, 4));
  auto tn = nabla(4, complete_graph(4));
  Packing tc{4, tn.tilde_cliques()};
  CHECK(is_decomposition(tn.graph.united(complete_graph(4)), tc));
}

TEST_CASE("nabla preserves divisibility") {
  Gen gen(55);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 40; ++trial) {
    // edge-disjoint random q-cliques
    const int q = 3 + static_cast<int>(gen.below(2));
    Graph g(6 + gen.below(6));
    for (int tries = 0; tries < 6; ++tries) {
      std::vector<Vertex> pick;
      while (pick.size() < static_cast<std::size_t>(q)) {
        Vertex v = static_cast<Vertex>(gen.below(g.vertex_count()));
        if (std::find(pick.begin(), pick.end(), v) == pick.end()) pick.push_back(v);
      }
      bool free = true;
      for (std::size_t a = 0; a < pick.size(); ++a)
        for (std::size_t b = a + 1; b < pick.size(); ++b) free = free && !g.has_edge(pick[a], pick[b]);
      if (!free) continue;
      for (std::size_t a = 0; a < pick.size(); ++a)
        for (std::size_t b = a + 1; b < pick.size(); ++b) g.add_edge(pick[a], pick[b]);
    }
    if (g.edge_count() == 0) continue;
    REQUIRE(is_kq_divisible(g, q));
    ++checked;
    CHECK(is_kq_divisible(nabla(q, g).graph, q));
    CHECK(is_kq_divisible(tilde_nabla(q, g), q));
  }
  CHECK(checked > 5);
  CHECK(is_kq_divisible(nabla(3, cycle_graph(6)).graph, 3));
}

TEST_CASE("star transformers") {
  auto t3 = star_transformer(3, 2);
  CHECK(t3.T.graph().vertex_count() - t3.T.roots().size() == 2);
  CHECK(t3.T.graph().edge_count() == 7);
  CHECK(t3.decomp_TL.cliques.size() == 3);
  CHECK(t3.decomp_TL_prime.cliques.size() == 3);
  CHECK(verify_transformer(t3).valid);
  CHECK(rooted_2_density(t3.T).value == Ratio(7, 2));
  CHECK(rooted_2_density(t3.T, DensityOptions{24, DensityMethod::enumeration}).value == Ratio(7, 2));

  for (int k : {4, 6}) {
    auto t = star_transformer(3, k);
    CHECK(verify_transformer(t).valid);
    CHECK(rooted_2_density(t.T).value <= Ratio(3 * k + 1, k));
  }
  CHECK_THROWS_AS(star_transformer(3, 3), InvalidParameter);
  CHECK_THROWS_AS(star_transformer(3, 0), InvalidParameter);

  auto t4 = star_transformer(4);
  CHECK(t4.T.graph().vertex_count() - t4.T.roots().size() == 6);
  CHECK(t4.T.graph().edge_count() == 27);
  CHECK(max_rooted_density(t4.T).value == Ratio(9, 2));
  for (int q = 4; q <= 6; ++q) {
    auto t = star_transformer(q);
    CHECK(verify_transformer(t).valid);
    CHECK(t.L.edge_count() == static_cast<std::size_t>(q - 1));
    CHECK(t.L_prime.edge_count() == static_cast<std::size_t>(q - 1));
    CHECK(t.L.united(t.L_prime).edge_count() == static_cast<std::size_t>(2 * (q - 1)));
  }
}

TEST_CASE("anti-clique absorber") {
  for (int q = 3; q <= 4; ++q) {
    auto b = anti_clique_absorber(q, 2);
    CHECK(verify_absorber(b).valid);
    CHECK(b.L.edges() == nabla(q, complete_graph(static_cast<std::size_t>(q))).graph.edges());
    CHECK(shared_cliques(b.decomp_A, b.decomp_LA) == 0);
    CHECK(low_degree_vertices(b).empty());
    CHECK(verify_packing(b.A.graph(), b.decomp_A).leave.edge_count() == 0);
  }
  auto b3 = anti_clique_absorber(3, 2);
  auto d = rooted_2_density(b3.A);
  CHECK(d.value <= Ratio(7, 2));
  CHECK(evaluate_rooted(b3.A, d.witness) <= d.value);
}

TEST_CASE("absorber verification catches a broken certificate") {
  auto b = anti_clique_absorber(3, 2);
  b.decomp_LA.cliques.pop_back();
  auto r = verify_absorber(b);
  CHECK_FALSE(r.valid);
  b = anti_clique_absorber(3, 2);
  b.decomp_A.cliques.push_back(b.decomp_A.cliques.front());
  CHECK_FALSE(verify_absorber(b).valid);
}

TEST_CASE("trivial absorber") {
  auto k3 = trivial_absorber(complete_graph(3), 3);
  CHECK(k3.A.graph().edge_count() == 0);
  CHECK(k3.decomp_A.cliques.empty());
  CHECK(verify_absorber(k3).valid);
  auto k7 = trivial_absorber(complete_graph(7), 3);
  CHECK(k7.decomp_LA.cliques.size() == 7);
  CHECK(verify_absorber(k7).valid);
  CHECK_THROWS_AS(trivial_absorber(complete_graph(4), 3), InvalidParameter);
}

TEST_CASE("nabla absorber") {
  auto booster = anti_clique_absorber(3, 2);
  auto tri = trivial_absorber(complete_graph(3), 3);
  auto a = nabla_absorber(complete_graph(3), tri, booster);
  CHECK(verify_absorber(a).valid);
  CHECK(low_degree_vertices(a).empty());
  CHECK(rooted_2_density(a.A).value <= Ratio(7, 2));

  Graph l = booster.L;
  auto big = nabla_absorber(l, booster, booster);
  CHECK(verify_absorber(big).valid);
  CHECK(shared_cliques(big.decomp_A, big.decomp_LA) == 0);

  CHECK_THROWS_AS(nabla_absorber(complete_graph(4), tri, booster), InvalidParameter);
  CHECK_THROWS_AS(nabla_absorber(complete_graph(3), tri, tri), InvalidParameter);
}

TEST_CASE("omni-absorber verification") {
  // X = empty: valid iff A decomposes
  auto empty = verify_omni_absorber(Graph(3), RootedGraph(complete_graph(3), {}), 3);
  CHECK(empty.valid);
  CHECK(empty.divisible_subgraphs == 1);
  CHECK_FALSE(verify_omni_absorber(Graph(4), RootedGraph(complete_graph(4), {}), 3).valid);

  // X = a triangle with A empty: both divisible subgraphs decompose
  auto tri = verify_omni_absorber(complete_graph(3), RootedGraph(Graph(3), {0, 1, 2}), 3);
  CHECK(tri.valid);
  CHECK(tri.divisible_subgraphs == 2);
  CHECK(tri.refinement == 1);

  // C6 without an absorber: the whole cycle is divisible but has no triangle
  auto bad = verify_omni_absorber(cycle_graph(6), RootedGraph(Graph(6), {}), 3);
  CHECK_FALSE(bad.valid);
  CHECK(bad.failures == 1);

  SolveBudget tiny{1, 60.0};
  auto k = complete_graph(9);
  auto budget = verify_omni_absorber(Graph(9), RootedGraph(k, {}), 3, OmniOptions{10, tiny, nullptr});
  CHECK(budget.budget_exhausted == 1);
  CHECK(budget.failures == 0);
  CHECK_FALSE(budget.valid);

  Graph many = complete_graph(6);
  CHECK_THROWS_AS(verify_omni_absorber(many, RootedGraph(Graph(6), {}), 3), InvalidParameter);
}

TEST_CASE("naive omni-absorber") {
  auto none = naive_omni_absorber(Graph(4));
  CHECK(none.A.graph().edge_count() == 0);
  CHECK(none.table.empty());

  auto one = naive_omni_absorber(testutil::from_pairs(2, {{0, 1}}));
  CHECK(one.A.graph().edge_count() == 0);

  Graph c6 = cycle_graph(6);
  auto naive = naive_omni_absorber(c6);
  CHECK(naive.table.size() == 1);
  CHECK(naive.A.graph().edge_count() > 0);
  std::map<std::vector<Edge>, Packing> family;
  family[{}] = naive.decomposition_for({});
  family[c6.edges()] = naive.decomposition_for(c6.edges());
  auto rep = verify_omni_absorber(c6, naive.A, 3, OmniOptions{10, {}, &family});
  CHECK(rep.valid);
  CHECK(rep.refinement >= 1);
  CHECK(verify_omni_absorber(c6, naive.A, 3).valid);

  // two triangles sharing a vertex: three divisible subgraphs besides the empty one
  Graph bowtie = testutil::from_pairs(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}});
  auto bt = naive_omni_absorber(bowtie);
  CHECK(bt.table.size() == 3);
  CHECK(verify_omni_absorber(bowtie, bt.A, 3).valid);

  CHECK_THROWS_AS(naive_omni_absorber(c6, 4), InvalidParameter);
  CHECK_THROWS_AS(naive_omni_absorber(complete_graph(5)), InvalidParameter);
  CHECK_THROWS_AS(naive.decomposition_for({Edge(0, 1)}), InvalidParameter);
  NaiveOmniOptions capped;
  capped.max_fresh = 1;
  CHECK_THROWS_AS(naive_omni_absorber(c6, 3, capped), SearchCapExceeded);
}

TEST_CASE("gadget sidecar") {
  auto t = star_transformer(3, 2);
  std::string s = gadget_sidecar(GadgetKind::transformer, 3, t.T.roots(),
                                 {{"T+L", t.decomp_TL}, {"T+L'", t.decomp_TL_prime}});
  auto j = nlohmann::json::parse(s);
  CHECK(j["kind"] == "transformer");
  CHECK(j["q"] == 3);
  CHECK(j["roots"].size() == t.T.roots().size());
  CHECK(j["certificates"]["T+L"].size() == 3);
  CHECK(s == gadget_sidecar(GadgetKind::transformer, 3, t.T.roots(),
                            {{"T+L", t.decomp_TL}, {"T+L'", t.decomp_TL_prime}}));
}
