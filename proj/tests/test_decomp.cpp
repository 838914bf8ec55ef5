#include <algorithm>

#include "cliqueforge/decomp.hpp"
#include "cliqueforge/gadgets.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cliqueforge;
using testutil::Gen;

namespace {

std::size_t oracle_clique_count(const Graph& g, int q) {
  std::size_t count = 0;
  const auto n = g.vertex_count();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != q) continue;
    bool ok = true;
    for (Vertex a = 0; a < n && ok; ++a)
      for (Vertex b = a + 1; b < n && ok; ++b)
        if ((mask >> a & 1) && (mask >> b & 1) && !g.has_edge(a, b)) ok = false;
    count += ok;
  }
  return count;
}

}  // namespace

TEST_CASE("clique enumeration") {
  CHECK(enumerate_cliques(complete_graph(5), 3).cliques.size() == 10);
  CHECK(enumerate_cliques(cycle_graph(6), 3).cliques.empty());
  CHECK(enumerate_cliques(complete_graph(6), 4).cliques.size() == 15);
  Gen gen(4);
  for (int trial = 0; trial < 60; ++trial) {
    Graph g = gen.graph(4 + gen.below(9), 0.6);
    for (int q = 3; q <= 5; ++q) {
      auto idx = enumerate_cliques(g, q);
      CHECK(idx.cliques.size() == oracle_clique_count(g, q));
      CHECK(std::is_sorted(idx.cliques.begin(), idx.cliques.end()));
      for (std::size_t c = 0; c < idx.cliques.size(); ++c)
        for (auto e : idx.edge_ids[c])
          CHECK(std::count(idx.incidence[e].begin(), idx.incidence[e].end(), c) == 1);
    }
  }
}

TEST_CASE("exact decomposition") {
  auto k7 = exact_decomposition(complete_graph(7), 3);
  REQUIRE(k7.status == SolveStatus::found);
  CHECK(k7.packing.cliques.size() == 7);
  CHECK(is_decomposition(complete_graph(7), k7.packing));

  CHECK(exact_decomposition(complete_graph(5), 3).status == SolveStatus::none);
  CHECK(exact_decomposition(Graph(4), 3).status == SolveStatus::found);

  auto k13 = exact_decomposition(complete_graph(13), 4);
  REQUIRE(k13.status == SolveStatus::found);
  CHECK(is_decomposition(complete_graph(13), k13.packing));

  // two edge-disjoint triangles glued into a bowtie-free 6-cycle: divisible but no triangles
  CHECK(exact_decomposition(cycle_graph(6), 3).status == SolveStatus::none);

  SolveBudget tiny{3, 60.0};
  CHECK(exact_decomposition(complete_graph(15), 3, tiny).status == SolveStatus::budget_exceeded);
}

TEST_CASE("exact decomposition of C6 with its absorber") {
  Graph c6 = cycle_graph(6);
  auto naive = naive_omni_absorber(c6);
  Graph both = naive.A.graph();
  for (const Edge& e : c6.edges()) both.add_edge(e.u, e.v);
  auto res = exact_decomposition(both, 3);
  REQUIRE(res.status == SolveStatus::found);
  CHECK(res.packing.cliques.size() == both.edge_count() / 3);
  CHECK(res.packing.cliques.size() == naive.decomposition_for(c6.edges()).cliques.size());
}

TEST_CASE("decomposition search is sound on random graphs") {
  Gen gen(8);
  int found = 0;
  for (int trial = 0; trial < 80; ++trial) {
    Graph g = gen.graph(5 + gen.below(6), 0.7);
    auto res = exact_decomposition(g, 3);
    if (!is_kq_divisible(g, 3)) CHECK(res.status == SolveStatus::none);
    if (res.status == SolveStatus::found) {
      ++found;
      CHECK(is_decomposition(g, res.packing));
    }
    if (res.status == SolveStatus::none && is_kq_divisible(g, 3)) {
      CHECK(min_leave_packing(g, 3).leave > 0);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("min leave packing") {
  auto k4 = min_leave_packing(complete_graph(4), 3);
  CHECK(k4.leave == 3);
  CHECK(k4.optimal);
  auto c5 = min_leave_packing(cycle_graph(5), 3);
  CHECK(c5.leave == 5);
  CHECK(c5.leave > optimal_leave_number(cycle_graph(5), 3));
  auto k7 = min_leave_packing(complete_graph(7), 3);
  CHECK(k7.leave == 0);
}

TEST_CASE("min leave agrees with exhaustive search") {
  Gen gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = gen.graph(4 + gen.below(4), 0.6);
    auto idx = enumerate_cliques(g, 3);
    if (idx.cliques.size() > 18) continue;
    std::size_t best = g.edge_count();
    for (std::uint32_t mask = 0; mask < (1u << idx.cliques.size()); ++mask) {
      Packing p{3, {}};
      for (std::size_t i = 0; i < idx.cliques.size(); ++i)
        if (mask >> i & 1) p.cliques.push_back(idx.cliques[i]);
      auto r = verify_packing(g, p);
      if (r.valid) best = std::min(best, r.leave.edge_count());
    }
    auto res = min_leave_packing(g, 3);
    CHECK(res.leave == best);
    CHECK(res.leave >= optimal_leave_number(g, 3));
    auto rep = verify_packing(g, res.packing);
    CHECK(rep.valid);
    CHECK(rep.leave.edge_count() == res.leave);
  }
}

TEST_CASE("bundle verification") {
  auto t = star_transformer(3, 2);
  CHECK(verify_transformer(t).valid);
  auto broken = t;
  broken.decomp_TL.cliques.pop_back();
  auto r = verify_transformer(broken);
  CHECK_FALSE(r.valid);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front().find("uncovered") != std::string::npos);

  CHECK(verify_absorber(anti_clique_absorber(3, 2)).valid);
}
