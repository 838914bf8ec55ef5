#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cliqueforge/graph.hpp"

namespace testutil {

using namespace cliqueforge;

// Small deterministic generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng); }

  Graph graph(std::size_t n, double p) {
    Graph g(n);
    for (Vertex a = 0; a < n; ++a)
      for (Vertex b = a + 1; b < n; ++b)
        if (coin(p)) g.add_edge(a, b);
    return g;
  }
};

inline Graph from_pairs(std::size_t n, std::initializer_list<std::pair<Vertex, Vertex>> pairs) {
  Graph g(n);
  for (auto [a, b] : pairs) g.add_edge(a, b);
  return g;
}

}  // namespace testutil
