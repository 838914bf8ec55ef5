#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliqueforge/bundles.hpp"
#include "cliqueforge/graph.hpp"

namespace cliqueforge {

/// All q-cliques of a graph in lexicographic order, with per-edge incidence.
struct CliqueIndex {
  int q = 3;
  EdgeIndex edges;
  std::vector<Clique> cliques;
  std::vector<std::vector<std::uint32_t>> edge_ids;   // per clique, its C(q,2) edge ids
  std::vector<std::vector<std::uint32_t>> incidence;  // per edge id, the cliques through it
};

CliqueIndex enumerate_cliques(const Graph& g, int q);

struct SolveBudget {
  std::uint64_t max_nodes = 50'000'000;
  double time_cap = 60.0;  // seconds
};

enum class SolveStatus { found, none, budget_exceeded };

const char* to_string(SolveStatus s);

struct DecompositionResult {
  SolveStatus status = SolveStatus::none;
  Packing packing;
  std::uint64_t nodes = 0;
};

/// Exact cover of the edge set by q-cliques. Branches on the uncovered edge with the fewest
/// usable cliques (lowest edge id on ties).
DecompositionResult exact_decomposition(const Graph& g, int q, const SolveBudget& budget = {});

struct MinLeaveResult {
  Packing packing;
  std::size_t leave = 0;
  bool optimal = false;  // false when the budget ran out; packing is then the best found
  std::uint64_t nodes = 0;
};

MinLeaveResult min_leave_packing(const Graph& g, int q, const SolveBudget& budget = {});

struct BundleReport {
  bool valid = false;
  std::vector<std::string> violations;
};

BundleReport verify_transformer(const TransformerBundle& b);
BundleReport verify_absorber(const AbsorberBundle& b);

}  // namespace cliqueforge
