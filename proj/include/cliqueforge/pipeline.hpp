#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliqueforge/decomp.hpp"
#include "cliqueforge/divfixer.hpp"
#include "cliqueforge/graph.hpp"
#include "cliqueforge/randmodels.hpp"

namespace cliqueforge {

/// Vertices are the edge ids of `base`; hyperedges are the edge-id sets of its q-cliques.
struct DesignHypergraph {
  int q = 3;
  Graph base;
  EdgeIndex edges;
  std::vector<Clique> cliques;                         // per hyperedge
  std::vector<std::vector<std::uint32_t>> hyperedges;  // sorted edge ids
  std::vector<std::vector<std::uint32_t>> incidence;   // per edge id

  std::size_t degree(std::uint32_t edge_id) const { return incidence.at(edge_id).size(); }
  std::size_t codegree(std::uint32_t a, std::uint32_t b) const;
  std::size_t min_degree() const;
  std::size_t max_degree() const;
  /// Largest codegree over pairs of distinct edges.
  std::size_t max_codegree() const;
};

DesignHypergraph design_hypergraph(const Graph& g, int q);

/// Clique edge-sets with exactly one edge in A and the others in B.
struct ReserveHypergraph {
  int q = 3;
  EdgeIndex edges;                  // of the graph the sets came from
  std::vector<std::uint32_t> A, B;  // sorted edge ids
  std::vector<Clique> cliques;
  std::vector<std::vector<std::uint32_t>> hyperedges;  // A id first, then the B ids sorted
};

/// Throws InvalidParameter when A and B overlap or contain non-edges.
ReserveHypergraph reserve_hypergraph(const Graph& g, const std::vector<Edge>& A, const std::vector<Edge>& B, int q);

struct MatchingResult {
  std::vector<std::size_t> matching;      // hyperedge ids, in selection order
  std::vector<std::uint32_t> uncovered;   // vertex (edge) ids, sorted
};

/// Random greedy: hyperedges in a uniformly random order, each kept when disjoint from
/// the ones kept so far.
MatchingResult random_greedy_matching(const DesignHypergraph& h, Rng& rng);
Packing matching_packing(const DesignHypergraph& h, const std::vector<std::size_t>& matching);

struct ReserveMatchingResult {
  bool success = false;
  Packing nibble;                        // cliques from H1
  Packing completion;                    // cliques from H2
  std::vector<Edge> stranded;            // A-edges left uncovered
};

/// Nibble on h1, then completion of every uncovered A-edge through h2, scarcest A-edge first.
/// Between the two, up to improve_steps swap moves push the nibble onto the A-edges that have
/// no reserve clique at all. Cliques are compared by their edges, so h1 and h2 may index
/// different graphs.
ReserveMatchingResult matching_with_reserves(const DesignHypergraph& h1, const ReserveHypergraph& h2,
                                             const std::vector<Edge>& A, Rng& rng,
                                             std::uint64_t improve_steps = 300'000);

enum class FixerOutcome { embedded, fallback, skipped };
const char* to_string(FixerOutcome f);

struct PackOptions {
  Probability reserve{1, 5};           // share of G - F set aside as X
  bool use_fixer = true;
  bool absorb = true;                  // in-situ absorption of a tiny leftover
  std::size_t absorb_cap = 12;         // max leftover edges for absorption
  std::size_t absorb_cliques = 10;     // nearby cliques released per attempt
  SolveBudget absorb_budget{200'000, 1e9};  // node-bounded only, for reproducibility
  std::uint64_t climb_steps = 4'000'000;
  std::uint64_t climb_stall = 400'000;  // stop after this many steps without improvement
  double climb_seconds = 0;             // wall-clock cap on the local search; 0 = none
  std::uint64_t climb_kick = 0;         // stuck steps evict two cliques once in this many; 0 = never
  std::uint64_t path_nodes = 2'000'000;
  std::size_t path_restarts = 6;
};

struct StageTally {
  std::size_t fixer_deleted = 0;
  std::size_t nibble = 0;
  std::size_t reserve = 0;
  std::size_t absorbed = 0;
  std::size_t residual = 0;  // uncovered edges not deleted by the fixer
  std::size_t sum() const { return fixer_deleted + nibble + reserve + absorbed + residual; }
};

struct PackReport {
  std::string model;  // "gnp" or "gnd"
  std::size_t n = 0;
  std::optional<Probability> p;
  std::optional<std::size_t> d;
  int q = 3;
  std::uint64_t seed = 0;
  std::size_t edges = 0;
  bool input_divisible = false;
  FixerOutcome fixer = FixerOutcome::skipped;
  bool divisible_after_fix = false;
  StageTally stages;
  std::size_t leave = 0;
  std::size_t optimal_leave = 0;
  bool valid = false;
  double ms = 0;

  /// {version, params, stages, leave, optimal_leave, valid[, ms], ...}
  std::string json(bool with_time = true) const;
};

struct PackResult {
  PackReport report;
  Graph graph;
  Packing packing;
};

/// Runs the staged pipeline on a given graph (randomness from `seed`). pack_gnp and pack_gnd
/// pack exactly the graph gnp / gnd generate from the same seed.
PackResult pack_graph(const Graph& g, int q, std::uint64_t seed, const PackOptions& opts = {});
PackResult pack_gnp(std::size_t n, const Probability& p, int q, std::uint64_t seed, const PackOptions& opts = {});
PackResult pack_gnd(std::size_t n, std::size_t d, int q, std::uint64_t seed, const PackOptions& opts = {});

/// Spanning sequence where each vertex is adjacent to the previous min(i, k) ones, found by
/// randomized depth-first search with restarts. The first vertices are taken of high degree.
std::optional<std::vector<Vertex>> find_path_power(const Graph& g, int k, Rng& rng, std::uint64_t node_budget,
                                                   std::size_t restarts);

/// Greedy residue-correcting deletion. Returns the deleted edges; the result may still be
/// non-divisible when the greedy search gets stuck.
std::vector<Edge> fix_by_deletion(const Graph& g, int q, Rng& rng);

struct BenchRow {
  std::string model;
  std::size_t n = 0;
  std::optional<Probability> p;
  std::optional<std::size_t> d;
  int q = 3;
};

struct BenchConfig {
  std::vector<BenchRow> rows;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  bool with_time = false;
  PackOptions options;
};

/// Per-trial reports and per-row aggregates. The output only depends on the configuration
/// (minus threads) unless with_time is set.
std::string bench(const BenchConfig& cfg);

}  // namespace cliqueforge
