#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cliqueforge/bundles.hpp"
#include "cliqueforge/decomp.hpp"
#include "cliqueforge/density.hpp"
#include "cliqueforge/graph.hpp"

namespace cliqueforge {

enum class GadgetKind { anti_edge, fake_edge, transformer, absorber };

const char* to_string(GadgetKind k);

struct GadgetGraph {
  RootedGraph rooted;
  GadgetKind kind = GadgetKind::anti_edge;
  int q = 3;
};

/// Adds AntiEdge_q({a, b}) to g with q-2 fresh vertices; returns them.
std::vector<Vertex> add_anti_edge(Graph& g, int q, Vertex a, Vertex b);

struct FakeEdgeParts {
  std::vector<Vertex> hubs;
  std::vector<Edge> pairs;                       // pairs carrying an anti-edge
  std::vector<std::vector<Vertex>> internals;    // per pair
};

/// Adds FakeEdge_q({a, b}) to g: hubs x_1..x_{q-2} and an anti-edge on every pair of
/// {a, b} + hubs other than {a, b}. The pairs themselves are not edges.
FakeEdgeParts add_fake_edge(Graph& g, int q, Vertex a, Vertex b);

/// Standalone gadgets rooted at {0, 1}.
GadgetGraph anti_edge(int q);
GadgetGraph fake_edge(int q);

struct NablaResult {
  Graph graph;                                 // X's vertices first, then the new ones
  std::vector<Edge> base_edges;                // E(X) in lexicographic order
  std::vector<std::vector<Vertex>> internals;  // per base edge

  /// The q-clique e + internals(e) for each base edge.
  std::vector<Clique> tilde_cliques() const;
  const std::vector<Vertex>& internals_of(Vertex a, Vertex b) const;
};

NablaResult nabla(int q, const Graph& x);
Graph tilde_nabla(int q, const Graph& x);

/// Star transformer from L = star(x; leaves) to L' = star(x'; leaves), q-1 leaves.
/// Numbering: x = 0, x' = 1, leaves 2..q, then the internal vertices.
/// For q = 3, k is the even path parameter; it is ignored for q >= 4.
TransformerBundle star_transformer(int q, int k = 2);

/// Absorber for L = nabla_q K_q. L occupies vertices 0..v(L)-1 (the K_q first).
AbsorberBundle anti_clique_absorber(int q, int k = 2);

/// Absorber for L built from an absorber `base` for L and an absorber `booster` for nabla_q K_q
/// (as produced by anti_clique_absorber). Throws InvalidParameter on invalid inputs.
AbsorberBundle nabla_absorber(const Graph& L, const AbsorberBundle& base, const AbsorberBundle& booster);

/// Empty absorber; throws InvalidParameter when L has no decomposition within the budget.
AbsorberBundle trivial_absorber(const Graph& L, int q, const SolveBudget& budget = {});

/// Vertices outside V(L) that carry an edge of A but have degree below 2q-2 in A.
std::vector<Vertex> low_degree_vertices(const AbsorberBundle& b);

struct OmniCase {
  std::vector<Edge> L;
  SolveStatus status = SolveStatus::none;
};

struct OmniReport {
  bool valid = false;
  std::size_t divisible_subgraphs = 0;
  std::size_t failures = 0;         // refuted: L + A has no decomposition
  std::size_t budget_exhausted = 0;
  std::vector<OmniCase> cases;
  std::size_t refinement = 0;       // max number of family cliques through one edge
};

struct OmniOptions {
  std::size_t edge_cap = 10;
  SolveBudget budget{};
  /// Decompositions of L + A keyed by the sorted edge list of L; used instead of the
  /// solver and for the refinement constant when present.
  const std::map<std::vector<Edge>, Packing>* family = nullptr;
};

OmniReport verify_omni_absorber(const Graph& X, const RootedGraph& A, int q, const OmniOptions& opts = {});

struct NaiveOmniOptions {
  std::size_t max_fresh = 6;
  SolveBudget budget{1'000'000, 30.0};  // per divisible subgraph and host size
};

struct NaiveOmniEntry {
  std::vector<Edge> L;
  Packing decomp_A_L;   // decomposes the private absorber A_L
  Packing decomp_LA_L;  // decomposes L + A_L
  std::size_t fresh = 0;
};

struct NaiveOmniAbsorber {
  RootedGraph A;  // rooted at V(X); X's vertices keep their labels
  std::vector<NaiveOmniEntry> table;
  /// Decomposition of L + A for the divisible subgraph with sorted edge list `l`.
  Packing decomposition_for(const std::vector<Edge>& l) const;
};

class SearchCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q = 3 only, e(X) <= 6. Throws SearchCapExceeded when some private absorber is not found.
NaiveOmniAbsorber naive_omni_absorber(const Graph& X, int q = 3, const NaiveOmniOptions& opts = {});

/// JSON sidecar {kind, q, roots, certificates}.
std::string gadget_sidecar(GadgetKind kind, int q, const std::vector<Vertex>& roots,
                           const std::map<std::string, Packing>& certificates);

}  // namespace cliqueforge
