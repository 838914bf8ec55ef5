#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliqueforge/graph.hpp"

namespace cliqueforge {

/// Selection request violating the parity condition or the residue ranges.
class InvalidRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FatTriangleChoice {
  std::uint64_t xy = 0, xz = 0, yz = 0;
};

/// Parallel-edge counts on a fat triangle {x, y, z} with e ≡ m mod q(q-1) and
/// degree residues d_x, d_y, d_z mod (q-1).
FatTriangleChoice fat_triangle_select(int q, std::uint64_t m, std::uint32_t dx, std::uint32_t dy, std::uint32_t dz);

/// Target residues: m mod q(q-1) for the edge count, d[v] mod (q-1) per vertex.
struct SelectRequest {
  std::uint64_t m = 0;
  std::vector<std::uint32_t> d;
};

/// One extra parallel copy replaced by a fake edge; vertices are template labels.
struct FakeEdgeRecord {
  std::size_t copy = 0;
  Edge pair;
  std::vector<Vertex> vertices;  // hubs then anti-edge internals
  std::vector<Edge> edges;
};

struct FixerBlueprint {
  int q = 3;
  std::size_t n = 0;
  std::vector<Vertex> order;      // order[i] is v_{i+1}; the identity for built blueprints
  MultiGraph base;                // P_n^{q-2} plus the fat pairs
  std::vector<Edge> extra;        // the added parallel copies, one entry each, sorted by pair
  std::vector<FakeEdgeRecord> registry;  // per extra copy once simplified
  std::optional<Graph> simple;    // path power plus fake edges on fresh vertices n, n+1, ...

  std::size_t fat_count() const;  // max{3, q-2}
};

FixerBlueprint build_fixer_blueprint(int q, std::size_t n);

/// Spanning sub-multigraph F' of the blueprint's base with e(F') ≡ m mod q(q-1) and
/// d_F'(v) ≡ d[v] mod (q-1).
MultiGraph inductive_select(const FixerBlueprint& bp, const SelectRequest& req);

/// Replaces every extra parallel copy with a fake edge on fresh vertices.
FixerBlueprint simplify_fixer(const FixerBlueprint& bp);

/// Simple-form edges of a multigraph selection: path edges first, then whole fake edges.
Graph lift_selection(const FixerBlueprint& simplified, const MultiGraph& selection);

/// C(q) = e(FakeEdge_q) * q(q-1) * C(max{3,q-2}, 2); e(simple) <= (q-2)n + C(q).
std::uint64_t fixer_constant(int q);

/// A simplified blueprint placed in a host: path vertices map bijectively onto the host's
/// vertices, fake-edge vertices onto arbitrary host vertices (distinct within one fake edge).
struct EmbeddedFixer {
  FixerBlueprint blueprint;
  std::vector<Vertex> map;  // template vertex -> host vertex
  Graph graph;              // image, on the host's vertex set
};

struct EmbedOptions {
  std::uint64_t seed = 1;
  std::size_t restarts = 8;
  std::size_t attempts_per_fake_edge = 64;
  std::uint64_t nodes_per_attempt = 20000;
};

/// Places the fake edges of `simplified` greedily into host edges not used by the path
/// power or earlier fake edges. `path_map[i]` is the host vertex of v_{i+1}.
std::optional<EmbeddedFixer> embed_fixer(const FixerBlueprint& simplified, const Graph& host,
                                         const std::vector<Vertex>& path_map, const EmbedOptions& opts = {});

struct FixResult {
  std::vector<Edge> deleted;  // E(F) \ E(F')
  Graph graph;                // G minus the deleted edges
  Graph kept;                 // F'
};

/// Throws InvalidParameter when the fixer is not a spanning subgraph of g.
FixResult apply_fixer(const Graph& g, const EmbeddedFixer& fixer, int q);

/// {q, n, order, extra, registry[, map]}
std::string fixer_json(const FixerBlueprint& bp, const std::vector<Vertex>* map = nullptr);

}  // namespace cliqueforge
