#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cliqueforge/graph.hpp"

namespace cliqueforge {

/// Exact reduced fraction with a positive denominator.
class Ratio {
 public:
  Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  std::string str() const;

  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);
  friend bool operator==(const Ratio& a, const Ratio& b) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

using DensityValue = Ratio;

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph with a designated independent root set.
class RootedGraph {
 public:
  RootedGraph() = default;
  /// Throws GraphError if a root is out of range or two roots are adjacent.
  RootedGraph(Graph graph, std::vector<Vertex> roots);

  const Graph& graph() const { return graph_; }
  const std::vector<Vertex>& roots() const { return roots_; }
  bool is_root(Vertex v) const;

 private:
  Graph graph_;
  std::vector<Vertex> roots_;  // sorted, unique
};

enum class DensityMethod {
  automatic,    // enumeration up to the limit, max-flow beyond it
  enumeration,  // subset enumeration only; TooLarge above the limit
  flow,         // parametric max-flow (Dinkelbach iteration over min cuts)
};

struct DensityOptions {
  std::size_t enumeration_limit = 24;
  DensityMethod method = DensityMethod::automatic;
};

/// Maximum of a density functional with a vertex set attaining it.
/// For rooted density the witness contains every root; roots do not count in the denominator.
struct DensityResult {
  Ratio value;
  std::vector<Vertex> witness;
};

/// m(H, R) = max e(H') / |V(H') \ R| over subgraphs with a non-root vertex.
DensityResult max_rooted_density(const RootedGraph& h, const DensityOptions& opts = {});
/// m2(H) = max (e(H') - 1) / (v(H') - 2) over subgraphs with at least three vertices.
DensityResult max_2_density(const Graph& h, const DensityOptions& opts = {});

struct Rooted2Density {
  Ratio value;
  Ratio rooted;                 // m(H, R)
  std::optional<Ratio> two;     // m2(H), exact; empty if it was only shown to be <= m(H, R)
  std::vector<Vertex> witness;  // attains `value`
};

/// m2(H, R) = max{ m(H, R), m2(H) }.
Rooted2Density rooted_2_density(const RootedGraph& h, const DensityOptions& opts = {});

/// Re-evaluate a witness: e(H[W]) / |W \ R|.
Ratio evaluate_rooted(const RootedGraph& h, const std::vector<Vertex>& witness);
/// Re-evaluate a witness: (e(H[W]) - 1) / (|W| - 2).
Ratio evaluate_two(const Graph& h, const std::vector<Vertex>& witness);

struct DegeneracyResult {
  std::size_t degeneracy = 0;
  std::vector<Vertex> ordering;  // V(H) \ U, each vertex has <= degeneracy earlier-or-root neighbours
};

DegeneracyResult rooted_degeneracy(const Graph& h, const std::vector<Vertex>& roots);

struct ConcatenationCheck {
  bool holds = false;
  Ratio whole;  // m2(H, R)
  Ratio inner;  // m2(H1, R)
  Ratio outer;  // m2(H \ E(H1), V(H1))
};

/// H1 is the subgraph induced by `inner_vertices`, which must strictly contain R
/// and be strictly contained in V(H).
ConcatenationCheck check_concatenation(const RootedGraph& h, const std::vector<Vertex>& inner_vertices,
                                       const DensityOptions& opts = {});

}  // namespace cliqueforge
