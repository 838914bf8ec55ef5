#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cliqueforge {

using Vertex = std::uint32_t;

/// Unordered vertex pair, stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;

  std::uint64_t key() const { return (std::uint64_t{u} << 32) | v; }
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Simple undirected graph on the dense vertex set {0, ..., n-1}.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adj_(n) {}

  /// Throws GraphError on loops, duplicates or out-of-range endpoints.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  Vertex add_vertex();
  void ensure_vertices(std::size_t n);

  /// Returns false when the edge is already present.
  bool add_edge(Vertex a, Vertex b);
  bool remove_edge(Vertex a, Vertex b);
  bool has_edge(Vertex a, Vertex b) const;

  std::span<const Vertex> neighbors(Vertex v) const { return adj_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }
  std::size_t max_degree() const;

  /// All edges in lexicographic order.
  std::vector<Edge> edges() const;

  /// Graph on the same vertex set containing the edges of this graph not in `other`.
  Graph minus(const Graph& other) const;
  /// Union on max(vertex_count) vertices.
  Graph united(const Graph& other) const;
  /// Induced subgraph keeping the vertex numbering (other vertices isolated).
  Graph induced_on(std::span<const Vertex> vertices) const;

  bool is_independent(std::span<const Vertex> vertices) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adj_ == b.adj_;
  }

 private:
  void check_pair(Vertex a, Vertex b) const;

  std::vector<std::vector<Vertex>> adj_;
  std::size_t edge_count_ = 0;
};

/// Loopless multigraph; multiplicities are kept per unordered pair.
class MultiGraph {
 public:
  MultiGraph() = default;
  explicit MultiGraph(std::size_t n) : n_(n) {}

  std::size_t vertex_count() const { return n_; }
  std::uint64_t edge_count() const { return total_; }

  void add_edges(Vertex a, Vertex b, std::uint64_t copies = 1);
  std::uint64_t multiplicity(Vertex a, Vertex b) const;
  std::uint64_t degree(Vertex v) const;
  const std::map<Edge, std::uint64_t>& multiplicities() const { return mult_; }

  /// Lossy projection: every pair with positive multiplicity becomes one edge.
  Graph to_simple_lossy() const;

 private:
  std::size_t n_ = 0;
  std::uint64_t total_ = 0;
  std::map<Edge, std::uint64_t> mult_;
};

using Clique = std::vector<Vertex>;

/// Edge-disjoint q-cliques (validity is checked by verify_packing, not on construction).
struct Packing {
  int q = 3;
  std::vector<Clique> cliques;
};

struct DegreeResidueProfile {
  int q = 3;
  std::vector<std::uint64_t> residues;  // d(v) mod (q-1)
  std::uint64_t edge_residue = 0;       // e(G) mod C(q,2)
};

std::uint64_t binom(std::uint64_t n, std::uint64_t k);

Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);

DegreeResidueProfile residue_profile(const Graph& g, int q);
bool is_kq_divisible(const Graph& g, int q);
bool is_kq_divisible(const MultiGraph& g, int q);
std::uint64_t optimal_leave_number(const Graph& g, int q);

struct PackingReport {
  bool valid = false;
  std::size_t covered_edge_count = 0;
  Graph leave;
  std::vector<std::string> violations;
};

PackingReport verify_packing(const Graph& g, const Packing& p);
/// e(G) - covered >= optimal_leave_number(G, q); assumes verify_packing passed.
bool leave_lower_bound_check(const Graph& g, const Packing& p);
/// Valid packing with empty leave.
bool is_decomposition(const Graph& g, const Packing& p);

Graph parse_graph(std::string_view text);
std::string serialize_graph(const Graph& g);
Packing parse_packing(std::string_view text);
std::string serialize_packing(const Packing& p);

Graph read_graph_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Dense id for every edge of a graph, in lexicographic edge order.
class EdgeIndex {
 public:
  EdgeIndex() = default;
  explicit EdgeIndex(const Graph& g);

  std::size_t size() const { return edges_.size(); }
  const Edge& edge(std::size_t id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Returns size() when the pair is not an edge.
  std::size_t id(Vertex a, Vertex b) const;
  bool contains(Vertex a, Vertex b) const { return id(a, b) != size(); }

 private:
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
};

/// Process-wide tally of packings checked against the leave lower bound.
struct PackingAuditCounters {
  std::uint64_t packings = 0;
  std::uint64_t violations = 0;
};

/// Checks leave >= optimal leave number for a produced packing and tallies the outcome.
bool audit_packing(const Graph& g, const Packing& p);
PackingAuditCounters packing_audit_counters();
void reset_packing_audit();

}  // namespace cliqueforge
