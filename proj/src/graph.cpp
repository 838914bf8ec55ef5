#include "cliqueforge/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cliqueforge {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b) g.add_edge(a, b);
  return g;
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw InvalidParameter("cycle needs at least three vertices");
  Graph g(n);
  for (Vertex a = 0; a < n; ++a) g.add_edge(a, static_cast<Vertex>((a + 1) % n));
  return g;
}

Graph path_graph(std::size_t n) {
  Graph g(n);
  for (Vertex a = 0; a + 1 < n; ++a) g.add_edge(a, a + 1);
  return g;
}

// ---------------------------------------------------------------- Graph

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  Graph g(n);
  for (const Edge& e : edges) {
    if (!g.add_edge(e.u, e.v)) {
      throw GraphError("duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
  }
  return g;
}

Vertex Graph::add_vertex() {
  adj_.emplace_back();
  return static_cast<Vertex>(adj_.size() - 1);
}

void Graph::ensure_vertices(std::size_t n) {
  if (adj_.size() < n) adj_.resize(n);
}

void Graph::check_pair(Vertex a, Vertex b) const {
  if (a == b) throw GraphError("loop at vertex " + std::to_string(a));
  if (a >= adj_.size() || b >= adj_.size()) {
    throw GraphError("vertex out of range: " + std::to_string(std::max(a, b)));
  }
}

bool Graph::add_edge(Vertex a, Vertex b) {
  check_pair(a, b);
  auto& na = adj_[a];
  auto it = std::lower_bound(na.begin(), na.end(), b);
  if (it != na.end() && *it == b) return false;
  na.insert(it, b);
  auto& nb = adj_[b];
  nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
  ++edge_count_;
  return true;
}

bool Graph::remove_edge(Vertex a, Vertex b) {
  if (a == b || a >= adj_.size() || b >= adj_.size()) return false;
  auto& na = adj_[a];
  auto it = std::lower_bound(na.begin(), na.end(), b);
  if (it == na.end() || *it != b) return false;
  na.erase(it);
  auto& nb = adj_[b];
  nb.erase(std::lower_bound(nb.begin(), nb.end(), a));
  --edge_count_;
  return true;
}

bool Graph::has_edge(Vertex a, Vertex b) const {
  if (a >= adj_.size() || b >= adj_.size()) return false;
  const auto& na = adj_[a].size() <= adj_[b].size() ? adj_[a] : adj_[b];
  Vertex other = adj_[a].size() <= adj_[b].size() ? b : a;
  return std::binary_search(na.begin(), na.end(), other);
}

std::size_t Graph::max_degree() const {
  std::size_t d = 0;
  for (const auto& n : adj_) d = std::max(d, n.size());
  return d;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < adj_.size(); ++u) {
    for (Vertex v : adj_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::minus(const Graph& other) const {
  Graph g(vertex_count());
  for (const Edge& e : edges()) {
    if (!other.has_edge(e.u, e.v)) g.add_edge(e.u, e.v);
  }
  return g;
}

Graph Graph::united(const Graph& other) const {
  Graph g = *this;
  g.ensure_vertices(other.vertex_count());
  for (const Edge& e : other.edges()) g.add_edge(e.u, e.v);
  return g;
}

Graph Graph::induced_on(std::span<const Vertex> vertices) const {
  std::vector<char> keep(vertex_count(), 0);
  for (Vertex v : vertices) keep.at(v) = 1;
  Graph g(vertex_count());
  for (const Edge& e : edges()) {
    if (keep[e.u] && keep[e.v]) g.add_edge(e.u, e.v);
  }
  return g;
}

bool Graph::is_independent(std::span<const Vertex> vertices) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      if (has_edge(vertices[i], vertices[j])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- MultiGraph

void MultiGraph::add_edges(Vertex a, Vertex b, std::uint64_t copies) {
  if (a == b) throw GraphError("loop at vertex " + std::to_string(a));
  if (a >= n_ || b >= n_) throw GraphError("vertex out of range");
  if (copies == 0) return;
  mult_[Edge(a, b)] += copies;
  total_ += copies;
}

std::uint64_t MultiGraph::multiplicity(Vertex a, Vertex b) const {
  auto it = mult_.find(Edge(a, b));
  return it == mult_.end() ? 0 : it->second;
}

std::uint64_t MultiGraph::degree(Vertex v) const {
  std::uint64_t d = 0;
  for (const auto& [e, m] : mult_) {
    if (e.u == v || e.v == v) d += m;
  }
  return d;
}

Graph MultiGraph::to_simple_lossy() const {
  Graph g(n_);
  for (const auto& [e, m] : mult_) {
    if (m > 0) g.add_edge(e.u, e.v);
  }
  return g;
}

// ---------------------------------------------------------------- divisibility

namespace {

void require_q(int q) {
  if (q < 3) throw InvalidParameter("q must be at least 3, got " + std::to_string(q));
}

}  // namespace

DegreeResidueProfile residue_profile(const Graph& g, int q) {
  require_q(q);
  DegreeResidueProfile p;
  p.q = q;
  const std::uint64_t mod_v = static_cast<std::uint64_t>(q - 1);
  p.residues.resize(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) p.residues[v] = g.degree(v) % mod_v;
  p.edge_residue = g.edge_count() % binom(q, 2);
  return p;
}

bool is_kq_divisible(const Graph& g, int q) {
  auto p = residue_profile(g, q);
  if (p.edge_residue != 0) return false;
  return std::all_of(p.residues.begin(), p.residues.end(), [](auto r) { return r == 0; });
}

bool is_kq_divisible(const MultiGraph& g, int q) {
  require_q(q);
  if (g.edge_count() % binom(q, 2) != 0) return false;
  std::vector<std::uint64_t> deg(g.vertex_count(), 0);
  for (const auto& [e, m] : g.multiplicities()) {
    deg[e.u] += m;
    deg[e.v] += m;
  }
  const std::uint64_t mod_v = static_cast<std::uint64_t>(q - 1);
  return std::all_of(deg.begin(), deg.end(), [&](auto d) { return d % mod_v == 0; });
}

std::uint64_t optimal_leave_number(const Graph& g, int q) {
  auto p = residue_profile(g, q);
  std::uint64_t sum = 0;
  for (auto r : p.residues) sum += r;
  const std::uint64_t lower = (sum + 1) / 2;
  const std::uint64_t mod_e = binom(q, 2);
  std::uint64_t k = lower;
  while (k % mod_e != p.edge_residue) ++k;
  return k;
}

// ---------------------------------------------------------------- packings

PackingReport verify_packing(const Graph& g, const Packing& p) {
  PackingReport report;
  report.valid = true;
  if (p.q < 3) {
    report.valid = false;
    report.violations.push_back("clique order q < 3");
  }
  std::unordered_map<std::uint64_t, std::size_t> owner;
  Graph covered(g.vertex_count());
  for (std::size_t i = 0; i < p.cliques.size(); ++i) {
    const Clique& c = p.cliques[i];
    Clique sorted = c;
    std::sort(sorted.begin(), sorted.end());
    if (static_cast<int>(c.size()) != p.q ||
        std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      report.valid = false;
      report.violations.push_back("clique " + std::to_string(i) + " does not have " +
                                  std::to_string(p.q) + " distinct vertices");
      continue;
    }
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = a + 1; b < sorted.size(); ++b) {
        Edge e(sorted[a], sorted[b]);
        if (!g.has_edge(e.u, e.v)) {
          report.valid = false;
          report.violations.push_back("clique " + std::to_string(i) + " uses non-edge " +
                                      std::to_string(e.u) + " " + std::to_string(e.v));
          continue;
        }
        auto [it, fresh] = owner.emplace(e.key(), i);
        if (!fresh) {
          report.valid = false;
          report.violations.push_back("edge " + std::to_string(e.u) + " " + std::to_string(e.v) +
                                      " covered by cliques " + std::to_string(it->second) +
                                      " and " + std::to_string(i));
          continue;
        }
        covered.add_edge(e.u, e.v);
      }
    }
  }
  report.covered_edge_count = covered.edge_count();
  report.leave = g.minus(covered);
  return report;
}

bool leave_lower_bound_check(const Graph& g, const Packing& p) {
  const std::uint64_t covered = p.cliques.size() * binom(p.q, 2);
  if (covered > g.edge_count()) return false;
  return g.edge_count() - covered >= optimal_leave_number(g, p.q);
}

bool is_decomposition(const Graph& g, const Packing& p) {
  auto r = verify_packing(g, p);
  return r.valid && r.leave.edge_count() == 0;
}

namespace {

std::atomic<std::uint64_t> g_audit_packings{0};
std::atomic<std::uint64_t> g_audit_violations{0};

}  // namespace

bool audit_packing(const Graph& g, const Packing& p) {
  bool ok = leave_lower_bound_check(g, p);
  g_audit_packings.fetch_add(1, std::memory_order_relaxed);
  if (!ok) g_audit_violations.fetch_add(1, std::memory_order_relaxed);
  return ok;
}

PackingAuditCounters packing_audit_counters() {
  return {g_audit_packings.load(), g_audit_violations.load()};
}

void reset_packing_audit() {
  g_audit_packings = 0;
  g_audit_violations = 0;
}

// ---------------------------------------------------------------- text formats

namespace {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 0;

  // Next non-blank line, or false at end of input.
  bool next(std::string_view& out) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      out = text.substr(pos, end - pos);
      pos = end + 1;
      ++line;
      if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
      if (out.find_first_not_of(" \t") != std::string_view::npos) return true;
    }
    return false;
  }
};

std::vector<std::uint64_t> parse_numbers(std::string_view s, std::size_t line) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), value);
    if (ec != std::errc()) throw ParseError(line, "expected a non-negative integer");
    i = static_cast<std::size_t>(ptr - s.data());
    if (i < s.size() && s[i] != ' ' && s[i] != '\t') {
      throw ParseError(line, "unexpected character");
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

Graph parse_graph(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  if (!reader.next(line)) throw ParseError(1, "missing header \"n m\"");
  auto header = parse_numbers(line, reader.line);
  if (header.size() != 2) throw ParseError(reader.line, "header must be \"n m\"");
  const std::uint64_t n = header[0];
  const std::uint64_t m = header[1];
  if (n > (std::uint64_t{1} << 31)) throw ParseError(reader.line, "vertex count too large");
  Graph g(static_cast<std::size_t>(n));
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!reader.next(line)) throw ParseError(reader.line + 1, "expected " + std::to_string(m) + " edges");
    auto uv = parse_numbers(line, reader.line);
    if (uv.size() != 2) throw ParseError(reader.line, "edge line must be \"u v\"");
    if (uv[0] >= n || uv[1] >= n) throw ParseError(reader.line, "vertex out of range");
    if (uv[0] == uv[1]) throw ParseError(reader.line, "loop");
    if (!g.add_edge(static_cast<Vertex>(uv[0]), static_cast<Vertex>(uv[1]))) {
      throw ParseError(reader.line, "duplicate edge");
    }
  }
  if (reader.next(line)) throw ParseError(reader.line, "trailing content after edge list");
  return g;
}

std::string serialize_graph(const Graph& g) {
  std::ostringstream os;
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
  return os.str();
}

Packing parse_packing(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  if (!reader.next(line)) throw ParseError(1, "missing header \"q k\"");
  auto header = parse_numbers(line, reader.line);
  if (header.size() != 2) throw ParseError(reader.line, "header must be \"q k\"");
  if (header[0] < 3 || header[0] > 64) throw ParseError(reader.line, "q out of range");
  Packing p;
  p.q = static_cast<int>(header[0]);
  for (std::uint64_t i = 0; i < header[1]; ++i) {
    if (!reader.next(line)) throw ParseError(reader.line + 1, "expected more cliques");
    auto vs = parse_numbers(line, reader.line);
    if (vs.size() != header[0]) throw ParseError(reader.line, "clique must list q vertices");
    Clique c;
    for (auto v : vs) {
      if (v > 0xffffffffu) throw ParseError(reader.line, "vertex out of range");
      c.push_back(static_cast<Vertex>(v));
    }
    p.cliques.push_back(std::move(c));
  }
  if (reader.next(line)) throw ParseError(reader.line, "trailing content after packing");
  return p;
}

std::string serialize_packing(const Packing& p) {
  std::ostringstream os;
  os << p.q << ' ' << p.cliques.size() << '\n';
  for (const Clique& c : p.cliques) {
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    os << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Graph read_graph_file(const std::string& path) { return parse_graph(read_text_file(path)); }

// ---------------------------------------------------------------- EdgeIndex

EdgeIndex::EdgeIndex(const Graph& g) : edges_(g.edges()) {
  ids_.reserve(edges_.size() * 2);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    ids_.emplace(edges_[i].key(), static_cast<std::uint32_t>(i));
  }
}

std::size_t EdgeIndex::id(Vertex a, Vertex b) const {
  if (a == b) return size();
  auto it = ids_.find(Edge(a, b).key());
  return it == ids_.end() ? size() : it->second;
}

}  // namespace cliqueforge
