#include "cliqueforge/divfixer.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

#include "cliqueforge/gadgets.hpp"
#include "json.hpp"

namespace cliqueforge {

namespace {

std::uint64_t mod_sub(std::uint64_t a, std::uint64_t b, std::uint64_t m) { return (a % m + m - b % m) % m; }

void require_q(int q) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
}

}  // namespace

FatTriangleChoice fat_triangle_select(int q, std::uint64_t m, std::uint32_t dx, std::uint32_t dy, std::uint32_t dz) {
  require_q(q);
  const std::uint64_t big = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q - 1);
  const std::uint64_t small = static_cast<std::uint64_t>(q - 1);
  if (m >= big) throw InvalidRequest("m out of range");
  if (dx >= small || dy >= small || dz >= small) throw InvalidRequest("degree residue out of range");
  if ((dx + dy + dz) % small != (2 * m) % small) throw InvalidRequest("degree residues do not match 2m mod (q-1)");
  FatTriangleChoice c;
  c.yz = mod_sub(m, dx, big);
  c.xz = mod_sub(dz, c.yz, big);
  c.xy = mod_sub(dx, c.xz, big);
  return c;
}

std::size_t FixerBlueprint::fat_count() const { return static_cast<std::size_t>(std::max(3, q - 2)); }

FixerBlueprint build_fixer_blueprint(int q, std::size_t n) {
  require_q(q);
  FixerBlueprint bp;
  bp.q = q;
  bp.n = n;
  const std::size_t fat = bp.fat_count();
  if (n < fat + 1) throw InvalidParameter("n must be at least " + std::to_string(fat + 1));
  bp.order.resize(n);
  std::iota(bp.order.begin(), bp.order.end(), Vertex{0});
  bp.base = MultiGraph(n);
  const std::size_t reach = static_cast<std::size_t>(q - 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n && j - i <= reach; ++j) bp.base.add_edges(static_cast<Vertex>(i), static_cast<Vertex>(j));
  const std::uint64_t want = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q - 1);
  for (Vertex i = 0; i < fat; ++i)
    for (Vertex j = i + 1; j < fat; ++j) {
      const std::uint64_t have = bp.base.multiplicity(i, j);
      for (std::uint64_t c = have; c < want; ++c) bp.extra.emplace_back(i, j);
      bp.base.add_edges(i, j, want - have);
    }
  return bp;
}

MultiGraph inductive_select(const FixerBlueprint& bp, const SelectRequest& req) {
  const int q = bp.q;
  const std::uint64_t big = static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q - 1);
  const std::uint64_t small = static_cast<std::uint64_t>(q - 1);
  if (req.d.size() != bp.n) throw InvalidRequest("request has " + std::to_string(req.d.size()) + " residues, need " + std::to_string(bp.n));
  if (req.m >= big) throw InvalidRequest("m out of range");
  std::uint64_t sum = 0;
  for (auto x : req.d) {
    if (x >= small) throw InvalidRequest("degree residue out of range");
    sum += x;
  }
  if (sum % small != (2 * req.m) % small) throw InvalidRequest("degree residues do not match 2m mod (q-1)");

  // residues indexed by position in the order
  std::vector<std::uint64_t> d(bp.n);
  for (std::size_t i = 0; i < bp.n; ++i) d[i] = req.d[bp.order[i]];
  std::uint64_t m = req.m;
  MultiGraph out(bp.n);
  for (std::size_t i = bp.n; i-- > 3;) {
    const Vertex z = bp.order[i];
    std::uint64_t need = d[i];
    m = mod_sub(m, need, big);
    // lexicographically first back-edges: earliest neighbour, then copy index
    for (std::size_t j = 0; j < i && need > 0; ++j) {
      const Vertex u = bp.order[j];
      const std::uint64_t take = std::min(need, bp.base.multiplicity(u, z));
      if (take == 0) continue;
      out.add_edges(u, z, take);
      d[j] = mod_sub(d[j], take, small);
      need -= take;
    }
    if (need > 0) throw std::logic_error("vertex has fewer than q-2 back-edges");
  }
  auto c = fat_triangle_select(q, m, static_cast<std::uint32_t>(d[0]), static_cast<std::uint32_t>(d[1]),
                               static_cast<std::uint32_t>(d[2]));
  const Vertex x = bp.order[0], y = bp.order[1], z = bp.order[2];
  if (c.xy) out.add_edges(x, y, c.xy);
  if (c.xz) out.add_edges(x, z, c.xz);
  if (c.yz) out.add_edges(y, z, c.yz);
  return out;
}

FixerBlueprint simplify_fixer(const FixerBlueprint& bp) {
  FixerBlueprint out = bp;
  out.registry.clear();
  Graph g(bp.n);
  for (const auto& [e, k] : bp.base.multiplicities()) {
    std::uint64_t extra = static_cast<std::uint64_t>(std::count(bp.extra.begin(), bp.extra.end(), e));
    if (k > extra) g.add_edge(e.u, e.v);
  }
  for (std::size_t c = 0; c < bp.extra.size(); ++c) {
    Graph before = g;
    const std::size_t first = g.vertex_count();
    add_fake_edge(g, bp.q, bp.extra[c].u, bp.extra[c].v);
    FakeEdgeRecord rec;
    rec.copy = c;
    rec.pair = bp.extra[c];
    for (std::size_t v = first; v < g.vertex_count(); ++v) rec.vertices.push_back(static_cast<Vertex>(v));
    rec.edges = g.minus(before).edges();
    out.registry.push_back(std::move(rec));
  }
  out.simple = std::move(g);
  return out;
}

Graph lift_selection(const FixerBlueprint& simplified, const MultiGraph& selection) {
  if (!simplified.simple) throw InvalidParameter("blueprint is not simplified");
  const Graph& s = *simplified.simple;
  Graph out(s.vertex_count());
  std::map<Edge, std::vector<std::size_t>> copies;
  for (std::size_t c = 0; c < simplified.extra.size(); ++c) copies[simplified.extra[c]].push_back(c);
  for (const auto& [e, k] : selection.multiplicities()) {
    if (k == 0) continue;
    if (k > simplified.base.multiplicity(e.u, e.v)) throw InvalidParameter("selection is not a sub-multigraph");
    std::uint64_t left = k;
    if (s.has_edge(e.u, e.v)) {
      out.add_edge(e.u, e.v);
      --left;
    }
    const auto& ids = copies[e];
    for (std::uint64_t i = 0; i < left; ++i)
      for (const Edge& f : simplified.registry.at(ids.at(i)).edges) out.add_edge(f.u, f.v);
  }
  return out;
}

std::uint64_t fixer_constant(int q) {
  require_q(q);
  const std::uint64_t c = binom(static_cast<std::uint64_t>(q), 2) - 1;
  const std::uint64_t fat = static_cast<std::uint64_t>(std::max(3, q - 2));
  return c * c * static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q - 1) * binom(fat, 2);
}

namespace {

// Backtracking placement of one fake edge into the free host edges.
class FakeEdgePlacer {
 public:
  FakeEdgePlacer(const Graph& host, const std::unordered_set<std::uint64_t>& used, std::mt19937_64& rng,
                 std::uint64_t max_nodes)
      : host_(host), used_(used), rng_(rng), max_nodes_(max_nodes) {}

  bool free_edge(Vertex a, Vertex b) const { return a != b && host_.has_edge(a, b) && !used_.count(Edge(a, b).key()); }

  std::size_t free_degree(Vertex v) const {
    std::size_t d = 0;
    for (Vertex u : host_.neighbors(v)) d += !used_.count(Edge(u, v).key());
    return d;
  }

  // `image` holds the already-fixed roots; fills the rest of `image` for `order`.
  bool place(std::map<Vertex, Vertex>& image, const std::vector<Vertex>& order,
             const std::map<Vertex, std::vector<Vertex>>& adj) {
    nodes_ = 0;
    rec_degree_.clear();
    for (const auto& [v, ns] : adj) rec_degree_[v] = ns.size();
    for (const auto& [t, h] : image) taken_.insert(h);
    bool ok = extend(image, order, 0, adj);
    taken_.clear();
    return ok;
  }

 private:
  bool extend(std::map<Vertex, Vertex>& image, const std::vector<Vertex>& order, std::size_t at,
              const std::map<Vertex, std::vector<Vertex>>& adj) {
    if (at == order.size()) return true;
    if (++nodes_ > max_nodes_) return false;
    const Vertex t = order[at];
    std::vector<Vertex> placed;
    for (Vertex u : adj.at(t))
      if (image.count(u)) placed.push_back(image.at(u));
    std::vector<Vertex> cand;
    if (placed.empty()) {
      for (Vertex h = 0; h < host_.vertex_count(); ++h) cand.push_back(h);
    } else {
      Vertex pivot = placed.front();
      for (Vertex h : host_.neighbors(pivot)) cand.push_back(h);
    }
    std::shuffle(cand.begin(), cand.end(), rng_);
    for (Vertex h : cand) {
      if (taken_.count(h)) continue;
      bool ok = true;
      for (Vertex p : placed)
        if (!free_edge(p, h)) {
          ok = false;
          break;
        }
      if (!ok || free_degree(h) < rec_degree_[t]) continue;
      image[t] = h;
      taken_.insert(h);
      if (extend(image, order, at + 1, adj)) return true;
      taken_.erase(h);
      image.erase(t);
      if (nodes_ > max_nodes_) return false;
    }
    return false;
  }

  const Graph& host_;
  const std::unordered_set<std::uint64_t>& used_;
  std::mt19937_64& rng_;
  std::uint64_t max_nodes_;
  std::uint64_t nodes_ = 0;
  std::unordered_set<Vertex> taken_;
  std::map<Vertex, std::size_t> rec_degree_;
};

}  // namespace

std::optional<EmbeddedFixer> embed_fixer(const FixerBlueprint& simplified, const Graph& host,
                                         const std::vector<Vertex>& path_map, const EmbedOptions& opts) {
  if (!simplified.simple) throw InvalidParameter("blueprint is not simplified");
  if (path_map.size() != simplified.n || host.vertex_count() != simplified.n)
    throw InvalidParameter("path map must cover the host's vertices");
  {
    std::vector<Vertex> sorted = path_map;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != i) throw InvalidParameter("path map is not a bijection");
  }
  const Graph& s = *simplified.simple;
  EmbeddedFixer out;
  out.blueprint = simplified;
  out.map.assign(s.vertex_count(), 0);
  for (std::size_t i = 0; i < simplified.n; ++i) out.map[simplified.order[i]] = path_map[i];
  out.graph = Graph(host.vertex_count());
  std::unordered_set<std::uint64_t> used;
  // path power edges are the template edges between path vertices
  for (const Edge& e : s.edges()) {
    if (e.v >= simplified.n) continue;
    const Vertex a = out.map[e.u], b = out.map[e.v];
    if (!host.has_edge(a, b)) return std::nullopt;
    used.insert(Edge(a, b).key());
    out.graph.add_edge(a, b);
  }
  // each fake edge needs (q-2)^2 free host edges at both ends of its pair
  {
    std::map<Vertex, std::size_t> need;
    const std::size_t per = static_cast<std::size_t>((simplified.q - 2) * (simplified.q - 2));
    for (const auto& rec : simplified.registry) {
      need[out.map[rec.pair.u]] += per;
      need[out.map[rec.pair.v]] += per;
    }
    for (const auto& [h, k] : need)
      if (host.degree(h) < out.graph.degree(h) + k) return std::nullopt;
  }
  const EmbeddedFixer path_only = out;
  const std::unordered_set<std::uint64_t> path_used = used;
  for (std::size_t restart = 0; restart < opts.restarts; ++restart) {
    out = path_only;
    used = path_used;
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * restart);
    FakeEdgePlacer placer(host, used, rng, opts.nodes_per_attempt);
    bool all = true;
    for (const FakeEdgeRecord& rec : simplified.registry) {
      std::map<Vertex, std::vector<Vertex>> adj;
      for (const Edge& e : rec.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
      }
      // hubs come first in the record; they have no root neighbours
      bool placed = false;
      std::map<Vertex, Vertex> image;
      for (std::size_t attempt = 0; attempt < opts.attempts_per_fake_edge && !placed; ++attempt) {
        image.clear();
        image[rec.pair.u] = out.map[rec.pair.u];
        image[rec.pair.v] = out.map[rec.pair.v];
        placed = placer.place(image, rec.vertices, adj);
      }
      if (!placed) {
        all = false;
        break;
      }
      for (Vertex v : rec.vertices) out.map[v] = image.at(v);
      for (const Edge& e : rec.edges) {
        const Vertex a = image.at(e.u), b = image.at(e.v);
        used.insert(Edge(a, b).key());
        out.graph.add_edge(a, b);
      }
    }
    if (all) return out;
  }
  return std::nullopt;
}

FixResult apply_fixer(const Graph& g, const EmbeddedFixer& fixer, int q) {
  const FixerBlueprint& bp = fixer.blueprint;
  if (bp.q != q) throw InvalidParameter("fixer was built for a different q");
  if (!bp.simple) throw InvalidParameter("fixer is not simplified");
  if (bp.n != g.vertex_count()) throw InvalidParameter("fixer does not span the host");
  {
    std::vector<char> hit(g.vertex_count(), 0);
    for (std::size_t i = 0; i < bp.n; ++i) {
      const Vertex h = fixer.map.at(bp.order[i]);
      if (h >= g.vertex_count() || hit[h]) throw InvalidParameter("fixer does not span the host");
      hit[h] = 1;
    }
  }
  if (fixer.graph.vertex_count() != g.vertex_count()) throw InvalidParameter("fixer is not a subgraph of the host");
  for (const Edge& e : fixer.graph.edges())
    if (!g.has_edge(e.u, e.v)) throw InvalidParameter("fixer is not a subgraph of the host");

  const std::uint64_t ce = binom(static_cast<std::uint64_t>(q), 2);
  const std::uint64_t cd = static_cast<std::uint64_t>(q - 1);
  const std::uint64_t rest_edges = g.edge_count() - fixer.graph.edge_count();
  SelectRequest req;
  req.m = mod_sub(0, rest_edges, ce);
  req.d.assign(bp.n, 0);
  for (std::size_t i = 0; i < bp.n; ++i) {
    const Vertex t = bp.order[i];
    const Vertex h = fixer.map[t];
    const std::uint64_t rest = g.degree(h) - fixer.graph.degree(h);
    req.d[t] = static_cast<std::uint32_t>(mod_sub(0, rest, cd));
  }
  Graph lifted = lift_selection(bp, inductive_select(bp, req));
  FixResult out;
  out.kept = Graph(g.vertex_count());
  for (const Edge& e : lifted.edges()) out.kept.add_edge(fixer.map[e.u], fixer.map[e.v]);
  out.deleted = fixer.graph.minus(out.kept).edges();
  out.graph = g;
  for (const Edge& e : out.deleted) out.graph.remove_edge(e.u, e.v);
  if (!is_kq_divisible(out.graph, q)) throw std::logic_error("fixer left a non-divisible graph");
  return out;
}

std::string fixer_json(const FixerBlueprint& bp, const std::vector<Vertex>* map) {
  nlohmann::ordered_json j;
  j["q"] = bp.q;
  j["n"] = bp.n;
  j["order"] = bp.order;
  auto pairs = nlohmann::ordered_json::array();
  for (const Edge& e : bp.extra) pairs.push_back({e.u, e.v});
  j["extra"] = pairs;
  auto reg = nlohmann::ordered_json::array();
  for (const auto& r : bp.registry) {
    nlohmann::ordered_json x;
    x["copy"] = r.copy;
    x["pair"] = {r.pair.u, r.pair.v};
    x["vertices"] = r.vertices;
    auto es = nlohmann::ordered_json::array();
    for (const Edge& e : r.edges) es.push_back({e.u, e.v});
    x["edges"] = es;
    reg.push_back(std::move(x));
  }
  j["registry"] = reg;
  if (map) j["map"] = *map;
  return j.dump(2) + "\n";
}

}  // namespace cliqueforge
