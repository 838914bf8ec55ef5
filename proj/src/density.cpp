#include "cliqueforge/density.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace cliqueforge {

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

std::string Ratio::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

RootedGraph::RootedGraph(Graph graph, std::vector<Vertex> roots) : graph_(std::move(graph)) {
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (Vertex r : roots)
    if (r >= graph_.vertex_count()) throw GraphError("root " + std::to_string(r) + " out of range");
  if (!graph_.is_independent(roots)) throw GraphError("roots are not independent");
  roots_ = std::move(roots);
}

bool RootedGraph::is_root(Vertex v) const { return std::binary_search(roots_.begin(), roots_.end(), v); }

namespace {

std::size_t induced_edges(const Graph& h, const std::vector<Vertex>& w) {
  std::vector<char> in(h.vertex_count(), 0);
  for (Vertex v : w) in.at(v) = 1;
  std::size_t e = 0;
  for (Vertex v : w)
    for (Vertex u : h.neighbors(v))
      if (u > v && in[u]) ++e;
  return e;
}

// Dinic max-flow with 64-bit capacities.
class FlowNetwork {
 public:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  explicit FlowNetwork(std::size_t n) : head_(n, -1), level_(n), iter_(n) {}

  void add_arc(std::size_t from, std::size_t to, std::int64_t cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(arcs_.size() - 1);
    arcs_.push_back({from, head_[to], 0});
    head_[to] = static_cast<int>(arcs_.size() - 1);
  }

  std::int64_t max_flow(std::size_t s, std::size_t t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      for (std::size_t i = 0; i < head_.size(); ++i) iter_[i] = head_[i];
      while (std::int64_t f = dfs(s, t, kInf)) flow += f;
    }
    return flow;
  }

  // Vertices reachable from s in the residual network after max_flow.
  std::vector<char> source_side(std::size_t s) {
    std::vector<char> seen(head_.size(), 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (int a = head_[v]; a != -1; a = arcs_[a].next)
        if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = 1;
          stack.push_back(arcs_[a].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    int next;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop();
      for (int a = head_[v]; a != -1; a = arcs_[a].next)
        if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[v] + 1;
          q.push(arcs_[a].to);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t v, std::size_t t, std::int64_t limit) {
    if (v == t) return limit;
    for (int& a = iter_[v]; a != -1; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap <= 0 || level_[arc.to] != level_[v] + 1) continue;
      std::int64_t got = dfs(arc.to, t, std::min(limit, arc.cap));
      if (got > 0) {
        arc.cap -= got;
        arcs_[a ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

// max over S subset of `chargeable` of  b * e(H[S + free]) - a * |S|, where edges inside
// `free` are excluded from `edges`. Returns the value and the (minimal) maximizing S.
struct ClosureResult {
  std::int64_t value = 0;
  std::vector<Vertex> chosen;
};

ClosureResult max_closure(std::size_t n, const std::vector<Edge>& edges, const std::vector<char>& is_free,
                          std::int64_t a, std::int64_t b) {
  std::vector<int> node(n, -1);
  std::vector<Vertex> charged;
  for (const Edge& e : edges)
    for (Vertex x : {e.u, e.v})
      if (!is_free[x] && node[x] < 0) {
        node[x] = static_cast<int>(charged.size());
        charged.push_back(x);
      }
  const std::size_t s = 0, t = 1, vbase = 2, ebase = vbase + charged.size();
  FlowNetwork net(ebase + edges.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    net.add_arc(s, ebase + i, b);
    total += b;
    for (Vertex x : {edges[i].u, edges[i].v})
      if (!is_free[x]) net.add_arc(ebase + i, vbase + node[x], FlowNetwork::kInf);
  }
  for (std::size_t i = 0; i < charged.size(); ++i) net.add_arc(vbase + i, t, a);
  ClosureResult res;
  res.value = total - net.max_flow(s, t);
  if (res.value > 0) {
    auto side = net.source_side(s);
    for (std::size_t i = 0; i < charged.size(); ++i)
      if (side[vbase + i]) res.chosen.push_back(charged[i]);
    std::sort(res.chosen.begin(), res.chosen.end());
  }
  return res;
}

bool use_enumeration(std::size_t n, const DensityOptions& opts) {
  switch (opts.method) {
    case DensityMethod::enumeration:
      if (n > opts.enumeration_limit)
        throw TooLarge("graph has " + std::to_string(n) + " vertices; enumeration limit is " +
                       std::to_string(opts.enumeration_limit));
      return true;
    case DensityMethod::flow:
      return false;
    case DensityMethod::automatic:
      return n <= opts.enumeration_limit && n <= 63;
  }
  return false;
}

std::vector<Vertex> with_roots(std::vector<Vertex> s, const std::vector<Vertex>& roots) {
  s.insert(s.end(), roots.begin(), roots.end());
  std::sort(s.begin(), s.end());
  return s;
}

DensityResult rooted_enumeration(const RootedGraph& h) {
  const Graph& g = h.graph();
  std::vector<Vertex> free;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!h.is_root(v)) free.push_back(v);
  const std::size_t k = free.size();
  std::vector<int> pos(g.vertex_count(), -1);
  for (std::size_t i = 0; i < k; ++i) pos[free[i]] = static_cast<int>(i);
  std::vector<std::uint64_t> adj(k, 0);
  std::vector<std::int64_t> root_deg(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (Vertex u : g.neighbors(free[i])) {
      if (pos[u] >= 0)
        adj[i] |= std::uint64_t{1} << pos[u];
      else
        ++root_deg[i];
    }
  std::uint64_t mask = 0, best_mask = 0;
  std::int64_t edges = 0, size = 0;
  Ratio best(-1);
  bool have = false;
  for (std::uint64_t step = 1; step < (std::uint64_t{1} << k); ++step) {
    int j = std::countr_zero(step);
    std::uint64_t bit = std::uint64_t{1} << j;
    std::int64_t delta = root_deg[j] + std::popcount(adj[j] & mask);
    if (mask & bit) {
      mask ^= bit;
      edges -= delta;
      --size;
    } else {
      mask ^= bit;
      edges += delta;
      ++size;
    }
    if (size == 0) continue;
    // edges / size > best, by cross-multiplication
    if (!have || static_cast<__int128>(edges) * best.den() > static_cast<__int128>(best.num()) * size) {
      best = Ratio(edges, size);
      best_mask = mask;
      have = true;
    }
  }
  std::vector<Vertex> chosen;
  for (std::size_t i = 0; i < k; ++i)
    if (best_mask >> i & 1) chosen.push_back(free[i]);
  return {best, with_roots(std::move(chosen), h.roots())};
}

DensityResult rooted_flow(const RootedGraph& h) {
  const Graph& g = h.graph();
  std::vector<char> is_root(g.vertex_count(), 0);
  std::vector<Vertex> current;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (h.is_root(v))
      is_root[v] = 1;
    else
      current.push_back(v);
  }
  const auto edges = g.edges();
  Ratio lambda(static_cast<std::int64_t>(edges.size()), static_cast<std::int64_t>(current.size()));
  for (;;) {
    auto res = max_closure(g.vertex_count(), edges, is_root, lambda.num(), lambda.den());
    if (res.value <= 0) break;
    auto w = with_roots(res.chosen, h.roots());
    Ratio next(static_cast<std::int64_t>(induced_edges(g, w)), static_cast<std::int64_t>(res.chosen.size()));
    if (!(next > lambda)) break;
    lambda = next;
    current = std::move(res.chosen);
  }
  return {lambda, with_roots(std::move(current), h.roots())};
}

DensityResult two_enumeration(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint64_t> adj(n, 0);
  for (Vertex v = 0; v < n; ++v)
    for (Vertex u : g.neighbors(v)) adj[v] |= std::uint64_t{1} << u;
  std::uint64_t mask = 0, best_mask = 0;
  std::int64_t edges = 0, size = 0;
  Ratio best;
  bool have = false;
  for (std::uint64_t step = 1; step < (std::uint64_t{1} << n); ++step) {
    int j = std::countr_zero(step);
    std::uint64_t bit = std::uint64_t{1} << j;
    std::int64_t delta = std::popcount(adj[j] & mask);
    if (mask & bit) {
      mask ^= bit;
      edges -= delta;
      --size;
    } else {
      mask ^= bit;
      edges += delta;
      ++size;
    }
    if (size < 3) continue;
    if (!have || static_cast<__int128>(edges - 1) * best.den() >
                     static_cast<__int128>(best.num()) * (size - 2)) {
      best = Ratio(edges - 1, size - 2);
      best_mask = mask;
      have = true;
    }
  }
  std::vector<Vertex> chosen;
  for (Vertex v = 0; v < n; ++v)
    if (best_mask >> v & 1) chosen.push_back(v);
  return {best, chosen};
}

// Best value over 3-vertex sets: triangle 2, path 1, edge 0; otherwise empty.
std::optional<DensityResult> best_triple(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::optional<DensityResult> out;
  for (const Edge& e : g.edges()) {
    auto nu = g.neighbors(e.u);
    auto nv = g.neighbors(e.v);
    std::vector<Vertex> common;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
    if (!common.empty()) {
      std::vector<Vertex> w{e.u, e.v, common.front()};
      std::sort(w.begin(), w.end());
      return DensityResult{Ratio(2), w};
    }
    if (!out || out->value < Ratio(1)) {
      Vertex third = n;
      if (g.degree(e.u) > 1)
        third = nu[0] == e.v ? nu[1] : nu[0];
      else if (g.degree(e.v) > 1)
        third = nv[0] == e.u ? nv[1] : nv[0];
      if (third != n) {
        std::vector<Vertex> w{e.u, e.v, third};
        std::sort(w.begin(), w.end());
        out = DensityResult{Ratio(1), w};
      } else if (!out) {
        Vertex x = 0;
        while (x == e.u || x == e.v) ++x;
        std::vector<Vertex> w{e.u, e.v, x};
        std::sort(w.begin(), w.end());
        out = DensityResult{Ratio(0), w};
      }
    }
  }
  return out;
}

// Vertices surviving iterated removal of vertices with degree <= lambda.
std::vector<char> core_above(const Graph& g, const Ratio& lambda) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> deg(n);
  std::vector<char> alive(n, 1);
  std::vector<Vertex> stack;
  auto low = [&](Vertex v) { return !(Ratio(static_cast<std::int64_t>(deg[v])) > lambda); };
  for (Vertex v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    if (low(v)) {
      alive[v] = 0;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : g.neighbors(v))
      if (alive[u]) {
        --deg[u];
        if (low(u)) {
          alive[u] = 0;
          stack.push_back(u);
        }
      }
  }
  return alive;
}

// Raise (best, witness) to m2 of g if m2 exceeds best. Any improving set with at least
// four vertices has minimum degree above the current value, so the search stays in that core.
void improve_two_flow(const Graph& g, DensityResult& best) {
  const std::size_t n = g.vertex_count();
  std::vector<char> alive = core_above(g, best.value);
  std::vector<char> is_free(n, 0);
  for (const Edge& uv : g.edges()) {
    if (!alive[uv.u] || !alive[uv.v]) continue;
    for (;;) {
      // Below 1/2 an improving set may need several components of the core.
      std::vector<Vertex> comp;
      std::vector<char> seen(n, 0);
      if (best.value < Ratio(1, 2)) {
        for (Vertex x = 0; x < n; ++x)
          if (alive[x]) {
            seen[x] = 1;
            comp.push_back(x);
          }
      } else {
        comp.push_back(uv.u);
        seen[uv.u] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
          for (Vertex w : g.neighbors(comp[i]))
            if (alive[w] && !seen[w]) {
              seen[w] = 1;
              comp.push_back(w);
            }
      }
      std::vector<Edge> edges;
      for (Vertex x : comp)
        for (Vertex y : g.neighbors(x))
          if (y > x && seen[y] && !(x == uv.u && y == uv.v)) edges.emplace_back(x, y);
      is_free[uv.u] = is_free[uv.v] = 1;
      auto res = max_closure(n, edges, is_free, best.value.num(), best.value.den());
      is_free[uv.u] = is_free[uv.v] = 0;
      if (res.value <= 0) break;
      std::vector<Vertex> w = res.chosen;
      w.push_back(uv.u);
      w.push_back(uv.v);
      std::sort(w.begin(), w.end());
      Ratio next = evaluate_two(g, w);
      if (!(next > best.value)) break;
      best = {next, std::move(w)};
      alive = core_above(g, best.value);
      if (!alive[uv.u] || !alive[uv.v]) break;
    }
  }
}

DensityResult two_flow(const Graph& g) {
  auto triple = best_triple(g);
  if (!triple) {
    std::vector<Vertex> all(g.vertex_count());
    std::iota(all.begin(), all.end(), Vertex{0});
    return {Ratio(-1, static_cast<std::int64_t>(g.vertex_count()) - 2), all};
  }
  DensityResult best = *triple;
  improve_two_flow(g, best);
  return best;
}

}  // namespace

Ratio evaluate_rooted(const RootedGraph& h, const std::vector<Vertex>& witness) {
  std::int64_t nonroot = 0;
  for (Vertex v : witness)
    if (!h.is_root(v)) ++nonroot;
  if (nonroot == 0) throw InvalidParameter("witness has no non-root vertex");
  return Ratio(static_cast<std::int64_t>(induced_edges(h.graph(), witness)), nonroot);
}

Ratio evaluate_two(const Graph& h, const std::vector<Vertex>& witness) {
  if (witness.size() < 3) throw InvalidParameter("witness needs at least three vertices");
  return Ratio(static_cast<std::int64_t>(induced_edges(h, witness)) - 1,
               static_cast<std::int64_t>(witness.size()) - 2);
}

DensityResult max_rooted_density(const RootedGraph& h, const DensityOptions& opts) {
  if (h.roots().size() >= h.graph().vertex_count()) throw InvalidParameter("no non-root vertex");
  if (use_enumeration(h.graph().vertex_count(), opts)) return rooted_enumeration(h);
  return rooted_flow(h);
}

DensityResult max_2_density(const Graph& h, const DensityOptions& opts) {
  if (h.vertex_count() < 3) throw InvalidParameter("2-density needs at least three vertices");
  if (use_enumeration(h.vertex_count(), opts)) return two_enumeration(h);
  return two_flow(h);
}

Rooted2Density rooted_2_density(const RootedGraph& h, const DensityOptions& opts) {
  Rooted2Density out;
  DensityResult rooted = max_rooted_density(h, opts);
  out.rooted = rooted.value;
  out.value = rooted.value;
  out.witness = rooted.witness;
  const Graph& g = h.graph();
  if (g.vertex_count() < 3) return out;
  if (use_enumeration(g.vertex_count(), opts)) {
    DensityResult two = two_enumeration(g);
    out.two = two.value;
    if (two.value > out.value) {
      out.value = two.value;
      out.witness = two.witness;
    }
    return out;
  }
  // Only decide whether m2(H) exceeds m(H, R); compute it exactly only in that case.
  auto triple = best_triple(g);
  if (!triple) {
    out.two = Ratio(-1, static_cast<std::int64_t>(g.vertex_count()) - 2);
    return out;
  }
  DensityResult best = triple->value > rooted.value ? *triple : DensityResult{rooted.value, {}};
  improve_two_flow(g, best);
  if (!best.witness.empty() && best.value > rooted.value) {
    out.two = best.value;
    out.value = best.value;
    out.witness = best.witness;
  } else if (triple->value == rooted.value) {
    out.two = rooted.value;
  }
  return out;
}

DegeneracyResult rooted_degeneracy(const Graph& h, const std::vector<Vertex>& roots) {
  const std::size_t n = h.vertex_count();
  std::vector<char> fixed(n, 0);
  for (Vertex r : roots) fixed.at(r) = 1;
  std::vector<std::size_t> deg(n);
  std::set<std::pair<std::size_t, Vertex>> queue;
  for (Vertex v = 0; v < n; ++v) {
    deg[v] = h.degree(v);
    if (!fixed[v]) queue.emplace(deg[v], v);
  }
  std::vector<char> removed(n, 0);
  DegeneracyResult out;
  std::vector<Vertex> peeled;
  while (!queue.empty()) {
    auto [d, v] = *queue.begin();
    queue.erase(queue.begin());
    out.degeneracy = std::max(out.degeneracy, d);
    removed[v] = 1;
    peeled.push_back(v);
    for (Vertex u : h.neighbors(v))
      if (!removed[u]) {
        if (!fixed[u]) queue.erase({deg[u], u});
        --deg[u];
        if (!fixed[u]) queue.emplace(deg[u], u);
      }
  }
  out.ordering.assign(peeled.rbegin(), peeled.rend());
  return out;
}

ConcatenationCheck check_concatenation(const RootedGraph& h, const std::vector<Vertex>& inner_vertices,
                                       const DensityOptions& opts) {
  const Graph& g = h.graph();
  std::vector<Vertex> w = inner_vertices;
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  for (Vertex v : w)
    if (v >= g.vertex_count()) throw InvalidParameter("inner vertex out of range");
  if (!std::includes(w.begin(), w.end(), h.roots().begin(), h.roots().end()))
    throw InvalidParameter("inner subgraph must contain the roots");
  if (w.size() == h.roots().size()) throw InvalidParameter("inner subgraph needs a non-root vertex");
  if (w.size() >= g.vertex_count()) throw InvalidParameter("inner subgraph must be proper");

  Graph inner = g.induced_on(w);
  Graph inner_compact(w.size());
  std::vector<Vertex> idx(g.vertex_count(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) idx[w[i]] = static_cast<Vertex>(i);
  for (const Edge& e : inner.edges()) inner_compact.add_edge(idx[e.u], idx[e.v]);
  std::vector<Vertex> inner_roots;
  for (Vertex r : h.roots()) inner_roots.push_back(idx[r]);

  ConcatenationCheck out;
  out.whole = rooted_2_density(h, opts).value;
  out.inner = rooted_2_density(RootedGraph(inner_compact, inner_roots), opts).value;
  out.outer = rooted_2_density(RootedGraph(g.minus(inner), w), opts).value;
  out.holds = !(out.whole > std::max(out.inner, out.outer));
  return out;
}

}  // namespace cliqueforge
