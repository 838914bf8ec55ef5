#include "cliqueforge/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <functional>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace cliqueforge {

std::size_t DesignHypergraph::codegree(std::uint32_t a, std::uint32_t b) const {
  const auto& x = incidence.at(a);
  const auto& y = incidence.at(b);
  std::size_t c = 0;
  for (std::size_t i = 0, j = 0; i < x.size() && j < y.size();) {
    if (x[i] < y[j]) ++i;
    else if (y[j] < x[i]) ++j;
    else ++c, ++i, ++j;
  }
  return c;
}

std::size_t DesignHypergraph::min_degree() const {
  std::size_t m = incidence.empty() ? 0 : incidence[0].size();
  for (const auto& inc : incidence) m = std::min(m, inc.size());
  return m;
}

std::size_t DesignHypergraph::max_degree() const {
  std::size_t m = 0;
  for (const auto& inc : incidence) m = std::max(m, inc.size());
  return m;
}

std::size_t DesignHypergraph::max_codegree() const {
  std::unordered_map<std::uint64_t, std::size_t> count;
  std::size_t best = 0;
  for (const auto& h : hyperedges)
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j)
        best = std::max(best, ++count[(std::uint64_t{h[i]} << 32) | h[j]]);
  return best;
}

DesignHypergraph design_hypergraph(const Graph& g, int q) {
  CliqueIndex idx = enumerate_cliques(g, q);
  DesignHypergraph h;
  h.q = q;
  h.base = g;
  h.edges = std::move(idx.edges);
  h.cliques = std::move(idx.cliques);
  h.hyperedges = std::move(idx.edge_ids);
  for (auto& e : h.hyperedges) std::sort(e.begin(), e.end());
  h.incidence = std::move(idx.incidence);
  return h;
}

ReserveHypergraph reserve_hypergraph(const Graph& g, const std::vector<Edge>& A, const std::vector<Edge>& B, int q) {
  ReserveHypergraph r;
  r.q = q;
  r.edges = EdgeIndex(g);
  std::vector<char> side(r.edges.size(), 0);  // 1 = A, 2 = B
  for (const Edge& e : A) {
    const std::size_t id = r.edges.id(e.u, e.v);
    if (id == r.edges.size()) throw InvalidParameter("A contains a non-edge");
    side[id] = 1;
  }
  for (const Edge& e : B) {
    const std::size_t id = r.edges.id(e.u, e.v);
    if (id == r.edges.size()) throw InvalidParameter("B contains a non-edge");
    if (side[id] == 1) throw InvalidParameter("A and B overlap");
    side[id] = 2;
  }
  Graph ab(g.vertex_count());
  for (std::size_t id = 0; id < side.size(); ++id) {
    if (side[id] == 1) r.A.push_back(static_cast<std::uint32_t>(id));
    if (side[id] == 2) r.B.push_back(static_cast<std::uint32_t>(id));
    if (side[id]) ab.add_edge(r.edges.edge(id).u, r.edges.edge(id).v);
  }
  const CliqueIndex idx = enumerate_cliques(ab, q);
  for (const Clique& c : idx.cliques) {
    std::vector<std::uint32_t> a_ids, b_ids;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const auto id = static_cast<std::uint32_t>(r.edges.id(c[i], c[j]));
        (side[id] == 1 ? a_ids : b_ids).push_back(id);
      }
    if (a_ids.size() != 1) continue;
    std::sort(b_ids.begin(), b_ids.end());
    b_ids.insert(b_ids.begin(), a_ids[0]);
    r.cliques.push_back(c);
    r.hyperedges.push_back(std::move(b_ids));
  }
  return r;
}

MatchingResult random_greedy_matching(const DesignHypergraph& h, Rng& rng) {
  std::vector<std::size_t> order(h.hyperedges.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<char> used(h.edges.size(), 0);
  MatchingResult out;
  for (std::size_t k : order) {
    const auto& he = h.hyperedges[k];
    if (std::any_of(he.begin(), he.end(), [&](std::uint32_t v) { return used[v]; })) continue;
    for (std::uint32_t v : he) used[v] = 1;
    out.matching.push_back(k);
  }
  for (std::uint32_t v = 0; v < used.size(); ++v)
    if (!used[v]) out.uncovered.push_back(v);
  return out;
}

Packing matching_packing(const DesignHypergraph& h, const std::vector<std::size_t>& matching) {
  Packing p;
  p.q = h.q;
  for (std::size_t k : matching) p.cliques.push_back(h.cliques.at(k));
  return p;
}

namespace {

std::vector<Edge> clique_edges(const Clique& c) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) out.emplace_back(c[i], c[j]);
  return out;
}

enum Stage : std::uint8_t { kNibble = 0, kReserve = 1, kAbsorbed = 2 };

// Packing of a host graph with per-edge cover lookups and the uncovered list.
class PackState {
 public:
  explicit PackState(const Graph& g, int q) : g_(g), q_(q), idx_(g), cover_(idx_.size(), -1), pos_(idx_.size()) {
    words_ = (g.vertex_count() + 63) / 64;
    adj_.assign(g.vertex_count() * words_, 0);
    for (const Edge& e : idx_.edges()) {
      set_adj(e.u, e.v, true);
      pos_[idx_.id(e.u, e.v)] = uncovered_.size();
      uncovered_.push_back(static_cast<std::uint32_t>(idx_.id(e.u, e.v)));
    }
  }

  void block(const Edge& e) {
    const std::size_t id = idx_.id(e.u, e.v);
    if (cover_[id] >= 0) remove(static_cast<std::size_t>(cover_[id]));
    drop_uncovered(id);
    cover_[id] = kBlocked;
    set_adj(e.u, e.v, false);
  }

  std::size_t add(Clique c, Stage s) {
    std::sort(c.begin(), c.end());
    std::size_t id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      cliques_[id] = c;
      stage_[id] = s;
      alive_[id] = 1;
    } else {
      id = cliques_.size();
      cliques_.push_back(c);
      stage_.push_back(s);
      alive_.push_back(1);
    }
    for (const Edge& e : clique_edges(c)) {
      const std::size_t eid = idx_.id(e.u, e.v);
      if (eid == idx_.size() || cover_[eid] != -1) throw std::logic_error("clique overlaps the packing");
      cover_[eid] = static_cast<std::int64_t>(id);
      drop_uncovered(eid);
    }
    return id;
  }

  void remove(std::size_t id) {
    alive_[id] = 0;
    for (const Edge& e : clique_edges(cliques_[id])) {
      const std::size_t eid = idx_.id(e.u, e.v);
      cover_[eid] = -1;
      push_uncovered(eid);
    }
    free_.push_back(id);
  }

  // Restricts the uncovered list to target edges and the local search to allowed cliques.
  void set_targets(std::vector<char> target, std::function<bool(const std::vector<Vertex>&)> allowed) {
    target_ = std::move(target);
    allowed_ = std::move(allowed);
    uncovered_.clear();
    for (std::size_t eid = 0; eid < idx_.size(); ++eid)
      if (cover_[eid] == -1) push_uncovered(eid);
  }

  std::size_t uncovered() const { return uncovered_.size(); }
  std::size_t vertex_count() const { return g_.vertex_count(); }
  const std::vector<std::uint32_t>& uncovered_ids() const { return uncovered_; }
  const EdgeIndex& index() const { return idx_; }
  std::int64_t cover(std::size_t eid) const { return cover_[eid]; }

  // Random local search: pick an uncovered edge, complete it to a clique whose other edges are
  // uncovered or all in one clique of the packing, and swap when no more target edges are freed
  // than covered. With uphill > 0, a stuck step evicts two cliques instead once in `uphill` tries
  // and the best packing seen is restored at the end.
  void climb(Rng& rng, const PackOptions& opts, Stage label = kAbsorbed, std::uint64_t uphill = 0) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const bool guarded = !target_.empty();
    std::size_t best = uncovered_.size();
    std::vector<std::pair<Clique, Stage>> snapshot;
    if (uphill > 0) snapshot = contents();
    std::uint64_t since = 0;
    std::vector<Vertex> common, k;
    for (std::uint64_t step = 0; step < opts.climb_steps && !uncovered_.empty(); ++step) {
      if (opts.climb_seconds > 0 && (step & 1023) == 0 &&
          std::chrono::duration<double>(clock::now() - start).count() > opts.climb_seconds)
        break;
      const Edge uv = idx_.edge(uncovered_[rng.below(uncovered_.size())]);
      common_neighbours(uv.u, uv.v, common);
      if (common.size() + 2 < static_cast<std::size_t>(q_)) {
        if (++since > opts.climb_stall) break;
        continue;
      }
      std::int64_t best_cost = 3, victim = -1;
      std::array<std::int64_t, 2> kick{-1, -1};
      std::vector<Vertex> best_k, kick_k;
      const std::size_t tries = q_ == 3 ? common.size() : 12;
      const std::size_t offset = rng.below(common.size());
      std::size_t cost1_seen = 0, cost2_seen = 0;
      for (std::size_t t = 0; t < tries; ++t) {
        k = {uv.u, uv.v};
        if (q_ == 3) {
          k.push_back(common[(offset + t) % common.size()]);
        } else if (!extend(k, common, rng)) {
          continue;
        }
        if (allowed_ && !allowed_(k)) continue;
        std::array<std::int64_t, 2> other{-1, -1};
        std::int64_t cost = 0, gain = 0, shared = 0;
        for (std::size_t i = 0; i < k.size() && cost < 3; ++i)
          for (std::size_t j = i + 1; j < k.size() && cost < 3; ++j) {
            const std::size_t eid = idx_.id(k[i], k[j]);
            const std::int64_t c = cover_[eid];
            const bool m = guarded && target_[eid];
            if (c < 0) {
              gain += m;
              continue;
            }
            shared += m;
            if (c == other[0] || c == other[1]) continue;
            if (cost < 2) other[static_cast<std::size_t>(cost)] = c;
            ++cost;
          }
        if (cost == 0) {
          best_cost = 0;
          best_k = k;
          break;
        }
        if (cost == 2) {
          if (uphill > 0 && rng.below(++cost2_seen) == 0) {
            kick = other;
            kick_k = k;
          }
          continue;
        }
        if (cost != 1) continue;
        if (guarded) {
          std::int64_t lost = -shared;
          for (const Edge& e : clique_edges(cliques_[static_cast<std::size_t>(other[0])]))
            lost += target_[idx_.id(e.u, e.v)];
          if (lost > gain) continue;
        }
        // reservoir choice among the single-swap moves
        if (rng.below(++cost1_seen) == 0) {
          best_cost = 1;
          best_k = k;
          victim = other[0];
        }
      }
      if (best_cost == 1) remove(static_cast<std::size_t>(victim));
      if (best_cost <= 1) {
        add(best_k, label);
      } else if (!kick_k.empty() && rng.below(uphill) == 0) {
        remove(static_cast<std::size_t>(kick[0]));
        remove(static_cast<std::size_t>(kick[1]));
        add(kick_k, label);
      }
      if (uncovered_.size() < best) {
        best = uncovered_.size();
        if (uphill > 0) snapshot = contents();
        since = 0;
      } else if (++since > opts.climb_stall) {
        break;
      }
    }
    if (uphill > 0 && uncovered_.size() > best) {
      for (std::size_t id : alive_cliques()) remove(id);
      for (const auto& [c, st] : snapshot) add(c, st);
    }
  }

  std::vector<std::pair<Clique, Stage>> contents() const {
    std::vector<std::pair<Clique, Stage>> out;
    for (std::size_t id : alive_cliques()) out.emplace_back(cliques_[id], stage(id));
    return out;
  }

  std::vector<std::size_t> alive_cliques() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cliques_.size(); ++i)
      if (alive_[i]) out.push_back(i);
    return out;
  }
  const Clique& clique(std::size_t id) const { return cliques_[id]; }
  Stage stage(std::size_t id) const { return static_cast<Stage>(stage_[id]); }

  Packing packing() const {
    Packing p;
    p.q = q_;
    for (std::size_t id : alive_cliques()) p.cliques.push_back(cliques_[id]);
    std::sort(p.cliques.begin(), p.cliques.end());
    return p;
  }

  static constexpr std::int64_t kBlocked = -2;

 private:
  void set_adj(Vertex a, Vertex b, bool on) {
    const std::uint64_t ma = std::uint64_t{1} << (b % 64), mb = std::uint64_t{1} << (a % 64);
    if (on) {
      adj_[a * words_ + b / 64] |= ma;
      adj_[b * words_ + a / 64] |= mb;
    } else {
      adj_[a * words_ + b / 64] &= ~ma;
      adj_[b * words_ + a / 64] &= ~mb;
    }
  }
  bool adjacent(Vertex a, Vertex b) const { return adj_[a * words_ + b / 64] >> (b % 64) & 1; }

  void common_neighbours(Vertex a, Vertex b, std::vector<Vertex>& out) const {
    out.clear();
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t m = adj_[a * words_ + w] & adj_[b * words_ + w];
      while (m) {
        out.push_back(static_cast<Vertex>(w * 64 + __builtin_ctzll(m)));
        m &= m - 1;
      }
    }
  }

  bool extend(std::vector<Vertex>& k, const std::vector<Vertex>& common, Rng& rng) const {
    std::vector<Vertex> pool = common;
    while (k.size() < static_cast<std::size_t>(q_)) {
      if (pool.empty()) return false;
      const Vertex c = pool[rng.below(pool.size())];
      k.push_back(c);
      std::vector<Vertex> next;
      for (Vertex w : pool)
        if (w != c && adjacent(w, c)) next.push_back(w);
      pool = std::move(next);
    }
    return true;
  }

  static void drop(std::vector<std::uint32_t>& list, std::vector<std::size_t>& pos, std::size_t eid) {
    const std::size_t p = pos[eid];
    if (p >= list.size() || list[p] != eid) return;
    list[p] = list.back();
    pos[list[p]] = p;
    list.pop_back();
  }
  void drop_uncovered(std::size_t eid) { drop(uncovered_, pos_, eid); }
  void push_uncovered(std::size_t eid) {
    if (!target_.empty() && !target_[eid]) return;
    pos_[eid] = uncovered_.size();
    uncovered_.push_back(static_cast<std::uint32_t>(eid));
  }

  const Graph& g_;
  int q_;
  EdgeIndex idx_;
  std::vector<std::int64_t> cover_;
  std::vector<std::size_t> pos_;
  std::vector<std::uint32_t> uncovered_;
  std::vector<char> target_;  // empty: every edge
  std::function<bool(const std::vector<Vertex>&)> allowed_;
  std::vector<Clique> cliques_;
  std::vector<std::uint8_t> stage_, alive_;
  std::vector<std::size_t> free_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> adj_;
};

}  // namespace

ReserveMatchingResult matching_with_reserves(const DesignHypergraph& h1, const ReserveHypergraph& h2,
                                             const std::vector<Edge>& A, Rng& rng, std::uint64_t improve_steps) {
  ReserveMatchingResult out;
  out.nibble.q = h1.q;
  out.completion.q = h2.q;
  const MatchingResult m = random_greedy_matching(h1, rng);
  if (improve_steps == 0) {
    out.nibble = matching_packing(h1, m.matching);
  } else {
    // swap search over both hypergraphs at once, counting only the A-edges
    std::size_t n = h1.base.vertex_count();
    for (std::uint32_t id : h2.B) n = std::max<std::size_t>(n, h2.edges.edge(id).v + 1);
    Graph host(n);
    for (const Edge& e : h1.edges.edges()) host.add_edge(e.u, e.v);
    for (std::uint32_t id : h2.B) host.add_edge(h2.edges.edge(id).u, h2.edges.edge(id).v);
    PackState st(host, h1.q);
    const EdgeIndex& idx = st.index();
    std::vector<char> in_base(idx.size(), 0), in_b(idx.size(), 0), target(idx.size(), 0);
    for (const Edge& e : h1.edges.edges()) in_base[idx.id(e.u, e.v)] = 1;
    for (std::uint32_t id : h2.B) in_b[idx.id(h2.edges.edge(id).u, h2.edges.edge(id).v)] = 1;
    for (const Edge& a : A)
      if (const std::size_t id = idx.id(a.u, a.v); id < idx.size()) target[id] = 1;
    auto allowed = [&idx, &in_base, &in_b, &target](const std::vector<Vertex>& k) {
      bool base = true;
      std::size_t a = 0, b = 0;
      for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = i + 1; j < k.size(); ++j) {
          const std::size_t id = idx.id(k[i], k[j]);
          base = base && in_base[id];
          a += target[id];
          b += in_b[id];
        }
      return base || (a == 1 && a + b == k.size() * (k.size() - 1) / 2);
    };
    for (std::size_t k : m.matching) st.add(h1.cliques[k], kNibble);
    st.set_targets(target, allowed);
    PackOptions o;
    o.climb_steps = improve_steps;
    o.climb_stall = improve_steps / 4 + 1;
    st.climb(rng, o, kNibble, 30);
    for (const Clique& c : st.packing().cliques) {
      bool base = true;
      for (const Edge& e : clique_edges(c)) base = base && in_base[idx.id(e.u, e.v)];
      (base ? out.nibble : out.completion).cliques.push_back(c);
    }
  }
  std::set<Edge> covered;
  for (const Packing* p : {&out.nibble, &out.completion})
    for (const Clique& c : p->cliques)
      for (const Edge& e : clique_edges(c)) covered.insert(e);

  // reserve hyperedges grouped by their A-edge; a hyperedge dies once one of its edges is taken
  std::map<Edge, std::vector<std::size_t>> by_a;
  std::map<Edge, std::vector<std::size_t>> by_edge;
  std::vector<char> alive(h2.hyperedges.size(), 1);
  for (std::size_t k = 0; k < h2.hyperedges.size(); ++k) {
    const Edge a = h2.edges.edge(h2.hyperedges[k][0]);
    for (std::uint32_t id : h2.hyperedges[k]) {
      const Edge e = h2.edges.edge(id);
      if (covered.count(e)) alive[k] = 0;
      by_edge[e].push_back(k);
    }
    by_a[a].push_back(k);
  }
  std::map<Edge, std::size_t> count;
  std::set<std::pair<std::size_t, Edge>> queue;
  for (const Edge& a : std::set<Edge>(A.begin(), A.end())) {
    if (covered.count(a)) continue;
    std::size_t c = 0;
    if (auto it = by_a.find(a); it != by_a.end())
      for (std::size_t k : it->second) c += alive[k];
    count[a] = c;
    queue.emplace(c, a);
  }
  auto kill = [&](std::size_t k) {
    if (!alive[k]) return;
    alive[k] = 0;
    const Edge a = h2.edges.edge(h2.hyperedges[k][0]);
    auto it = count.find(a);
    if (it == count.end()) return;
    queue.erase({it->second, a});
    --it->second;
    queue.emplace(it->second, a);
  };
  while (!queue.empty()) {
    const auto [c, a] = *queue.begin();
    queue.erase(queue.begin());
    count.erase(a);
    if (c == 0) {
      out.stranded.push_back(a);
      continue;
    }
    std::vector<std::size_t> live;
    for (std::size_t k : by_a[a])
      if (alive[k]) live.push_back(k);
    const std::size_t pick = live[rng.below(live.size())];
    out.completion.cliques.push_back(h2.cliques[pick]);
    for (std::uint32_t id : h2.hyperedges[pick])
      for (std::size_t k : by_edge[h2.edges.edge(id)]) kill(k);
  }
  std::sort(out.stranded.begin(), out.stranded.end());
  out.success = out.stranded.empty();
  return out;
}

const char* to_string(FixerOutcome f) {
  switch (f) {
    case FixerOutcome::embedded: return "embedded";
    case FixerOutcome::fallback: return "fallback";
    case FixerOutcome::skipped: return "skipped";
  }
  return "?";
}

std::optional<std::vector<Vertex>> find_path_power(const Graph& g, int k, Rng& rng, std::uint64_t node_budget,
                                                   std::size_t restarts) {
  const std::size_t n = g.vertex_count();
  if (k < 1) throw InvalidParameter("path power needs k >= 1");
  if (n == 0) return std::vector<Vertex>{};
  for (Vertex v = 0; v < n; ++v)
    if (n > 1 && g.degree(v) < std::min<std::size_t>(k, n - 1)) return std::nullopt;
  const std::size_t head = std::min<std::size_t>(n, std::max(3, k));

  std::vector<Vertex> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });

  for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
    std::vector<char> in_path(n, 0);
    std::vector<std::size_t> free_deg(n);
    for (Vertex v = 0; v < n; ++v) free_deg[v] = g.degree(v);
    std::vector<Vertex> path;
    std::vector<std::vector<Vertex>> options;  // remaining candidates per depth
    std::uint64_t nodes = 0;

    auto candidates = [&]() {
      std::vector<Vertex> c;
      const std::size_t i = path.size();
      if (i == 0) {
        const std::size_t top = std::max<std::size_t>(1, std::min<std::size_t>(n, 8));
        c.assign(by_degree.begin(), by_degree.begin() + static_cast<std::ptrdiff_t>(top));
        rng.shuffle(c);
        return c;
      }
      const std::size_t back = std::min<std::size_t>(i, static_cast<std::size_t>(k));
      for (Vertex w : g.neighbors(path.back())) {
        if (in_path[w]) continue;
        bool ok = true;
        for (std::size_t b = 2; b <= back && ok; ++b) ok = g.has_edge(w, path[i - b]);
        if (ok) c.push_back(w);
      }
      rng.shuffle(c);
      // stack order: the preferred candidate goes last
      if (i < head)
        std::stable_sort(c.begin(), c.end(), [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });
      else
        std::stable_sort(c.begin(), c.end(), [&](Vertex a, Vertex b) { return free_deg[a] > free_deg[b]; });
      return c;
    };
    auto push = [&](Vertex v) {
      path.push_back(v);
      in_path[v] = 1;
      for (Vertex w : g.neighbors(v)) --free_deg[w];
    };
    auto pop = [&]() {
      const Vertex v = path.back();
      path.pop_back();
      in_path[v] = 0;
      for (Vertex w : g.neighbors(v)) ++free_deg[w];
    };

    options.push_back(candidates());
    while (!options.empty() && nodes < node_budget) {
      if (path.size() == n) return path;
      auto& opt = options.back();
      if (opt.empty()) {
        options.pop_back();
        if (!path.empty()) pop();
        continue;
      }
      const Vertex v = opt.back();
      opt.pop_back();
      ++nodes;
      push(v);
      if (path.size() == n) return path;
      options.push_back(candidates());
    }
  }
  return std::nullopt;
}

std::vector<Edge> fix_by_deletion(const Graph& g0, int q, Rng& rng) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
  Graph g = g0;
  std::vector<Edge> deleted;
  const std::size_t dm = static_cast<std::size_t>(q - 1);
  const std::size_t em = binom(static_cast<std::uint64_t>(q), 2);
  auto del = [&](Vertex a, Vertex b) {
    g.remove_edge(a, b);
    deleted.emplace_back(a, b);
  };

  // vertex residues: delete edges between bad vertices, walking through good ones when stuck
  const std::size_t cap = 4 * g.edge_count() + 16;
  std::optional<Vertex> walk;
  for (std::size_t step = 0; step < cap; ++step) {
    Vertex v;
    if (walk && g.degree(*walk) % dm != 0) {
      v = *walk;
    } else {
      std::vector<Vertex> bad;
      for (Vertex x = 0; x < g.vertex_count(); ++x)
        if (g.degree(x) % dm != 0) bad.push_back(x);
      if (bad.empty()) break;
      v = bad[rng.below(bad.size())];
    }
    walk.reset();
    const auto nb = g.neighbors(v);
    if (nb.empty()) break;
    std::vector<Vertex> bad_nb;
    for (Vertex u : nb)
      if (g.degree(u) % dm != 0) bad_nb.push_back(u);
    if (!bad_nb.empty()) {
      del(v, bad_nb[rng.below(bad_nb.size())]);
    } else {
      const Vertex u = nb[rng.below(nb.size())];
      del(v, u);
      walk = u;
    }
  }
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    if (g.degree(x) % dm != 0) return deleted;

  // edge residue: remove subgraphs whose degrees are all multiples of q-1
  for (std::size_t attempt = 0; attempt < 2000 && g.edge_count() % em != 0; ++attempt) {
    if (g.edge_count() == 0) break;
    if (q == 3) {
      // a 4-cycle a-b-d-c (removes 1 mod 3) or a 5-cycle (removes 2)
      const std::size_t want = g.edge_count() % 3;
      const Vertex a = static_cast<Vertex>(rng.below(g.vertex_count()));
      const auto na = g.neighbors(a);
      if (na.size() < 2) continue;
      const Vertex b = na[rng.below(na.size())], c = na[rng.below(na.size())];
      if (b == c) continue;
      if (want == 1) {
        for (Vertex d : g.neighbors(b))
          if (d != a && d != c && g.has_edge(d, c)) {
            del(a, b), del(b, d), del(d, c), del(c, a);
            break;
          }
      } else {
        bool done = false;
        for (Vertex d : g.neighbors(b)) {
          if (done) break;
          if (d == a || d == c) continue;
          for (Vertex e : g.neighbors(d))
            if (e != a && e != b && e != c && g.has_edge(e, c)) {
              del(a, b), del(b, d), del(d, e), del(e, c), del(c, a);
              done = true;
              break;
            }
        }
      }
    } else {
      // K_{q-1,q-1}: grow one side inside a shrinking common neighbourhood
      std::vector<Vertex> left{static_cast<Vertex>(rng.below(g.vertex_count()))};
      std::vector<Vertex> common(g.neighbors(left[0]).begin(), g.neighbors(left[0]).end());
      for (std::size_t tries = 0; left.size() < dm && tries < 64; ++tries) {
        const Vertex y = static_cast<Vertex>(rng.below(g.vertex_count()));
        if (std::find(left.begin(), left.end(), y) != left.end() ||
            std::find(common.begin(), common.end(), y) != common.end())
          continue;
        std::vector<Vertex> next;
        for (Vertex w : common)
          if (g.has_edge(w, y)) next.push_back(w);
        if (next.size() < dm) continue;
        left.push_back(y);
        common = std::move(next);
      }
      if (left.size() < dm || common.size() < dm) continue;
      rng.shuffle(common);
      for (Vertex x : left)
        for (std::size_t i = 0; i < dm; ++i) del(x, common[i]);
    }
  }
  return deleted;
}

namespace {

// Releases cliques around the uncovered edges and re-decomposes them together exactly.
void absorb(PackState& st, int q, const PackOptions& opts) {
  if (st.uncovered() == 0 || st.uncovered() > opts.absorb_cap) return;
  Graph leftover;
  std::set<Vertex> touched;
  std::vector<Edge> left_edges;
  for (std::uint32_t id : st.uncovered_ids()) {
    left_edges.push_back(st.index().edge(id));
    touched.insert(left_edges.back().u);
    touched.insert(left_edges.back().v);
  }
  leftover = Graph(st.vertex_count());
  for (const Edge& e : left_edges) leftover.add_edge(e.u, e.v);
  if (!is_kq_divisible(leftover, q)) return;
  for (std::size_t round = 1; round <= 3; ++round) {
    std::vector<std::pair<std::size_t, std::size_t>> scored;  // (-touches, id)
    for (std::size_t id : st.alive_cliques()) {
      std::size_t t = 0;
      for (Vertex v : st.clique(id)) t += touched.count(v);
      if (t > 0) scored.emplace_back(static_cast<std::size_t>(q) + 1 - t, id);
    }
    std::sort(scored.begin(), scored.end());
    const std::size_t take = std::min(scored.size(), opts.absorb_cliques * round);
    Graph region = leftover;
    std::vector<std::size_t> released;
    for (std::size_t i = 0; i < take; ++i) {
      released.push_back(scored[i].second);
      for (const Edge& e : clique_edges(st.clique(scored[i].second))) region.add_edge(e.u, e.v);
    }
    const DecompositionResult r = exact_decomposition(region, q, opts.absorb_budget);
    if (r.status != SolveStatus::found) continue;
    for (std::size_t id : released) st.remove(id);
    for (const Clique& c : r.packing.cliques) st.add(c, kAbsorbed);
    return;
  }
}

}  // namespace

std::string PackReport::json(bool with_time) const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["params"] = {{"model", model},
                 {"n", n},
                 {"p", p ? nlohmann::ordered_json(p->str()) : nlohmann::ordered_json(nullptr)},
                 {"d", d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr)},
                 {"q", q},
                 {"seed", seed}};
  j["edges"] = edges;
  j["input_divisible"] = input_divisible;
  j["fixer"] = to_string(fixer);
  j["divisible_after_fix"] = divisible_after_fix;
  j["stages"] = {{"fixer_deleted", stages.fixer_deleted},
                 {"nibble", stages.nibble},
                 {"reserve", stages.reserve},
                 {"absorbed", stages.absorbed},
                 {"residual", stages.residual}};
  j["leave"] = leave;
  j["optimal_leave"] = optimal_leave;
  j["valid"] = valid;
  if (with_time) j["ms"] = static_cast<std::int64_t>(ms);
  return j.dump();
}

PackResult pack_graph(const Graph& g, int q, std::uint64_t seed, const PackOptions& opts) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
  const auto start = std::chrono::steady_clock::now();
  const Seed s(seed);
  const std::size_t n = g.vertex_count();
  PackResult out;
  PackReport& rep = out.report;
  rep.model = "graph";
  rep.n = n;
  rep.q = q;
  rep.seed = seed;
  rep.edges = g.edge_count();
  rep.input_divisible = is_kq_divisible(g, q);
  rep.optimal_leave = optimal_leave_number(g, q);

  // (ii) fixer
  std::optional<EmbeddedFixer> fixer;
  if (opts.use_fixer) {
    rep.fixer = FixerOutcome::fallback;
    try {
      Rng path_rng = s.stream("path");
      if (auto order = find_path_power(g, q - 2, path_rng, opts.path_nodes, opts.path_restarts)) {
        const FixerBlueprint bp = simplify_fixer(build_fixer_blueprint(q, n));
        EmbedOptions eo;
        eo.seed = s.derive("embed");
        fixer = embed_fixer(bp, g, *order, eo);
        if (fixer) rep.fixer = FixerOutcome::embedded;
      }
    } catch (const std::invalid_argument&) {
      fixer.reset();
    }
  }
  const Graph f_graph = fixer ? fixer->graph : Graph(n);

  // (iii) reserve slice, (iv) nibble, (v) reserve cover
  const Graph rest = g.minus(f_graph);
  auto [x_graph, a_graph] = slice(rest, opts.reserve, Probability(1, 1), s.derive("reserve"));
  const DesignHypergraph h1 = design_hypergraph(a_graph, q);
  const std::vector<Edge> a_edges = a_graph.edges();
  const ReserveHypergraph h2 = reserve_hypergraph(rest, a_edges, x_graph.edges(), q);
  Rng nibble_rng = s.stream("nibble");
  const ReserveMatchingResult mr = matching_with_reserves(h1, h2, a_edges, nibble_rng);

  PackState st(g, q);
  for (const Clique& c : mr.nibble.cliques) st.add(c, kNibble);
  for (const Clique& c : mr.completion.cliques) st.add(c, kReserve);

  // (vi) fixer application on what is left
  std::vector<Edge> deleted;
  if (opts.use_fixer) {
    Graph left(n);
    for (std::uint32_t id : st.uncovered_ids()) left.add_edge(st.index().edge(id).u, st.index().edge(id).v);
    if (fixer) {
      deleted = apply_fixer(left, *fixer, q).deleted;
    } else {
      Rng fix_rng = s.stream("fix");
      deleted = fix_by_deletion(left, q, fix_rng);
    }
    for (const Edge& e : deleted) st.block(e);
  }
  {
    Graph kept = g;
    for (const Edge& e : deleted) kept.remove_edge(e.u, e.v);
    rep.divisible_after_fix = is_kq_divisible(kept, q);
  }

  // (vii) local search and absorption
  Rng climb_rng = s.stream("climb");
  st.climb(climb_rng, opts, kNibble, opts.climb_kick);
  if (opts.absorb) absorb(st, q, opts);

  out.graph = g;
  out.packing = st.packing();
  rep.stages.fixer_deleted = deleted.size();
  const std::size_t per = binom(static_cast<std::uint64_t>(q), 2);
  for (std::size_t id : st.alive_cliques()) {
    switch (st.stage(id)) {
      case kNibble: rep.stages.nibble += per; break;
      case kReserve: rep.stages.reserve += per; break;
      case kAbsorbed: rep.stages.absorbed += per; break;
    }
  }
  rep.stages.residual = st.uncovered();
  rep.leave = rep.stages.fixer_deleted + rep.stages.residual;
  if (rep.stages.sum() != g.edge_count()) throw std::logic_error("stage tallies do not add up");
  const PackingReport pr = verify_packing(g, out.packing);
  rep.valid = pr.valid && pr.covered_edge_count + rep.leave == g.edge_count() && audit_packing(g, out.packing);
  rep.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

PackResult pack_gnp(std::size_t n, const Probability& p, int q, std::uint64_t seed, const PackOptions& opts) {
  const Graph g = gnp(n, p, seed);
  PackResult r = pack_graph(g, q, seed, opts);
  r.report.model = "gnp";
  r.report.p = p;
  return r;
}

PackResult pack_gnd(std::size_t n, std::size_t d, int q, std::uint64_t seed, const PackOptions& opts) {
  const Graph g = gnd(n, d, seed);
  PackResult r = pack_graph(g, q, seed, opts);
  r.report.model = "gnd";
  r.report.d = d;
  return r;
}

std::string bench(const BenchConfig& cfg) {
  struct Task {
    std::size_t row, trial;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  const Seed master(cfg.master_seed);
  for (std::size_t r = 0; r < cfg.rows.size(); ++r) {
    const BenchRow& row = cfg.rows[r];
    if (row.model == "gnp" ? !row.p : row.model == "gnd" ? !row.d : true)
      throw InvalidParameter("bench row needs model gnp with p or gnd with d");
    for (std::size_t t = 0; t < cfg.trials; ++t) tasks.push_back({r, t, master.derive("bench", (r << 32) | t)});
  }
  std::vector<PackReport> reports(tasks.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      const BenchRow& row = cfg.rows[t.row];
      try {
        reports[i] = row.model == "gnp" ? pack_gnp(row.n, *row.p, row.q, t.seed, cfg.options).report
                                        : pack_gnd(row.n, *row.d, row.q, t.seed, cfg.options).report;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  nlohmann::ordered_json j;
  j["version"] = 1;
  j["master_seed"] = cfg.master_seed;
  j["trials"] = cfg.trials;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < cfg.rows.size(); ++r) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    std::size_t lo = SIZE_MAX, hi = 0, sum = 0;
    double ms = 0;
    bool all_valid = true;
    std::optional<double> min_ratio;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].row != r) continue;
      const PackReport& rep = reports[i];
      runs.push_back(nlohmann::ordered_json::parse(rep.json(cfg.with_time)));
      lo = std::min(lo, rep.leave);
      hi = std::max(hi, rep.leave);
      sum += rep.leave;
      ms += rep.ms;
      all_valid = all_valid && rep.valid;
      if (rep.optimal_leave > 0) {
        const double ratio = static_cast<double>(rep.leave) / static_cast<double>(rep.optimal_leave);
        min_ratio = min_ratio ? std::min(*min_ratio, ratio) : ratio;
      }
    }
    const BenchRow& row = cfg.rows[r];
    nlohmann::ordered_json agg;
    agg["model"] = row.model;
    agg["n"] = row.n;
    agg["p"] = row.p ? nlohmann::ordered_json(row.p->str()) : nlohmann::ordered_json(nullptr);
    agg["d"] = row.d ? nlohmann::ordered_json(*row.d) : nlohmann::ordered_json(nullptr);
    agg["q"] = row.q;
    agg["mean_leave"] = cfg.trials ? static_cast<double>(sum) / static_cast<double>(cfg.trials) : 0.0;
    agg["min_leave"] = cfg.trials ? lo : 0;
    agg["max_leave"] = hi;
    agg["min_ratio_to_optimal"] = min_ratio ? nlohmann::ordered_json(*min_ratio) : nlohmann::ordered_json(nullptr);
    agg["all_valid"] = all_valid;
    if (cfg.with_time) agg["mean_ms"] = cfg.trials ? static_cast<std::int64_t>(ms / static_cast<double>(cfg.trials)) : 0;
    rows.push_back({{"aggregate", agg}, {"runs", runs}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace cliqueforge
