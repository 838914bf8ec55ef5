#include "cliqueforge/decomp.hpp"

#include <algorithm>
#include <chrono>

namespace cliqueforge {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::found:
      return "found";
    case SolveStatus::none:
      return "none";
    case SolveStatus::budget_exceeded:
      return "budget-exceeded";
  }
  return "?";
}

CliqueIndex enumerate_cliques(const Graph& g, int q) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
  CliqueIndex idx;
  idx.q = q;
  idx.edges = EdgeIndex(g);
  idx.incidence.assign(idx.edges.size(), {});
  Clique current;
  auto extend = [&](auto&& self, const std::vector<Vertex>& cand) -> void {
    if (static_cast<int>(current.size()) == q) {
      idx.cliques.push_back(current);
      return;
    }
    const std::size_t need = static_cast<std::size_t>(q) - current.size();
    for (std::size_t i = 0; i + need <= cand.size(); ++i) {
      Vertex v = cand[i];
      std::vector<Vertex> next;
      auto nv = g.neighbors(v);
      std::set_intersection(cand.begin() + static_cast<std::ptrdiff_t>(i) + 1, cand.end(), nv.begin(), nv.end(),
                            std::back_inserter(next));
      if (next.size() + 1 < need) continue;
      current.push_back(v);
      self(self, next);
      current.pop_back();
    }
  };
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::vector<Vertex> cand;
    for (Vertex u : g.neighbors(v))
      if (u > v) cand.push_back(u);
    if (cand.size() + 1 < static_cast<std::size_t>(q)) continue;
    current = {v};
    extend(extend, cand);
  }
  idx.edge_ids.resize(idx.cliques.size());
  for (std::uint32_t c = 0; c < idx.cliques.size(); ++c) {
    const Clique& k = idx.cliques[c];
    for (std::size_t a = 0; a < k.size(); ++a)
      for (std::size_t b = a + 1; b < k.size(); ++b) {
        auto id = static_cast<std::uint32_t>(idx.edges.id(k[a], k[b]));
        idx.edge_ids[c].push_back(id);
        idx.incidence[id].push_back(c);
      }
  }
  return idx;
}

namespace {

// Edge-decided / clique-blocked bookkeeping shared by both searches.
class CoverState {
 public:
  explicit CoverState(const CliqueIndex& idx)
      : idx_(idx), decided_(idx.edges.size(), 0), blocked_(idx.cliques.size(), 0), avail_(idx.edges.size()) {
    for (std::size_t e = 0; e < avail_.size(); ++e) avail_[e] = static_cast<std::uint32_t>(idx.incidence[e].size());
  }

  void decide(std::uint32_t e) {
    decided_[e] = 1;
    for (std::uint32_t c : idx_.incidence[e])
      if (blocked_[c]++ == 0)
        for (std::uint32_t f : idx_.edge_ids[c]) --avail_[f];
  }

  void undecide(std::uint32_t e) {
    const auto& inc = idx_.incidence[e];
    for (auto it = inc.rbegin(); it != inc.rend(); ++it)
      if (--blocked_[*it] == 0)
        for (std::uint32_t f : idx_.edge_ids[*it]) ++avail_[f];
    decided_[e] = 0;
  }

  void select(std::uint32_t c) {
    for (std::uint32_t e : idx_.edge_ids[c]) decide(e);
  }

  void unselect(std::uint32_t c) {
    const auto& ids = idx_.edge_ids[c];
    for (auto it = ids.rbegin(); it != ids.rend(); ++it) undecide(*it);
  }

  bool decided(std::uint32_t e) const { return decided_[e] != 0; }
  bool usable(std::uint32_t c) const { return blocked_[c] == 0; }
  std::uint32_t avail(std::uint32_t e) const { return avail_[e]; }

 private:
  const CliqueIndex& idx_;
  std::vector<char> decided_;
  std::vector<std::uint32_t> blocked_;
  std::vector<std::uint32_t> avail_;
};

class BudgetClock {
 public:
  explicit BudgetClock(const SolveBudget& b) : budget_(b), start_(std::chrono::steady_clock::now()) {}

  // Counts one node; false once the budget is spent.
  bool tick() {
    ++nodes_;
    if (nodes_ > budget_.max_nodes) return false;
    if ((nodes_ & 4095) == 0) {
      std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > budget_.time_cap) exhausted_ = true;
    }
    return !exhausted_;
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  SolveBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

DecompositionResult exact_decomposition(const Graph& g, int q, const SolveBudget& budget) {
  DecompositionResult out;
  out.packing.q = q;
  if (!is_kq_divisible(g, q)) return out;
  CliqueIndex idx = enumerate_cliques(g, q);
  CoverState state(idx);
  BudgetClock clock(budget);
  std::vector<std::uint32_t> chosen;
  std::size_t remaining = idx.edges.size();
  bool out_of_budget = false;

  auto search = [&](auto&& self) -> bool {
    if (remaining == 0) return true;
    if (!clock.tick()) {
      out_of_budget = true;
      return false;
    }
    std::uint32_t best = 0, best_count = UINT32_MAX;
    for (std::uint32_t e = 0; e < idx.edges.size(); ++e)
      if (!state.decided(e) && state.avail(e) < best_count) {
        best = e;
        best_count = state.avail(e);
        if (best_count == 0) return false;
      }
    for (std::uint32_t c : idx.incidence[best]) {
      if (!state.usable(c)) continue;
      state.select(c);
      chosen.push_back(c);
      remaining -= idx.edge_ids[c].size();
      if (self(self)) return true;
      remaining += idx.edge_ids[c].size();
      chosen.pop_back();
      state.unselect(c);
      if (out_of_budget) return false;
    }
    return false;
  };

  bool ok = search(search);
  out.nodes = clock.nodes();
  if (ok) {
    out.status = SolveStatus::found;
    for (std::uint32_t c : chosen) out.packing.cliques.push_back(idx.cliques[c]);
    std::sort(out.packing.cliques.begin(), out.packing.cliques.end());
    audit_packing(g, out.packing);
  } else if (out_of_budget) {
    out.status = SolveStatus::budget_exceeded;
  }
  return out;
}

MinLeaveResult min_leave_packing(const Graph& g, int q, const SolveBudget& budget) {
  CliqueIndex idx = enumerate_cliques(g, q);
  CoverState state(idx);
  BudgetClock clock(budget);
  const std::size_t m = idx.edges.size();
  const std::uint64_t mod_e = binom(q, 2);
  const std::uint64_t target = optimal_leave_number(g, q);

  std::vector<std::uint32_t> chosen, best_chosen;
  std::size_t best_leave = m;
  bool out_of_budget = false;
  std::vector<std::uint64_t> deg(g.vertex_count());

  // leave so far + edges with no usable clique + optimal leave of the rest
  auto lower_bound = [&](std::size_t leave) {
    std::fill(deg.begin(), deg.end(), 0);
    std::size_t forced = 0, rest = 0;
    for (std::uint32_t e = 0; e < m; ++e) {
      if (state.decided(e)) continue;
      if (state.avail(e) == 0) {
        ++forced;
        continue;
      }
      ++rest;
      ++deg[idx.edges.edge(e).u];
      ++deg[idx.edges.edge(e).v];
    }
    std::uint64_t sum = 0;
    for (auto d : deg) sum += d % static_cast<std::uint64_t>(q - 1);
    std::uint64_t k = (sum + 1) / 2;
    while (k % mod_e != rest % mod_e) ++k;
    return leave + forced + k;
  };

  auto search = [&](auto&& self, std::uint32_t from, std::size_t leave) -> void {
    if (best_leave == target) return;
    if (!clock.tick()) {
      out_of_budget = true;
      return;
    }
    while (from < m && state.decided(from)) ++from;
    if (from == m) {
      if (leave < best_leave) {
        best_leave = leave;
        best_chosen = chosen;
      }
      return;
    }
    if (lower_bound(leave) >= best_leave) return;
    for (std::uint32_t c : idx.incidence[from]) {
      if (!state.usable(c)) continue;
      state.select(c);
      chosen.push_back(c);
      self(self, from + 1, leave);
      chosen.pop_back();
      state.unselect(c);
      if (out_of_budget) return;
    }
    state.decide(from);
    self(self, from + 1, leave + 1);
    state.undecide(from);
  };

  search(search, 0, 0);
  MinLeaveResult out;
  out.packing.q = q;
  for (std::uint32_t c : best_chosen) out.packing.cliques.push_back(idx.cliques[c]);
  std::sort(out.packing.cliques.begin(), out.packing.cliques.end());
  out.leave = best_leave;
  out.optimal = !out_of_budget;
  out.nodes = clock.nodes();
  audit_packing(g, out.packing);
  return out;
}

namespace {

std::vector<Vertex> vertices_of(const Graph& g) {
  std::vector<Vertex> vs;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 0) vs.push_back(v);
  return vs;
}

void check_certificate(const Graph& target, const Packing& p, int q, const std::string& name, BundleReport& r) {
  if (p.q != q) r.violations.push_back(name + ": clique order " + std::to_string(p.q) + " differs from q");
  auto rep = verify_packing(target, p);
  for (const auto& v : rep.violations) r.violations.push_back(name + ": " + v);
  if (rep.leave.edge_count() > 0) {
    std::string missing = name + ": " + std::to_string(rep.leave.edge_count()) + " uncovered edges, first";
    const Edge e = rep.leave.edges().front();
    r.violations.push_back(missing + " " + std::to_string(e.u) + " " + std::to_string(e.v));
  }
  if (rep.valid && rep.leave.edge_count() == 0) audit_packing(target, p);
}

}  // namespace

BundleReport verify_transformer(const TransformerBundle& b) {
  BundleReport r;
  const Graph& t = b.T.graph();
  std::vector<Vertex> roots = vertices_of(b.L);
  auto lp = vertices_of(b.L_prime);
  roots.insert(roots.end(), lp.begin(), lp.end());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (Vertex v : roots)
    if (v >= t.vertex_count()) r.violations.push_back("root outside T");
  if (r.violations.empty() && !t.is_independent(roots)) r.violations.push_back("V(L) + V(L') not independent in T");
  if (r.violations.empty()) {
    check_certificate(t.united(b.L), b.decomp_TL, b.q, "T+L", r);
    check_certificate(t.united(b.L_prime), b.decomp_TL_prime, b.q, "T+L'", r);
  }
  r.valid = r.violations.empty();
  return r;
}

BundleReport verify_absorber(const AbsorberBundle& b) {
  BundleReport r;
  const Graph& a = b.A.graph();
  auto roots = vertices_of(b.L);
  for (Vertex v : roots)
    if (v >= a.vertex_count()) r.violations.push_back("L vertex outside A");
  if (r.violations.empty() && !a.is_independent(roots)) r.violations.push_back("V(L) not independent in A");
  if (r.violations.empty()) {
    check_certificate(a, b.decomp_A, b.q, "A", r);
    check_certificate(a.united(b.L), b.decomp_LA, b.q, "L+A", r);
  }
  r.valid = r.violations.empty();
  return r;
}

}  // namespace cliqueforge
