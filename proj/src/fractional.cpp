#include "cliqueforge/fractional.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cliqueforge/decomp.hpp"

namespace cliqueforge {

mpq_class CliqueWeighting::edge_weight(const Edge& e) const {
  mpq_class total = 0;
  for (const auto& [c, w] : weights)
    if (std::binary_search(c.begin(), c.end(), e.u) && std::binary_search(c.begin(), c.end(), e.v)) total += w;
  return total;
}

std::map<Edge, mpq_class> CliqueWeighting::edge_weights() const {
  std::map<Edge, mpq_class> out;
  for (const auto& [c, w] : weights) {
    if (w == 0) continue;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) out[Edge(c[i], c[j])] += w;
  }
  return out;
}

namespace {

std::vector<std::uint32_t> subsets_of_size(int n, int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m)
    if (__builtin_popcount(m) == k) out.push_back(m);
  return out;
}

mpq_class factorial(int k) {
  mpq_class f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Gadget on positions 0..q+r-1 with e = {0..r-1}, keyed by q-subset mask.
struct GadgetTemplate {
  std::unordered_map<std::uint32_t, mpq_class> psi;
  mpq_class max_abs;
  bool within_bound = false;
};

GadgetTemplate solve_template(int q, int r) {
  const int n = q + r;
  const auto rows = subsets_of_size(n, r);
  const auto cols = subsets_of_size(n, q);
  const std::uint32_t target = (std::uint32_t{1} << r) - 1;
  const std::size_t m = rows.size();

  // min-norm: x = A^T y with (A A^T) y = b
  std::vector<std::vector<mpq_class>> M(m, std::vector<mpq_class>(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const int u = __builtin_popcount(rows[i] | rows[k]);
      M[i][k] = u > q ? 0 : static_cast<long>(binom(n - u, q - u));
    }
    M[i][m] = rows[i] == target ? 1 : 0;
  }
  std::vector<int> pivot_of_col(m, -1);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m && rank < m; ++c) {
    std::size_t p = rank;
    while (p < m && M[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(M[p], M[rank]);
    const mpq_class inv = 1 / M[rank][c];
    for (std::size_t k = c; k <= m; ++k) M[rank][k] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == rank || M[i][c] == 0) continue;
      const mpq_class f = M[i][c];
      for (std::size_t k = c; k <= m; ++k) M[i][k] -= f * M[rank][k];
    }
    pivot_of_col[c] = static_cast<int>(rank);
    ++rank;
  }
  std::vector<mpq_class> y(m, 0);
  for (std::size_t c = 0; c < m; ++c)
    if (pivot_of_col[c] >= 0) y[c] = M[pivot_of_col[c]][m];

  GadgetTemplate t;
  for (std::uint32_t h : cols) {
    mpq_class x = 0;
    for (std::size_t i = 0; i < m; ++i)
      if ((rows[i] & h) == rows[i]) x += y[i];
    t.psi[h] = x;
  }
  for (std::size_t i = 0; i < m; ++i) {
    mpq_class s = 0;
    for (std::uint32_t h : cols)
      if ((rows[i] & h) == rows[i]) s += t.psi[h];
    if (s != (rows[i] == target ? 1 : 0)) throw std::logic_error("edge gadget system is singular");
  }
  t.within_bound = true;
  for (std::uint32_t h : cols) {
    const mpq_class a = abs(t.psi[h]);
    if (a > t.max_abs) t.max_abs = a;
    const int j = __builtin_popcount(h & target);
    const mpq_class bound = mpq_class(static_cast<long>(1L << (r - j))) * factorial(r - j) /
                            static_cast<long>(binom(q - r + j, j));
    if (a > bound) t.within_bound = false;
  }
  return t;
}

const GadgetTemplate& gadget_template(int q, int r) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, GadgetTemplate> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({q, r});
  if (it == cache.end()) it = cache.emplace(std::pair{q, r}, solve_template(q, r)).first;
  return it->second;
}

void check_clique(const Graph& g, const Clique& c, std::size_t size, const char* what) {
  if (c.size() != size) throw InvalidParameter(std::string(what) + " has the wrong size");
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] >= g.vertex_count() || c[j] >= g.vertex_count() || !g.has_edge(c[i], c[j]))
        throw InvalidParameter(std::string(what) + " is not a clique of the graph");
}

Clique sorted(Clique c) {
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace

EdgeGadget edge_gadget(int q, int r, const std::vector<Vertex>& e, const std::vector<Vertex>& J) {
  if (r < 1 || q <= r) throw InvalidParameter("edge gadget needs q > r >= 1");
  if (q + r > 20) throw InvalidParameter("edge gadget too large");
  if (e.size() != static_cast<std::size_t>(r) || J.size() != static_cast<std::size_t>(q))
    throw InvalidParameter("edge gadget needs |e| = r and |J| = q");
  std::vector<Vertex> all(e);
  all.insert(all.end(), J.begin(), J.end());
  if (std::set<Vertex>(all.begin(), all.end()).size() != all.size())
    throw InvalidParameter("e and J must be disjoint sets");

  const GadgetTemplate& t = gadget_template(q, r);
  EdgeGadget g;
  g.q = q;
  g.r = r;
  g.e = sorted(e);
  g.J = sorted(J);
  g.max_abs = t.max_abs;
  g.within_bound = t.within_bound;
  std::vector<Vertex> labels(g.e);
  labels.insert(labels.end(), g.J.begin(), g.J.end());
  for (const auto& [mask, value] : t.psi) {
    Clique h;
    for (int i = 0; i < q + r; ++i)
      if (mask >> i & 1) h.push_back(labels[i]);
    g.psi[sorted(h)] = value;
  }
  return g;
}

bool gadget_property_holds(const EdgeGadget& g) {
  std::vector<Vertex> all(g.e);
  all.insert(all.end(), g.J.begin(), g.J.end());
  std::sort(all.begin(), all.end());
  const int n = static_cast<int>(all.size());
  if (g.psi.size() != binom(n, g.q)) return false;
  for (std::uint32_t m : subsets_of_size(n, g.r)) {
    std::vector<Vertex> rs;
    for (int i = 0; i < n; ++i)
      if (m >> i & 1) rs.push_back(all[i]);
    mpq_class s = 0;
    for (const auto& [h, v] : g.psi)
      if (std::includes(h.begin(), h.end(), rs.begin(), rs.end())) s += v;
    if (s != (rs == g.e ? 1 : 0)) return false;
  }
  return true;
}

BoostResult boost(const Graph& g, int q, const std::vector<Clique>& H, const std::vector<Clique>& Q,
                  const std::map<Edge, mpq_class>& phi, const mpq_class& d_in) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
  mpq_class d = d_in;
  d.canonicalize();
  if (d <= 0) throw InvalidParameter("d must be positive");
  const EdgeIndex edges(g);
  const std::size_t qs = static_cast<std::size_t>(q);

  std::map<Clique, std::size_t> hid;
  std::vector<Clique> hs;
  for (const Clique& c0 : H) {
    Clique c = sorted(c0);
    check_clique(g, c, qs, "member of H");
    if (hid.emplace(c, hs.size()).second) hs.push_back(std::move(c));
  }
  std::vector<std::uint64_t> h_deg(edges.size(), 0), q_deg(edges.size(), 0);
  for (const Clique& c : hs)
    for (std::size_t i = 0; i < qs; ++i)
      for (std::size_t j = i + 1; j < qs; ++j) ++h_deg[edges.id(c[i], c[j])];

  // per member of Q: ids of Q minus {a, b}, indexed by the removed position pair
  const std::size_t big = qs + 2;
  std::vector<std::pair<std::size_t, std::size_t>> removed;
  for (std::size_t a = 0; a < big; ++a)
    for (std::size_t b = a + 1; b < big; ++b) removed.emplace_back(a, b);
  std::vector<Clique> qs_sorted;
  std::vector<std::vector<std::size_t>> sub_ids;
  std::vector<std::uint64_t> q_of_r(hs.size(), 0);
  for (const Clique& c0 : Q) {
    Clique c = sorted(c0);
    check_clique(g, c, big, "member of Q");
    std::vector<std::size_t> ids;
    for (auto [a, b] : removed) {
      Clique h;
      for (std::size_t k = 0; k < big; ++k)
        if (k != a && k != b) h.push_back(c[k]);
      auto it = hid.find(h);
      if (it == hid.end()) throw InvalidParameter("a q-subset of a member of Q is not in H");
      ids.push_back(it->second);
      ++q_of_r[it->second];
    }
    for (std::size_t i = 0; i < big; ++i)
      for (std::size_t j = i + 1; j < big; ++j) ++q_deg[edges.id(c[i], c[j])];
    qs_sorted.push_back(std::move(c));
    sub_ids.push_back(std::move(ids));
  }
  const std::uint64_t max_q_of_r = q_of_r.empty() ? 0 : *std::max_element(q_of_r.begin(), q_of_r.end());

  BoostResult out;
  std::vector<mpq_class> target(edges.size()), c_e(edges.size());
  for (std::size_t id = 0; id < edges.size(); ++id) {
    const Edge& e = edges.edge(id);
    auto it = phi.find(e);
    target[id] = it == phi.end() ? mpq_class(1) : it->second;
    target[id].canonicalize();
    if (q_deg[id] == 0)
      throw CannotBoost(e, "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + " lies in no member of Q");
    c_e[id] = (d * target[id] - static_cast<long>(h_deg[id])) / static_cast<long>(q_deg[id]);
    c_e[id].canonicalize();
    if (abs(c_e[id]) > out.max_correction) out.max_correction = abs(c_e[id]);
  }
  out.alpha_condition = out.max_correction * static_cast<long>(max_q_of_r);

  const GadgetTemplate& t = gadget_template(q, 2);
  std::vector<mpq_class> acc(hs.size(), 0);
  for (std::size_t k = 0; k < qs_sorted.size(); ++k) {
    const Clique& c = qs_sorted[k];
    for (std::size_t i = 0; i < big; ++i)
      for (std::size_t j = i + 1; j < big; ++j) {
        const mpq_class& ce = c_e[edges.id(c[i], c[j])];
        if (ce == 0) continue;
        // relabel: i -> 0, j -> 1, the rest -> 2.. in order
        std::vector<int> pos(big);
        int next = 2;
        for (std::size_t v = 0; v < big; ++v) pos[v] = v == i ? 0 : v == j ? 1 : next++;
        for (std::size_t s = 0; s < removed.size(); ++s) {
          const std::uint32_t mask = ((std::uint32_t{1} << big) - 1) & ~(std::uint32_t{1} << pos[removed[s].first]) &
                                     ~(std::uint32_t{1} << pos[removed[s].second]);
          const mpq_class& val = t.psi.at(mask);
          if (val != 0) acc[sub_ids[k][s]] += ce * val;
        }
      }
  }

  out.weighting.q = q;
  out.weights_in_range = true;
  std::vector<mpq_class> got(edges.size(), 0);
  const mpq_class lo = mpq_class(1, 2) / d, hi = mpq_class(3, 2) / d;
  for (std::size_t h = 0; h < hs.size(); ++h) {
    mpq_class w = (1 + acc[h]) / d;
    if (abs(acc[h]) > out.max_deviation) out.max_deviation = abs(acc[h]);
    if (w < lo || w > hi) out.weights_in_range = false;
    const Clique& c = hs[h];
    for (std::size_t i = 0; i < qs; ++i)
      for (std::size_t j = i + 1; j < qs; ++j) got[edges.id(c[i], c[j])] += w;
    if (w != 0) out.weighting.weights.emplace(c, std::move(w));
  }
  for (std::size_t id = 0; id < edges.size(); ++id)
    if (got[id] != target[id]) throw std::logic_error("boost identity failed on an edge");
  return out;
}

BoostResult fractional_kq_decomposition(const Graph& g, int q) {
  if (q < 3) throw InvalidParameter("q must be at least 3");
  const CliqueIndex h = enumerate_cliques(g, q);
  if (g.edge_count() == 0) {
    BoostResult r;
    r.weighting.q = q;
    r.weights_in_range = true;
    return r;
  }
  const CliqueIndex big = enumerate_cliques(g, q + 2);
  mpq_class d(static_cast<long>(binom(q, 2) * h.cliques.size()), static_cast<long>(g.edge_count()));
  d.canonicalize();
  if (d == 0) throw CannotBoost(g.edges().front(), "graph has no q-cliques");
  return boost(g, q, h.cliques, big.cliques, {}, d);
}

TwoLayerResult two_layer_weighting(std::size_t n, const Graph& S, const Graph& S_prime, int q, const mpq_class& p_in) {
  mpq_class p = p_in;
  p.canonicalize();
  if (q < 3) throw InvalidParameter("q must be at least 3");
  if (p <= 0 || p > 1) throw InvalidParameter("p must lie in (0, 1]");
  if (S.vertex_count() > n || S_prime.vertex_count() > n) throw InvalidParameter("S has more than n vertices");
  for (const Edge& e : S_prime.edges())
    if (!S.has_edge(e.u, e.v)) throw InvalidParameter("S' must be a subgraph of S");

  Graph Sn = S, Spn = S_prime;
  Sn.ensure_vertices(n);
  Spn.ensure_vertices(n);
  const Graph base = complete_graph(n).minus(Sn);
  const Graph with_prime = base.united(Spn);

  TwoLayerResult out;
  out.psi1.q = q;
  const CliqueIndex all = enumerate_cliques(with_prime, q);
  std::map<Edge, std::vector<std::size_t>> h_prime;
  for (std::size_t k = 0; k < all.cliques.size(); ++k) {
    const Clique& c = all.cliques[k];
    std::vector<Edge> hits;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (Spn.has_edge(c[i], c[j])) hits.emplace_back(c[i], c[j]);
    if (hits.size() == 1) h_prime[hits[0]].push_back(k);
  }
  for (const Edge& e : Spn.edges()) {
    auto it = h_prime.find(e);
    if (it == h_prime.end())
      throw CannotBoost(e, "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + " of S' lies in no admissible clique");
    const mpq_class w(1, static_cast<long>(it->second.size()));
    for (std::size_t k : it->second) out.psi1.weights[all.cliques[k]] = w;
  }

  const auto psi1_edges = out.psi1.edge_weights();
  std::map<Edge, mpq_class> phi;
  for (const Edge& e : base.edges()) {
    auto it = psi1_edges.find(e);
    mpq_class v = 1;
    if (it != psi1_edges.end()) v -= it->second / p;
    phi[e] = v;
  }
  const CliqueIndex h = enumerate_cliques(base, q);
  const CliqueIndex big = enumerate_cliques(base, q + 2);
  out.second = boost(base, q, h.cliques, big.cliques, phi, mpq_class(static_cast<long>(binom(n, q - 2))));

  out.psi = out.psi1;
  for (const auto& [c, w] : out.second.weighting.weights) out.psi.weights[c] += w;

  const auto total = out.psi.edge_weights();
  const auto second = out.second.weighting.edge_weights();
  out.identities_hold = true;
  for (const Edge& e : Spn.edges()) {
    auto it = total.find(e);
    if (it == total.end() || it->second != 1) out.identities_hold = false;
  }
  for (const Edge& e : base.edges()) {
    mpq_class v = 0;
    if (auto it = second.find(e); it != second.end()) v += it->second;
    if (auto it = psi1_edges.find(e); it != psi1_edges.end()) v += it->second / p;
    if (v != 1) out.identities_hold = false;
  }
  return out;
}

bool verify_fractional(const Graph& g, const CliqueWeighting& w, FractionalMode mode) {
  for (const auto& [c, x] : w.weights) {
    if (x < 0 || c.size() != static_cast<std::size_t>(w.q)) return false;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (c[i] >= g.vertex_count() || c[j] >= g.vertex_count() || !g.has_edge(c[i], c[j])) return false;
  }
  const auto psi = w.edge_weights();
  for (const Edge& e : g.edges()) {
    auto it = psi.find(e);
    const mpq_class v = it == psi.end() ? mpq_class(0) : it->second;
    if (mode == FractionalMode::decomposition ? v != 1 : v > 1) return false;
  }
  return true;
}

CliqueSample sample_regular_cliques(const CliqueWeighting& w, const mpq_class& D_in, Rng& rng) {
  mpq_class D = D_in;
  D.canonicalize();
  if (D <= 0) throw InvalidParameter("D must be positive");
  const mpq_class half = D / 2;
  for (const auto& [c, x] : w.weights) {
    const mpq_class prob = x * half;
    if (prob < 0 || prob > 1) throw InvalidParameter("selection probability outside [0, 1]");
  }
  CliqueSample out;
  const auto psi = w.edge_weights();
  for (const auto& [e, v] : psi) out.degree[e] = 0;
  for (const auto& [c, x] : w.weights) {
    const mpq_class prob = x * half;
    const std::uint64_t draw = rng.next();
    bool take = prob == 1;
    if (!take && prob > 0) {
      mpz_class thr = (mpz_class(prob.get_num()) << 64) / prob.get_den();
      take = mpz_class(static_cast<unsigned long>(draw)) < thr;
    }
    if (!take) continue;
    out.selected.push_back(c);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) ++out.degree[Edge(c[i], c[j])];
  }
  for (const auto& [e, deg] : out.degree) {
    ++out.histogram[deg];
    const mpq_class dev = abs(mpq_class(static_cast<unsigned long>(deg)) - psi.at(e) * half);
    if (dev > out.max_deviation) out.max_deviation = dev;
  }
  return out;
}

std::string serialize_weighting(const CliqueWeighting& w) {
  std::ostringstream os;
  for (const auto& [c, x] : w.weights) {
    for (Vertex v : c) os << v << ' ';
    os << x.get_num().get_str() << '/' << x.get_den().get_str() << '\n';
  }
  return os.str();
}

CliqueWeighting parse_weighting(std::string_view text) {
  CliqueWeighting w;
  bool first = true;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 4) throw ParseError(lineno, "expected at least three vertices and a weight");
    Clique c;
    for (std::size_t i = 0; i + 1 < tok.size(); ++i) {
      if (tok[i].find_first_not_of("0123456789") != std::string::npos) throw ParseError(lineno, "bad vertex '" + tok[i] + "'");
      c.push_back(static_cast<Vertex>(std::stoul(tok[i])));
    }
    const int q = static_cast<int>(c.size());
    if (first) w.q = q;
    else if (q != w.q) throw ParseError(lineno, "clique size differs from earlier lines");
    first = false;
    mpq_class x;
    if (tok.back().find_first_not_of("0123456789/") != std::string::npos || x.set_str(tok.back(), 10) != 0 ||
        x.get_den() == 0)
      throw ParseError(lineno, "bad weight '" + tok.back() + "'");
    x.canonicalize();
    c = sorted(c);
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) throw ParseError(lineno, "repeated vertex");
    if (!w.weights.emplace(c, x).second) throw ParseError(lineno, "clique listed twice");
  }
  return w;
}

}  // namespace cliqueforge
