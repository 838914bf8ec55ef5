#include "cliqueforge/randmodels.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <numeric>

namespace cliqueforge {

Probability::Probability(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw InvalidParameter("probability with zero denominator");
  if (num > den) throw InvalidParameter("probability above 1");
  const std::uint64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Probability Probability::parse(std::string_view text) {
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw InvalidParameter("bad probability '" + std::string(text) + "'");
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos)
    return Probability(number(text.substr(0, slash)), number(text.substr(slash + 1)));
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot), frac = text.substr(dot + 1);
    if (frac.size() > 18) throw InvalidParameter("too many decimals in '" + std::string(text) + "'");
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : number(whole);
    const std::uint64_t f = frac.empty() ? 0 : number(frac);
    if (w > 1) throw InvalidParameter("probability above 1");
    return Probability(w * den + f, den);
  }
  return Probability(number(text), 1);
}

std::uint64_t Probability::threshold() const {
  if (is_one()) return ~std::uint64_t{0};
  const unsigned __int128 scaled = (static_cast<unsigned __int128>(num_) << 64) / den_;
  return static_cast<std::uint64_t>(scaled);
}

std::string Probability::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Probability conditional(const Probability& a, const Probability& b) {
  const unsigned __int128 num = static_cast<unsigned __int128>(a.num()) * b.den();
  const unsigned __int128 den = static_cast<unsigned __int128>(a.den()) * b.num();
  if (num > den) throw InvalidParameter("slice probability exceeds the host probability");
  if (num == 0) return Probability(0, 1);
  unsigned __int128 x = num, y = den;
  while (y != 0) {
    unsigned __int128 t = x % y;
    x = y;
    y = t;
  }
  const unsigned __int128 rn = num / x, rd = den / x;
  if (rd > ~std::uint64_t{0}) throw InvalidParameter("slice probability is too fine");
  return Probability(static_cast<std::uint64_t>(rn), static_cast<std::uint64_t>(rd));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("empty range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do x = next();
  while (x > limit);
  return x % n;
}

bool Rng::bernoulli(const Probability& p) {
  const std::uint64_t x = next();
  if (p.is_one()) return true;
  return x < p.threshold();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Seed::derive(std::string_view tag, std::uint64_t index) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master_ ^ h) + index);
}

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("CLIQUEFORGE_SEED");
  if (!s || !*s) return std::nullopt;
  std::uint64_t v = 0;
  std::string_view sv(s);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) return std::nullopt;
  return v;
}

Graph gnp(std::size_t n, const Probability& p, std::uint64_t seed) {
  Rng rng = Seed(seed).stream("gnp");
  Graph g(n);
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      if (rng.bernoulli(p)) g.add_edge(a, b);
  return g;
}

std::pair<Graph, Graph> slice(const Graph& g, const Probability& p1, const Probability& p, std::uint64_t seed) {
  if (p.num() == 0) {
    if (p1.num() != 0) throw InvalidParameter("slice probability exceeds the host probability");
    return {Graph(g.vertex_count()), g};
  }
  const Probability keep = conditional(p1, p);
  Rng rng = Seed(seed).stream("slice");
  Graph first(g.vertex_count()), rest(g.vertex_count());
  for (const Edge& e : g.edges()) (rng.bernoulli(keep) ? first : rest).add_edge(e.u, e.v);
  return {std::move(first), std::move(rest)};
}

namespace {

bool try_gnd(std::size_t n, std::size_t d, Rng& rng, Graph& out) {
  std::vector<Vertex> points;
  points.reserve(n * d);
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t i = 0; i < d; ++i) points.push_back(v);
  rng.shuffle(points);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::map<Edge, std::size_t> count;
  for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
    pairs.emplace_back(points[i], points[i + 1]);
    if (points[i] != points[i + 1]) ++count[Edge(points[i], points[i + 1])];
  }
  auto bad = [&](std::size_t i) {
    auto [a, b] = pairs[i];
    return a == b || count[Edge(a, b)] > 1;
  };
  auto drop = [&](std::size_t i) {
    auto [a, b] = pairs[i];
    if (a != b) --count[Edge(a, b)];
  };
  auto take = [&](std::size_t i) {
    auto [a, b] = pairs[i];
    if (a != b) ++count[Edge(a, b)];
  };
  const std::size_t cap = 200 * pairs.size() + 1000;
  for (std::size_t step = 0; step < cap; ++step) {
    std::size_t i = pairs.size();
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (bad(k)) {
        i = k;
        break;
      }
    if (i == pairs.size()) {
      out = Graph(n);
      for (auto [a, b] : pairs) out.add_edge(a, b);
      return true;
    }
    const std::size_t j = rng.below(pairs.size());
    if (j == i) continue;
    auto [a, b] = pairs[i];
    auto [c, e] = pairs[j];
    if (rng.below(2)) std::swap(c, e);
    // switch {a,b},{c,e} -> {a,c},{b,e}
    if (a == c || b == e) continue;
    drop(i);
    drop(j);
    const bool fresh = count[Edge(a, c)] == 0 && count[Edge(b, e)] == 0 && Edge(a, c) != Edge(b, e);
    if (!fresh) {
      take(i);
      take(j);
      continue;
    }
    pairs[i] = {a, c};
    pairs[j] = {b, e};
    take(i);
    take(j);
  }
  return false;
}

}  // namespace

Graph gnd(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0) throw InvalidParameter("n*d must be even");
  if (d >= n && !(n == 0 && d == 0)) throw InvalidParameter("d must be below n");
  const Seed s(seed);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng = s.stream("gnd", attempt);
    Graph g;
    if (try_gnd(n, d, rng, g)) return g;
  }
  throw std::runtime_error("edge switching did not produce a simple regular graph");
}

}  // namespace cliqueforge
