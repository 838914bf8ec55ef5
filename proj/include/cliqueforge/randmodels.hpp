#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cliqueforge/graph.hpp"

namespace cliqueforge {

/// Exact probability num/den in [0, 1], kept reduced.
class Probability {
 public:
  Probability() = default;
  Probability(std::uint64_t num, std::uint64_t den);

  /// Accepts "1", "0.35", "3/8". Decimals are converted exactly.
  static Probability parse(std::string_view text);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  bool is_one() const { return num_ == den_; }
  /// floor(p * 2^64), saturating at 2^64 - 1; unused when p = 1.
  std::uint64_t threshold() const;
  std::string str() const;
  double approx() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Probability&, const Probability&) = default;

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// a / b for probabilities with a <= b; throws InvalidParameter otherwise.
Probability conditional(const Probability& a, const Probability& b);

/// Portable 64-bit stream: raw mt19937_64 output with our own bounded draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Draw < floor(p * 2^64), always true for p = 1.
  bool bernoulli(const Probability& p);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Master seed with deterministic stream splitting by (tag, index).
class Seed {
 public:
  explicit Seed(std::uint64_t master = 0) : master_(master) {}
  std::uint64_t master() const { return master_; }
  std::uint64_t derive(std::string_view tag, std::uint64_t index = 0) const;
  Rng stream(std::string_view tag, std::uint64_t index = 0) const { return Rng(derive(tag, index)); }

 private:
  std::uint64_t master_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// CLIQUEFORGE_SEED, if set and numeric.
std::optional<std::uint64_t> seed_from_env();

Graph gnp(std::size_t n, const Probability& p, std::uint64_t seed);

/// Keeps each edge of g independently with probability p1 / p; returns (G1, G - G1).
std::pair<Graph, Graph> slice(const Graph& g, const Probability& p1, const Probability& p, std::uint64_t seed);

/// Simple d-regular graph: pairing model, then double edge switches to remove loops and
/// repeated pairs. Not exactly uniform.
Graph gnd(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace cliqueforge
