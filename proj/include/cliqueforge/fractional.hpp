#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "cliqueforge/graph.hpp"
#include "cliqueforge/randmodels.hpp"

namespace cliqueforge {

/// Nonnegative rational weight per q-clique (cliques stored sorted).
struct CliqueWeighting {
  int q = 3;
  std::map<Clique, mpq_class> weights;

  /// psi(e): total weight of the cliques containing e.
  mpq_class edge_weight(const Edge& e) const;
  /// psi(e) for every edge covered by a clique with nonzero weight.
  std::map<Edge, mpq_class> edge_weights() const;
};

/// Signed weighting of the q-subsets of e ∪ J with unit mass on e and zero on every other r-set.
struct EdgeGadget {
  int q = 3, r = 2;
  std::vector<Vertex> e, J;
  std::map<Clique, mpq_class> psi;
  mpq_class max_abs;          // max |psi(H)|
  bool within_bound = false;  // |psi(H)| <= 2^{r-j}(r-j)!/C(q-r+j, j), j = |e ∩ H|, for every H
};

/// Exact minimum-norm solve of the r-set incidence system. q > r >= 1, |e| = r, |J| = q.
EdgeGadget edge_gadget(int q, int r, const std::vector<Vertex>& e, const std::vector<Vertex>& J);
/// Re-substitutes the gadget into the incidence equations.
bool gadget_property_holds(const EdgeGadget& g);

/// Raised when some edge lies in no (q+2)-clique of Q.
class CannotBoost : public std::runtime_error {
 public:
  CannotBoost(const Edge& e, const std::string& what) : std::runtime_error(what), edge_(e) {}
  const Edge& edge() const { return edge_; }

 private:
  Edge edge_;
};

struct BoostResult {
  CliqueWeighting weighting;
  bool weights_in_range = false;  // every weight in [1/(2d), 3/(2d)]
  mpq_class max_deviation;        // max |d psi(H) - 1|
  mpq_class max_correction;       // max |c_e|
  mpq_class alpha_condition;      // max_e |H(e) - d phi(e)| / |Q(e)| * max_R |Q(R)|
};

/// Reweights H towards phi using edge gadgets on the cliques of Q. Edges missing from phi get
/// weight 1. Every q-subset of a member of Q must be in H. psi(e) = phi(e) is checked exactly.
BoostResult boost(const Graph& g, int q, const std::vector<Clique>& H, const std::vector<Clique>& Q,
                  const std::map<Edge, mpq_class>& phi, const mpq_class& d);

/// Boost over all q-cliques and (q+2)-cliques of g with phi = 1 and d the mean clique degree of an edge.
BoostResult fractional_kq_decomposition(const Graph& g, int q);

/// psi1 spreads unit weight on each edge of S' over the q-cliques of (K_n - S) + S' meeting S'
/// in exactly that edge; psi2 boosts the q-cliques of K_n - S towards 1 - psi1(e)/p with
/// d = C(n, q-2).
struct TwoLayerResult {
  CliqueWeighting psi;  // psi1 + psi2
  CliqueWeighting psi1;
  BoostResult second;
  bool identities_hold = false;  // psi(e) = 1 on S', psi2(e) + psi1(e)/p = 1 on K_n - S
};

TwoLayerResult two_layer_weighting(std::size_t n, const Graph& S, const Graph& S_prime, int q, const mpq_class& p);

enum class FractionalMode { packing, decomposition };

/// Exact check; also rejects negative weights and weighted sets that are not q-cliques of g.
bool verify_fractional(const Graph& g, const CliqueWeighting& w, FractionalMode mode);

struct CliqueSample {
  std::vector<Clique> selected;
  std::map<Edge, std::uint64_t> degree;            // selected cliques through e
  std::map<std::uint64_t, std::size_t> histogram;  // degree -> number of edges
  mpq_class max_deviation;                         // max_e |deg(e) - psi(e) D/2|
};

/// Keeps each weighted clique independently with probability psi(Q) D/2, drawn exactly against
/// floor(prob * 2^64). Throws InvalidParameter when some probability exceeds 1.
CliqueSample sample_regular_cliques(const CliqueWeighting& w, const mpq_class& D, Rng& rng);

/// One clique per line: "v1 ... vq num/den".
std::string serialize_weighting(const CliqueWeighting& w);
CliqueWeighting parse_weighting(std::string_view text);

}  // namespace cliqueforge
