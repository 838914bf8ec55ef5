#pragma once

#include "cliqueforge/density.hpp"
#include "cliqueforge/graph.hpp"

namespace cliqueforge {

/// T with L, L' on its root set; both T + L and T + L' decompose.
struct TransformerBundle {
  int q = 3;
  RootedGraph T;  // rooted at V(L) + V(L')
  Graph L;
  Graph L_prime;
  Packing decomp_TL;
  Packing decomp_TL_prime;
};

/// A rooted at V(L); both A and L + A decompose. L shares A's vertex numbering.
struct AbsorberBundle {
  int q = 3;
  Graph L;
  RootedGraph A;
  Packing decomp_A;
  Packing decomp_LA;
};

}  // namespace cliqueforge
