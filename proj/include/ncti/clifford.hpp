#pragma once

// Irreducible hermitian Clifford generators gamma_1..gamma_k on C^{2^floor(k/2)},
// built by the standard doubling recursion, plus the grading operator for even k.

#include <vector>

#include "ncti/types.hpp"

namespace ncti {

struct CliffordRep {
  int k = 0;                 // number of generators
  std::vector<Mat> gamma;    // k hermitian matrices, gamma_i gamma_j + gamma_j gamma_i = 2 delta_ij
  Mat gamma0;                // even k only: (-i)^{k/2} gamma_1...gamma_k, hermitian, squares to 1,
                             // anticommutes with every generator
  cxd parity_sign{0.0, 0.0}; // odd k: the scalar c with gamma_1...gamma_k = c * id
  int dim() const { return k == 0 ? 1 : 1 << (k / 2); }
};

// k in [1, 8]; throws std::invalid_argument outside that range.
// Odd k: the product gamma_1...gamma_k squares to (-1)^{k(k-1)/2}, so the parity
// scalar can equal i^k only for k = 3 (mod 4); generators are sign-fixed to give
// i^k there and +1 for k = 1 (mod 4) (at k == 1 the 1-dim representation forces
// gamma_1 = +-1 and we pick +1).
CliffordRep build_gammas(int k);

}  // namespace ncti
