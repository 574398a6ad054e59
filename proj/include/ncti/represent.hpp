#pragma once

// Covariant finite-volume representation of crossed-product elements: dual magnetic
// translations, the representation map itself, and the Dirac phase built from the
// position operator.
//
// Basis ordering everywhere: global index = site * fiber + band, sites lexicographic
// over centered coordinates. When a Clifford factor is present it is the outermost
// tensor slot: index = spinor * (sites*fiber) + site * fiber + band.

#include <optional>
#include <vector>

#include "ncti/algebra.hpp"
#include "ncti/clifford.hpp"
#include "ncti/lattice.hpp"
#include "ncti/types.hpp"

namespace ncti {

// U_q: <x+q| U_q |x> = e^{i <q, phi x>} (x in centered coordinates).
// Periodic boundary: wraps; requires the phase pattern to be exactly L-periodic
// (commensurate flux), otherwise throws with the smallest commensurate L if one
// exists below 40000. Open boundary: out-of-window hops are dropped, giving a
// partial isometry.
Mat magnetic_translation(const std::vector<int>& q, const Eigen::MatrixXd& phi,
                         const Lattice& lat, int fiber = 1);

// V_q: <x+q| V_q |x> = e^{-i <q, phi x>}; commutes with every U on a commensurate torus.
Mat dual_translation(const std::vector<int>& q, const Eigen::MatrixXd& phi,
                     const Lattice& lat, int fiber = 1);

// Smallest L' >= 1 with phi_{ij} L' in 2 pi Z for all i<j (within 1e-9), if any <= 40000.
std::optional<int> smallest_commensurate_L(const Eigen::MatrixXd& phi, int limit = 40000);
// phi_{ij} L in 2 pi Z for all entries (within 1e-9)
bool flux_commensurate(const Eigen::MatrixXd& phi, int L);

struct FiniteRep {
  Mat op;
  Lattice lat;
  int fiber = 1;
};

// pi_w(a) = sum_q U_q diag_x(a_q(tau_x w)): entry at (x+q, x) is e^{i<q,phi x>} a_q(tau_x w),
// with phi = the element's twist matrix. Precondition: support radius < L/2 (otherwise
// hops alias around the torus); throws std::invalid_argument.
// Exactly multiplicative on the torus whenever the point orbit is L-periodic.
FiniteRep represent(const NCElement& a, int omega, const Lattice& lat);

// F = sum_i gamma_i x diag((x_{I_i} + x0_i)/|x_I + x0|) on spinor x site space.
// x0 in (0,1)^|I| keeps the denominator away from zero; F is hermitian and F^2 = 1.
Mat dirac_phase(const std::vector<int>& I, const std::vector<double>& x0, const Lattice& lat,
                const CliffordRep& cr);

}  // namespace ncti
