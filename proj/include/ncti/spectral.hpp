#pragma once

// Spectral flattening: Fermi projections below a gap and the chiral Fermi unitary.

#include <cstdint>
#include <stdexcept>

#include "ncti/lattice.hpp"
#include "ncti/types.hpp"

namespace ncti {

// mu falls within gap_tol of an eigenvalue: flattening is ill-conditioned.
struct GapViolation : std::runtime_error {
  GapViolation(const std::string& msg, double below, double above)
      : std::runtime_error(msg), nearest_below(below), nearest_above(above) {}
  double nearest_below;
  double nearest_above;
};

struct FermiData {
  Lattice lat;
  int fiber = 1;
  double mu = 0.0;
  int n_occ = 0;
  double nearest_below = 0.0;  // largest eigenvalue below mu (0 if none)
  double nearest_above = 0.0;  // smallest eigenvalue above mu (0 if none)
  Eigen::VectorXd evals;
  Mat V;  // occupied eigenvectors, dim x n_occ
  Mat P;  // V V^dagger
  double gap() const { return nearest_above - nearest_below; }
};

// Spectral projection onto eigenvalues below mu. Requires H hermitian (residual
// <= 1e-10) and |mu - eigenvalue| >= gap_tol for all eigenvalues, else throws
// GapViolation carrying the offending neighbors.
FermiData fermi_projection(const Mat& H, double mu, const Lattice& lat, int fiber,
                           double gap_tol = 1e-8);

// Same, with mu placed at the midpoint of the gap above the given filling fraction.
FermiData fermi_projection_filling(const Mat& H, double filling, const Lattice& lat, int fiber,
                                   double gap_tol = 1e-8);

struct FermiUnitaryData {
  Lattice lat;
  int half_fiber = 1;  // fiber dimension of each chiral sector
  Mat U;               // lower-left block of 1 - 2P at mu = 0 (maps + sector to - sector)
};

// Chiral flattening at mu = 0. J_fiber is the fiber-level involution (diagonal, +-1,
// balanced sectors); requires J H J = -H within chiral_tol, enforced structurally by the
// model builders and re-checked here. The spectrum is then symmetric and 1 - 2P is
// block-off-diagonal in the chiral splitting; its lower-left block is the returned
// unitary (unitarity residual checked to 1e-10).
FermiUnitaryData fermi_unitary(const Mat& H, const Mat& J_fiber, const Lattice& lat, int fiber,
                               double chiral_tol = 1e-10, double gap_tol = 1e-8);

}  // namespace ncti
