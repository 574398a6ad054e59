#pragma once

// Independent reference computations the test suite checks the library against:
// momentum-space Berry-curvature integration, analytic winding numbers, Bloch
// reductions of the commensurate-flux square-lattice model, log-log decay fits
// and constructive partial isometries with known kernel counts.

#include <cstdint>
#include <functional>
#include <vector>

#include "ncti/algebra.hpp"
#include "ncti/types.hpp"

namespace oracle {

using BlochFn = std::function<ncti::Mat(double, double)>;

// C = (i/2pi) Int tr(P [d1 P, d2 P]) d^2k over [0,w1) x [0,w2), midpoint Riemann
// sum on a grid x grid mesh; dP via central differences with step 1e-4. P(k) is the
// projector on the lowest n_occ eigenvectors (gauge invariant, so no phase fixing).
double chern_from_bloch(const BlochFn& Hk, int n_occ, double w1, double w2, int grid);

// h(k) = sin(k1) s1 + sin(k2) s2 + (m + cos k1 + cos k2) s3; zone 2pi x 2pi.
// Analytic lower-band Chern number (degree of the unit vector map): +1 at m = -1.
BlochFn qwz_bloch(double m);

// Reduced Bloch Hamiltonian of the flux-(2 pi num/den) square-lattice model after the
// diag(e^{i phi x1 x2}) gauge: H(k) v(m) = e^{-i k1} v(m-1) + e^{i k1} v(m+1)
// + 2 cos(2 phi m + k2) v(m), m cyclic mod q_tilde; magnetic zone (2pi/q_tilde) x 2pi.
ncti::Mat harper_bloch_at(int num, int den, double k1, double k2);
BlochFn harper_bloch(int num, int den);
int harper_reduced_bands(int num, int den);  // q_tilde = den / gcd(2 num, den)

// Union over the L x L momentum grid of the reduced-Bloch eigenvalues; equals the
// spectrum of the real-space torus Hamiltonian whenever phi12 * L is in 2 pi Z.
std::vector<double> harper_torus_spectrum(int num, int den, int L);  // sorted, size L^2

// (1/2pi) sum of phase increments of h around k in [0, 2pi); near-integer for
// nonvanishing h.
double winding_from_symbol(const std::function<ncti::cxd(double)>& h, int grid = 4096);

// least-squares slope of log(y) against log(x)
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// T = A B^dagger with random orthonormal frames A (rows x rank), B (cols x rank):
// dim ker T - dim ker T^dagger = (cols - rank) - (rows - rank) = cols - rows.
ncti::Mat random_partial_isometry(int rows, int cols, int rank, std::uint64_t seed);

// Cyclic disorder space Z_M with shift_j = rotation by rot[j] (commuting by
// construction), uniform weights. rot entries drawn in [0, rot_max].
ncti::SysPtr random_cyclic_system(int d, int fiber, int M, int rot_max, std::uint64_t seed);

// Random element: max_terms support points with |q_j| <= radius, Gaussian fiber
// entries on every point of the system. Deterministic in seed.
ncti::NCElement random_ncelement(ncti::SysPtr sys, const ncti::TwistMatrix& th, int radius,
                                 std::uint64_t seed, int max_terms = 6);

// Random antisymmetric twist with entries in [-pi, pi].
ncti::TwistMatrix random_twist(int d, std::uint64_t seed);

}  // namespace oracle
