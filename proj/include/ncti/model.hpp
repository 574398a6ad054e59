#pragma once

// Tight-binding model descriptions (hopping terms + multiplicative bond/site disorder)
// and their assembly into finite-volume Hamiltonians.

#include <string>
#include <vector>

#include "ncti/algebra.hpp"
#include "ncti/lattice.hpp"
#include "ncti/types.hpp"

namespace ncti {

struct HopTerm {
  std::vector<int> q;  // displacement; the hermitian partner at -q is implied
  Mat W;               // fiber block; must be hermitian when q = 0
  int channel = -1;    // disorder channel index, or -1 for clean
};

struct LatticeModel {
  std::string name;
  int d = 1;
  int N = 1;                // fiber (band) dimension
  Eigen::MatrixXd phi;      // magnetic twist, d x d antisymmetric
  std::vector<HopTerm> hops;
  std::vector<double> lambda;  // per-channel disorder strength
  int channels() const { return (int)lambda.size(); }

  bool chiral = false;
  Mat chiral_op;            // fiber-level involution J with J H J = -H (chiral models)

  // default chemical potential policy: filling fraction if >= 0, else fixed mu
  double default_filling = -1.0;
  double default_mu = 0.0;
};

// Square-lattice model with one state per site and flux phase phi12 = 2 pi p / den
// behind the dual translations; e1/e2 bonds carry disorder channels 0/1 with strength
// lambda. The effective flux per plaquette is -2*phi12 (the dual pair of translations
// doubles the twist), so den divides L commensurately and the spectrum folds into den
// magnetic bands.
LatticeModel hofstadter_model(int flux_num, int flux_den, double lambda);

// Two-band chiral chain: intracell hop t1 (channel 0), intercell hop t2 (channel 1).
LatticeModel ssh_model(double t1, double t2, double lambda);

// Hofstadter layers stacked along e3 with interlayer hop t_perp (clean), in-plane
// disorder channels as in the 2D model.
LatticeModel stacked_model(int flux_num, int flux_den, double t_perp, double lambda);

// Dense hermitian Hamiltonian on the lattice window. Hop (q, W, c) contributes
// e^{i<q,phi x>} W (1 + lambda_c s(x,c)) at block (x+q, x) plus the adjoint block,
// which realizes the covariance H(shifted sample) = V_y H(sample) V_y^dagger exactly
// on commensurate tori. Throws if dimensions exceed 12000 (dense-only build).
Mat build_hamiltonian(const LatticeModel& model, const DisorderSample& sample,
                      const Lattice& lat);

// The same data as a crossed-product element over the orbit of the sample under
// torus shifts: represent(model_to_ncelement(...), w0, lat) reproduces
// build_hamiltonian(...) exactly (w0 = the unshifted configuration).
NCElement model_to_ncelement(const LatticeModel& model, const DisorderSample& sample,
                             const Lattice& lat);
int unshifted_point(const Lattice& lat);  // index of the zero-offset configuration

}  // namespace ncti
