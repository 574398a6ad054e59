#pragma once

// Polynomial elements of a twisted crossed product over a finite dynamical system.
//
// An element is a finite sum  a = sum_q u_q b_q  with q in Z^d, b_q a fiber-matrix-valued
// function on the finite point set Omega, and unitaries obeying u_x u_y = e^{i<x,theta y>} u_{x+y}.
// Everything below is stated (and implemented) coefficientwise:
//
//   product   (ab)_Q(w) = sum_p e^{i<Q,theta p>} a_{Q-p}(tau_p w) b_p(w)
//   adjoint   (a*)_r(w) = a_{-r}(tau_r w)^dagger
//   trace     T(a)      = sum_w weight(w) tr(a_0(w)) / fiber_dim          (T(1) = 1)
//   derivation (del_j a)_q = -i q_j a_q
//
// These conventions are the unique ones making the covariant lattice representation in
// represent.hpp an exact algebra homomorphism (tested).

#include <map>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ncti/types.hpp"

namespace ncti {

// Finite point set with commuting Z^d shift action and an invariant probability weight.
struct DynamicalSystem {
  int d = 1;       // number of shift directions
  int fiber = 1;   // internal (band) dimension N
  int points = 1;  // |Omega|
  std::vector<std::vector<int>> shift;   // shift[j][w] = action of unit shift along j
  std::vector<std::vector<int>> ishift;  // inverses, filled by finalize()
  std::vector<double> weight;            // invariant, sums to 1

  // Builds inverses and validates: permutations, pairwise commuting, invariant weights.
  // Throws std::invalid_argument on violation.
  void finalize();

  // tau_x applied to point w (x may have negative entries).
  int translate(int w, const std::vector<int>& x) const;
};

using SysPtr = std::shared_ptr<const DynamicalSystem>;

// One-point system (clean models).
SysPtr single_point_system(int d, int fiber);
// Orbit of an L-torus of configurations under coordinate shifts: points = L^d,
// flattened lexicographically over [-(L odd ? (L-1)/2 : L/2), ...] centered coordinates.
SysPtr torus_orbit_system(int d, int fiber, int L);

struct TwistMatrix {
  Eigen::MatrixXd theta;  // d x d, antisymmetric
  static TwistMatrix zero(int d) { return TwistMatrix{Eigen::MatrixXd::Zero(d, d)}; }
  void validate(int d) const;  // shape + antisymmetry to 1e-12
};

// Fiber-matrix-valued function on Omega.
using FiberFn = std::vector<Mat>;

struct NCElement {
  SysPtr sys;
  TwistMatrix twist;
  // support: multi-index q -> per-point fiber matrix (ordered map => deterministic iteration)
  std::map<std::vector<int>, FiberFn> coeff;

  static NCElement zero(SysPtr s, TwistMatrix t);
  static NCElement unit(SysPtr s, TwistMatrix t);
  // u_q * b ; pass empty b for plain u_q
  static NCElement monomial(SysPtr s, TwistMatrix t, const std::vector<int>& q,
                            const FiberFn& b = {});

  // accumulate m into coefficient q at point w
  void add_term(const std::vector<int>& q, int w, const Mat& m);

  int radius() const;  // max_q max_j |q_j| over the support
  NCElement& prune(double tol);
  double max_abs() const;
};

// Throws std::invalid_argument unless both elements live over the same system and twist.
void require_compatible(const NCElement& a, const NCElement& b);

NCElement add(const NCElement& a, const NCElement& b);
NCElement scale(const cxd& c, const NCElement& a);
// threads > 1 partitions the left support; partial results merge in fixed order,
// so the result is deterministic for a given thread count.
NCElement multiply(const NCElement& a, const NCElement& b, int threads = 1);
NCElement adjoint(const NCElement& a);

// Coefficient extraction. The lookup form reads the stored map; the grid form averages
// the torus action over an M^d phase grid, (1/M^d) sum_m lambda_m^{-q} rho_{lambda_m}(a),
// which reproduces the coefficient exactly once M exceeds twice the support radius.
FiberFn fourier_coeff(const NCElement& a, const std::vector<int>& q);
FiberFn fourier_coeff_grid(const NCElement& a, const std::vector<int>& q, int M);

// rho_lambda: coefficientwise lambda^q with lambda_j = e^{i angles_j}.
NCElement torus_action(const NCElement& a, const std::vector<double>& angles);

// Cesaro (Fejer) smoothing: coefficient q scaled by prod_j max(0, 1 - |q_j|/(N+1)).
NCElement cesaro_sum(const NCElement& a, int N);

NCElement derivation(const NCElement& a, int j);  // j in [1, d]

cxd trace(const NCElement& a);

// Cyclic multilinear functional: I an ordered list of directions (1-based), args of size
// |I|+1. zeta(I; a_0..a_k) = sum over permutations rho of the slots of I, with sign,
// of trace(a_0 * del_{rho(1)} a_1 * ... * del_{rho(k)} a_k).
// No normalization constant is applied here; callers scale by the constants in
// invariants.hpp.
cxd zeta(const std::vector<int>& I, const std::vector<NCElement>& args);

// ---- fiber-level helpers (used by the trace-property tests and spectral code) ----
cxd fiber_trace(const DynamicalSystem& sys, const FiberFn& f);       // sum_w w(w) tr(f)/N
FiberFn fiber_adjoint(const FiberFn& f);
FiberFn fiber_multiply(const FiberFn& a, const FiberFn& b);
FiberFn fiber_add(const FiberFn& a, const FiberFn& b);
// |f| = sqrt(f^dagger f) pointwise (hermitian eigendecomposition)
FiberFn fiber_abs(const FiberFn& f);
// f^s for pointwise-PSD f (eigenvalues clamped at 0 before powering)
FiberFn fiber_pow(const FiberFn& f, double s);
// sup_w of the operator norm
double fiber_opnorm(const FiberFn& f);
// b composed with tau_{-x} (the shift action on fiber functions)
FiberFn fiber_shifted(const DynamicalSystem& sys, const FiberFn& f, const std::vector<int>& x);

// ---- JSON (support list; matrices as row-major [re, im] pairs; system included) ----
nlohmann::json to_json(const NCElement& a);
NCElement ncelement_from_json(const nlohmann::json& j);

}  // namespace ncti
