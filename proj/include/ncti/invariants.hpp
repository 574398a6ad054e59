#pragma once

// The two independent evaluations of the topological invariants:
//   local route  — antisymmetrized position-commutator cocycle on the flattened operator
//   index route  — kernel-count (Fedosov-style) difference of the Dirac-compressed operator
// plus the normalization constants tying them together.

#include <cstdint>
#include <string>
#include <vector>

#include "ncti/clifford.hpp"
#include "ncti/lattice.hpp"
#include "ncti/spectral.hpp"
#include "ncti/types.hpp"

namespace ncti {

// Normalization constants, indexed by the number of derivation slots k >= 1.
//
// Even k = 2m:  Delta = (2 pi i)^m, Lambda = 1/m!, Gamma = (-1)^m m!/2,
//               LambdaTilde = (2 pi i)^m / m!.
// Odd  k = 2m-1: Lambda = 1/(2^{m-1}(2m-1)!!), Gamma = (-1)^m (m-1/2)!/2,
//               Delta = -i (2 i pi)^{(k-1)/2}, LambdaTilde = -2^k (i pi)^{(k-1)/2}/k!!.
// The odd Gamma and Delta are a factor 4 smaller than one finds in parts of the
// literature; this is the unique choice consistent with Lambda*Gamma = (-1)^m/2^{2m}
// (the endpoint of the odd index computation) and with the winding of the plain shift
// being -1 on both routes. The identity 2 Gamma_k LambdaTilde_k = i^k Delta_k holds
// for all k and is asserted by tests.
struct Constants {
  static cxd Delta(int k);
  static double Lambda(int k);
  static double Gamma(int k);
  static cxd LambdaTilde(int k);
};

// (D_j A)_{xy} = -i * disp_j(x,y) * A_{xy}, disp the minimal-image displacement
// (literal difference under open boundary). dir is 1-based.
Mat position_derivation(const Mat& A, int dir, const Lattice& lat, int fiber);

// Delta_k sum_perm sgn Tr(P D_{p1}(P) ... D_{pk}(P)) / (sites * fiber), |I| even.
cxd local_cocycle_even(const Mat& P, const std::vector<int>& I, const Lattice& lat, int fiber);
// Odd variant with alternating arguments (U*, U, U*, U, ...), |I| odd.
cxd local_cocycle_odd(const Mat& U, const std::vector<int>& I, const Lattice& lat, int fiber);

// Tr((1 - T^dag T)^n) - Tr((1 - T T^dag)^n) for a (possibly rectangular) contraction T.
// For a partial isometry this is exactly dim ker T - dim ker T^dag, independent of n.
// Preconditions: n >= 1, ||T|| <= 1 + 1e-8. NOTE: for square T the value is identically
// zero (the two factors share their singular spectrum); meaningful finite-volume index
// evaluation therefore localizes the trace, see index_*_single below.
double fedosov_trace_index(const Mat& T, int n);

struct IndexOptions {
  int n = 0;                   // Fedosov power; 0 = smallest summable default
  double window_radius = -1.0; // trace window half-width in the Dirac directions; <0 = L/4
};

struct IndexValue {
  double value = 0.0;          // windowed difference / (Lambda_k * transverse volume * fiber)
  double raw_windowed = 0.0;   // windowed trace difference before normalization
  int n = 1;
  bool power_below_default = false;  // user forced n below the summability default
};

// Even route: T = projected Dirac phase on ran(P x spinors), graded by Gamma_0;
// the kernel-count difference is trace-localized to the window around the Dirac
// center x0 (the unwindowed finite-volume difference vanishes identically).
IndexValue index_even_single(const FermiData& fd, const std::vector<int>& I,
                             const std::vector<double>& x0, IndexOptions opt = {});

// Odd route: T = P_{x0} U P_{x0} + (1 - P_{x0}) with P_{x0} = (1 + F_{x0})/2.
IndexValue index_odd_single(const FermiUnitaryData& fu, const std::vector<int>& I,
                            const std::vector<double>& x0, IndexOptions opt = {});

// ---- aggregated reports ----

struct SampleEntry {
  std::uint64_t seed = 0;
  std::vector<double> x0;  // empty for the local route
  double value = 0.0;
  double imag_residual = 0.0;  // |Im| of the raw cocycle (local route)
};

struct InvariantReport {
  std::string route;  // "local" or "index"
  std::vector<int> I;
  int L = 0;
  double mu = 0.0;
  int fedosov_power = 0;  // 0 for the local route
  double mean = 0.0;
  double stddev = 0.0;
  bool rounded_valid = false;  // mean within rounding_threshold of an integer
  long rounded = 0;
  double deviation = 0.0;  // |mean - rounded|, always reported (never silently rounded)
  double rounding_threshold = 0.15;
  std::vector<SampleEntry> samples;
  double walltime_ms = 0.0;
};

struct ReportOptions {
  double rounding_threshold = 0.15;
  IndexOptions index;
  std::vector<std::vector<double>> x0_list;  // index routes; default {(0.5,...)}
};

InvariantReport local_invariant_even(const std::vector<std::pair<std::uint64_t, FermiData>>& s,
                                     const std::vector<int>& I, ReportOptions opt = {});
InvariantReport local_invariant_odd(
    const std::vector<std::pair<std::uint64_t, FermiUnitaryData>>& s, const std::vector<int>& I,
    ReportOptions opt = {});
InvariantReport index_invariant_even(const std::vector<std::pair<std::uint64_t, FermiData>>& s,
                                     const std::vector<int>& I, ReportOptions opt = {});
InvariantReport index_invariant_odd(
    const std::vector<std::pair<std::uint64_t, FermiUnitaryData>>& s, const std::vector<int>& I,
    ReportOptions opt = {});

}  // namespace ncti
