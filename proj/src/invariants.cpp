#include "ncti/invariants.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ncti/represent.hpp"

namespace ncti {

namespace {

constexpr double kPi = std::numbers::pi;

double double_factorial(int n) {
  double r = 1.0;
  for (int v = n; v >= 2; v -= 2) r *= v;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int v = 2; v <= n; ++v) r *= v;
  return r;
}

// (m - 1/2)! as the falling product (m-1/2)(m-3/2)...(1/2) = (2m-1)!!/2^m
double half_factorial(int m) { return double_factorial(2 * m - 1) / std::pow(2.0, m); }

int perm_parity(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

Mat mat_power(Mat A, int n) {
  Mat out = A;
  for (int i = 1; i < n; ++i) out = out * A;
  return out;
}

cxd trace_of_product(const Mat& A, const Mat& B) {
  return (A.transpose().cwiseProduct(B)).sum();
}

double operator_norm_estimate(const Mat& T) {
  if ((long)T.rows() * T.cols() <= 250000) {
    // top eigenvalue of the smaller gram matrix; complex BDCSVD can be ~1e-6 off
    // at these sizes, which a contraction check on exact partial isometries
    // cannot afford
    const Mat G = T.rows() >= T.cols() ? Mat(T.adjoint() * T) : Mat(T * T.adjoint());
    if (G.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  // power iteration on T^dag T
  Vec v = Vec::Ones(T.cols()).normalized();
  double s = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vec w = T.adjoint() * (T * v);
    s = std::sqrt(w.norm());
    if (w.norm() == 0.0) return 0.0;
    v = w.normalized();
  }
  return s;
}

void validate_I(const std::vector<int>& I, const Lattice& lat, bool even) {
  if (I.empty()) throw std::invalid_argument("invariant: I must be nonempty");
  if (even != (I.size() % 2 == 0))
    throw std::invalid_argument("invariant: wrong parity of |I| for this route");
  std::vector<int> sorted = I;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("invariant: repeated directions in I");
  for (int dir : I)
    if (dir < 1 || dir > lat.d)
      throw std::invalid_argument("invariant: direction out of range");
}

double transverse_volume(const Lattice& lat, int k) {
  double v = 1.0;
  for (int j = 0; j < lat.d - k; ++j) v *= lat.L;
  return v;
}

std::vector<double> default_x0(int k) { return std::vector<double>(k, 0.5); }

// {0,1}-weights over sites: inside the trace window around the Dirac center
Eigen::VectorXd window_weights(const std::vector<int>& I, const std::vector<double>& x0,
                               const Lattice& lat, double radius) {
  Eigen::VectorXd w(lat.sites());
  for (int s = 0; s < lat.sites(); ++s) {
    const auto c = lat.coords(s);
    bool in = true;
    for (size_t i = 0; i < I.size(); ++i)
      if (std::abs(c[I[i] - 1] + x0[i]) > radius) { in = false; break; }
    w[s] = in ? 1.0 : 0.0;
  }
  return w;
}

struct Stats {
  double mean = 0.0, stddev = 0.0;
};

Stats stats_of(const std::vector<SampleEntry>& samples) {
  Stats st;
  if (samples.empty()) return st;
  for (const auto& e : samples) st.mean += e.value;
  st.mean /= samples.size();
  double var = 0.0;
  for (const auto& e : samples) var += (e.value - st.mean) * (e.value - st.mean);
  st.stddev = std::sqrt(var / samples.size());
  return st;
}

InvariantReport finish_report(InvariantReport rep, double threshold,
                              std::chrono::steady_clock::time_point t0) {
  const Stats st = stats_of(rep.samples);
  rep.mean = st.mean;
  rep.stddev = st.stddev;
  rep.rounded = std::lround(st.mean);
  rep.deviation = std::abs(st.mean - rep.rounded);
  rep.rounding_threshold = threshold;
  rep.rounded_valid = rep.deviation <= threshold;
  rep.walltime_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return rep;
}

}  // namespace

cxd Constants::Delta(int k) {
  if (k < 1) throw std::invalid_argument("Constants: k must be positive");
  if (k % 2 == 0) return std::pow(cxd(0.0, 2.0 * kPi), k / 2);
  return cxd(0.0, -1.0) * std::pow(cxd(0.0, 2.0 * kPi), (k - 1) / 2);
}

double Constants::Lambda(int k) {
  if (k < 1) throw std::invalid_argument("Constants: k must be positive");
  if (k % 2 == 0) return 1.0 / factorial(k / 2);
  const int m = (k + 1) / 2;
  return 1.0 / (std::pow(2.0, m - 1) * double_factorial(2 * m - 1));
}

double Constants::Gamma(int k) {
  if (k < 1) throw std::invalid_argument("Constants: k must be positive");
  if (k % 2 == 0) {
    const int m = k / 2;
    return ((m % 2 == 0) ? 1.0 : -1.0) * factorial(m) / 2.0;
  }
  const int m = (k + 1) / 2;
  return ((m % 2 == 0) ? 1.0 : -1.0) * half_factorial(m) / 2.0;
}

cxd Constants::LambdaTilde(int k) {
  if (k < 1) throw std::invalid_argument("Constants: k must be positive");
  if (k % 2 == 0) return std::pow(cxd(0.0, 2.0 * kPi), k / 2) / factorial(k / 2);
  return -std::pow(2.0, k) * std::pow(cxd(0.0, kPi), (k - 1) / 2) / double_factorial(k);
}

Mat position_derivation(const Mat& A, int dir, const Lattice& lat, int fiber) {
  if (dir < 1 || dir > lat.d)
    throw std::invalid_argument("position_derivation: direction out of range");
  const int ns = lat.sites();
  if (A.rows() != (long)ns * fiber || A.cols() != (long)ns * fiber)
    throw std::invalid_argument("position_derivation: dimension mismatch");
  std::vector<int> coord(ns);
  for (int s = 0; s < ns; ++s) coord[s] = lat.coords(s)[dir - 1];
  Mat out(A.rows(), A.cols());
  for (int sr = 0; sr < ns; ++sr)
    for (int sc = 0; sc < ns; ++sc) {
      const cxd f(0.0, -lat.displacement(coord[sr], coord[sc]));
      out.block(sr * fiber, sc * fiber, fiber, fiber) =
          f * A.block(sr * fiber, sc * fiber, fiber, fiber);
    }
  return out;
}

cxd local_cocycle_even(const Mat& P, const std::vector<int>& I, const Lattice& lat, int fiber) {
  validate_I(I, lat, /*even=*/true);
  if (lat.bc != BC::periodic)
    throw std::invalid_argument("local_cocycle: periodic boundary conditions required");
  const int k = (int)I.size();
  std::vector<Mat> DP(k);
  for (int i = 0; i < k; ++i) DP[i] = position_derivation(P, I[i], lat, fiber);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  cxd acc(0.0, 0.0);
  do {
    Mat chain = DP[perm[0]];
    for (int i = 1; i < k; ++i) chain = chain * DP[perm[i]];
    acc += (double)perm_parity(perm) * trace_of_product(P, chain);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Constants::Delta(k) * acc / ((double)lat.sites() * fiber);
}

cxd local_cocycle_odd(const Mat& U, const std::vector<int>& I, const Lattice& lat, int fiber) {
  validate_I(I, lat, /*even=*/false);
  if (lat.bc != BC::periodic)
    throw std::invalid_argument("local_cocycle: periodic boundary conditions required");
  const int k = (int)I.size();
  const Mat Ud = U.adjoint();
  // alternating argument list (U*, U, U*, U, ...): slot 0 is U*, slot i>=1 feeds the
  // i-th derivation
  std::vector<const Mat*> args(k + 1);
  for (int i = 0; i <= k; ++i) args[i] = (i % 2 == 1) ? &U : &Ud;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  cxd acc(0.0, 0.0);
  do {
    Mat chain = position_derivation(*args[1], I[perm[0]], lat, fiber);
    for (int i = 2; i <= k; ++i)
      chain = chain * position_derivation(*args[i], I[perm[i - 1]], lat, fiber);
    acc += (double)perm_parity(perm) * trace_of_product(*args[0], chain);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Constants::Delta(k) * acc / ((double)lat.sites() * fiber);
}

double fedosov_trace_index(const Mat& T, int n) {
  if (n < 1) throw std::invalid_argument("fedosov_trace_index: n must be >= 1");
  if (operator_norm_estimate(T) > 1.0 + 1e-8)
    throw std::invalid_argument("fedosov_trace_index: T must be a contraction");
  const Mat Mdom = Mat::Identity(T.cols(), T.cols()) - T.adjoint() * T;
  const Mat Mcod = Mat::Identity(T.rows(), T.rows()) - T * T.adjoint();
  return (mat_power(Mdom, n).trace() - mat_power(Mcod, n).trace()).real();
}

IndexValue index_even_single(const FermiData& fd, const std::vector<int>& I,
                             const std::vector<double>& x0, IndexOptions opt) {
  const Lattice& lat = fd.lat;
  validate_I(I, lat, /*even=*/true);
  const int k = (int)I.size();
  if ((int)x0.size() != k) throw std::invalid_argument("index_even: x0 must have |I| entries");
  const int default_n = k / 2 + 1;
  IndexValue out;
  out.n = (opt.n > 0) ? opt.n : default_n;
  out.power_below_default = out.n < default_n;
  const double radius = (opt.window_radius < 0.0) ? lat.L / 4.0 : opt.window_radius;

  const int N = fd.fiber;
  const int ns = lat.sites();
  const int n_occ = fd.n_occ;
  if (n_occ == 0) return out;

  const auto cr = build_gammas(k);
  const int spinor = cr.dim();

  // unit-vector components of the shifted position along the Dirac directions
  std::vector<Eigen::VectorXd> dvec(k, Eigen::VectorXd(ns * N));
  for (int s = 0; s < ns; ++s) {
    const auto c = lat.coords(s);
    double norm2 = 0.0;
    std::vector<double> u(k);
    for (int i = 0; i < k; ++i) {
      u[i] = c[I[i] - 1] + x0[i];
      norm2 += u[i] * u[i];
    }
    const double norm = std::sqrt(norm2);
    for (int i = 0; i < k; ++i)
      for (int f = 0; f < N; ++f) dvec[i][s * N + f] = u[i] / norm;
  }

  // compress the Dirac phase to the occupied subspace: T = sum_i gamma_i x (V^dag D_i V)
  Mat T = Mat::Zero(spinor * n_occ, spinor * n_occ);
  for (int i = 0; i < k; ++i) {
    const Mat B = fd.V.adjoint() * (dvec[i].cast<cxd>().asDiagonal() * fd.V);
    T += kron(cr.gamma[i], B);
  }
  const Mat S = kron(cr.gamma0, Mat::Identity(n_occ, n_occ));
  const Mat Id = Mat::Identity(spinor * n_occ, spinor * n_occ);
  const Mat Sp = 0.5 * (Id + S);
  const Mat Sm = 0.5 * (Id - S);

  const Mat Ap = Sp - Sp * T * Sm * T * Sp;
  const Mat Am = Sm - Sm * T * Sp * T * Sm;

  // trace window around the Dirac center (the full-space trace difference is
  // identically zero at finite volume; the window recovers the absolutely
  // convergent infinite-volume sum and excludes the compensating seam modes)
  const Eigen::VectorXd wsite = window_weights(I, x0, lat, radius);
  Eigen::VectorXd wfull(ns * N);
  for (int s = 0; s < ns; ++s)
    for (int f = 0; f < N; ++f) wfull[s * N + f] = wsite[s];
  const Mat chi = fd.V.adjoint() * (wfull.cast<cxd>().asDiagonal() * fd.V);
  const Mat X = kron(Mat::Identity(spinor, spinor), chi);

  out.raw_windowed =
      (trace_of_product(X, mat_power(Ap, out.n)) - trace_of_product(X, mat_power(Am, out.n)))
          .real();
  out.value = out.raw_windowed / (Constants::Lambda(k) * transverse_volume(lat, k) * N);
  return out;
}

IndexValue index_odd_single(const FermiUnitaryData& fu, const std::vector<int>& I,
                            const std::vector<double>& x0, IndexOptions opt) {
  const Lattice& lat = fu.lat;
  validate_I(I, lat, /*even=*/false);
  const int k = (int)I.size();
  if ((int)x0.size() != k) throw std::invalid_argument("index_odd: x0 must have |I| entries");
  const int default_n = (k + 1) / 2;
  IndexValue out;
  out.n = (opt.n > 0) ? opt.n : default_n;
  out.power_below_default = out.n < default_n;
  const double radius = (opt.window_radius < 0.0) ? lat.L / 4.0 : opt.window_radius;

  const int N = fu.half_fiber;
  const int ns = lat.sites();
  const auto cr = build_gammas(k);
  const int spinor = cr.dim();
  const long dim = (long)spinor * ns * N;

  // unitarity is a precondition; residual should be at the eigensolver level
  const double ures =
      (fu.U.adjoint() * fu.U - Mat::Identity(ns * N, ns * N)).cwiseAbs().maxCoeff();
  if (ures > 1e-8)
    throw std::invalid_argument("index_odd: U is not unitary, residual " + std::to_string(ures));

  const Mat Fsite = dirac_phase(I, x0, lat, cr);  // spinor x sites
  Mat Fhat = Mat::Zero(dim, dim);
  for (int a = 0; a < spinor; ++a)
    for (int b = 0; b < spinor; ++b)
      for (int s = 0; s < ns; ++s) {
        const cxd v = Fsite(a * ns + s, b * ns + s);
        if (v == cxd(0.0, 0.0)) continue;
        for (int f = 0; f < N; ++f)
          Fhat((a * ns + s) * N + f, (b * ns + s) * N + f) = v;
      }
  const Mat Id = Mat::Identity(dim, dim);
  const Mat Phat = 0.5 * (Id + Fhat);
  const Mat Uhat = kron(Mat::Identity(spinor, spinor), fu.U);
  const Mat T = Phat * Uhat * Phat + (Id - Phat);

  const Mat Mdom = Id - T.adjoint() * T;
  const Mat Mcod = Id - T * T.adjoint();
  const Mat Pd = mat_power(Mdom, out.n);
  const Mat Pc = mat_power(Mcod, out.n);

  const Eigen::VectorXd wsite = window_weights(I, x0, lat, radius);
  cxd acc(0.0, 0.0);
  for (int a = 0; a < spinor; ++a)
    for (int s = 0; s < ns; ++s)
      for (int f = 0; f < N; ++f) {
        const long idx = ((long)a * ns + s) * N + f;
        acc += wsite[s] * (Pd(idx, idx) - Pc(idx, idx));
      }
  out.raw_windowed = acc.real();
  out.value = out.raw_windowed / (Constants::Lambda(k) * transverse_volume(lat, k) * N);
  return out;
}

InvariantReport local_invariant_even(const std::vector<std::pair<std::uint64_t, FermiData>>& s,
                                     const std::vector<int>& I, ReportOptions opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InvariantReport rep;
  rep.route = "local";
  rep.I = I;
  if (!s.empty()) {
    rep.L = s.front().second.lat.L;
    rep.mu = s.front().second.mu;
  }
  for (const auto& [seed, fd] : s) {
    const cxd v = local_cocycle_even(fd.P, I, fd.lat, fd.fiber);
    rep.samples.push_back({seed, {}, v.real(), std::abs(v.imag())});
  }
  return finish_report(std::move(rep), opt.rounding_threshold, t0);
}

InvariantReport local_invariant_odd(
    const std::vector<std::pair<std::uint64_t, FermiUnitaryData>>& s, const std::vector<int>& I,
    ReportOptions opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InvariantReport rep;
  rep.route = "local";
  rep.I = I;
  if (!s.empty()) rep.L = s.front().second.lat.L;
  for (const auto& [seed, fu] : s) {
    const cxd v = local_cocycle_odd(fu.U, I, fu.lat, fu.half_fiber);
    rep.samples.push_back({seed, {}, v.real(), std::abs(v.imag())});
  }
  return finish_report(std::move(rep), opt.rounding_threshold, t0);
}

InvariantReport index_invariant_even(const std::vector<std::pair<std::uint64_t, FermiData>>& s,
                                     const std::vector<int>& I, ReportOptions opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InvariantReport rep;
  rep.route = "index";
  rep.I = I;
  if (!s.empty()) {
    rep.L = s.front().second.lat.L;
    rep.mu = s.front().second.mu;
  }
  auto x0s = opt.x0_list.empty()
                 ? std::vector<std::vector<double>>{default_x0((int)I.size())}
                 : opt.x0_list;
  for (const auto& [seed, fd] : s)
    for (const auto& x0 : x0s) {
      const IndexValue v = index_even_single(fd, I, x0, opt.index);
      rep.fedosov_power = v.n;
      rep.samples.push_back({seed, x0, v.value, 0.0});
    }
  return finish_report(std::move(rep), opt.rounding_threshold, t0);
}

InvariantReport index_invariant_odd(
    const std::vector<std::pair<std::uint64_t, FermiUnitaryData>>& s, const std::vector<int>& I,
    ReportOptions opt) {
  const auto t0 = std::chrono::steady_clock::now();
  InvariantReport rep;
  rep.route = "index";
  rep.I = I;
  if (!s.empty()) rep.L = s.front().second.lat.L;
  auto x0s = opt.x0_list.empty()
                 ? std::vector<std::vector<double>>{default_x0((int)I.size())}
                 : opt.x0_list;
  for (const auto& [seed, fu] : s)
    for (const auto& x0 : x0s) {
      const IndexValue v = index_odd_single(fu, I, x0, opt.index);
      rep.fedosov_power = v.n;
      rep.samples.push_back({seed, x0, v.value, 0.0});
    }
  return finish_report(std::move(rep), opt.rounding_threshold, t0);
}

}  // namespace ncti
