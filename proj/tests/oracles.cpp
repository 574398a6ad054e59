#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

using namespace ncti;

namespace oracle {

namespace {
constexpr double kPi = std::numbers::pi;

Mat lowest_projector(const Mat& H, int n_occ) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Mat V = es.eigenvectors().leftCols(n_occ);
  return V * V.adjoint();
}
}  // namespace

double chern_from_bloch(const BlochFn& Hk, int n_occ, double w1, double w2, int grid) {
  const double h1 = w1 / grid, h2 = w2 / grid;
  const double delta = 1e-4;
  cxd acc(0.0, 0.0);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      const double k1 = (a + 0.5) * h1, k2 = (b + 0.5) * h2;
      const Mat P = lowest_projector(Hk(k1, k2), n_occ);
      const Mat d1 = (lowest_projector(Hk(k1 + delta, k2), n_occ) -
                      lowest_projector(Hk(k1 - delta, k2), n_occ)) /
                     (2 * delta);
      const Mat d2 = (lowest_projector(Hk(k1, k2 + delta), n_occ) -
                      lowest_projector(Hk(k1, k2 - delta), n_occ)) /
                     (2 * delta);
      acc += (P * (d1 * d2 - d2 * d1)).trace() * h1 * h2;
    }
  return (cxd(0.0, 1.0) / (2.0 * kPi) * acc).real();
}

BlochFn qwz_bloch(double m) {
  return [m](double k1, double k2) {
    Mat H(2, 2);
    const double h1 = std::sin(k1), h2 = std::sin(k2), h3 = m + std::cos(k1) + std::cos(k2);
    H << cxd(h3, 0), cxd(h1, -h2), cxd(h1, h2), cxd(-h3, 0);
    return H;
  };
}

int harper_reduced_bands(int num, int den) {
  return den / std::gcd(std::abs(2 * num), den);
}

Mat harper_bloch_at(int num, int den, double k1, double k2) {
  const int q = harper_reduced_bands(num, den);
  const double phi = 2.0 * kPi * num / den;
  Mat H = Mat::Zero(q, q);
  for (int m = 0; m < q; ++m) {
    H(m, m) = 2.0 * std::cos(2.0 * phi * m + k2);
    // hop m -> m+1 carries e^{-i k1} (site-displacement +1), the reverse e^{+i k1}
    H((m + 1) % q, m) += std::exp(cxd(0.0, -k1));
    H(m, (m + 1) % q) += std::exp(cxd(0.0, k1));
  }
  return H;
}

BlochFn harper_bloch(int num, int den) {
  return [num, den](double k1, double k2) { return harper_bloch_at(num, den, k1, k2); };
}

std::vector<double> harper_torus_spectrum(int num, int den, int L) {
  const int q = harper_reduced_bands(num, den);
  if (L % q != 0) throw std::invalid_argument("harper_torus_spectrum: q_tilde must divide L");
  std::vector<double> ev;
  ev.reserve((size_t)L * L);
  for (int n1 = 0; n1 < L / q; ++n1)
    for (int n2 = 0; n2 < L; ++n2) {
      const Mat H = harper_bloch_at(num, den, 2.0 * kPi * n1 / L, 2.0 * kPi * n2 / L);
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      for (int j = 0; j < q; ++j) ev.push_back(es.eigenvalues()(j));
    }
  std::sort(ev.begin(), ev.end());
  return ev;
}

double winding_from_symbol(const std::function<cxd(double)>& h, int grid) {
  double total = 0.0;
  cxd prev = h(0.0);
  for (int i = 1; i <= grid; ++i) {
    const cxd cur = h(2.0 * kPi * i / grid);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / (2.0 * kPi);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching series of length >= 2");
  const int n = (int)x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {
Mat random_frame(int rows, int rank, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat A(rows, rank);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < rank; ++c) A(r, c) = cxd(g(gen), g(gen));
  Eigen::HouseholderQR<Mat> qr(A);
  return Mat(qr.householderQ()) * Mat::Identity(rows, rank);
}
}  // namespace

Mat random_partial_isometry(int rows, int cols, int rank, std::uint64_t seed) {
  if (rank > std::min(rows, cols))
    throw std::invalid_argument("random_partial_isometry: rank too large");
  std::mt19937_64 gen(seed);
  const Mat A = random_frame(rows, rank, gen);
  const Mat B = random_frame(cols, rank, gen);
  return A * B.adjoint();
}

SysPtr random_cyclic_system(int d, int fiber, int M, int rot_max, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> rot(0, rot_max);
  auto sys = std::make_shared<DynamicalSystem>();
  sys->d = d;
  sys->fiber = fiber;
  sys->points = M;
  sys->shift.assign(d, std::vector<int>(M));
  for (int j = 0; j < d; ++j) {
    const int r = rot(gen);
    for (int w = 0; w < M; ++w) sys->shift[j][w] = (w + r) % M;
  }
  sys->weight.assign(M, 1.0 / M);
  sys->finalize();
  return sys;
}

NCElement random_ncelement(SysPtr sys, const TwistMatrix& th, int radius, std::uint64_t seed,
                           int max_terms) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> qd(-radius, radius);
  std::normal_distribution<double> g(0.0, 1.0);
  NCElement a = NCElement::zero(sys, th);
  const int N = sys->fiber;
  for (int t = 0; t < max_terms; ++t) {
    std::vector<int> q(sys->d);
    for (int j = 0; j < sys->d; ++j) q[j] = qd(gen);
    for (int w = 0; w < sys->points; ++w) {
      Mat m(N, N);
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) m(r, c) = cxd(g(gen), g(gen));
      a.add_term(q, w, m);
    }
  }
  return a;
}

TwistMatrix random_twist(int d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Eigen::MatrixXd th = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      th(i, j) = u(gen);
      th(j, i) = -th(i, j);
    }
  return TwistMatrix{th};
}

}  // namespace oracle
