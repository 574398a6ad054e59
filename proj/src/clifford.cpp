#include "ncti/clifford.hpp"

#include <complex>
#include <stdexcept>

namespace ncti {

namespace {

Mat pauli(int i) {
  Mat m(2, 2);
  const cxd I(0.0, 1.0);
  switch (i) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// (-i)^{m/2} gamma_1...gamma_m for an even-sized set: hermitian, squares to 1,
// anticommutes with every generator in the set.
Mat grading(const std::vector<Mat>& g) {
  Mat prod = g[0];
  for (size_t i = 1; i < g.size(); ++i) prod = prod * g[i];
  return std::pow(cxd(0.0, -1.0), (int)g.size() / 2) * prod;
}

}  // namespace

CliffordRep build_gammas(int k) {
  if (k < 1 || k > 8) throw std::invalid_argument("build_gammas: k must be in [1,8]");

  CliffordRep rep;
  rep.k = k;

  if (k == 1) {
    rep.gamma = {Mat::Identity(1, 1)};  // hermiticity in 1 dim forces +-1; we pick +1
    rep.parity_sign = cxd(1.0, 0.0);
    return rep;
  }

  // Even-sized core by doubling: {g_i} on C^m -> {s1 x g_i, s2 x 1, s3 x 1} on C^{2m}.
  const int m_even = k - (k % 2);
  std::vector<Mat> g = {pauli(1), pauli(2)};
  while ((int)g.size() < m_even) {
    const Mat id = Mat::Identity(g[0].rows(), g[0].cols());
    std::vector<Mat> next;
    next.reserve(g.size() + 2);
    for (const auto& gi : g) next.push_back(kron(pauli(1), gi));
    next.push_back(kron(pauli(2), id));
    next.push_back(kron(pauli(3), id));
    g = std::move(next);
  }

  if (k % 2 == 0) {
    rep.gamma0 = grading(g);
    rep.gamma = std::move(g);
    return rep;
  }

  // Odd k: the grading of the even core supplies the extra anticommuting generator.
  // The product gamma_1...gamma_k of hermitian anticommuting involutions squares to
  // (-1)^{k(k-1)/2}, so the parity scalar is +-i^k only for k = 3 (mod 4); for
  // k = 1 (mod 4) it is forced real and we pin +1, matching the 1-dim choice at k = 1.
  g.push_back(grading(g));
  Mat prod = g[0];
  for (int i = 1; i < k; ++i) prod = prod * g[i];
  const cxd want = (k % 4 == 3) ? std::pow(cxd(0.0, 1.0), k) : cxd(1.0, 0.0);
  if (std::abs(prod(0, 0) - want) > std::abs(prod(0, 0) + want)) g[k - 1] = -g[k - 1];
  rep.parity_sign = want;
  rep.gamma = std::move(g);
  return rep;
}

}  // namespace ncti
