#include "ncti/represent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ncti {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool phase_commensurate(const Eigen::MatrixXd& phi, int L) {
  for (int i = 0; i < phi.rows(); ++i)
    for (int j = 0; j < phi.cols(); ++j) {
      const double cycles = phi(i, j) * L / kTwoPi;
      if (std::abs(cycles - std::round(cycles)) > 1e-9) return false;
    }
  return true;
}

void require_commensurate(const Eigen::MatrixXd& phi, const Lattice& lat) {
  if (lat.bc != BC::periodic || phase_commensurate(phi, lat.L)) return;
  std::ostringstream msg;
  msg << "magnetic phases are not L-periodic at L=" << lat.L;
  if (auto best = smallest_commensurate_L(phi))
    msg << "; smallest commensurate L is " << *best;
  else
    msg << "; no commensurate L found below 40000";
  throw std::invalid_argument(msg.str());
}

Mat translation_impl(const std::vector<int>& q, const Eigen::MatrixXd& phi, const Lattice& lat,
                     int fiber, double sign) {
  if ((int)q.size() != lat.d) throw std::invalid_argument("translation: q has wrong dimension");
  require_commensurate(phi, lat);
  const int n = lat.sites() * fiber;
  Mat U = Mat::Zero(n, n);
  for (int s = 0; s < lat.sites(); ++s) {
    const auto c = lat.coords(s);
    std::vector<int> t(lat.d);
    for (int j = 0; j < lat.d; ++j) t[j] = c[j] + q[j];
    int dst;
    if (lat.bc == BC::periodic) {
      dst = lat.site_index(lat.wrap(t));
    } else {
      if (!lat.in_range(t)) continue;  // open boundary: partial isometry
      dst = lat.site_index(t);
    }
    double ph = 0.0;
    for (int i = 0; i < lat.d; ++i)
      for (int j = 0; j < lat.d; ++j) ph += q[i] * phi(i, j) * c[j];
    const cxd amp = std::exp(cxd(0.0, sign * ph));
    for (int f = 0; f < fiber; ++f) U(dst * fiber + f, s * fiber + f) = amp;
  }
  return U;
}

}  // namespace

std::optional<int> smallest_commensurate_L(const Eigen::MatrixXd& phi, int limit) {
  for (int L = 1; L <= limit; ++L)
    if (phase_commensurate(phi, L)) return L;
  return std::nullopt;
}

bool flux_commensurate(const Eigen::MatrixXd& phi, int L) { return phase_commensurate(phi, L); }

Mat magnetic_translation(const std::vector<int>& q, const Eigen::MatrixXd& phi,
                         const Lattice& lat, int fiber) {
  return translation_impl(q, phi, lat, fiber, +1.0);
}

Mat dual_translation(const std::vector<int>& q, const Eigen::MatrixXd& phi, const Lattice& lat,
                     int fiber) {
  return translation_impl(q, phi, lat, fiber, -1.0);
}

FiniteRep represent(const NCElement& a, int omega, const Lattice& lat) {
  if (lat.d != a.sys->d) throw std::invalid_argument("represent: dimension mismatch");
  if (omega < 0 || omega >= a.sys->points)
    throw std::invalid_argument("represent: omega out of range");
  if (2 * a.radius() >= lat.L)
    throw std::invalid_argument("represent: support radius must be < L/2 (aliasing)");
  require_commensurate(a.twist.theta, lat);

  const int N = a.sys->fiber;
  const int n = lat.sites() * N;
  Mat op = Mat::Zero(n, n);
  for (int s = 0; s < lat.sites(); ++s) {
    const auto c = lat.coords(s);
    // coefficient at site x is evaluated on the x-translated configuration
    const int w = a.sys->translate(omega, c);
    for (const auto& [q, f] : a.coeff) {
      std::vector<int> t(lat.d);
      for (int j = 0; j < lat.d; ++j) t[j] = c[j] + q[j];
      int dst;
      if (lat.bc == BC::periodic) {
        dst = lat.site_index(lat.wrap(t));
      } else {
        if (!lat.in_range(t)) continue;
        dst = lat.site_index(t);
      }
      double ph = 0.0;
      for (int i = 0; i < lat.d; ++i)
        for (int j = 0; j < lat.d; ++j) ph += q[i] * a.twist.theta(i, j) * c[j];
      op.block(dst * N, s * N, N, N) += std::exp(cxd(0.0, ph)) * f[w];
    }
  }
  return FiniteRep{std::move(op), lat, N};
}

Mat dirac_phase(const std::vector<int>& I, const std::vector<double>& x0, const Lattice& lat,
                const CliffordRep& cr) {
  const int k = (int)I.size();
  if (cr.k != k) throw std::invalid_argument("dirac_phase: Clifford rank must equal |I|");
  if ((int)x0.size() != k) throw std::invalid_argument("dirac_phase: x0 must have |I| entries");
  for (int dir : I)
    if (dir < 1 || dir > lat.d) throw std::invalid_argument("dirac_phase: direction out of range");
  for (double v : x0)
    if (v <= 0.0 || v >= 1.0)
      throw std::invalid_argument("dirac_phase: x0 components must lie in (0,1)");

  const int ns = lat.sites();
  const int dim = cr.dim();
  Mat F = Mat::Zero(dim * ns, dim * ns);
  for (int s = 0; s < ns; ++s) {
    const auto c = lat.coords(s);
    double norm2 = 0.0;
    std::vector<double> u(k);
    for (int i = 0; i < k; ++i) {
      u[i] = c[I[i] - 1] + x0[i];
      norm2 += u[i] * u[i];
    }
    const double norm = std::sqrt(norm2);
    for (int i = 0; i < k; ++i) {
      const double comp = u[i] / norm;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
          const cxd g = cr.gamma[i](a, b);
          if (g != cxd(0.0, 0.0)) F(a * ns + s, b * ns + s) += g * comp;
        }
    }
  }
  return F;
}

}  // namespace ncti
