#include "ncti/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ncti/represent.hpp"

namespace ncti {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int reduced_band_count(int flux_num, int flux_den) {
  // phases double through the dual translation pair: effective flux per plaquette is
  // -2 phi, so the magnetic unit cell has den / gcd(2 num, den) sites
  const int g = std::gcd(std::abs(2 * flux_num), flux_den);
  return flux_den / g;
}

double disorder_factor(const LatticeModel& model, const DisorderSample& sample,
                       const std::vector<int>& c, int channel) {
  if (channel < 0) return 1.0;
  if (channel >= model.channels())
    throw std::invalid_argument("model: hop references an undefined disorder channel");
  return 1.0 + model.lambda[channel] * sample.value(c, channel);
}

}  // namespace

LatticeModel hofstadter_model(int flux_num, int flux_den, double lambda) {
  if (flux_den <= 0) throw std::invalid_argument("hofstadter_model: flux denominator <= 0");
  LatticeModel m;
  m.name = "hofstadter2d";
  m.d = 2;
  m.N = 1;
  m.phi = Eigen::MatrixXd::Zero(2, 2);
  m.phi(0, 1) = kTwoPi * flux_num / flux_den;
  m.phi(1, 0) = -m.phi(0, 1);
  Mat one = Mat::Identity(1, 1);
  m.hops = {{{1, 0}, one, 0}, {{0, 1}, one, 1}};
  m.lambda = {lambda, lambda};
  m.default_filling = 1.0 / reduced_band_count(flux_num, flux_den);
  return m;
}

LatticeModel ssh_model(double t1, double t2, double lambda) {
  LatticeModel m;
  m.name = "ssh1d";
  m.d = 1;
  m.N = 2;
  m.phi = Eigen::MatrixXd::Zero(1, 1);
  Mat intra(2, 2), inter(2, 2);
  intra << 0, t1, t1, 0;   // within the cell, hermitian
  inter << 0, t2, 0, 0;    // t2 |x+1, A><x, B|
  m.hops = {{{0}, intra, 0}, {{1}, inter, 1}};
  m.lambda = {lambda, lambda};
  m.chiral = true;
  Mat J(2, 2);
  J << 1, 0, 0, -1;
  m.chiral_op = J;
  m.default_filling = -1.0;
  m.default_mu = 0.0;
  return m;
}

LatticeModel stacked_model(int flux_num, int flux_den, double t_perp, double lambda) {
  LatticeModel m;
  m.name = "stacked_chern3d";
  m.d = 3;
  m.N = 1;
  m.phi = Eigen::MatrixXd::Zero(3, 3);
  m.phi(0, 1) = kTwoPi * flux_num / flux_den;
  m.phi(1, 0) = -m.phi(0, 1);
  Mat one = Mat::Identity(1, 1);
  m.hops = {{{1, 0, 0}, one, 0},
            {{0, 1, 0}, one, 1},
            {{0, 0, 1}, t_perp * one, -1}};
  m.lambda = {lambda, lambda};
  m.default_filling = 1.0 / reduced_band_count(flux_num, flux_den);
  return m;
}

Mat build_hamiltonian(const LatticeModel& model, const DisorderSample& sample,
                      const Lattice& lat) {
  if (lat.d != model.d) throw std::invalid_argument("build_hamiltonian: dimension mismatch");
  const long dim = (long)lat.sites() * model.N;
  if (dim > 12000)
    throw std::invalid_argument("build_hamiltonian: dense dimension cap (12000) exceeded");
  if (lat.bc == BC::periodic && !flux_commensurate(model.phi, lat.L)) {
    // magnetic phases must close around every cycle or the torus operator is not covariant
    std::string msg = "build_hamiltonian: flux incommensurate with L=" + std::to_string(lat.L);
    if (auto best = smallest_commensurate_L(model.phi))
      msg += "; smallest commensurate L is " + std::to_string(*best);
    throw std::invalid_argument(msg);
  }

  const int N = model.N;
  Mat H = Mat::Zero(dim, dim);
  for (const auto& hop : model.hops) {
    if ((int)hop.q.size() != lat.d)
      throw std::invalid_argument("build_hamiltonian: hop displacement has wrong dimension");
    const bool onsite =
        std::all_of(hop.q.begin(), hop.q.end(), [](int v) { return v == 0; });
    if (onsite && (hop.W - hop.W.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("build_hamiltonian: onsite block must be hermitian");
    for (int s = 0; s < lat.sites(); ++s) {
      const auto c = lat.coords(s);
      const double fac = disorder_factor(model, sample, c, hop.channel);
      if (onsite) {
        H.block(s * N, s * N, N, N) += fac * hop.W;
        continue;
      }
      std::vector<int> t(lat.d);
      for (int j = 0; j < lat.d; ++j) t[j] = c[j] + hop.q[j];
      int dst;
      if (lat.bc == BC::periodic) {
        dst = lat.site_index(lat.wrap(t));
      } else {
        if (!lat.in_range(t)) continue;
        dst = lat.site_index(t);
      }
      double ph = 0.0;
      for (int i = 0; i < lat.d; ++i)
        for (int j = 0; j < lat.d; ++j) ph += hop.q[i] * model.phi(i, j) * c[j];
      const cxd amp = fac * std::exp(cxd(0.0, ph));
      H.block(dst * N, s * N, N, N) += amp * hop.W;
      H.block(s * N, dst * N, N, N) += std::conj(amp) * hop.W.adjoint();
    }
  }
  return H;
}

int unshifted_point(const Lattice& lat) {
  return lat.site_index(std::vector<int>(lat.d, 0));
}

NCElement model_to_ncelement(const LatticeModel& model, const DisorderSample& sample,
                             const Lattice& lat) {
  auto sys = torus_orbit_system(lat.d, model.N, lat.L);
  TwistMatrix tw{model.phi};
  NCElement a = NCElement::zero(sys, tw);
  for (const auto& hop : model.hops) {
    const bool onsite =
        std::all_of(hop.q.begin(), hop.q.end(), [](int v) { return v == 0; });
    std::vector<int> mq(lat.d);
    for (int j = 0; j < lat.d; ++j) mq[j] = -hop.q[j];
    for (int s = 0; s < lat.sites(); ++s) {
      const auto c = lat.coords(s);
      const double fac = disorder_factor(model, sample, c, hop.channel);
      if (onsite) {
        a.add_term(hop.q, s, fac * hop.W);
        continue;
      }
      a.add_term(hop.q, s, fac * hop.W);
      // hermitian partner: b_{-q}(w) = b_q(tau_{-q} w)^dagger
      std::vector<int> cm(lat.d);
      for (int j = 0; j < lat.d; ++j) cm[j] = c[j] - hop.q[j];
      const double fac_m = disorder_factor(model, sample, lat.wrap(cm), hop.channel);
      a.add_term(mq, s, fac_m * hop.W.adjoint());
    }
  }
  return a;
}

}  // namespace ncti
