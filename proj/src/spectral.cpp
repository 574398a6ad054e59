#include "ncti/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace ncti {

namespace {

void require_hermitian(const Mat& H) {
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("spectral: operator is not hermitian");
}

FermiData flatten(const Mat& H, double mu, const Lattice& lat, int fiber, double gap_tol) {
  require_hermitian(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Eigen::VectorXd ev = es.eigenvalues();
  int n_occ = 0;
  double below = -std::numeric_limits<double>::infinity();
  double above = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < mu) {
      ++n_occ;
      below = std::max(below, ev[i]);
    } else {
      above = std::min(above, ev[i]);
    }
  }
  const double dist = std::min(std::abs(mu - below), std::abs(above - mu));
  if (dist < gap_tol) {
    std::ostringstream msg;
    msg << "fermi_projection: mu=" << mu << " lies within " << gap_tol
        << " of the spectrum (nearest below " << below << ", above " << above << ")";
    throw GapViolation(msg.str(), below, above);
  }
  FermiData fd;
  fd.lat = lat;
  fd.fiber = fiber;
  fd.mu = mu;
  fd.n_occ = n_occ;
  fd.nearest_below = std::isfinite(below) ? below : 0.0;
  fd.nearest_above = std::isfinite(above) ? above : 0.0;
  fd.evals = ev;
  fd.V = es.eigenvectors().leftCols(n_occ);
  fd.P = fd.V * fd.V.adjoint();
  return fd;
}

}  // namespace

FermiData fermi_projection(const Mat& H, double mu, const Lattice& lat, int fiber,
                           double gap_tol) {
  return flatten(H, mu, lat, fiber, gap_tol);
}

FermiData fermi_projection_filling(const Mat& H, double filling, const Lattice& lat, int fiber,
                                   double gap_tol) {
  if (filling <= 0.0 || filling >= 1.0)
    throw std::invalid_argument("fermi_projection_filling: filling must lie in (0,1)");
  require_hermitian(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const int n_occ = (int)std::lround(filling * ev.size());
  if (n_occ < 1 || n_occ >= ev.size())
    throw std::invalid_argument("fermi_projection_filling: filling leaves no gap to bisect");
  const double mu = 0.5 * (ev[n_occ - 1] + ev[n_occ]);
  return flatten(H, mu, lat, fiber, gap_tol);
}

FermiUnitaryData fermi_unitary(const Mat& H, const Mat& J_fiber, const Lattice& lat, int fiber,
                               double chiral_tol, double gap_tol) {
  require_hermitian(H);
  if (J_fiber.rows() != fiber || J_fiber.cols() != fiber)
    throw std::invalid_argument("fermi_unitary: J must act on the fiber");
  // J must be a balanced diagonal involution
  std::vector<int> plus, minus;
  for (int f = 0; f < fiber; ++f) {
    for (int g = 0; g < fiber; ++g)
      if (f != g && std::abs(J_fiber(f, g)) > 0.0)
        throw std::invalid_argument("fermi_unitary: J must be diagonal");
    const double v = J_fiber(f, f).real();
    if (std::abs(std::abs(v) - 1.0) > 1e-14 || std::abs(J_fiber(f, f).imag()) > 1e-14)
      throw std::invalid_argument("fermi_unitary: J entries must be +-1");
    (v > 0 ? plus : minus).push_back(f);
  }
  if (plus.size() != minus.size())
    throw std::invalid_argument("fermi_unitary: chiral sectors must have equal dimension");

  const Mat J = kron(Mat::Identity(lat.sites(), lat.sites()), J_fiber);
  const double chiral_residual = (J * H * J + H).cwiseAbs().maxCoeff();
  if (chiral_residual > chiral_tol) {
    std::ostringstream msg;
    msg << "fermi_unitary: operator is not chiral, residual |JHJ + H| = " << chiral_residual;
    throw std::invalid_argument(msg.str());
  }

  FermiData fd = flatten(H, 0.0, lat, fiber, gap_tol);
  const Mat Q = Mat::Identity(H.rows(), H.cols()) - 2.0 * fd.P;

  const int half = fiber / 2;
  const int ns = lat.sites();
  Mat U(ns * half, ns * half);
  for (int sr = 0; sr < ns; ++sr)
    for (int sc = 0; sc < ns; ++sc)
      for (int fr = 0; fr < half; ++fr)
        for (int fc = 0; fc < half; ++fc)
          U(sr * half + fr, sc * half + fc) =
              Q(sr * fiber + minus[fr], sc * fiber + plus[fc]);

  const double unit_residual =
      (U.adjoint() * U - Mat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
  if (unit_residual > 1e-10)
    throw std::runtime_error("fermi_unitary: flattened block is not unitary");

  FermiUnitaryData out;
  out.lat = lat;
  out.half_fiber = half;
  out.U = std::move(U);
  return out;
}

}  // namespace ncti
