// Both invariant routes: normalization constants, the local position-commutator
// cocycle, the kernel-count index with its trace window, and report aggregation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ncti/invariants.hpp"
#include "ncti/lattice.hpp"
#include "ncti/model.hpp"
#include "ncti/spectral.hpp"
#include "oracles.hpp"

using namespace ncti;

namespace {

constexpr double kPi = std::numbers::pi;

double nrm(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct Hof24 {
  Lattice lat{2, 24, BC::periodic};
  FermiData fd;
  double oracle_C = 0.0;
};

const Hof24& hof24() {
  static const Hof24 data = [] {
    Hof24 h;
    auto model = hofstadter_model(1, 3, 0.0);
    const Mat H = build_hamiltonian(model, DisorderSample{0, 2, 24, {}}, h.lat);
    h.fd = fermi_projection_filling(H, model.default_filling, h.lat, model.N);
    h.oracle_C =
        oracle::chern_from_bloch(oracle::harper_bloch(1, 3), 1, 2.0 * kPi / 3.0, 2.0 * kPi, 48);
    return h;
  }();
  return data;
}

FermiUnitaryData ssh_unitary(double t1, double t2, double lam, int L, std::uint64_t seed) {
  Lattice lat{1, L, BC::periodic};
  auto model = ssh_model(t1, t2, lam);
  const Mat H = build_hamiltonian(model, DisorderSample{seed, 1, L, {}}, lat);
  return fermi_unitary(H, model.chiral_op, lat, model.N);
}

}  // namespace

TEST_CASE("normalization constants satisfy the geometric identities") {
  for (int k = 1; k <= 6; ++k) {
    const cxd lhs = 2.0 * Constants::Gamma(k) * Constants::LambdaTilde(k);
    const cxd rhs = std::pow(cxd(0.0, 1.0), k) * Constants::Delta(k);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));

    const double lg = Constants::Lambda(k) * Constants::Gamma(k);
    if (k % 2 == 0) {
      const int m = k / 2;
      CHECK(lg == doctest::Approx(((m % 2 == 0) ? 1.0 : -1.0) / 2.0).epsilon(1e-14));
    } else {
      const int m = (k + 1) / 2;
      CHECK(lg ==
            doctest::Approx(((m % 2 == 0) ? 1.0 : -1.0) / std::pow(2.0, 2 * m)).epsilon(1e-14));
    }
  }
  CHECK(std::abs(Constants::Delta(2) - cxd(0.0, 2.0 * kPi)) < 1e-15);
  CHECK(std::abs(Constants::Delta(1) - cxd(0.0, -1.0)) < 1e-15);
  CHECK(Constants::Lambda(1) == 1.0);
  CHECK(Constants::Gamma(1) == doctest::Approx(-0.25));
  CHECK(std::abs(Constants::LambdaTilde(1) - cxd(-2.0, 0.0)) < 1e-15);
  CHECK_THROWS_AS(Constants::Delta(0), std::invalid_argument);
  CHECK_THROWS_AS(Constants::Lambda(-1), std::invalid_argument);
}

TEST_CASE("position derivation scales blocks by the minimal-image displacement") {
  Lattice lat{1, 5, BC::periodic};
  Mat A = Mat::Random(10, 10);  // fiber 2
  const Mat D = position_derivation(A, 1, lat, 2);
  for (int sr = 0; sr < 5; ++sr)
    for (int sc = 0; sc < 5; ++sc) {
      const double disp = lat.displacement(lat.coords(sr)[0], lat.coords(sc)[0]);
      CHECK(nrm(D.block(sr * 2, sc * 2, 2, 2) -
                cxd(0.0, -disp) * A.block(sr * 2, sc * 2, 2, 2)) < 1e-14);
    }
  // wrap: distance from -2 to 2 is -1 on a 5-ring, literal 4 on the open window
  CHECK(lat.displacement(2, -2) == doctest::Approx(-1.0));
  Lattice open1{1, 5, BC::open};
  CHECK(open1.displacement(2, -2) == doctest::Approx(4.0));

  CHECK_THROWS_AS(position_derivation(A, 2, lat, 2), std::invalid_argument);
  CHECK_THROWS_AS(position_derivation(A, 0, lat, 2), std::invalid_argument);
  CHECK_THROWS_AS(position_derivation(Mat::Zero(3, 3), 1, lat, 2), std::invalid_argument);
}

TEST_CASE("local cocycle vanishes on on-site operators and validates its inputs") {
  // purely on-site model: the projection is site-diagonal, every derivation is zero
  LatticeModel m;
  m.name = "onsite";
  m.d = 2;
  m.N = 2;
  m.phi = Eigen::MatrixXd::Zero(2, 2);
  Mat W(2, 2);
  W << 1, cxd(0.3, 0.2), cxd(0.3, -0.2), -1;
  m.hops = {{{0, 0}, W, 0}};
  m.lambda = {0.8};
  Lattice lat{2, 5, BC::periodic};
  const Mat H = build_hamiltonian(m, DisorderSample{4, 2, 5, {}}, lat);
  auto fd = fermi_projection(H, 0.0, lat, 2);
  CHECK(std::abs(local_cocycle_even(fd.P, {1, 2}, lat, 2)) < 1e-14);

  CHECK_THROWS_AS(local_cocycle_even(fd.P, {1}, lat, 2), std::invalid_argument);      // odd |I|
  CHECK_THROWS_AS(local_cocycle_even(fd.P, {1, 1}, lat, 2), std::invalid_argument);   // repeat
  CHECK_THROWS_AS(local_cocycle_even(fd.P, {1, 3}, lat, 2), std::invalid_argument);   // range
  CHECK_THROWS_AS(local_cocycle_even(fd.P, {}, lat, 2), std::invalid_argument);
  Lattice open2{2, 5, BC::open};
  CHECK_THROWS_AS(local_cocycle_even(fd.P, {1, 2}, open2, 2), std::invalid_argument);
  CHECK_THROWS_AS(local_cocycle_odd(fd.P, {1, 2}, lat, 2), std::invalid_argument);    // even |I|
}

TEST_CASE("local even route matches the momentum-space curvature oracle") {
  const auto& h = hof24();
  CHECK(std::abs(std::abs(h.oracle_C) - 1.0) < 5e-3);  // lowest flux band carries unit charge
  const cxd z = local_cocycle_even(h.fd.P, {1, 2}, h.lat, 1);
  CHECK(std::abs(z.imag()) < 1e-10);
  CHECK(std::abs(z.real() - h.oracle_C) < 0.02);
}

TEST_CASE("two-band insulator carries half the per-fiber weight") {
  // momentum-space oracle works per cell; the canonical trace divides by the fiber,
  // so the reported strong invariant is C / 2 here
  LatticeModel m;
  m.name = "two_band";
  m.d = 2;
  m.N = 2;
  m.phi = Eigen::MatrixXd::Zero(2, 2);
  Mat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, cxd(0, -1), cxd(0, 1), 0;
  s3 << 1, 0, 0, -1;
  m.hops = {{{1, 0}, 0.5 * (s3 + cxd(0, 1) * s1), -1},
            {{0, 1}, 0.5 * (s3 + cxd(0, 1) * s2), -1},
            {{0, 0}, -1.0 * s3, -1}};
  Lattice lat{2, 16, BC::periodic};
  const Mat H = build_hamiltonian(m, DisorderSample{0, 2, 16, {}}, lat);
  auto fd = fermi_projection(H, 0.0, lat, 2);

  const double C = oracle::chern_from_bloch(oracle::qwz_bloch(-1.0), 1, 2 * kPi, 2 * kPi, 48);
  CHECK(C == doctest::Approx(1.0).epsilon(5e-3));  // sign pinned analytically

  const cxd z = local_cocycle_even(fd.P, {1, 2}, lat, 2);
  CHECK(std::abs(z.real() - C / 2.0) < 5e-3);
  CHECK(std::abs(z.imag()) < 1e-10);
  auto iv = index_even_single(fd, {1, 2}, {0.5, 0.5});
  CHECK(std::abs(iv.value - C / 2.0) < 0.01);
}

TEST_CASE("local odd route: exact shift limits and the winding oracle") {
  // dimerized limit: flattened unitary is a pure shift, the cocycle telescopes
  const auto fud = ssh_unitary(0.0, 1.0, 0.0, 8, 0);
  const cxd zd = local_cocycle_odd(fud.U, {1}, fud.lat, 1);
  CHECK(std::abs(zd - cxd(1.0, 0.0)) < 1e-8);

  // on-site limit: block-diagonal unitary, derivation vanishes
  const auto fut = ssh_unitary(1.0, 0.0, 0.0, 8, 0);
  CHECK(std::abs(local_cocycle_odd(fut.U, {1}, fut.lat, 1)) < 1e-12);

  // clean dimerized-dominant chain against the symbol winding
  const double w = oracle::winding_from_symbol(
      [](double k) { return cxd(0.5, 0.0) + std::exp(cxd(0.0, k)); });
  CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
  const auto fu = ssh_unitary(0.5, 1.0, 0.0, 128, 0);
  const cxd z = local_cocycle_odd(fu.U, {1}, fu.lat, 1);
  CHECK(std::abs(z.real() - w) < 0.02);
  CHECK(std::abs(z.imag()) < 1e-10);
}

TEST_CASE("local invariants are exactly gauge invariant under diagonal phases") {
  Lattice lat{2, 12, BC::periodic};
  auto model = hofstadter_model(1, 3, 0.4);
  const Mat H = build_hamiltonian(model, DisorderSample{3, 2, 12, {}}, lat);
  auto fd = fermi_projection_filling(H, model.default_filling, lat, 1);
  const cxd z0 = local_cocycle_even(fd.P, {1, 2}, lat, 1);
  CHECK(std::abs(z0.real() - (-1.0)) < 0.05);  // disordered but deep in the phase

  Vec phase(lat.sites());
  for (int s = 0; s < lat.sites(); ++s) {
    const auto c = lat.coords(s);
    phase[s] = std::exp(cxd(0.0, 0.3 * c[0] - 1.1 * c[1] + 0.7 * c[0] * c[1]));
  }
  const Mat G = phase.asDiagonal();
  const cxd z1 = local_cocycle_even(G * fd.P * G.adjoint(), {1, 2}, lat, 1);
  CHECK(std::abs(z1 - z0) < 1e-10);
}

TEST_CASE("weak invariant of a decoupled stack equals the layer value") {
  Lattice lat3{3, 6, BC::periodic};
  auto ms = stacked_model(1, 3, 0.0, 0.0);
  const Mat H3 = build_hamiltonian(ms, DisorderSample{0, 3, 6, {}}, lat3);
  auto fd3 = fermi_projection_filling(H3, ms.default_filling, lat3, 1);
  const cxd z3 = local_cocycle_even(fd3.P, {1, 2}, lat3, 1);

  Lattice lat2{2, 6, BC::periodic};
  auto m2 = hofstadter_model(1, 3, 0.0);
  const Mat H2 = build_hamiltonian(m2, DisorderSample{0, 2, 6, {}}, lat2);
  auto fd2 = fermi_projection_filling(H2, m2.default_filling, lat2, 1);
  const cxd z2 = local_cocycle_even(fd2.P, {1, 2}, lat2, 1);

  CHECK(std::abs(z3 - z2) < 1e-7);  // decoupled layers: equality is exact

  // transverse-linear phase conjugation leaves the weak invariant untouched
  Vec phase(lat3.sites());
  for (int s = 0; s < lat3.sites(); ++s)
    phase[s] = std::exp(cxd(0.0, 0.7 * lat3.coords(s)[2]));
  const Mat G = phase.asDiagonal();
  const cxd z3g = local_cocycle_even(G * fd3.P * G.adjoint(), {1, 2}, lat3, 1);
  CHECK(std::abs(z3g - z3) < 1e-10);

  // index route tracks the same weak value at this size
  auto iv = index_even_single(fd3, {1, 2}, {0.5, 0.5});
  CHECK(std::abs(iv.value - z3.real()) < 0.1);
}

TEST_CASE("fedosov trace counts kernel dimensions") {
  for (int n = 1; n <= 3; ++n)
    CHECK(std::abs(fedosov_trace_index(Mat::Identity(5, 5), n)) < 1e-12);

  Mat row(1, 2);
  row << 1, 0;
  for (int n = 1; n <= 4; ++n)
    CHECK(fedosov_trace_index(row, n) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const int rows = 3 + (int)(rng() % 38);
    const int cols = 3 + (int)(rng() % 38);
    const int rank = 1 + (int)(rng() % (std::min(rows, cols) - 1));
    const Mat T = oracle::random_partial_isometry(rows, cols, rank, rng());
    const double expect = (cols - rank) - (rows - rank);
    for (int n : {1, 2, 3})
      CHECK(std::abs(fedosov_trace_index(T, n) - expect) < 1e-8);
  }

  CHECK_THROWS_AS(fedosov_trace_index(Mat::Identity(3, 3), 0), std::invalid_argument);
  CHECK_THROWS_AS(fedosov_trace_index(2.0 * Mat::Identity(3, 3), 1), std::invalid_argument);
}

TEST_CASE("index route: vanishing cases and the windowed integer") {
  const auto& h = hof24();

  // empty projection carries no index
  FermiData empty;
  empty.lat = h.lat;
  empty.fiber = 1;
  empty.n_occ = 0;
  empty.V = Mat::Zero(h.lat.sites(), 0);
  empty.P = Mat::Zero(h.lat.sites(), h.lat.sites());
  CHECK(index_even_single(empty, {1, 2}, {0.5, 0.5}).value == 0.0);

  // the full-volume trace difference cancels identically; only the window sees the index
  auto unwindowed = index_even_single(h.fd, {1, 2}, {0.5, 0.5}, IndexOptions{0, 1e9});
  CHECK(std::abs(unwindowed.raw_windowed) < 1e-8);
  auto nothing = index_even_single(h.fd, {1, 2}, {0.5, 0.5}, IndexOptions{0, 0.4});
  CHECK(nothing.value == 0.0);  // window too small to contain any site

  auto iv = index_even_single(h.fd, {1, 2}, {0.5, 0.5});
  CHECK(iv.n == 2);
  CHECK(!iv.power_below_default);
  const cxd zl = local_cocycle_even(h.fd.P, {1, 2}, h.lat, 1);
  CHECK(std::abs(iv.value - zl.real()) < 0.1);
  CHECK(std::abs(iv.value - h.oracle_C) < 0.1);

  // raising the power moves the value by less than the integer deviation
  auto iv3 = index_even_single(h.fd, {1, 2}, {0.5, 0.5}, IndexOptions{3, -1.0});
  CHECK(std::abs(iv3.value - iv.value) <= std::abs(iv.value - std::lround(iv.value)) + 1e-6);

  // forcing the power below the summability default is flagged but computed
  auto iv1 = index_even_single(h.fd, {1, 2}, {0.5, 0.5}, IndexOptions{1, -1.0});
  CHECK(iv1.power_below_default);
  CHECK(std::isfinite(iv1.value));

  CHECK_THROWS_AS(index_even_single(h.fd, {1, 2}, {0.5}, IndexOptions{}),
                  std::invalid_argument);
}

TEST_CASE("odd index route: identity input and both chain phases") {
  Lattice lat{1, 128, BC::periodic};
  FermiUnitaryData triv;
  triv.lat = lat;
  triv.half_fiber = 1;
  triv.U = Mat::Identity(lat.sites(), lat.sites());
  CHECK(index_odd_single(triv, {1}, {0.5}).value == 0.0);

  const auto fu_top = ssh_unitary(0.5, 1.0, 0.0, 128, 0);
  auto iv_top = index_odd_single(fu_top, {1}, {0.5});
  CHECK(iv_top.n == 1);
  CHECK(std::abs(iv_top.value - 1.0) < 0.05);
  const cxd zl = local_cocycle_odd(fu_top.U, {1}, fu_top.lat, 1);
  CHECK(std::abs(iv_top.value - zl.real()) < 0.1);

  const auto fu_triv = ssh_unitary(1.0, 0.5, 0.0, 128, 0);
  auto iv_t = index_odd_single(fu_triv, {1}, {0.5});
  CHECK(std::abs(iv_t.value) < 0.05);

  FermiUnitaryData bad = triv;
  bad.U = 0.5 * Mat::Identity(lat.sites(), lat.sites());
  try {
    index_odd_single(bad, {1}, {0.5});
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("reports aggregate seeds honestly") {
  Lattice lat{1, 32, BC::periodic};
  auto model = ssh_model(0.5, 1.0, 0.3);
  std::vector<std::pair<std::uint64_t, FermiUnitaryData>> ens;
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const Mat H = build_hamiltonian(model, DisorderSample{s, 1, 32, {}}, lat);
    ens.emplace_back(s, fermi_unitary(H, model.chiral_op, lat, model.N));
  }
  auto rep = local_invariant_odd(ens, {1});
  CHECK(rep.route == "local");
  CHECK(rep.I == std::vector<int>{1});
  CHECK(rep.L == 32);
  CHECK(rep.samples.size() == 4);
  CHECK(rep.mean == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.stddev < 1e-8);
  CHECK(rep.rounded == 1);
  CHECK(rep.rounded_valid);
  CHECK(rep.deviation == doctest::Approx(std::abs(rep.mean - 1.0)));
  CHECK(rep.walltime_ms >= 0.0);
  for (const auto& e : ens) (void)e;
  for (size_t i = 0; i < rep.samples.size(); ++i) {
    CHECK(rep.samples[i].seed == i + 1);
    CHECK(rep.samples[i].x0.empty());
  }

  // index variant expands the x0 list into one sample row per (seed, x0)
  ReportOptions opt;
  opt.x0_list = {{0.25}, {0.5}, {0.75}};
  auto repi = index_invariant_odd(ens, {1}, opt);
  CHECK(repi.route == "index");
  CHECK(repi.samples.size() == 12);
  CHECK(repi.fedosov_power == 1);
  CHECK(repi.samples[1].x0 == std::vector<double>{0.5});
  CHECK(std::abs(repi.mean - 1.0) < 0.01);

  // a tight threshold refuses to round but still reports the deviation
  Lattice lat2{2, 12, BC::periodic};
  auto m2 = hofstadter_model(1, 3, 0.4);
  const Mat H2 = build_hamiltonian(m2, DisorderSample{3, 2, 12, {}}, lat2);
  std::vector<std::pair<std::uint64_t, FermiData>> one;
  one.emplace_back(3, fermi_projection_filling(H2, m2.default_filling, lat2, 1));
  ReportOptions tight;
  tight.rounding_threshold = 0.01;
  auto rep2 = local_invariant_even(one, {1, 2}, tight);
  CHECK(!rep2.rounded_valid);  // |mean - (-1)| ~ 0.013 exceeds the declared threshold
  CHECK(rep2.deviation > 0.01);
  CHECK(rep2.rounded == -1);
  auto rep3 = local_invariant_even(one, {1, 2});
  CHECK(rep3.rounded_valid);  // default 0.15 accepts the same data
}
