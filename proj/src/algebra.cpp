#include "ncti/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace ncti {

namespace {

FiberFn zero_fiber(const DynamicalSystem& sys) {
  return FiberFn(sys.points, Mat::Zero(sys.fiber, sys.fiber));
}

bool same_system(const DynamicalSystem& a, const DynamicalSystem& b) {
  return a.d == b.d && a.fiber == b.fiber && a.points == b.points && a.shift == b.shift &&
         a.weight == b.weight;
}

int perm_parity(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

void DynamicalSystem::finalize() {
  if (d < 1 || fiber < 1 || points < 1)
    throw std::invalid_argument("DynamicalSystem: d, fiber, points must be positive");
  if ((int)shift.size() != d) throw std::invalid_argument("DynamicalSystem: need d shift maps");
  ishift.assign(d, std::vector<int>(points, -1));
  for (int j = 0; j < d; ++j) {
    if ((int)shift[j].size() != points)
      throw std::invalid_argument("DynamicalSystem: shift map has wrong size");
    for (int w = 0; w < points; ++w) {
      int t = shift[j][w];
      if (t < 0 || t >= points || ishift[j][t] != -1)
        throw std::invalid_argument("DynamicalSystem: shift map is not a permutation");
      ishift[j][t] = w;
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int w = 0; w < points; ++w)
        if (shift[i][shift[j][w]] != shift[j][shift[i][w]])
          throw std::invalid_argument("DynamicalSystem: shifts do not commute");
  if ((int)weight.size() != points)
    throw std::invalid_argument("DynamicalSystem: weight vector has wrong size");
  double s = 0.0;
  for (double w : weight) {
    if (w < -1e-15) throw std::invalid_argument("DynamicalSystem: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("DynamicalSystem: weights must sum to 1");
  for (int j = 0; j < d; ++j)
    for (int w = 0; w < points; ++w)
      if (std::abs(weight[shift[j][w]] - weight[w]) > 1e-12)
        throw std::invalid_argument("DynamicalSystem: weights are not shift-invariant");
}

int DynamicalSystem::translate(int w, const std::vector<int>& x) const {
  for (int j = 0; j < d && j < (int)x.size(); ++j) {
    const auto& map = (x[j] >= 0) ? shift[j] : ishift[j];
    for (int s = 0; s < std::abs(x[j]); ++s) w = map[w];
  }
  return w;
}

SysPtr single_point_system(int d, int fiber) {
  auto sys = std::make_shared<DynamicalSystem>();
  sys->d = d;
  sys->fiber = fiber;
  sys->points = 1;
  sys->shift.assign(d, {0});
  sys->weight = {1.0};
  sys->finalize();
  return sys;
}

SysPtr torus_orbit_system(int d, int fiber, int L) {
  if (L < 1) throw std::invalid_argument("torus_orbit_system: L must be positive");
  int n = 1;
  for (int j = 0; j < d; ++j) n *= L;
  auto sys = std::make_shared<DynamicalSystem>();
  sys->d = d;
  sys->fiber = fiber;
  sys->points = n;
  sys->shift.assign(d, std::vector<int>(n));
  // lexicographic flatten, first coordinate major; stride of direction j is L^{d-1-j}
  std::vector<int> stride(d, 1);
  for (int j = d - 2; j >= 0; --j) stride[j] = stride[j + 1] * L;
  for (int w = 0; w < n; ++w) {
    for (int j = 0; j < d; ++j) {
      int cj = (w / stride[j]) % L;
      int cj2 = (cj + 1) % L;
      sys->shift[j][w] = w + (cj2 - cj) * stride[j];
    }
  }
  sys->weight.assign(n, 1.0 / n);
  sys->finalize();
  return sys;
}

void TwistMatrix::validate(int d) const {
  if (theta.rows() != d || theta.cols() != d)
    throw std::invalid_argument("TwistMatrix: wrong shape");
  if ((theta + theta.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("TwistMatrix: not antisymmetric");
}

NCElement NCElement::zero(SysPtr s, TwistMatrix t) {
  t.validate(s->d);
  return NCElement{std::move(s), std::move(t), {}};
}

NCElement NCElement::unit(SysPtr s, TwistMatrix t) {
  auto e = zero(std::move(s), std::move(t));
  FiberFn one(e.sys->points, Mat::Identity(e.sys->fiber, e.sys->fiber));
  e.coeff[std::vector<int>(e.sys->d, 0)] = std::move(one);
  return e;
}

NCElement NCElement::monomial(SysPtr s, TwistMatrix t, const std::vector<int>& q,
                              const FiberFn& b) {
  auto e = zero(std::move(s), std::move(t));
  if ((int)q.size() != e.sys->d) throw std::invalid_argument("monomial: q has wrong dimension");
  FiberFn f = b.empty() ? FiberFn(e.sys->points, Mat::Identity(e.sys->fiber, e.sys->fiber)) : b;
  if ((int)f.size() != e.sys->points) throw std::invalid_argument("monomial: bad fiber function");
  e.coeff[q] = std::move(f);
  return e;
}

void NCElement::add_term(const std::vector<int>& q, int w, const Mat& m) {
  auto it = coeff.find(q);
  if (it == coeff.end()) it = coeff.emplace(q, zero_fiber(*sys)).first;
  it->second[w] += m;
}

int NCElement::radius() const {
  int r = 0;
  for (const auto& [q, f] : coeff)
    for (int qj : q) r = std::max(r, std::abs(qj));
  return r;
}

NCElement& NCElement::prune(double tol) {
  for (auto it = coeff.begin(); it != coeff.end();) {
    double m = 0.0;
    for (const auto& mat : it->second) m = std::max(m, mat.cwiseAbs().maxCoeff());
    it = (m <= tol) ? coeff.erase(it) : std::next(it);
  }
  return *this;
}

double NCElement::max_abs() const {
  double m = 0.0;
  for (const auto& [q, f] : coeff)
    for (const auto& mat : f) m = std::max(m, mat.cwiseAbs().maxCoeff());
  return m;
}

void require_compatible(const NCElement& a, const NCElement& b) {
  const bool sys_ok = (a.sys == b.sys) || same_system(*a.sys, *b.sys);
  const bool twist_ok = a.twist.theta.rows() == b.twist.theta.rows() &&
                        (a.twist.theta - b.twist.theta).cwiseAbs().maxCoeff() == 0.0;
  if (!sys_ok || !twist_ok)
    throw std::invalid_argument("NCElement: operands live over different systems/twists");
}

NCElement add(const NCElement& a, const NCElement& b) {
  require_compatible(a, b);
  NCElement out = a;
  for (const auto& [q, f] : b.coeff) {
    auto it = out.coeff.find(q);
    if (it == out.coeff.end()) {
      out.coeff[q] = f;
    } else {
      for (int w = 0; w < out.sys->points; ++w) it->second[w] += f[w];
    }
  }
  return out;
}

NCElement scale(const cxd& c, const NCElement& a) {
  NCElement out = a;
  for (auto& [q, f] : out.coeff)
    for (auto& m : f) m *= c;
  return out;
}

NCElement multiply(const NCElement& a, const NCElement& b, int threads) {
  require_compatible(a, b);
  NCElement out = NCElement::zero(a.sys, a.twist);
  const auto& sys = *a.sys;
  const Eigen::MatrixXd& theta = a.twist.theta;

  std::vector<const std::pair<const std::vector<int>, FiberFn>*> aterms;
  aterms.reserve(a.coeff.size());
  for (const auto& t : a.coeff) aterms.push_back(&t);

  auto work = [&](size_t lo, size_t hi, std::map<std::vector<int>, FiberFn>& dst) {
    std::vector<int> q(sys.d);
    for (size_t ai = lo; ai < hi; ++ai) {
      const auto& qa = aterms[ai]->first;
      const auto& Ba = aterms[ai]->second;
      for (const auto& [qb, Bb] : b.coeff) {
        double ph = 0.0;
        for (int i = 0; i < sys.d; ++i) {
          q[i] = qa[i] + qb[i];
          for (int j = 0; j < sys.d; ++j) ph += q[i] * theta(i, j) * qb[j];
        }
        const cxd phase = std::exp(cxd(0.0, ph));
        auto it = dst.find(q);
        if (it == dst.end()) it = dst.emplace(q, zero_fiber(sys)).first;
        for (int w = 0; w < sys.points; ++w)
          it->second[w] += phase * (Ba[sys.translate(w, qb)] * Bb[w]);
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || aterms.size() < 2) {
    work(0, aterms.size(), out.coeff);
    return out;
  }
  const size_t nt = std::min<size_t>(threads, aterms.size());
  std::vector<std::map<std::vector<int>, FiberFn>> partial(nt);
  std::vector<std::thread> pool;
  const size_t chunk = (aterms.size() + nt - 1) / nt;
  for (size_t t = 0; t < nt; ++t) {
    size_t lo = t * chunk, hi = std::min(aterms.size(), lo + chunk);
    pool.emplace_back([&, lo, hi, t] { work(lo, hi, partial[t]); });
  }
  for (auto& th : pool) th.join();
  // merge in chunk order: deterministic for a fixed thread count
  for (auto& part : partial)
    for (auto& [q, f] : part) {
      auto it = out.coeff.find(q);
      if (it == out.coeff.end()) {
        out.coeff[q] = std::move(f);
      } else {
        for (int w = 0; w < sys.points; ++w) it->second[w] += f[w];
      }
    }
  return out;
}

NCElement adjoint(const NCElement& a) {
  NCElement out = NCElement::zero(a.sys, a.twist);
  const auto& sys = *a.sys;
  for (const auto& [q, f] : a.coeff) {
    std::vector<int> r(sys.d);
    for (int i = 0; i < sys.d; ++i) r[i] = -q[i];
    FiberFn g(sys.points);
    for (int w = 0; w < sys.points; ++w) g[w] = f[sys.translate(w, r)].adjoint();
    out.coeff[r] = std::move(g);
  }
  return out;
}

FiberFn fourier_coeff(const NCElement& a, const std::vector<int>& q) {
  auto it = a.coeff.find(q);
  return it == a.coeff.end() ? zero_fiber(*a.sys) : it->second;
}

NCElement torus_action(const NCElement& a, const std::vector<double>& angles) {
  if ((int)angles.size() != a.sys->d) throw std::invalid_argument("torus_action: bad angles");
  NCElement out = a;
  for (auto& [q, f] : out.coeff) {
    double ph = 0.0;
    for (int j = 0; j < a.sys->d; ++j) ph += angles[j] * q[j];
    const cxd c = std::exp(cxd(0.0, ph));
    for (auto& m : f) m *= c;
  }
  return out;
}

FiberFn fourier_coeff_grid(const NCElement& a, const std::vector<int>& q, int M) {
  if (M < 1) throw std::invalid_argument("fourier_coeff_grid: M must be positive");
  const int d = a.sys->d;
  FiberFn acc = zero_fiber(*a.sys);
  const double step = 2.0 * std::numbers::pi / M;
  long total = 1;
  for (int j = 0; j < d; ++j) total *= M;
  // (1/M^d) sum over the phase grid of lambda^{-q} rho_lambda(a), read off at q.
  // Grid sampling folds support points congruent to q (mod M) onto q, which is why
  // the grid must exceed twice the support radius for exact agreement with lookup.
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    std::vector<double> angles(d);
    double phq = 0.0;
    for (int j = d - 1; j >= 0; --j) {
      angles[j] = step * (rest % M);
      rest /= M;
      phq += angles[j] * q[j];
    }
    const cxd back = std::exp(cxd(0.0, -phq));
    NCElement rot = torus_action(a, angles);
    for (const auto& [p, f] : rot.coeff) {
      bool alias = true;
      for (int j = 0; j < d; ++j)
        if ((p[j] - q[j]) % M != 0) { alias = false; break; }
      if (!alias) continue;
      for (int w = 0; w < a.sys->points; ++w) acc[w] += back * f[w];
    }
  }
  for (auto& mat : acc) mat /= (double)total;
  return acc;
}

NCElement cesaro_sum(const NCElement& a, int N) {
  if (N < 0) throw std::invalid_argument("cesaro_sum: N must be nonnegative");
  NCElement out = NCElement::zero(a.sys, a.twist);
  for (const auto& [q, f] : a.coeff) {
    double wgt = 1.0;
    for (int qj : q) wgt *= std::max(0.0, 1.0 - std::abs(qj) / (N + 1.0));
    if (wgt == 0.0) continue;
    FiberFn g = f;
    for (auto& m : g) m *= wgt;
    out.coeff[q] = std::move(g);
  }
  return out;
}

NCElement derivation(const NCElement& a, int j) {
  if (j < 1 || j > a.sys->d) throw std::invalid_argument("derivation: direction out of range");
  NCElement out = NCElement::zero(a.sys, a.twist);
  for (const auto& [q, f] : a.coeff) {
    if (q[j - 1] == 0) continue;
    const cxd c(0.0, -(double)q[j - 1]);
    FiberFn g = f;
    for (auto& m : g) m *= c;
    out.coeff[q] = std::move(g);
  }
  return out;
}

cxd trace(const NCElement& a) {
  auto it = a.coeff.find(std::vector<int>(a.sys->d, 0));
  if (it == a.coeff.end()) return {0.0, 0.0};
  return fiber_trace(*a.sys, it->second);
}

cxd zeta(const std::vector<int>& I, const std::vector<NCElement>& args) {
  const int k = (int)I.size();
  if ((int)args.size() != k + 1)
    throw std::invalid_argument("zeta: need |I|+1 arguments");
  for (int dir : I)
    if (dir < 1 || dir > args[0].sys->d)
      throw std::invalid_argument("zeta: direction out of range");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  cxd acc(0.0, 0.0);
  do {
    const double sgn = perm_parity(perm);
    NCElement prod = args[0];
    for (int i = 0; i < k; ++i) prod = multiply(prod, derivation(args[i + 1], I[perm[i]]));
    acc += sgn * trace(prod);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

cxd fiber_trace(const DynamicalSystem& sys, const FiberFn& f) {
  cxd acc(0.0, 0.0);
  for (int w = 0; w < sys.points; ++w) acc += sys.weight[w] * f[w].trace();
  return acc / (double)sys.fiber;
}

FiberFn fiber_adjoint(const FiberFn& f) {
  FiberFn g(f.size());
  for (size_t i = 0; i < f.size(); ++i) g[i] = f[i].adjoint();
  return g;
}

FiberFn fiber_multiply(const FiberFn& a, const FiberFn& b) {
  FiberFn g(a.size());
  for (size_t i = 0; i < a.size(); ++i) g[i] = a[i] * b[i];
  return g;
}

FiberFn fiber_add(const FiberFn& a, const FiberFn& b) {
  FiberFn g(a.size());
  for (size_t i = 0; i < a.size(); ++i) g[i] = a[i] + b[i];
  return g;
}

FiberFn fiber_abs(const FiberFn& f) {
  FiberFn g(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    Mat h = f[i].adjoint() * f[i];
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    g[i] = es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<cxd>() *
           es.eigenvectors().adjoint();
  }
  return g;
}

FiberFn fiber_pow(const FiberFn& f, double s) {
  FiberFn g(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(f[i]);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Eigen::VectorXd evp(ev.size());
    for (int j = 0; j < ev.size(); ++j) evp[j] = std::pow(ev[j], s);
    g[i] = es.eigenvectors() * evp.asDiagonal().toDenseMatrix().cast<cxd>() *
           es.eigenvectors().adjoint();
  }
  return g;
}

double fiber_opnorm(const FiberFn& f) {
  double m = 0.0;
  for (const auto& mat : f) {
    Eigen::JacobiSVD<Mat> svd(mat);
    if (svd.singularValues().size() > 0) m = std::max(m, svd.singularValues()(0));
  }
  return m;
}

FiberFn fiber_shifted(const DynamicalSystem& sys, const FiberFn& f, const std::vector<int>& x) {
  FiberFn g(sys.points);
  for (int w = 0; w < sys.points; ++w) g[w] = f[sys.translate(w, x)];
  return g;
}

nlohmann::json to_json(const NCElement& a) {
  nlohmann::json j;
  j["system"] = {{"d", a.sys->d},
                 {"fiber", a.sys->fiber},
                 {"points", a.sys->points},
                 {"shift", a.sys->shift},
                 {"weight", a.sys->weight}};
  std::vector<std::vector<double>> th(a.sys->d, std::vector<double>(a.sys->d));
  for (int i = 0; i < a.sys->d; ++i)
    for (int jj = 0; jj < a.sys->d; ++jj) th[i][jj] = a.twist.theta(i, jj);
  j["theta"] = th;
  auto& terms = j["terms"] = nlohmann::json::array();
  for (const auto& [q, f] : a.coeff) {
    nlohmann::json t;
    t["q"] = q;
    auto& vals = t["values"] = nlohmann::json::array();
    for (const auto& m : f) {
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c)
          row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
      }
      vals.push_back(std::move(rows));
    }
    terms.push_back(std::move(t));
  }
  return j;
}

NCElement ncelement_from_json(const nlohmann::json& j) {
  auto sys = std::make_shared<DynamicalSystem>();
  const auto& js = j.at("system");
  sys->d = js.at("d").get<int>();
  sys->fiber = js.at("fiber").get<int>();
  sys->points = js.at("points").get<int>();
  sys->shift = js.at("shift").get<std::vector<std::vector<int>>>();
  sys->weight = js.at("weight").get<std::vector<double>>();
  sys->finalize();
  TwistMatrix tw = TwistMatrix::zero(sys->d);
  const auto& th = j.at("theta");
  for (int r = 0; r < sys->d; ++r)
    for (int c = 0; c < sys->d; ++c) tw.theta(r, c) = th.at(r).at(c).get<double>();
  NCElement out = NCElement::zero(sys, tw);
  for (const auto& t : j.at("terms")) {
    auto q = t.at("q").get<std::vector<int>>();
    FiberFn f(sys->points);
    const auto& vals = t.at("values");
    for (int w = 0; w < sys->points; ++w) {
      Mat m(sys->fiber, sys->fiber);
      for (int r = 0; r < sys->fiber; ++r)
        for (int c = 0; c < sys->fiber; ++c) {
          const auto& pr = vals.at(w).at(r).at(c);
          m(r, c) = cxd(pr.at(0).get<double>(), pr.at(1).get<double>());
        }
      f[w] = std::move(m);
    }
    out.coeff[q] = std::move(f);
  }
  return out;
}

}  // namespace ncti
