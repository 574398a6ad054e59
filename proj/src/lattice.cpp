#include "ncti/lattice.hpp"

#include <stdexcept>

namespace ncti {

std::vector<int> Lattice::coords(int site) const {
  std::vector<int> c(d);
  for (int j = d - 1; j >= 0; --j) {
    c[j] = lo() + site % L;
    site /= L;
  }
  return c;
}

int Lattice::site_index(const std::vector<int>& c) const {
  int idx = 0;
  for (int j = 0; j < d; ++j) {
    if (c[j] < lo() || c[j] > hi()) throw std::out_of_range("Lattice: coordinate out of range");
    idx = idx * L + (c[j] - lo());
  }
  return idx;
}

bool Lattice::in_range(const std::vector<int>& c) const {
  for (int j = 0; j < d; ++j)
    if (c[j] < lo() || c[j] > hi()) return false;
  return true;
}

std::vector<int> Lattice::wrap(std::vector<int> c) const {
  for (int j = 0; j < d; ++j) {
    int r = (c[j] - lo()) % L;
    if (r < 0) r += L;
    c[j] = lo() + r;
  }
  return c;
}

double Lattice::displacement(int xj, int yj) const {
  double diff = xj - yj;
  if (bc == BC::periodic) {
    while (diff < -L / 2.0) diff += L;
    while (diff >= L / 2.0) diff -= L;
  }
  return diff;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double DisorderSample::value(const std::vector<int>& c, int channel) const {
  Lattice lat{d, L, BC::periodic};
  std::vector<int> eff = c;
  for (size_t j = 0; j < offset.size() && j < eff.size(); ++j) eff[j] += offset[j];
  const std::uint64_t site = (std::uint64_t)lat.site_index(lat.wrap(eff));
  std::uint64_t z = splitmix64(splitmix64(splitmix64(seed) ^ site) ^ (std::uint64_t)channel);
  return (double)(z >> 11) * 0x1.0p-53 - 0.5;
}

}  // namespace ncti
