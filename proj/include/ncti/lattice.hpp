#pragma once

// Finite cubic lattice windows with centered coordinates, plus the counter-based
// disorder source keyed by (seed, site, channel).

#include <cstdint>
#include <vector>

#include "ncti/types.hpp"

namespace ncti {

enum class BC { periodic, open };

struct Lattice {
  int d = 1;
  int L = 1;
  BC bc = BC::periodic;

  int sites() const {
    int n = 1;
    for (int j = 0; j < d; ++j) n *= L;
    return n;
  }
  // centered coordinate range [lo, lo+L): lo = -(L-1)/2 for odd L, -L/2 for even L
  int lo() const { return -(L / 2); }
  int hi() const { return lo() + L - 1; }

  std::vector<int> coords(int site) const;            // lexicographic, first coord major
  int site_index(const std::vector<int>& c) const;    // c must be in range
  bool in_range(const std::vector<int>& c) const;
  // reduce each coordinate mod L into [lo, lo+L)
  std::vector<int> wrap(std::vector<int> c) const;
  // minimal-image displacement along direction j (0-based) from value yj to xj,
  // reduced into [-L/2, L/2); for open boundary it is the literal difference
  double displacement(int xj, int yj) const;
};

// splitmix64 finalizer; the disorder source chains it as
//   z = f(f(f(seed) ^ site_index) ^ channel)
// so every (seed, site, channel) triple maps to an independent, platform-stable value.
std::uint64_t splitmix64(std::uint64_t x);

struct DisorderSample {
  std::uint64_t seed = 0;
  int d = 1;
  int L = 1;
  // optional coordinate offset (wrapped): value at c reads the raw stream at c + offset.
  // Used to realize translated configurations exactly.
  std::vector<int> offset;

  // uniform in [-1/2, 1/2), keyed by the centered lexicographic site index and channel
  double value(const std::vector<int>& c, int channel) const;
};

}  // namespace ncti
