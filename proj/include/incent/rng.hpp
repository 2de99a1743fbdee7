#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace incent {

// Deterministic generator (splitmix64). The standard <random> distributions
// are implementation-defined, so every draw here is derived from the raw
// 64-bit stream only; identical seeds give identical sequences everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Dirichlet(1,...,1): uniform over the probability simplex.
  std::vector<double> simplex_point(int size) {
    std::vector<double> v(static_cast<size_t>(size));
    double total = 0.0;
    for (auto& c : v) {
      c = -std::log1p(-uniform());
      total += c;
    }
    for (auto& c : v) c /= total;
    return v;
  }

 private:
  uint64_t state_;
};

}  // namespace incent
