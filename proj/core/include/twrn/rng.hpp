#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace twrn {

// Deterministic generator with a fixed algorithm so that seeded runs are
// byte-identical across platforms and standard libraries. splitmix64 state
// advance, doubles built from the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Dirichlet(1,...,1) sample via normalized exponentials; strictly positive.
  std::vector<double> next_pmf(std::size_t n) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& v : p) {
      double u = next_double();
      if (u <= 0.0) u = 0x1.0p-53;
      v = -std::log(u);
      total += v;
    }
    for (auto& v : p) v /= total;
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace twrn
