#pragma once

// Seeded random inputs for property checks: expression corpora, perturbed
// coframes, vector fields and gauge data.  All draws go through Rng, which
// avoids std distributions so that a seed produces the same stream on any
// platform.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kosmann/expr.hpp"

namespace kosmann {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(g_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return g_() % n; }
  int rangei(int a, int b) {  // inclusive
    return a + static_cast<int>(below(static_cast<std::uint64_t>(b - a + 1)));
  }
  std::uint64_t raw() { return g_(); }

 private:
  std::mt19937_64 g_;
};

// Arbitrary grammar-covering tree; not guaranteed evaluable anywhere.
ExprPtr random_expr(Rng& rng, const std::vector<std::string>& coords, int depth);

// Tree that is smooth and evaluable on all of R^n, with values and first few
// derivatives of order ~amplitude on [-3, 3]^n.
ExprPtr random_smooth_expr(Rng& rng, const std::vector<std::string>& coords,
                           double amplitude);

}  // namespace kosmann
