#pragma once

// Helpers shared by the C++ test suites: seeded random geometric inputs that
// stay well-conditioned on the sample boxes.

#include <string>
#include <vector>

#include "kosmann/forms.hpp"
#include "kosmann/frame.hpp"
#include "kosmann/randomgen.hpp"

namespace kosmann::testutil {

inline std::vector<std::string> coord_names(int n) {
  std::vector<std::string> c;
  for (int i = 0; i < n; ++i) c.push_back("x" + std::to_string(i));
  return c;
}

inline SF smooth(Rng& rng, const std::vector<std::string>& coords, double amp) {
  return sf_expr(Expression{random_smooth_expr(rng, coords, amp), coords});
}

// near-identity coframe, invertible on [-3, 3]^n
inline Coframe random_coframe(Rng& rng, Signature sig) {
  const int n = sig.dim();
  const auto coords = coord_names(n);
  Coframe cf;
  cf.sig = sig;
  cf.e.assign(static_cast<std::size_t>(n), std::vector<SF>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu) {
      SF s = smooth(rng, coords, 0.35 / n);
      if (a == mu) s = sf_add(sf_const(1.0), s);
      cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] = s;
    }
  return cf;
}

inline VectorField random_vfield(Rng& rng, int n, double amp = 1.0) {
  const auto coords = coord_names(n);
  VectorField xi;
  xi.dim = n;
  for (int i = 0; i < n; ++i) xi.comps.push_back(smooth(rng, coords, amp));
  return xi;
}

inline std::vector<std::vector<double>> cube_points(int n, int count,
                                                    std::uint64_t seed,
                                                    double half = 1.5) {
  std::vector<std::array<double, 2>> box(static_cast<std::size_t>(n),
                                         {-half, half});
  return sample_box(box, count, seed);
}

// matrix-valued 1-form with eta-lowered antisymmetry (a connection increment)
inline FormField random_so_valued_form(Rng& rng, Signature sig, double amp = 0.5) {
  const int n = sig.dim();
  const auto coords = coord_names(n);
  FormField d = form_zero(matrix_space(n), 1, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int mu = 0; mu < n; ++mu) {
        SF s = smooth(rng, coords, amp);
        // lower(a) entry is s, lower(b) entry is -s; raise back with eta
        d.comps[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(mu)] =
            sig.eta(a) < 0 ? sf_neg(s) : s;
        d.comps[static_cast<std::size_t>(b * n + a)][static_cast<std::size_t>(mu)] =
            sig.eta(b) < 0 ? s : sf_neg(s);
      }
  return d;
}

// so(p,q)-valued 0-form whose (0,1) generator has a guaranteed slope along
// x0, so the induced rotation is never close to constant on the sample box.
inline FormField sloped_so_generator(Rng& rng, Signature sig) {
  const int n = sig.dim();
  const auto coords = coord_names(n);
  FormField A = form_zero(matrix_space(n), 0, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SF s = smooth(rng, coords, 0.3);
      if (a == 0 && b == 1)
        s = sf_add(s, sf_scale(sf_coord(0), 0.7));
      A.comps[static_cast<std::size_t>(a * n + b)][0] =
          sig.eta(a) < 0 ? sf_neg(s) : s;
      A.comps[static_cast<std::size_t>(b * n + a)][0] =
          sig.eta(b) < 0 ? s : sf_neg(s);
    }
  return A;
}

// vector field with a unit bias along x0, so contraction with a gradient
// along x0 stays bounded away from zero.
inline VectorField biased_vfield(Rng& rng, int n) {
  const auto coords = coord_names(n);
  VectorField xi;
  xi.dim = n;
  xi.comps.push_back(sf_add(sf_const(1.0), smooth(rng, coords, 0.3)));
  for (int i = 1; i < n; ++i) xi.comps.push_back(smooth(rng, coords, 0.5));
  return xi;
}

}  // namespace kosmann::testutil
