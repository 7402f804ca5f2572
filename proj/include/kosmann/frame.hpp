#pragma once

// Orthonormal coframes and the associated metric structures: the unique
// metric, torsion-free connection, its torsion and curvature forms, covariant
// exterior derivatives, and the first-order gravity Lagrangian built from the
// coframe and a connection.

#include <vector>

#include "kosmann/forms.hpp"

namespace kosmann {

// Frame metric diag(-1 x p, +1 x q), minus entries first.
struct Signature {
  int p = 0;
  int q = 0;
  int dim() const { return p + q; }
  double eta(int a) const { return a < p ? -1.0 : 1.0; }
};

struct Coframe {
  Signature sig;
  std::vector<std::vector<SF>> e;  // e[a][mu]
  int dim() const { return static_cast<int>(e.size()); }
};

// The coframe as a vector-valued 1-form e^a = e^a_mu dx^mu.
FormField coframe_form(const Coframe& cf);
Coframe coframe_from_form(const FormField& e, Signature sig);

// g_{mu nu} = eta_ab e^a_mu e^b_nu
SymTensor metric_from_coframe(const Coframe& cf);

// Dual frame: E[a][mu] with e^a(E_b) = delta^a_b, via a pointwise inverse
// shared across components.
std::vector<std::vector<SF>> inverse_frame(const Coframe& cf);

// The unique frame-metric-compatible torsion-free connection of the coframe,
// as a matrix-valued 1-form omega^a{}_b.
FormField levi_civita(const Coframe& cf);

// de^a + omega^a{}_b ^ e^b
FormField torsion(const FormField& e, const FormField& omega);

// d omega + omega ^ omega
FormField curvature(const FormField& omega);

// Covariant exterior derivative d phi + omega ^ phi on vector-valued forms,
// and d phi + [omega, phi] (graded) on matrix-valued forms.
FormField cov_d_vector(const FormField& omega, const FormField& phi);
FormField cov_d_matrix(const FormField& omega, const FormField& phi);

// Index shuffles with the frame metric: M^a{}_c eta^{cb} and eta_{ac} M^c{}_b.
FormField raise_second(const FormField& m, Signature sig);
FormField lower_first(const FormField& m, Signature sig);

// eps_{a_1 ... a_d} e^{a_1} ^ ... ^ e^{a_{d-2}} ^ F^{a_{d-1} a_d} with
// F^{ab} = F^a{}_c eta^{cb}; requires dim >= 3.
FormField ec_lagrangian(const FormField& e, const FormField& omega, Signature sig);

// Lift to a chart with one trailing parameter coordinate t: components become
// base + t * delta, composed with the projection that drops t.  The result
// has no legs along dt, so its exterior derivative restricted to spatial
// multi-indices is the spatial d at frozen t.
FormField extend_with_parameter(const FormField& base, const FormField& delta);

}  // namespace kosmann
