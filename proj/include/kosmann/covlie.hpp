#pragma once

// Covariant Lie derivatives: the natural one attached to a connection, the
// general family parametrized by correction data, and the Kosmann derivative
// on coframes with its Killing-equation characterization.

#include <functional>
#include <vector>

#include "kosmann/frame.hpp"

namespace kosmann {

// Action of a matrix-valued form on another form by its value kind: product
// on vector values, graded commutator on matrix values, zero on scalars.
FormField rep_action(const FormField& lambda, const FormField& phi);

// d^omega phi dispatched on the value kind of phi.
FormField cov_d(const FormField& omega, const FormField& phi);

FormField natural_cov_lie_matter(const FormField& omega, const VectorField& xi,
                                 const FormField& phi);
FormField natural_cov_lie_connection(const FormField& omega, const VectorField& xi);

// A covariant Lie derivative is fixed by its correction term B_xi, a
// matrix-valued 0-form depending linearly on xi; equivalently by a connection
// together with lambda_xi, via B_xi = i_xi omega - lambda_xi.
using CorrectionMap = std::function<FormField(const VectorField&)>;

struct CovariantizationData {
  CorrectionMap B;
  bool hasPair = false;
  FormField omega;      // set when hasPair
  CorrectionMap lambda; // set when hasPair
};

CovariantizationData covdata_from_correction(CorrectionMap B);
CovariantizationData covdata_from_pair(FormField omega, CorrectionMap lambda);
CovariantizationData covdata_natural(FormField omega);  // lambda = 0
CovariantizationData covdata_kosmann(const Coframe& e); // B = kosmann_correction

FormField covariantization_term(const CovariantizationData& data,
                                const VectorField& xi);

// L_xi phi + rho(B_xi) phi
FormField general_cov_lie_matter(const CovariantizationData& data,
                                 const VectorField& xi, const FormField& phi);
// L_xi omega - d^omega(B_xi)
FormField general_cov_lie_connection(const CovariantizationData& data,
                                     const VectorField& xi, const FormField& omega);

// Swapping the connection inside pair-form data while keeping the correction
// fixed: lambdaHat_xi = i_xi omegaHat - B_xi.  Returns the max deviation of
// the two correction terms over the points (zero up to roundoff).
double connection_independence_check(const CovariantizationData& data,
                                     const FormField& omegaHat,
                                     const VectorField& xi,
                                     const std::vector<std::vector<double>>& pts);

// Frame components alpha^a{}_b of a vector-valued 1-form, alpha^a = alpha^a{}_b e^b.
FormField frame_components(const Coframe& e, const FormField& alpha);

// B^K as a matrix-valued 0-form: minus the eta-raised antisymmetric part of
// the frame components of L_xi e.
FormField kosmann_correction(const Coframe& e, const VectorField& xi);

// The Kosmann derivative of the coframe, computed three equivalent ways.
FormField kosmann_lie_coframe(const Coframe& e, const VectorField& xi);
FormField kosmann_lie_coframe_connection_route(const Coframe& e, const VectorField& xi);
FormField kosmann_lie_coframe_correction_route(const Coframe& e, const VectorField& xi);

struct KillingReport {
  bool killing = false;
  double residual = 0.0;        // max |kosmann_lie_coframe| on the grid
  bool metricKilling = false;
  double metricResidual = 0.0;  // max |L_xi g| on the grid
};
KillingReport killing_check(const Coframe& e, const VectorField& xi,
                            const std::vector<std::vector<double>>& pts,
                            double tol = 1e-7);

// Pointwise matrix functions on matrix-valued 0-forms.
FormField matrix_inverse_0form(const FormField& m);
FormField matrix_exp_0form(const FormField& a);

// Position-dependent frame rotation: e -> gamma e, omega -> gamma omega
// gamma^-1 + gamma d(gamma^-1).
FormField gauge_transform_coframe(const FormField& gamma, const FormField& e);
FormField gauge_transform_connection(const FormField& gamma, const FormField& omega);
// max |gamma^T eta gamma - eta| over the points
double orthogonality_residual(const FormField& gamma, Signature sig,
                              const std::vector<std::vector<double>>& pts);

VectorField vector_bracket(const VectorField& a, const VectorField& b);

// Diagnostic only: max |L^K_{[xi,zeta]} e - (L^K_xi L^K_zeta - L^K_zeta L^K_xi) e|.
// No particular value is asserted anywhere; the Kosmann assignment is not a
// Lie-algebra morphism in general.
double kosmann_bracket_defect(const Coframe& e, const VectorField& xi,
                              const VectorField& zeta,
                              const std::vector<std::vector<double>>& pts);

}  // namespace kosmann
