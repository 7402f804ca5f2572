#pragma once

// Gamma-matrix representations for signature (p,q), spinor-valued forms with
// complex components, the spin action of frame rotations, and the Kosmann
// derivative of spinor fields.

#include <complex>
#include <vector>

#include "kosmann/covlie.hpp"

namespace kosmann {

using cplx = std::complex<double>;
using CMat = std::vector<cplx>;  // row-major square complex matrix

struct GammaRep {
  Signature sig;
  int ns = 0;  // spinor-space dimension 2^(dim/2 rounded down)
  std::vector<CMat> gamma;  // gamma[a], entries in {0, ±1, ±i}
};

// Tensor-product construction; exact Clifford relations. Dimension cap p+q <= 6.
GammaRep build_gamma(Signature sig);

// Spinor-valued p-form: complex components split into real and imaginary
// scalar fields, [spinor index][multi-index].
struct SpinorForm {
  int dim = 0;
  int degree = 0;
  int ns = 0;
  std::vector<std::vector<SF>> re, im;
};

SpinorForm spinor_zero(int ns, int degree, int dim);
SpinorForm spinor_constant(int dim, const std::vector<cplx>& vals);
SpinorForm spinor_add(const SpinorForm& a, const SpinorForm& b);
SpinorForm spinor_sub(const SpinorForm& a, const SpinorForm& b);
SpinorForm spinor_scale(const SpinorForm& a, cplx c);
SpinorForm apply_constant_matrix(const CMat& M, const SpinorForm& psi);
SpinorForm exterior_derivative_spinor(const SpinorForm& psi);
SpinorForm interior_spinor(const VectorField& xi, const SpinorForm& psi);
SpinorForm lie_derivative_spinor(const VectorField& xi, const SpinorForm& psi);

// rho(lambda) psi = 1/4 lambda_{ab} Gamma^a Gamma^b (wedge) psi, with lambda a
// matrix-valued q-form whose first index gets lowered with eta.
SpinorForm spin_action(const FormField& lambda, Signature sig,
                       const GammaRep& rep, const SpinorForm& psi);

// d psi + rho(omega) psi for a spinor-valued 0-form.
SpinorForm spinor_cov_d(const FormField& omega, Signature sig,
                        const GammaRep& rep, const SpinorForm& psi);

// L_xi psi + rho(B^K_xi) psi, any form degree.
SpinorForm kosmann_lie_spinor(const Coframe& e, const VectorField& xi,
                              const SpinorForm& psi, const GammaRep& rep);
// i_xi d^{omega_LC} psi - rho(lambda^K_xi) psi, 0-forms.
SpinorForm kosmann_lie_spinor_lambda_route(const Coframe& e, const VectorField& xi,
                                           const SpinorForm& psi, const GammaRep& rep);
// frame-component reduction: i_xi d^{omega_LC} psi - 1/4 (d^{omega_LC} i_xi e)_{[bd]}
// Gamma^b Gamma^d psi, 0-forms.
SpinorForm kosmann_lie_spinor_reduction_route(const Coframe& e, const VectorField& xi,
                                              const SpinorForm& psi, const GammaRep& rep);

double spinor_max_abs(const SpinorForm& a, const std::vector<std::vector<double>>& pts);
double spinor_max_diff(const SpinorForm& a, const SpinorForm& b,
                       const std::vector<std::vector<double>>& pts);

// Constant-matrix helpers for the covering checks.
CMat spin_generator(const std::vector<double>& lambda, Signature sig,
                    const GammaRep& rep);  // 1/4 contraction, lambda row-major
CMat mat_exp_complex(CMat M, int n);
std::vector<double> mat_exp_real(std::vector<double> M, int n);
CMat cmatmul(const CMat& A, const CMat& B, int n);
CMat cmat_inverse(CMat A, int n);

}  // namespace kosmann
