#pragma once

// Differential forms on a chart with values in R, R^n, or n x n matrices.
// Components are lazily-evaluated scalar fields indexed by a value index and
// a strictly increasing multi-index.  Operators return new forms whose
// components remain evaluable at nested jets, so operators stack.

#include <functional>
#include <vector>

#include "kosmann/chart.hpp"
#include "kosmann/scalarfield.hpp"

namespace kosmann {

enum class ValueKind { Scalar, Vector, Matrix };

struct ValueSpace {
  ValueKind kind = ValueKind::Scalar;
  int n = 1;
  int count() const {
    switch (kind) {
      case ValueKind::Scalar: return 1;
      case ValueKind::Vector: return n;
      case ValueKind::Matrix: return n * n;
    }
    return 0;
  }
  bool operator==(const ValueSpace& o) const { return kind == o.kind && n == o.n; }
};

inline ValueSpace scalar_space() { return {ValueKind::Scalar, 1}; }
inline ValueSpace vector_space(int n) { return {ValueKind::Vector, n}; }
inline ValueSpace matrix_space(int n) { return {ValueKind::Matrix, n}; }

struct FormField {
  ValueSpace vs;
  int degree = 0;
  int dim = 0;
  // comps[valueIndex][comboIndex]; comboIndex ranks increasing multi-indices
  // of length `degree` lexicographically.
  std::vector<std::vector<SF>> comps;
};

struct VectorField {
  int dim = 0;
  std::vector<SF> comps;  // contravariant components
};

// Symmetric rank-2 covariant tensor (metrics, Lie derivatives of metrics).
struct SymTensor {
  int dim = 0;
  std::vector<SF> g;  // row-major dim x dim
};

// ---- multi-index utilities ------------------------------------------------

int combo_count(int dim, int p);
const std::vector<std::vector<int>>& combos(int dim, int p);
int combo_rank(int dim, const std::vector<int>& combo);
// Inserts `idx` into the increasing tuple `rest`; returns the sign of moving
// it into place, or 0 if idx already occurs.  `rankOut` gets the rank of the
// merged tuple.
int combo_insert(int dim, int idx, const std::vector<int>& rest, int& rankOut);

// ---- construction ---------------------------------------------------------

FormField form_zero(ValueSpace vs, int degree, int dim);
FormField form_from_components(ValueSpace vs, int degree, int dim,
                               std::vector<std::vector<SF>> comps);

// ---- arithmetic -----------------------------------------------------------

FormField form_add(const FormField& a, const FormField& b);
FormField form_sub(const FormField& a, const FormField& b);
FormField form_scale(const FormField& a, double c);
FormField form_scale_field(const FormField& a, const SF& c);
FormField form_value_slice(const FormField& a, int valueIndex);  // scalar form

// Matrix transpose on the value index of a Matrix-valued form.
FormField form_value_transpose(const FormField& a);

// ---- exterior calculus ----------------------------------------------------

FormField exterior_derivative(const FormField& a);

enum class WedgeAction { Auto, Bracket };
// Auto pairs value spaces: scalar*X, X*scalar, matrix*matrix (product),
// matrix*vector (left action).  Bracket requires both matrix-valued and
// produces a wedge - (-1)^{pq} (reversed wedge).
FormField wedge(const FormField& a, const FormField& b,
                WedgeAction action = WedgeAction::Auto);

FormField interior_product(const VectorField& xi, const FormField& a);

// Cartan formula d(i_xi a) + i_xi(d a), applied per value component.
FormField lie_derivative_form(const VectorField& xi, const FormField& a);

SymTensor lie_derivative_metric(const VectorField& xi, const SymTensor& g);

// Pullback along the map whose target coordinates are `map` (functions of
// the source chart).  `a` lives on the target chart.
FormField pullback(const std::vector<SF>& map, int sourceDim, const FormField& a);

// ---- numeric evaluation ---------------------------------------------------

// All components at one point: [valueIndex][comboIndex].
std::vector<std::vector<double>> eval_form(const FormField& a,
                                           std::span<const double> x);
std::vector<double> eval_vector(const VectorField& v, std::span<const double> x);
std::vector<double> eval_sym(const SymTensor& g, std::span<const double> x);

double form_max_abs(const FormField& a,
                    const std::vector<std::vector<double>>& pts);
double form_max_diff(const FormField& a, const FormField& b,
                     const std::vector<std::vector<double>>& pts);
double sym_max_diff(const SymTensor& a, const SymTensor& b,
                    const std::vector<std::vector<double>>& pts);

// ---- finite-difference transport oracle ------------------------------------

// RK4 integration of the flow of xi for time t.
std::vector<double> flow_point(const VectorField& xi, std::vector<double> x,
                               double t, int steps);
// Pullback of `a` along the time-t flow, evaluated at x, by finite-difference
// Jacobians; used as an independent check of Cartan-formula Lie derivatives.
std::vector<std::vector<double>> flow_pullback_form(const VectorField& xi,
                                                    const FormField& a,
                                                    std::span<const double> x,
                                                    double t);

}  // namespace kosmann
