#pragma once

// Abelian Kaluza-Klein reduction of an invariant coframe: vertical connection
// form, fiber and base metrics, Gram-Schmidt vertical legs, the adapted total
// coframe, and the reduced field content.

#include <array>
#include <vector>

#include "kosmann/covlie.hpp"

namespace kosmann {

struct KKSetup {
  Coframe e;                                   // invariant total-space coframe
  std::vector<VectorField> fund;               // fundamental fields of the fiber action
  std::vector<double> fiberPeriods;            // optional, one per fiber direction
  std::vector<std::vector<double>> samplePts;  // hypothesis checks run here
  double tolHyp = 1e-7;
};

struct KKConnection {
  FormField theta;  // vector-valued 1-form, one row per fiber direction
  FormField gV;     // fiber metric, matrix 0-form
  SymTensor h;      // base metric, horizontal and basic
};

struct VerticalFrame {
  FormField frame;         // orthonormal vertical legs, one row per fiber direction
  FormField coeff;         // frame = coeff * theta; triangular, positive diagonal
  std::vector<int> signs;  // +1 spacelike leg, -1 timelike leg
};

struct BaseFrame {
  Signature sig;
  FormField legs;  // vector-valued 1-form on the total chart, one row per base leg
};

struct ReducedFields {
  BaseFrame base;
  FormField theta;
  FormField gV;
  FormField phi;  // scalar sector, det > 0; the dilaton when there is one fiber leg
  std::vector<int> signs;
};

struct GaugeVerdict {
  bool pass = false;
  double residual = 0.0;       // kosmann correction along the fundamental fields
  double naiveResidual = 0.0;  // plain Lie derivative of the coframe
};

SymTensor dual_metric(const SymTensor& g);

// theta^m = (gV^{-1})^{mn} g(A_n, .), h = g - gV(theta, theta).
// Validates the setup hypotheses at samplePts: non-null fundamental fields,
// abelian brackets, kosmann-invariant coframe.
KKConnection kk_connection_form(const KKSetup& setup);

// Orthonormalize the rows of theta in the dual metric, first row first.  The
// returned transformation is triangular with positive diagonal; rows of
// negative norm are normalized by absolute value and flagged.
VerticalFrame gram_schmidt_vertical(const FormField& theta, const SymTensor& ginv,
                                    const std::vector<std::vector<double>>& pts);

// Base legs from a pointwise triangular factorization of h in coordinate
// order; directions with vanishing pivot contribute no leg.  Chart-local.
BaseFrame signature_cholesky(const SymTensor& h,
                             const std::vector<std::vector<double>>& pts);

// Stack base legs and vertical legs into a total coframe for g.
Coframe adapted_coframe(const KKSetup& setup, const BaseFrame& base,
                        const VerticalFrame& vert);

// Full reduction: connection split, vertical orthonormalization, auto base
// legs, invariance and determinant checks on the scalar sector.
ReducedFields extract_fields(const KKSetup& setup);

GaugeVerdict adapted_gauge_check(const KKSetup& setup, const Coframe& ehat);

// Flux of d theta^m over a coordinate box divided by the declared fiber
// period; near-integer for monopole configurations.
double monopole_number(const FormField& theta, int m, const std::vector<int>& axes,
                       const std::vector<std::array<double, 2>>& bounds,
                       const std::vector<double>& basePoint, double period);

}  // namespace kosmann
