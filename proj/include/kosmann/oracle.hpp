#pragma once

// Trivialized principal-bundle patches over a chart: small matrix groups in
// explicit parameter charts, equivariant lifts of gauge data, lifted vector
// fields, and the comparison of total-space Lie derivatives with the
// base-space formulas.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kosmann/covlie.hpp"

namespace kosmann {

enum class GroupKind { SO2, SO11, SO3 };

GroupKind group_from_tag(const std::string& tag);  // "so2" | "so11" | "so3"
const char* group_tag(GroupKind kind);

struct TotalSpacePatch {
  GroupKind kind = GroupKind::SO2;
  int baseDim = 0;
  int groupDim = 0;
  int repDim = 0;
  Signature repSig;
  FormField g;     // group matrix as a matrix 0-form on the total chart
  FormField ginv;  // eta g^T eta
  std::vector<std::vector<double>> algebra;  // generator matrices, row-major
  std::vector<VectorField> fundamental;      // right-action generators
  std::vector<std::array<double, 2>> groupBox;
  int dim() const { return baseDim + groupDim; }
};

// Product chart: base coordinates first, group parameters last.
TotalSpacePatch build_patch(int baseDim, GroupKind kind);

// pi^* for data living on the base coordinates only.
FormField promote_to_total(const TotalSpacePatch& patch, const FormField& base);
VectorField promote_vector(const TotalSpacePatch& patch, const VectorField& xi);

// Ad_{g^-1} acting on the value of an algebra-valued form.
FormField adjoint_twist(const TotalSpacePatch& patch, const FormField& algForm);

// omega~ = Ad_{g^-1} pi^* omega + g^-1 dg
FormField lift_connection(const TotalSpacePatch& patch, const FormField& omegaBase);
// phi~ = rho(g^-1) pi^* phi in the defining representation
FormField lift_matter(const TotalSpacePatch& patch, const FormField& phiBase);
// xi~ with base components xi and vertical part solving iota_{xi~} omega~ = lambda~
VectorField lift_vector(const TotalSpacePatch& patch, const FormField& omegaBase,
                        const FormField& lambdaBase, const VectorField& xi);

// sigma(x) = (x, params(x)); empty params is the identity section.
FormField section_pullback(const TotalSpacePatch& patch, const FormField& total,
                           std::vector<SF> groupParams);

// Right translation by the group element with parameters h: as a point map
// and as a scalar-field self-map of the total chart.
std::vector<double> right_translate(const TotalSpacePatch& patch,
                                    const std::vector<double>& point,
                                    const std::vector<double>& h);
std::vector<SF> right_translation_map(const TotalSpacePatch& patch,
                                      const std::vector<double>& h);
// The constant matrix of the element with parameters h (or its inverse).
std::vector<double> group_element(const TotalSpacePatch& patch,
                                  const std::vector<double>& h, bool inverse);

struct OracleReport {
  double liftResidual = 0.0;       // iota_{xi~} omega~ vs lambda~
  double connDeviation = 0.0;      // sigma^*(L_{xi~} omega~) vs base formula
  double matterDeviation = -1.0;   // same for matter, -1 when not supplied
  double connRearrangement = 0.0;        // total-space curvature rearrangement
  double matterRearrangement = -1.0;       // total-space matter rearrangement
  double horizontality = 0.0;      // L_{xi~} omega~ against vertical generators
  double equivariance = 0.0;       // right-translation pullback vs Ad twist
  double pushforwardDeviation = 0.0;  // finite-difference invariance of xi~
  double sectionDeviation = 0.0;   // second section vs gauge-transformed formula
};

OracleReport lift_and_compare(const TotalSpacePatch& patch, const FormField& omega,
                              const FormField& lambda, const VectorField& xi,
                              const FormField* phi,
                              const std::vector<std::vector<double>>& basePts,
                              std::uint64_t seed);

}  // namespace kosmann
