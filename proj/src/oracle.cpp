#include "kosmann/oracle.hpp"

#include <cmath>
#include <cstddef>

#include "kosmann/error.hpp"
#include "kosmann/frame.hpp"
#include "kosmann/randomgen.hpp"

namespace kosmann {

namespace {

std::vector<std::string> chart_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

SF parse_on(const std::string& text, int dim) {
  return sf_expr(parse_expression(text, chart_names(dim)));
}

// coeff_m(X) = X[row_m][col_m] recovers the basis coefficients of an
// algebra-valued matrix; one pair per generator.
std::vector<std::array<int, 2>> coeff_slots(GroupKind kind) {
  switch (kind) {
    case GroupKind::SO2: return {{1, 0}};
    case GroupKind::SO11: return {{0, 1}};
    case GroupKind::SO3: return {{2, 1}, {0, 2}, {1, 0}};
  }
  throw ValidationError("coeff_slots: unknown group kind");
}

std::vector<SF> matmul_sf(const std::vector<SF>& a, const std::vector<SF>& b, int n) {
  std::vector<SF> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<SF> terms;
      for (int k = 0; k < n; ++k)
        terms.push_back(sf_mul(a[static_cast<std::size_t>(i) * n + k],
                               b[static_cast<std::size_t>(k) * n + j]));
      out[static_cast<std::size_t>(i) * n + j] =
          sf_affine(terms, std::vector<double>(terms.size(), 1.0), 0.0);
    }
  return out;
}

FormField matrix_0form(std::vector<SF> entries, int n, int dim) {
  FormField f = form_zero(matrix_space(n), 0, dim);
  for (std::size_t i = 0; i < entries.size(); ++i) f.comps[i][0] = entries[i];
  return f;
}

FormField constant_matrix_0form(const std::vector<double>& entries, int n, int dim) {
  FormField f = form_zero(matrix_space(n), 0, dim);
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i] != 0.0) f.comps[i][0] = sf_const(entries[i]);
  return f;
}

// Entries of the group matrix in its parameter chart, as scalar fields of the
// coordinates starting at `off` on a chart of dimension `dim`.
std::vector<SF> group_matrix_sf(GroupKind kind, int off, int dim) {
  if (kind == GroupKind::SO2) {
    const std::string t = "x" + std::to_string(off);
    SF c = parse_on("cos(" + t + ")", dim);
    SF s = parse_on("sin(" + t + ")", dim);
    return {c, sf_neg(s), s, c};
  }
  if (kind == GroupKind::SO11) {
    const std::string t = "x" + std::to_string(off);
    SF ch = parse_on("(exp(" + t + ") + exp(0-" + t + "))/2", dim);
    SF sh = parse_on("(exp(" + t + ") - exp(0-" + t + "))/2", dim);
    return {ch, sh, sh, ch};
  }
  // Rotations in the Cayley chart: R = I + 2(A + A^2)/(1 + |u|^2) with
  // A = skew(u).  Pole-free for |u| < 1 and rational in the parameters.
  SF u1 = sf_coord(off), u2 = sf_coord(off + 1), u3 = sf_coord(off + 2);
  SF zero = sf_const(0.0);
  std::vector<SF> A = {zero,       sf_neg(u3), u2,
                       u3,         zero,       sf_neg(u1),
                       sf_neg(u2), u1,         zero};
  std::vector<SF> A2 = matmul_sf(A, A, 3);
  SF denom = sf_affine({sf_mul(u1, u1), sf_mul(u2, u2), sf_mul(u3, u3)},
                       {1.0, 1.0, 1.0}, 1.0);
  std::vector<SF> R(9);
  for (int i = 0; i < 9; ++i) {
    SF num = sf_scale(sf_add(A[static_cast<std::size_t>(i)],
                             A2[static_cast<std::size_t>(i)]), 2.0);
    SF entry = sf_div(num, denom);
    if (i % 4 == 0) entry = sf_affine({entry}, {1.0}, 1.0);  // diagonal
    R[static_cast<std::size_t>(i)] = entry;
  }
  return R;
}

void mat3_from_params(const std::vector<double>& u, std::vector<double>& R) {
  const double r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  const double s = 2.0 / (1.0 + r2);
  const double A[9] = {0, -u[2], u[1], u[2], 0, -u[0], -u[1], u[0], 0};
  double A2[9];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (int k = 0; k < 3; ++k) acc += A[i * 3 + k] * A[k * 3 + j];
      A2[i * 3 + j] = acc;
    }
  R.assign(9, 0.0);
  for (int i = 0; i < 9; ++i) R[static_cast<std::size_t>(i)] = s * (A[i] + A2[i]);
  R[0] += 1.0; R[4] += 1.0; R[8] += 1.0;
}

void check_base_data(const TotalSpacePatch& patch, const FormField& a,
                     int degree, const char* who) {
  if (a.dim != patch.baseDim || a.degree != degree ||
      !(a.vs == matrix_space(patch.repDim)))
    throw ValidationError(std::string(who) + ": expected a matrix-valued degree-" +
                          std::to_string(degree) + " form on the base chart");
}

}  // namespace

GroupKind group_from_tag(const std::string& tag) {
  if (tag == "so2") return GroupKind::SO2;
  if (tag == "so11") return GroupKind::SO11;
  if (tag == "so3") return GroupKind::SO3;
  throw ValidationError("unknown group tag '" + tag + "' (expected so2, so11 or so3)");
}

const char* group_tag(GroupKind kind) {
  switch (kind) {
    case GroupKind::SO2: return "so2";
    case GroupKind::SO11: return "so11";
    case GroupKind::SO3: return "so3";
  }
  return "?";
}

TotalSpacePatch build_patch(int baseDim, GroupKind kind) {
  TotalSpacePatch p;
  p.kind = kind;
  p.baseDim = baseDim;
  switch (kind) {
    case GroupKind::SO2:
      p.groupDim = 1; p.repDim = 2; p.repSig = {0, 2};
      p.algebra = {{0, -1, 1, 0}};
      p.groupBox = {{-1.2, 1.2}};
      break;
    case GroupKind::SO11:
      p.groupDim = 1; p.repDim = 2; p.repSig = {1, 1};
      p.algebra = {{0, 1, 1, 0}};
      p.groupBox = {{-1.0, 1.0}};
      break;
    case GroupKind::SO3:
      p.groupDim = 3; p.repDim = 3; p.repSig = {0, 3};
      p.algebra = {{0, 0, 0, 0, 0, -1, 0, 1, 0},
                   {0, 0, 1, 0, 0, 0, -1, 0, 0},
                   {0, -1, 0, 1, 0, 0, 0, 0, 0}};
      p.groupBox = {{-0.35, 0.35}, {-0.35, 0.35}, {-0.35, 0.35}};
      break;
  }
  if (baseDim < 1)
    throw ValidationError("build_patch: base dimension must be positive");
  const int N = baseDim + p.groupDim;
  if (N > 6)
    throw ValidationError("build_patch: total chart dimension " +
                          std::to_string(N) + " exceeds the cap of 6");

  const int r = p.repDim;
  std::vector<SF> gm = group_matrix_sf(kind, baseDim, N);
  std::vector<SF> gi(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      gi[static_cast<std::size_t>(i) * r + j] =
          sf_scale(gm[static_cast<std::size_t>(j) * r + i],
                   p.repSig.eta(i) * p.repSig.eta(j));
  p.g = matrix_0form(gm, r, N);
  p.ginv = matrix_0form(gi, r, N);

  // Right-action generators: expand g^-1 d g over the algebra basis and
  // invert the coefficient matrix pointwise.
  const int k = p.groupDim;
  const auto slots = coeff_slots(kind);
  std::vector<SF> mc(static_cast<std::size_t>(k) * k);
  for (int j = 0; j < k; ++j) {
    std::vector<SF> dg(static_cast<std::size_t>(r) * r);
    for (int i = 0; i < r * r; ++i)
      dg[static_cast<std::size_t>(i)] =
          sf_partial(gm[static_cast<std::size_t>(i)], baseDim + j);
    std::vector<SF> prod = matmul_sf(gi, dg, r);
    for (int m = 0; m < k; ++m)
      mc[static_cast<std::size_t>(m) * k + j] =
          prod[static_cast<std::size_t>(slots[static_cast<std::size_t>(m)][0]) * r +
               slots[static_cast<std::size_t>(m)][1]];
  }
  const FormField mcInv = matrix_inverse_0form(matrix_0form(mc, k, N));
  for (int m = 0; m < k; ++m) {
    VectorField f;
    f.dim = N;
    f.comps.assign(static_cast<std::size_t>(N), sf_const(0.0));
    for (int j = 0; j < k; ++j)
      f.comps[static_cast<std::size_t>(baseDim + j)] =
          mcInv.comps[static_cast<std::size_t>(j) * k + m][0];
    p.fundamental.push_back(std::move(f));
  }
  return p;
}

FormField promote_to_total(const TotalSpacePatch& patch, const FormField& base) {
  if (base.dim != patch.baseDim)
    throw ValidationError("promote_to_total: form does not live on the base chart");
  const int N = patch.dim();
  FormField out = form_zero(base.vs, base.degree, N);
  const auto& cs = combos(N, base.degree);
  for (std::size_t c = 0; c < cs.size(); ++c) {
    bool horizontal = true;
    for (int idx : cs[c]) horizontal = horizontal && idx < patch.baseDim;
    if (!horizontal) continue;
    const int baseRank = combo_rank(patch.baseDim, cs[c]);
    for (int v = 0; v < base.vs.count(); ++v)
      out.comps[static_cast<std::size_t>(v)][c] =
          base.comps[static_cast<std::size_t>(v)][static_cast<std::size_t>(baseRank)];
  }
  return out;
}

VectorField promote_vector(const TotalSpacePatch& patch, const VectorField& xi) {
  if (xi.dim != patch.baseDim)
    throw ValidationError("promote_vector: field does not live on the base chart");
  VectorField out;
  out.dim = patch.dim();
  out.comps = xi.comps;
  out.comps.resize(static_cast<std::size_t>(out.dim), sf_const(0.0));
  return out;
}

FormField adjoint_twist(const TotalSpacePatch& patch, const FormField& algForm) {
  return wedge(patch.ginv, wedge(algForm, patch.g));
}

FormField lift_connection(const TotalSpacePatch& patch, const FormField& omegaBase) {
  check_base_data(patch, omegaBase, 1, "lift_connection");
  const FormField twisted = adjoint_twist(patch, promote_to_total(patch, omegaBase));
  const FormField mc = wedge(patch.ginv, exterior_derivative(patch.g));
  return form_add(twisted, mc);
}

FormField lift_matter(const TotalSpacePatch& patch, const FormField& phiBase) {
  if (phiBase.dim != patch.baseDim || !(phiBase.vs == vector_space(patch.repDim)))
    throw ValidationError("lift_matter: expected a vector-valued form on the base chart");
  return wedge(patch.ginv, promote_to_total(patch, phiBase));
}

VectorField lift_vector(const TotalSpacePatch& patch, const FormField& omegaBase,
                        const FormField& lambdaBase, const VectorField& xi) {
  check_base_data(patch, omegaBase, 1, "lift_vector");
  check_base_data(patch, lambdaBase, 0, "lift_vector");
  if (xi.dim != patch.baseDim)
    throw ValidationError("lift_vector: field does not live on the base chart");
  const FormField gap =
      form_sub(lambdaBase, interior_product(xi, omegaBase));
  const FormField twisted = adjoint_twist(patch, promote_to_total(patch, gap));
  const auto slots = coeff_slots(patch.kind);
  const int r = patch.repDim;
  VectorField out = promote_vector(patch, xi);
  const int k = patch.groupDim;
  for (int j = 0; j < k; ++j) {
    std::vector<SF> terms;
    for (int m = 0; m < k; ++m) {
      const SF& ym =
          twisted.comps[static_cast<std::size_t>(slots[static_cast<std::size_t>(m)][0]) * r +
                        slots[static_cast<std::size_t>(m)][1]][0];
      const SF& cm = patch.fundamental[static_cast<std::size_t>(m)]
                         .comps[static_cast<std::size_t>(patch.baseDim + j)];
      terms.push_back(sf_mul(cm, ym));
    }
    out.comps[static_cast<std::size_t>(patch.baseDim + j)] =
        sf_affine(terms, std::vector<double>(terms.size(), 1.0), 0.0);
  }
  return out;
}

FormField section_pullback(const TotalSpacePatch& patch, const FormField& total,
                           std::vector<SF> groupParams) {
  if (total.dim != patch.dim())
    throw ValidationError("section_pullback: form does not live on the total chart");
  if (groupParams.empty())
    groupParams.assign(static_cast<std::size_t>(patch.groupDim), sf_const(0.0));
  if (static_cast<int>(groupParams.size()) != patch.groupDim)
    throw ValidationError("section_pullback: wrong number of group parameters");
  std::vector<SF> maps;
  for (int i = 0; i < patch.baseDim; ++i) maps.push_back(sf_coord(i));
  for (SF& s : groupParams) maps.push_back(std::move(s));
  return pullback(maps, patch.baseDim, total);
}

std::vector<double> right_translate(const TotalSpacePatch& patch,
                                    const std::vector<double>& point,
                                    const std::vector<double>& h) {
  if (static_cast<int>(point.size()) != patch.dim() ||
      static_cast<int>(h.size()) != patch.groupDim)
    throw ValidationError("right_translate: wrong point or parameter arity");
  std::vector<double> out = point;
  if (patch.kind != GroupKind::SO3) {
    out[static_cast<std::size_t>(patch.baseDim)] += h[0];
    return out;
  }
  const double* u = point.data() + patch.baseDim;
  const double den = 1.0 - (u[0] * h[0] + u[1] * h[1] + u[2] * h[2]);
  if (std::abs(den) < 1e-8)
    throw DomainError("right_translate: composition leaves the rotation chart");
  const double cx = u[1] * h[2] - u[2] * h[1];
  const double cy = u[2] * h[0] - u[0] * h[2];
  const double cz = u[0] * h[1] - u[1] * h[0];
  out[static_cast<std::size_t>(patch.baseDim) + 0] = (u[0] + h[0] + cx) / den;
  out[static_cast<std::size_t>(patch.baseDim) + 1] = (u[1] + h[1] + cy) / den;
  out[static_cast<std::size_t>(patch.baseDim) + 2] = (u[2] + h[2] + cz) / den;
  return out;
}

std::vector<SF> right_translation_map(const TotalSpacePatch& patch,
                                      const std::vector<double>& h) {
  if (static_cast<int>(h.size()) != patch.groupDim)
    throw ValidationError("right_translation_map: wrong parameter arity");
  std::vector<SF> maps;
  for (int i = 0; i < patch.baseDim; ++i) maps.push_back(sf_coord(i));
  if (patch.kind != GroupKind::SO3) {
    maps.push_back(sf_affine({sf_coord(patch.baseDim)}, {1.0}, h[0]));
    return maps;
  }
  SF u1 = sf_coord(patch.baseDim);
  SF u2 = sf_coord(patch.baseDim + 1);
  SF u3 = sf_coord(patch.baseDim + 2);
  SF den = sf_affine({u1, u2, u3}, {-h[0], -h[1], -h[2]}, 1.0);
  SF w1 = sf_affine({u1, u2, u3}, {1.0, h[2], -h[1]}, h[0]);
  SF w2 = sf_affine({u1, u2, u3}, {-h[2], 1.0, h[0]}, h[1]);
  SF w3 = sf_affine({u1, u2, u3}, {h[1], -h[0], 1.0}, h[2]);
  maps.push_back(sf_div(w1, den));
  maps.push_back(sf_div(w2, den));
  maps.push_back(sf_div(w3, den));
  return maps;
}

std::vector<double> group_element(const TotalSpacePatch& patch,
                                  const std::vector<double>& h, bool inverse) {
  if (static_cast<int>(h.size()) != patch.groupDim)
    throw ValidationError("group_element: wrong parameter arity");
  std::vector<double> params = h;
  if (inverse)
    for (double& v : params) v = -v;
  std::vector<double> out;
  if (patch.kind == GroupKind::SO2) {
    const double c = std::cos(params[0]), s = std::sin(params[0]);
    out = {c, -s, s, c};
  } else if (patch.kind == GroupKind::SO11) {
    const double c = std::cosh(params[0]), s = std::sinh(params[0]);
    out = {c, s, s, c};
  } else {
    mat3_from_params(params, out);
  }
  return out;
}

OracleReport lift_and_compare(const TotalSpacePatch& patch, const FormField& omega,
                              const FormField& lambda, const VectorField& xi,
                              const FormField* phi,
                              const std::vector<std::vector<double>>& basePts,
                              std::uint64_t seed) {
  check_base_data(patch, omega, 1, "lift_and_compare");
  check_base_data(patch, lambda, 0, "lift_and_compare");
  const int N = patch.dim();
  Rng rng(seed);

  std::vector<std::vector<double>> totalPts;
  for (const auto& bp : basePts)
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<double> p = bp;
      for (const auto& box : patch.groupBox)
        p.push_back(rng.uniform(0.9 * box[0], 0.9 * box[1]));
      totalPts.push_back(std::move(p));
    }

  OracleReport report;

  const FormField omegaT = lift_connection(patch, omega);
  const VectorField xiT = lift_vector(patch, omega, lambda, xi);
  const FormField lambdaT = adjoint_twist(patch, promote_to_total(patch, lambda));
  report.liftResidual =
      form_max_diff(interior_product(xiT, omegaT), lambdaT, totalPts);
  if (report.liftResidual > 1e-8)
    throw InternalError("lift_vector: lifted field fails its defining contraction "
                        "(residual " + std::to_string(report.liftResidual) + ")");

  const FormField Ltot = lie_derivative_form(xiT, omegaT);

  const FormField B = form_sub(interior_product(xi, omega), lambda);
  const FormField baseConn =
      form_sub(lie_derivative_form(xi, omega), cov_d(omega, B));
  report.connDeviation =
      form_max_diff(section_pullback(patch, Ltot, {}), baseConn, basePts);

  const FormField iotaOm = interior_product(xiT, omegaT);
  report.connRearrangement = form_max_diff(
      Ltot,
      form_add(interior_product(xiT, curvature(omegaT)), cov_d(omegaT, iotaOm)),
      totalPts);

  for (const VectorField& fund : patch.fundamental)
    report.horizontality =
        std::max(report.horizontality,
                 form_max_abs(interior_product(fund, Ltot), totalPts));

  for (int rep = 0; rep < 2; ++rep) {
    std::vector<double> h;
    for (const auto& box : patch.groupBox)
      h.push_back(rng.uniform(0.5 * box[0], 0.5 * box[1]));
    const FormField pulled = pullback(right_translation_map(patch, h), N, Ltot);
    const FormField hc =
        constant_matrix_0form(group_element(patch, h, false), patch.repDim, N);
    const FormField hcInv =
        constant_matrix_0form(group_element(patch, h, true), patch.repDim, N);
    const FormField twisted = wedge(hcInv, wedge(Ltot, hc));
    report.equivariance = std::max(
        report.equivariance, form_max_diff(pulled, twisted, totalPts));

    const double eps = 1e-5;
    for (const auto& p : totalPts) {
      const std::vector<double> v = eval_vector(xiT, p);
      std::vector<double> pp = p, pm = p;
      for (int i = 0; i < N; ++i) {
        pp[static_cast<std::size_t>(i)] += eps * v[static_cast<std::size_t>(i)];
        pm[static_cast<std::size_t>(i)] -= eps * v[static_cast<std::size_t>(i)];
      }
      const std::vector<double> qp = right_translate(patch, pp, h);
      const std::vector<double> qm = right_translate(patch, pm, h);
      const std::vector<double> q = right_translate(patch, p, h);
      const std::vector<double> target = eval_vector(xiT, q);
      for (int i = 0; i < N; ++i) {
        const double fd = (qp[static_cast<std::size_t>(i)] -
                           qm[static_cast<std::size_t>(i)]) / (2.0 * eps);
        report.pushforwardDeviation =
            std::max(report.pushforwardDeviation,
                     std::abs(fd - target[static_cast<std::size_t>(i)]));
      }
    }
  }

  if (phi != nullptr) {
    const FormField phiT = lift_matter(patch, *phi);
    const FormField LtotPhi = lie_derivative_form(xiT, phiT);
    const FormField basePhi =
        form_add(lie_derivative_form(xi, *phi), rep_action(B, *phi));
    report.matterDeviation =
        form_max_diff(section_pullback(patch, LtotPhi, {}), basePhi, basePts);
    const FormField rearranged = form_sub(
        form_add(interior_product(xiT, cov_d(omegaT, phiT)),
                 cov_d(omegaT, interior_product(xiT, phiT))),
        rep_action(iotaOm, phiT));
    report.matterRearrangement = form_max_diff(LtotPhi, rearranged, totalPts);
  }

  // A second section x -> (x, p(x)) sees the gauge-transformed data; the
  // pulled-back derivative must match the base formula built from it.
  const auto baseNames = chart_names(patch.baseDim);
  std::vector<SF> params;
  const double scale = patch.kind == GroupKind::SO3 ? 0.35 : 0.6;
  for (int j = 0; j < patch.groupDim; ++j)
    params.push_back(sf_expr(Expression{
        random_smooth_expr(rng, baseNames, scale), baseNames}));
  std::vector<SF> sectionMap;
  for (int i = 0; i < patch.baseDim; ++i) sectionMap.push_back(sf_coord(i));
  for (const SF& s : params) sectionMap.push_back(s);
  const int r = patch.repDim;
  std::vector<SF> g0(static_cast<std::size_t>(r) * r);
  std::vector<SF> g0i(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r * r; ++i) {
    g0[static_cast<std::size_t>(i)] =
        sf_compose(patch.g.comps[static_cast<std::size_t>(i)][0], sectionMap);
    g0i[static_cast<std::size_t>(i)] =
        sf_compose(patch.ginv.comps[static_cast<std::size_t>(i)][0], sectionMap);
  }
  const FormField g0F = matrix_0form(g0, r, patch.baseDim);
  const FormField g0iF = matrix_0form(g0i, r, patch.baseDim);
  const FormField omegaP = form_add(wedge(wedge(g0iF, omega), g0F),
                                    wedge(g0iF, exterior_derivative(g0F)));
  const FormField lambdaP = wedge(g0iF, wedge(lambda, g0F));
  const FormField baseP = form_sub(
      lie_derivative_form(xi, omegaP),
      cov_d(omegaP, form_sub(interior_product(xi, omegaP), lambdaP)));
  report.sectionDeviation = form_max_diff(
      section_pullback(patch, Ltot, params), baseP, basePts);

  return report;
}

}  // namespace kosmann
