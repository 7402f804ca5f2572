#include "kosmann/kk.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "kosmann/error.hpp"
#include "kosmann/frame.hpp"
#include "kosmann/quadrature.hpp"

namespace kosmann {

namespace {

SF affine_sum(std::vector<SF> terms, std::vector<double> w) {
  return sf_affine(std::move(terms), std::move(w), 0.0);
}

// sum_{mu nu} u_mu ginv^{mu nu} v_nu for component rows of 1-forms
SF dual_pairing(const std::vector<SF>& u, const std::vector<SF>& v,
                const SymTensor& ginv) {
  const int n = ginv.dim;
  std::vector<SF> terms;
  std::vector<double> w;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      const SF& gi = ginv.g[static_cast<std::size_t>(mu * n + nu)];
      if (sf_is_zero(u[static_cast<std::size_t>(mu)]) ||
          sf_is_zero(v[static_cast<std::size_t>(nu)]) || sf_is_zero(gi))
        continue;
      terms.push_back(sf_mul(gi, sf_mul(u[static_cast<std::size_t>(mu)],
                                        v[static_cast<std::size_t>(nu)])));
      w.push_back(1.0);
    }
  return affine_sum(std::move(terms), std::move(w));
}

double numeric_det(std::vector<double> M, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(M[static_cast<std::size_t>(col * n + col)]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(M[static_cast<std::size_t>(r * n + col)]);
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) return 0.0;
    if (piv != col) {
      det = -det;
      for (int j = 0; j < n; ++j)
        std::swap(M[static_cast<std::size_t>(col * n + j)],
                  M[static_cast<std::size_t>(piv * n + j)]);
    }
    const double d = M[static_cast<std::size_t>(col * n + col)];
    det *= d;
    for (int r = col + 1; r < n; ++r) {
      const double f = M[static_cast<std::size_t>(r * n + col)] / d;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j)
        M[static_cast<std::size_t>(r * n + j)] -= f * M[static_cast<std::size_t>(col * n + j)];
    }
  }
  return det;
}

}  // namespace

SymTensor dual_metric(const SymTensor& g) {
  const int n = g.dim;
  FormField m = form_zero(matrix_space(n), 0, n);
  for (int i = 0; i < n * n; ++i)
    m.comps[static_cast<std::size_t>(i)][0] = g.g[static_cast<std::size_t>(i)];
  const FormField inv = matrix_inverse_0form(m);
  SymTensor r;
  r.dim = n;
  r.g.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i)
    r.g[static_cast<std::size_t>(i)] = inv.comps[static_cast<std::size_t>(i)][0];
  return r;
}

KKConnection kk_connection_form(const KKSetup& setup) {
  const int n = setup.e.dim();
  const int k = static_cast<int>(setup.fund.size());
  if (k < 1 || k >= n)
    throw ValidationError("kk_connection_form: need between 1 and dim-1 fiber directions");
  for (const VectorField& A : setup.fund)
    if (A.dim != n) throw ValidationError("kk_connection_form: chart mismatch");
  if (setup.samplePts.empty())
    throw ValidationError("kk_connection_form: no sample points for hypothesis checks");

  const SymTensor g = metric_from_coframe(setup.e);

  // fiber metric gV_{mn} = g(A_m, A_n)
  FormField gV = form_zero(matrix_space(k), 0, n);
  for (int m = 0; m < k; ++m)
    for (int l = 0; l < k; ++l) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
          const SF& gm = g.g[static_cast<std::size_t>(mu * n + nu)];
          const SF& am = setup.fund[static_cast<std::size_t>(m)].comps[static_cast<std::size_t>(mu)];
          const SF& al = setup.fund[static_cast<std::size_t>(l)].comps[static_cast<std::size_t>(nu)];
          if (sf_is_zero(gm) || sf_is_zero(am) || sf_is_zero(al)) continue;
          terms.push_back(sf_mul(gm, sf_mul(am, al)));
          w.push_back(1.0);
        }
      gV.comps[static_cast<std::size_t>(m * k + l)][0] =
          affine_sum(std::move(terms), std::move(w));
    }

  // hypothesis checks at the sample points
  for (int m = 0; m < k; ++m)
    for (const auto& pt : setup.samplePts)
      if (std::abs(sf_value(gV.comps[static_cast<std::size_t>(m * k + m)][0], pt)) < 1e-12)
        throw ValidationError("kk_connection_form: fundamental field " +
                              std::to_string(m) + " is null at a sample point");
  for (int m = 0; m < k; ++m)
    for (int l = m + 1; l < k; ++l) {
      const VectorField br = vector_bracket(setup.fund[static_cast<std::size_t>(m)],
                                            setup.fund[static_cast<std::size_t>(l)]);
      for (const auto& pt : setup.samplePts)
        for (const SF& c : br.comps)
          if (std::abs(sf_value(c, pt)) > 1e-9)
            throw ValidationError("kk_connection_form: fiber action is not abelian");
    }
  for (int m = 0; m < k; ++m) {
    const double r = form_max_abs(
        kosmann_lie_coframe(setup.e, setup.fund[static_cast<std::size_t>(m)]),
        setup.samplePts);
    if (r > setup.tolHyp)
      throw ValidationError(
          "kk_connection_form: coframe is not invariant along fundamental field " +
          std::to_string(m) + " (residual " + std::to_string(r) + ")");
  }

  const FormField gVinv = matrix_inverse_0form(gV);

  // theta^m = (gV^{-1})^{ml} g(A_l, .)
  FormField theta = form_zero(vector_space(k), 1, n);
  std::vector<std::vector<SF>> gA(static_cast<std::size_t>(k),
                                  std::vector<SF>(static_cast<std::size_t>(n)));
  for (int l = 0; l < k; ++l)
    for (int mu = 0; mu < n; ++mu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int nu = 0; nu < n; ++nu) {
        const SF& gm = g.g[static_cast<std::size_t>(mu * n + nu)];
        const SF& al = setup.fund[static_cast<std::size_t>(l)].comps[static_cast<std::size_t>(nu)];
        if (sf_is_zero(gm) || sf_is_zero(al)) continue;
        terms.push_back(sf_mul(gm, al));
        w.push_back(1.0);
      }
      gA[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)] =
          affine_sum(std::move(terms), std::move(w));
    }
  for (int m = 0; m < k; ++m)
    for (int mu = 0; mu < n; ++mu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int l = 0; l < k; ++l) {
        const SF& gi = gVinv.comps[static_cast<std::size_t>(m * k + l)][0];
        const SF& ga = gA[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)];
        if (sf_is_zero(gi) || sf_is_zero(ga)) continue;
        terms.push_back(sf_mul(gi, ga));
        w.push_back(1.0);
      }
      theta.comps[static_cast<std::size_t>(m)][static_cast<std::size_t>(mu)] =
          affine_sum(std::move(terms), std::move(w));
    }

  // base metric h = g - gV(theta, theta)
  SymTensor h;
  h.dim = n;
  h.g.resize(static_cast<std::size_t>(n) * n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int m = 0; m < k; ++m)
        for (int l = 0; l < k; ++l) {
          const SF& gv = gV.comps[static_cast<std::size_t>(m * k + l)][0];
          const SF& tm = theta.comps[static_cast<std::size_t>(m)][static_cast<std::size_t>(mu)];
          const SF& tl = theta.comps[static_cast<std::size_t>(l)][static_cast<std::size_t>(nu)];
          if (sf_is_zero(gv) || sf_is_zero(tm) || sf_is_zero(tl)) continue;
          terms.push_back(sf_mul(gv, sf_mul(tm, tl)));
          w.push_back(-1.0);
        }
      terms.push_back(g.g[static_cast<std::size_t>(mu * n + nu)]);
      w.push_back(1.0);
      h.g[static_cast<std::size_t>(mu * n + nu)] =
          affine_sum(std::move(terms), std::move(w));
    }

  return {std::move(theta), std::move(gV), std::move(h)};
}

VerticalFrame gram_schmidt_vertical(const FormField& theta, const SymTensor& ginv,
                                    const std::vector<std::vector<double>>& pts) {
  if (theta.vs.kind != ValueKind::Vector || theta.degree != 1)
    throw ValidationError("gram_schmidt_vertical: vector-valued 1-form required");
  if (pts.empty())
    throw ValidationError("gram_schmidt_vertical: sample points required");
  const int k = theta.vs.n;
  const int n = theta.dim;

  VerticalFrame out;
  out.frame = form_zero(vector_space(k), 1, n);
  out.coeff = form_zero(matrix_space(k), 0, n);
  out.signs.assign(static_cast<std::size_t>(k), 1);

  // rows of the running frame and the coefficients expressing them in theta
  std::vector<std::vector<SF>> frameRows;
  std::vector<std::vector<SF>> coeffRows;
  for (int a = 0; a < k; ++a) {
    std::vector<SF> v(theta.comps[static_cast<std::size_t>(a)]);
    std::vector<SF> c(static_cast<std::size_t>(k), sf_const(0.0));
    c[static_cast<std::size_t>(a)] = sf_const(1.0);
    for (int b = 0; b < a; ++b) {
      const double sgn = static_cast<double>(out.signs[static_cast<std::size_t>(b)]);
      SF proj = dual_pairing(v, frameRows[static_cast<std::size_t>(b)], ginv);
      for (int mu = 0; mu < n; ++mu) {
        const SF& fb = frameRows[static_cast<std::size_t>(b)][static_cast<std::size_t>(mu)];
        if (sf_is_zero(fb)) continue;
        v[static_cast<std::size_t>(mu)] = affine_sum(
            {v[static_cast<std::size_t>(mu)], sf_mul(proj, fb)}, {1.0, -sgn});
      }
      for (int j = 0; j < k; ++j) {
        const SF& cb = coeffRows[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
        if (sf_is_zero(cb)) continue;
        c[static_cast<std::size_t>(j)] = affine_sum(
            {c[static_cast<std::size_t>(j)], sf_mul(proj, cb)}, {1.0, -sgn});
      }
    }
    const SF normSq = dual_pairing(v, v, ginv);
    int sign = 0;
    for (const auto& pt : pts) {
      const double val = sf_value(normSq, pt);
      if (std::abs(val) < 1e-12)
        throw ValidationError("gram_schmidt_vertical: vertical leg " +
                              std::to_string(a) + " degenerates at a sample point");
      const int s = val > 0.0 ? 1 : -1;
      if (sign == 0) sign = s;
      else if (sign != s)
        throw ValidationError("gram_schmidt_vertical: vertical leg " +
                              std::to_string(a) + " changes causal type");
    }
    out.signs[static_cast<std::size_t>(a)] = sign;
    const SF norm = sf_sqrt(sign > 0 ? normSq : sf_neg(normSq));
    std::vector<SF> frameRow(static_cast<std::size_t>(n));
    std::vector<SF> coeffRow(static_cast<std::size_t>(k));
    for (int mu = 0; mu < n; ++mu)
      frameRow[static_cast<std::size_t>(mu)] =
          sf_is_zero(v[static_cast<std::size_t>(mu)])
              ? sf_const(0.0)
              : sf_div(v[static_cast<std::size_t>(mu)], norm);
    for (int j = 0; j < k; ++j)
      coeffRow[static_cast<std::size_t>(j)] =
          sf_is_zero(c[static_cast<std::size_t>(j)])
              ? sf_const(0.0)
              : sf_div(c[static_cast<std::size_t>(j)], norm);
    out.frame.comps[static_cast<std::size_t>(a)] = frameRow;
    for (int j = 0; j < k; ++j)
      out.coeff.comps[static_cast<std::size_t>(a * k + j)][0] =
          coeffRow[static_cast<std::size_t>(j)];
    frameRows.push_back(std::move(frameRow));
    coeffRows.push_back(std::move(coeffRow));
  }
  return out;
}

BaseFrame signature_cholesky(const SymTensor& h,
                             const std::vector<std::vector<double>>& pts) {
  if (pts.empty()) throw ValidationError("signature_cholesky: sample points required");
  const int n = h.dim;
  std::vector<SF> R(h.g);
  std::vector<std::vector<SF>> legs;
  std::vector<int> signs;
  for (int col = 0; col < n; ++col) {
    const SF& d = R[static_cast<std::size_t>(col * n + col)];
    const double dv = sf_value(d, pts[0]);
    if (std::abs(dv) < 1e-10) continue;
    const int sign = dv > 0.0 ? 1 : -1;
    const SF norm = sf_sqrt(sign > 0 ? d : sf_neg(d));
    std::vector<SF> leg(static_cast<std::size_t>(n));
    for (int mu = 0; mu < n; ++mu)
      leg[static_cast<std::size_t>(mu)] =
          sf_is_zero(R[static_cast<std::size_t>(col * n + mu)])
              ? sf_const(0.0)
              : sf_div(R[static_cast<std::size_t>(col * n + mu)], norm);
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        if (sf_is_zero(leg[static_cast<std::size_t>(mu)]) ||
            sf_is_zero(leg[static_cast<std::size_t>(nu)]))
          continue;
        R[static_cast<std::size_t>(mu * n + nu)] = affine_sum(
            {R[static_cast<std::size_t>(mu * n + nu)],
             sf_mul(leg[static_cast<std::size_t>(mu)], leg[static_cast<std::size_t>(nu)])},
            {1.0, -static_cast<double>(sign)});
      }
    legs.push_back(std::move(leg));
    signs.push_back(sign);
  }
  int p = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] < 0) {
      if (static_cast<int>(i) != p)
        throw ValidationError("signature_cholesky: negative directions are not leading");
      ++p;
    }
  }
  BaseFrame out;
  out.sig = {p, static_cast<int>(signs.size()) - p};
  out.legs = form_zero(vector_space(static_cast<int>(legs.size())), 1, n);
  for (std::size_t a = 0; a < legs.size(); ++a) out.legs.comps[a] = legs[a];
  return out;
}

Coframe adapted_coframe(const KKSetup& setup, const BaseFrame& base,
                        const VerticalFrame& vert) {
  const int n = setup.e.dim();
  const int k = vert.frame.vs.n;
  const int nb = base.legs.vs.n;
  if (nb + k != n)
    throw ValidationError("adapted_coframe: base and vertical legs do not span the chart");
  for (int s : vert.signs)
    if (s != 1)
      throw ValidationError(
          "adapted_coframe: timelike vertical legs cannot be appended after "
          "spacelike base legs");
  const Signature total{base.sig.p, base.sig.q + k};
  if (total.p != setup.e.sig.p || total.q != setup.e.sig.q)
    throw ValidationError("adapted_coframe: stacked signature disagrees with the setup");
  Coframe cf;
  cf.sig = total;
  cf.e.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < nb; ++a) cf.e.push_back(base.legs.comps[static_cast<std::size_t>(a)]);
  for (int a = 0; a < k; ++a) cf.e.push_back(vert.frame.comps[static_cast<std::size_t>(a)]);
  return cf;
}

ReducedFields extract_fields(const KKSetup& setup) {
  KKConnection conn = kk_connection_form(setup);
  const SymTensor ginv = dual_metric(metric_from_coframe(setup.e));
  VerticalFrame vert = gram_schmidt_vertical(conn.theta, ginv, setup.samplePts);
  BaseFrame base = signature_cholesky(conn.h, setup.samplePts);

  const int k = static_cast<int>(setup.fund.size());
  double inv = 0.0;
  for (const VectorField& A : setup.fund)
    inv = std::max(inv, form_max_abs(lie_derivative_form(A, vert.coeff), setup.samplePts));
  if (inv > 1e-8)
    throw ValidationError("extract_fields: scalar sector varies along the fiber (residual " +
                          std::to_string(inv) + ")");
  for (const auto& pt : setup.samplePts) {
    const auto vals = eval_form(vert.coeff, pt);
    std::vector<double> M(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k * k; ++i) M[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(i)][0];
    if (numeric_det(std::move(M), k) <= 0.0)
      throw ValidationError("extract_fields: scalar sector has non-positive determinant");
  }

  ReducedFields out;
  out.base = std::move(base);
  out.theta = std::move(conn.theta);
  out.gV = std::move(conn.gV);
  out.phi = std::move(vert.coeff);
  out.signs = std::move(vert.signs);
  return out;
}

GaugeVerdict adapted_gauge_check(const KKSetup& setup, const Coframe& ehat) {
  GaugeVerdict v;
  const FormField ef = coframe_form(ehat);
  for (const VectorField& A : setup.fund) {
    v.residual = std::max(v.residual,
                          form_max_abs(kosmann_correction(ehat, A), setup.samplePts));
    v.naiveResidual = std::max(v.naiveResidual,
                               form_max_abs(lie_derivative_form(A, ef), setup.samplePts));
  }
  v.pass = v.residual < 1e-8;
  return v;
}

double monopole_number(const FormField& theta, int m, const std::vector<int>& axes,
                       const std::vector<std::array<double, 2>>& bounds,
                       const std::vector<double>& basePoint, double period) {
  if (axes.size() != 2)
    throw ValidationError("monopole_number: flux needs a two-dimensional box");
  if (period <= 0.0) throw ValidationError("monopole_number: fiber period must be positive");
  if (m < 0 || m >= theta.vs.n)
    throw ValidationError("monopole_number: no such fiber direction");
  const FormField F = exterior_derivative(theta);
  std::vector<int> combo = {axes[0], axes[1]};
  double orient = 1.0;
  if (combo[0] > combo[1]) {
    std::swap(combo[0], combo[1]);
    orient = -1.0;
  }
  const int rank = combo_rank(theta.dim, combo);
  const SF& comp = F.comps[static_cast<std::size_t>(m)][static_cast<std::size_t>(rank)];
  return orient * integrate_box(comp, axes, bounds, basePoint) / period;
}

}  // namespace kosmann
