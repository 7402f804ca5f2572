#include "kosmann/covlie.hpp"

#include <cmath>

#include "kosmann/smallmat.hpp"

namespace kosmann {

FormField rep_action(const FormField& lambda, const FormField& phi) {
  if (lambda.vs.kind != ValueKind::Matrix)
    throw ValidationError("rep_action: matrix-valued generator required");
  switch (phi.vs.kind) {
    case ValueKind::Scalar:
      return form_zero(scalar_space(), lambda.degree + phi.degree, phi.dim);
    case ValueKind::Vector:
      if (phi.vs.n != lambda.vs.n)
        throw ValidationError("rep_action: generator size does not match field");
      return wedge(lambda, phi);
    case ValueKind::Matrix: {
      if (phi.vs.n != lambda.vs.n)
        throw ValidationError("rep_action: generator size does not match field");
      const double sgn = (lambda.degree * phi.degree) % 2 == 0 ? 1.0 : -1.0;
      return form_sub(wedge(lambda, phi), form_scale(wedge(phi, lambda), sgn));
    }
  }
  throw InternalError("rep_action: unhandled value kind");
}

FormField cov_d(const FormField& omega, const FormField& phi) {
  switch (phi.vs.kind) {
    case ValueKind::Scalar: return exterior_derivative(phi);
    case ValueKind::Vector: return cov_d_vector(omega, phi);
    case ValueKind::Matrix: return cov_d_matrix(omega, phi);
  }
  throw InternalError("cov_d: unhandled value kind");
}

FormField natural_cov_lie_matter(const FormField& omega, const VectorField& xi,
                                 const FormField& phi) {
  if (phi.vs.kind != ValueKind::Scalar && omega.vs.n != phi.vs.n)
    throw ValidationError("natural_cov_lie_matter: connection cannot act on this field");
  return form_add(interior_product(xi, cov_d(omega, phi)),
                  cov_d(omega, interior_product(xi, phi)));
}

FormField natural_cov_lie_connection(const FormField& omega, const VectorField& xi) {
  return interior_product(xi, curvature(omega));
}

CovariantizationData covdata_from_correction(CorrectionMap B) {
  CovariantizationData d;
  d.B = std::move(B);
  return d;
}

CovariantizationData covdata_from_pair(FormField omega, CorrectionMap lambda) {
  CovariantizationData d;
  d.hasPair = true;
  d.omega = omega;
  d.lambda = lambda;
  d.B = [omega, lambda](const VectorField& xi) {
    return form_sub(interior_product(xi, omega), lambda(xi));
  };
  return d;
}

CovariantizationData covdata_natural(FormField omega) {
  const ValueSpace vs = omega.vs;
  const int dim = omega.dim;
  return covdata_from_pair(std::move(omega), [vs, dim](const VectorField&) {
    return form_zero(vs, 0, dim);
  });
}

CovariantizationData covdata_kosmann(const Coframe& e) {
  const FormField omega = levi_civita(e);
  CovariantizationData d;
  d.hasPair = true;
  d.omega = omega;
  d.B = [e](const VectorField& xi) { return kosmann_correction(e, xi); };
  d.lambda = [e, omega](const VectorField& xi) {
    return form_sub(interior_product(xi, omega), kosmann_correction(e, xi));
  };
  return d;
}

FormField covariantization_term(const CovariantizationData& data,
                                const VectorField& xi) {
  return data.B(xi);
}

FormField general_cov_lie_matter(const CovariantizationData& data,
                                 const VectorField& xi, const FormField& phi) {
  return form_add(lie_derivative_form(xi, phi), rep_action(data.B(xi), phi));
}

FormField general_cov_lie_connection(const CovariantizationData& data,
                                     const VectorField& xi, const FormField& omega) {
  return form_sub(lie_derivative_form(xi, omega),
                  cov_d_matrix(omega, data.B(xi)));
}

double connection_independence_check(const CovariantizationData& data,
                                     const FormField& omegaHat,
                                     const VectorField& xi,
                                     const std::vector<std::vector<double>>& pts) {
  const FormField Ba = data.B(xi);
  // swap the connection, keeping the correction: lambdaHat = i_xi omegaHat - B
  const FormField lambdaHat = form_sub(interior_product(xi, omegaHat), Ba);
  const FormField Bb = form_sub(interior_product(xi, omegaHat), lambdaHat);
  return form_max_diff(Ba, Bb, pts);
}

FormField frame_components(const Coframe& e, const FormField& alpha) {
  const int n = e.dim();
  if (alpha.vs.kind != ValueKind::Vector || alpha.vs.n != n || alpha.degree != 1 ||
      alpha.dim != n)
    throw ValidationError("frame_components: vector-valued 1-form on the coframe chart required");
  const auto E = inverse_frame(e);
  FormField out = form_zero(matrix_space(n), 0, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int mu = 0; mu < n; ++mu) {
        const SF& am = alpha.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
        if (sf_is_zero(am)) continue;
        terms.push_back(sf_mul(am, E[static_cast<std::size_t>(b)][static_cast<std::size_t>(mu)]));
        w.push_back(1.0);
      }
      out.comps[static_cast<std::size_t>(a * n + b)][0] =
          sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return out;
}

namespace {

// eta-lowered frame components of L_xi e, split into symmetric and
// antisymmetric parts with weight 1/2.
struct LoweredSplit {
  FormField sym;
  FormField antisym;
};

LoweredSplit lowered_split(const Coframe& e, const FormField& expansion) {
  const FormField low = lower_first(expansion, e.sig);
  const FormField lowT = form_value_transpose(low);
  LoweredSplit s;
  s.sym = form_scale(form_add(low, lowT), 0.5);
  s.antisym = form_scale(form_sub(low, lowT), 0.5);
  return s;
}

}  // namespace

FormField kosmann_correction(const Coframe& e, const VectorField& xi) {
  const FormField M = frame_components(e, lie_derivative_form(xi, coframe_form(e)));
  const LoweredSplit s = lowered_split(e, M);
  // B^a{}_b = -eta^{ad} (L_xi e)_[db]
  return form_scale(lower_first(s.antisym, e.sig), -1.0);
}

FormField kosmann_lie_coframe(const Coframe& e, const VectorField& xi) {
  const FormField eForm = coframe_form(e);
  const FormField M = frame_components(e, lie_derivative_form(xi, eForm));
  const LoweredSplit s = lowered_split(e, M);
  return wedge(lower_first(s.sym, e.sig), eForm);
}

FormField kosmann_lie_coframe_connection_route(const Coframe& e, const VectorField& xi) {
  const FormField eForm = coframe_form(e);
  const FormField v = interior_product(xi, eForm);
  const FormField D = cov_d_vector(levi_civita(e), v);
  const LoweredSplit s = lowered_split(e, frame_components(e, D));
  return wedge(lower_first(s.sym, e.sig), eForm);
}

FormField kosmann_lie_coframe_correction_route(const Coframe& e, const VectorField& xi) {
  const FormField eForm = coframe_form(e);
  return form_add(lie_derivative_form(xi, eForm),
                  wedge(kosmann_correction(e, xi), eForm));
}

KillingReport killing_check(const Coframe& e, const VectorField& xi,
                            const std::vector<std::vector<double>>& pts,
                            double tol) {
  KillingReport r;
  r.residual = form_max_abs(kosmann_lie_coframe(e, xi), pts);
  r.killing = r.residual < tol;
  const SymTensor Lg = lie_derivative_metric(xi, metric_from_coframe(e));
  double m = 0.0;
  for (const auto& p : pts)
    for (double v : eval_sym(Lg, p)) m = std::max(m, std::abs(v));
  r.metricResidual = m;
  r.metricKilling = m < tol;
  return r;
}

FormField matrix_inverse_0form(const FormField& m) {
  if (m.vs.kind != ValueKind::Matrix || m.degree != 0)
    throw ValidationError("matrix_inverse_0form: matrix-valued 0-form required");
  const int n = m.vs.n;
  std::vector<SF> in;
  for (const auto& row : m.comps) in.push_back(row[0]);
  auto out = sf_pointwise_fn(std::move(in), n * n, [n](auto inv, auto& outv) {
    using T = typename std::remove_cvref_t<decltype(inv)>::value_type;
    std::vector<T> M(inv.begin(), inv.end());
    outv = mat_inverse(M, n);
  });
  FormField r = form_zero(m.vs, 0, m.dim);
  for (int i = 0; i < n * n; ++i) r.comps[static_cast<std::size_t>(i)][0] = out[static_cast<std::size_t>(i)];
  return r;
}

FormField matrix_exp_0form(const FormField& a) {
  if (a.vs.kind != ValueKind::Matrix || a.degree != 0)
    throw ValidationError("matrix_exp_0form: matrix-valued 0-form required");
  const int n = a.vs.n;
  std::vector<SF> in;
  for (const auto& row : a.comps) in.push_back(row[0]);
  auto out = sf_pointwise_fn(std::move(in), n * n, [n](auto inv, auto& outv) {
    using T = typename std::remove_cvref_t<decltype(inv)>::value_type;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    // scale down, truncated series, square back up
    std::vector<T> M(nn);
    for (std::size_t i = 0; i < nn; ++i) M[i] = inv[i] * 0.0625;
    std::vector<T> acc(nn, T(0.0)), pw(nn, T(0.0));
    for (int i = 0; i < n; ++i) {
      acc[static_cast<std::size_t>(i * n + i)] = T(1.0);
      pw[static_cast<std::size_t>(i * n + i)] = T(1.0);
    }
    double fact = 1.0;
    for (int k = 1; k <= 14; ++k) {
      pw = matmul(pw, M, n, n, n);
      fact *= k;
      for (std::size_t i = 0; i < nn; ++i) acc[i] = acc[i] + pw[i] / fact;
    }
    for (int s = 0; s < 4; ++s) acc = matmul(acc, acc, n, n, n);
    outv = std::move(acc);
  });
  FormField r = form_zero(a.vs, 0, a.dim);
  for (int i = 0; i < n * n; ++i) r.comps[static_cast<std::size_t>(i)][0] = out[static_cast<std::size_t>(i)];
  return r;
}

FormField gauge_transform_coframe(const FormField& gamma, const FormField& e) {
  return wedge(gamma, e);
}

FormField gauge_transform_connection(const FormField& gamma, const FormField& omega) {
  const FormField inv = matrix_inverse_0form(gamma);
  return form_add(wedge(wedge(gamma, omega), inv),
                  wedge(gamma, exterior_derivative(inv)));
}

double orthogonality_residual(const FormField& gamma, Signature sig,
                              const std::vector<std::vector<double>>& pts) {
  const int n = gamma.vs.n;
  const FormField prod = wedge(form_value_transpose(gamma), lower_first(gamma, sig));
  FormField eta = form_zero(matrix_space(n), 0, gamma.dim);
  for (int i = 0; i < n; ++i)
    eta.comps[static_cast<std::size_t>(i * n + i)][0] = sf_const(sig.eta(i));
  return form_max_diff(prod, eta, pts);
}

VectorField vector_bracket(const VectorField& a, const VectorField& b) {
  if (a.dim != b.dim) throw ValidationError("vector_bracket: charts differ");
  VectorField r;
  r.dim = a.dim;
  for (int mu = 0; mu < a.dim; ++mu) {
    std::vector<SF> terms;
    std::vector<double> w;
    for (int nu = 0; nu < a.dim; ++nu) {
      terms.push_back(sf_mul(a.comps[static_cast<std::size_t>(nu)],
                             sf_partial(b.comps[static_cast<std::size_t>(mu)], nu)));
      w.push_back(1.0);
      terms.push_back(sf_mul(b.comps[static_cast<std::size_t>(nu)],
                             sf_partial(a.comps[static_cast<std::size_t>(mu)], nu)));
      w.push_back(-1.0);
    }
    r.comps.push_back(sf_affine(std::move(terms), std::move(w), 0.0));
  }
  return r;
}

double kosmann_bracket_defect(const Coframe& e, const VectorField& xi,
                              const VectorField& zeta,
                              const std::vector<std::vector<double>>& pts) {
  const CovariantizationData data = covdata_kosmann(e);
  const FormField eForm = coframe_form(e);
  const FormField LxLz =
      general_cov_lie_matter(data, xi, general_cov_lie_matter(data, zeta, eForm));
  const FormField LzLx =
      general_cov_lie_matter(data, zeta, general_cov_lie_matter(data, xi, eForm));
  const FormField Lbr =
      general_cov_lie_matter(data, vector_bracket(xi, zeta), eForm);
  return form_max_diff(Lbr, form_sub(LxLz, LzLx), pts);
}

}  // namespace kosmann
