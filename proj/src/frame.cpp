#include "kosmann/frame.hpp"

#include <algorithm>

#include "kosmann/smallmat.hpp"

namespace kosmann {

FormField coframe_form(const Coframe& cf) {
  const int n = cf.dim();
  FormField e = form_zero(vector_space(n), 1, n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu)
      e.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] =
          cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
  return e;
}

Coframe coframe_from_form(const FormField& e, Signature sig) {
  if (e.vs.kind != ValueKind::Vector || e.degree != 1 || e.vs.n != e.dim)
    throw ValidationError("coframe_from_form: square vector-valued 1-form required");
  Coframe cf;
  cf.sig = sig;
  cf.e = e.comps;
  return cf;
}

SymTensor metric_from_coframe(const Coframe& cf) {
  const int n = cf.dim();
  SymTensor g;
  g.dim = n;
  g.g.resize(static_cast<std::size_t>(n) * n);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int a = 0; a < n; ++a) {
        const SF& ea = cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
        const SF& eb = cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(nu)];
        if (sf_is_zero(ea) || sf_is_zero(eb)) continue;
        terms.push_back(sf_mul(ea, eb));
        w.push_back(cf.sig.eta(a));
      }
      g.g[static_cast<std::size_t>(mu * n + nu)] =
          sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return g;
}

std::vector<std::vector<SF>> inverse_frame(const Coframe& cf) {
  const int n = cf.dim();
  std::vector<SF> in;
  in.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu)
      in.push_back(cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)]);
  auto out = sf_pointwise_fn(std::move(in), n * n, [n](auto inv, auto& outv) {
    using T = typename std::remove_cvref_t<decltype(inv)>::value_type;
    std::vector<T> M(inv.begin(), inv.end());
    outv = mat_inverse(M, n);
  });
  // out[mu*n + a] = (e^-1)_{mu a} = E_a^mu
  std::vector<std::vector<SF>> E(static_cast<std::size_t>(n),
                                 std::vector<SF>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu)
      E[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] =
          out[static_cast<std::size_t>(mu * n + a)];
  return E;
}

FormField levi_civita(const Coframe& cf) {
  const int n = cf.dim();
  const FormField e = coframe_form(cf);
  const FormField de = exterior_derivative(e);
  const std::vector<std::vector<int>> c2 = combos(n, 2);
  const int nc2 = static_cast<int>(c2.size());
  std::vector<double> eta(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) eta[static_cast<std::size_t>(a)] = cf.sig.eta(a);

  std::vector<SF> in;
  in.reserve(static_cast<std::size_t>(n) * n + static_cast<std::size_t>(n) * nc2);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu)
      in.push_back(cf.e[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)]);
  for (int a = 0; a < n; ++a)
    for (int r = 0; r < nc2; ++r)
      in.push_back(de.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)]);

  auto fn = [n, nc2, c2, eta](auto inv, auto& outv) {
    using T = typename std::remove_cvref_t<decltype(inv)>::value_type;
    const auto at = [&](int i) -> const T& { return inv[static_cast<std::size_t>(i)]; };
    std::vector<T> M(inv.begin(), inv.begin() + n * n);
    const std::vector<T> Minv = mat_inverse(M, n);
    const auto E = [&](int a, int mu) -> const T& {
      return Minv[static_cast<std::size_t>(mu * n + a)];
    };
    // frame structure functions de^a(E_b, E_c)
    std::vector<T> C(static_cast<std::size_t>(n) * n * n, T(0.0));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          T acc(0.0);
          for (int r = 0; r < nc2; ++r) {
            const int mu = c2[static_cast<std::size_t>(r)][0];
            const int nu = c2[static_cast<std::size_t>(r)][1];
            acc = acc + at(n * n + a * nc2 + r) * (E(b, mu) * E(c, nu) - E(b, nu) * E(c, mu));
          }
          C[static_cast<std::size_t>((a * n + b) * n + c)] = acc;
          C[static_cast<std::size_t>((a * n + c) * n + b)] = -acc;
        }
      }
    }
    const auto Cl = [&](int a, int b, int c) -> T {
      return eta[static_cast<std::size_t>(a)] * C[static_cast<std::size_t>((a * n + b) * n + c)];
    };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int mu = 0; mu < n; ++mu) {
          T acc(0.0);
          for (int c = 0; c < n; ++c) {
            const T K = 0.5 * (Cl(a, b, c) + Cl(b, c, a) - Cl(c, a, b));
            acc = acc + eta[static_cast<std::size_t>(a)] * K * M[static_cast<std::size_t>(c * n + mu)];
          }
          outv[static_cast<std::size_t>((a * n + b) * n + mu)] = acc;
        }
      }
    }
  };
  const auto out = sf_pointwise_fn(std::move(in), n * n * n, fn);
  FormField omega = form_zero(matrix_space(n), 1, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < n; ++mu)
        omega.comps[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(mu)] =
            out[static_cast<std::size_t>((a * n + b) * n + mu)];
  return omega;
}

FormField torsion(const FormField& e, const FormField& omega) {
  return form_add(exterior_derivative(e), wedge(omega, e));
}

FormField curvature(const FormField& omega) {
  return form_add(exterior_derivative(omega), wedge(omega, omega));
}

FormField cov_d_vector(const FormField& omega, const FormField& phi) {
  return form_add(exterior_derivative(phi), wedge(omega, phi));
}

FormField cov_d_matrix(const FormField& omega, const FormField& phi) {
  const double sgn = (phi.degree % 2 == 0) ? 1.0 : -1.0;
  return form_add(exterior_derivative(phi),
                  form_sub(wedge(omega, phi), form_scale(wedge(phi, omega), sgn)));
}

FormField raise_second(const FormField& m, Signature sig) {
  if (m.vs.kind != ValueKind::Matrix)
    throw ValidationError("raise_second: matrix-valued form required");
  const int n = m.vs.n;
  FormField r = m;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (sig.eta(b) < 0)
        for (auto& f : r.comps[static_cast<std::size_t>(a * n + b)]) f = sf_neg(f);
  return r;
}

FormField lower_first(const FormField& m, Signature sig) {
  if (m.vs.kind != ValueKind::Matrix)
    throw ValidationError("lower_first: matrix-valued form required");
  const int n = m.vs.n;
  FormField r = m;
  for (int a = 0; a < n; ++a)
    if (sig.eta(a) < 0)
      for (int b = 0; b < n; ++b)
        for (auto& f : r.comps[static_cast<std::size_t>(a * n + b)]) f = sf_neg(f);
  return r;
}

FormField ec_lagrangian(const FormField& e, const FormField& omega, Signature sig) {
  // d counts frame indices; the chart may carry extra parameter coordinates
  const int d = e.vs.n;
  if (d < 3)
    throw ValidationError("ec_lagrangian: needs dimension >= 3");
  if (e.vs.kind != ValueKind::Vector || e.degree != 1 ||
      omega.vs.kind != ValueKind::Matrix || omega.vs.n != d || omega.dim != e.dim)
    throw ValidationError("ec_lagrangian: coframe and connection shapes disagree");
  const FormField Fup = raise_second(curvature(omega), sig);
  FormField L = form_zero(scalar_space(), d, e.dim);
  std::vector<int> perm(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
  do {
    int inv = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inv;
    const double sgn = (inv % 2 == 0) ? 1.0 : -1.0;
    FormField term = form_value_slice(e, perm[0]);
    for (int k = 1; k < d - 2; ++k)
      term = wedge(term, form_value_slice(e, perm[static_cast<std::size_t>(k)]));
    term = wedge(term, form_value_slice(
                           Fup, perm[static_cast<std::size_t>(d - 2)] * d +
                                    perm[static_cast<std::size_t>(d - 1)]));
    L = form_add(L, form_scale(term, sgn));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return L;
}

FormField extend_with_parameter(const FormField& base, const FormField& delta) {
  if (!(base.vs == delta.vs) || base.degree != delta.degree || base.dim != delta.dim)
    throw ValidationError("extend_with_parameter: mismatched shapes");
  const int n = base.dim;
  std::vector<SF> proj;
  proj.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) proj.push_back(sf_coord(i));
  const SF t = sf_coord(n);
  FormField r = form_zero(base.vs, base.degree, n + 1);
  const auto& src = combos(n, base.degree);
  for (std::size_t ci = 0; ci < src.size(); ++ci) {
    const int extRank = combo_rank(n + 1, src[ci]);
    for (std::size_t v = 0; v < base.comps.size(); ++v) {
      const SF b = sf_compose(base.comps[v][ci], proj);
      const SF d = sf_compose(delta.comps[v][ci], proj);
      r.comps[v][static_cast<std::size_t>(extRank)] = sf_add(b, sf_mul(t, d));
    }
  }
  return r;
}

}  // namespace kosmann
