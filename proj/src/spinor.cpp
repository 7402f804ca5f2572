#include "kosmann/spinor.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "kosmann/error.hpp"
#include "kosmann/frame.hpp"

namespace kosmann {

namespace {

const cplx kI{0.0, 1.0};

CMat pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
CMat pauli_y() { return {0.0, -kI, kI, 0.0}; }
CMat pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

CMat kron(const CMat& A, int na, const CMat& B, int nb) {
  const int n = na * nb;
  CMat out(static_cast<std::size_t>(n) * n, cplx{});
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const cplx a = A[static_cast<std::size_t>(i * na + j)];
      if (a == cplx{}) continue;
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l)
          out[static_cast<std::size_t>((i * nb + k) * n + (j * nb + l))] =
              a * B[static_cast<std::size_t>(k * nb + l)];
    }
  return out;
}

SF affine_sum(std::vector<SF> terms, std::vector<double> w) {
  return sf_affine(std::move(terms), std::move(w), 0.0);
}

void check_shapes(const SpinorForm& a, const SpinorForm& b, const char* who) {
  if (a.dim != b.dim || a.degree != b.degree || a.ns != b.ns)
    throw ValidationError(std::string(who) + ": spinor shapes differ");
}

FormField scalar_slice(const SpinorForm& psi, int alpha, bool imagPart) {
  FormField f = form_zero(scalar_space(), psi.degree, psi.dim);
  f.comps[0] = imagPart ? psi.im[static_cast<std::size_t>(alpha)]
                        : psi.re[static_cast<std::size_t>(alpha)];
  return f;
}

FormField spinor_pack(const SpinorForm& psi) {
  FormField f = form_zero(vector_space(2 * psi.ns), psi.degree, psi.dim);
  for (int a = 0; a < psi.ns; ++a) {
    f.comps[static_cast<std::size_t>(a)] = psi.re[static_cast<std::size_t>(a)];
    f.comps[static_cast<std::size_t>(psi.ns + a)] = psi.im[static_cast<std::size_t>(a)];
  }
  return f;
}

// lift a map on scalar forms to every real/imaginary component
template <class Fn>
SpinorForm per_component(const SpinorForm& psi, int outDegree, Fn&& op) {
  SpinorForm r = spinor_zero(psi.ns, outDegree, psi.dim);
  for (int a = 0; a < psi.ns; ++a) {
    r.re[static_cast<std::size_t>(a)] = op(scalar_slice(psi, a, false)).comps[0];
    r.im[static_cast<std::size_t>(a)] = op(scalar_slice(psi, a, true)).comps[0];
  }
  return r;
}

}  // namespace

GammaRep build_gamma(Signature sig) {
  const int n = sig.dim();
  if (n < 1) throw ValidationError("build_gamma: empty signature");
  if (n > 6) throw ValidationError("build_gamma: representation limited to p+q <= 6");
  const int k = n / 2;
  const int ns = 1 << k;

  auto chain = [&](int slot, const CMat& mid) {
    // sigma_z factors before `slot`, `mid` at `slot`, identity after
    CMat acc = {1.0};
    int na = 1;
    for (int i = 0; i < k; ++i) {
      const CMat* f = &mid;
      CMat id2 = {1.0, 0.0, 0.0, 1.0};
      CMat sz = pauli_z();
      if (i < slot) f = &sz;
      else if (i > slot) f = &id2;
      acc = kron(acc, na, *f, 2);
      na *= 2;
    }
    return acc;
  };

  GammaRep rep;
  rep.sig = sig;
  rep.ns = ns;
  rep.gamma.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < k; ++i) {
    rep.gamma[static_cast<std::size_t>(2 * i)] = chain(i, pauli_x());
    rep.gamma[static_cast<std::size_t>(2 * i + 1)] = chain(i, pauli_y());
  }
  if (n % 2 == 1) rep.gamma[static_cast<std::size_t>(n - 1)] = chain(k, pauli_z());
  for (int a = 0; a < sig.p; ++a)
    for (auto& z : rep.gamma[static_cast<std::size_t>(a)]) z *= kI;
  return rep;
}

SpinorForm spinor_zero(int ns, int degree, int dim) {
  SpinorForm r;
  r.dim = dim;
  r.degree = degree;
  r.ns = ns;
  const std::size_t nc = static_cast<std::size_t>(combo_count(dim, degree));
  r.re.assign(static_cast<std::size_t>(ns), std::vector<SF>(nc, sf_const(0.0)));
  r.im = r.re;
  return r;
}

SpinorForm spinor_constant(int dim, const std::vector<cplx>& vals) {
  SpinorForm r = spinor_zero(static_cast<int>(vals.size()), 0, dim);
  for (std::size_t a = 0; a < vals.size(); ++a) {
    r.re[a][0] = sf_const(vals[a].real());
    r.im[a][0] = sf_const(vals[a].imag());
  }
  return r;
}

SpinorForm spinor_add(const SpinorForm& a, const SpinorForm& b) {
  check_shapes(a, b, "spinor_add");
  SpinorForm r = a;
  for (int s = 0; s < a.ns; ++s)
    for (std::size_t c = 0; c < a.re[static_cast<std::size_t>(s)].size(); ++c) {
      auto si = static_cast<std::size_t>(s);
      r.re[si][c] = sf_add(a.re[si][c], b.re[si][c]);
      r.im[si][c] = sf_add(a.im[si][c], b.im[si][c]);
    }
  return r;
}

SpinorForm spinor_sub(const SpinorForm& a, const SpinorForm& b) {
  check_shapes(a, b, "spinor_sub");
  SpinorForm r = a;
  for (int s = 0; s < a.ns; ++s)
    for (std::size_t c = 0; c < a.re[static_cast<std::size_t>(s)].size(); ++c) {
      auto si = static_cast<std::size_t>(s);
      r.re[si][c] = sf_sub(a.re[si][c], b.re[si][c]);
      r.im[si][c] = sf_sub(a.im[si][c], b.im[si][c]);
    }
  return r;
}

SpinorForm spinor_scale(const SpinorForm& a, cplx c) {
  SpinorForm r = a;
  for (int s = 0; s < a.ns; ++s)
    for (std::size_t k = 0; k < a.re[static_cast<std::size_t>(s)].size(); ++k) {
      auto si = static_cast<std::size_t>(s);
      r.re[si][k] = affine_sum({a.re[si][k], a.im[si][k]}, {c.real(), -c.imag()});
      r.im[si][k] = affine_sum({a.im[si][k], a.re[si][k]}, {c.real(), c.imag()});
    }
  return r;
}

SpinorForm apply_constant_matrix(const CMat& M, const SpinorForm& psi) {
  const int ns = psi.ns;
  if (static_cast<int>(M.size()) != ns * ns)
    throw ValidationError("apply_constant_matrix: size mismatch");
  SpinorForm r = spinor_zero(ns, psi.degree, psi.dim);
  const std::size_t nc = psi.re[0].size();
  for (int a = 0; a < ns; ++a)
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<SF> tre, tim;
      std::vector<double> wre, wim;
      for (int b = 0; b < ns; ++b) {
        const cplx m = M[static_cast<std::size_t>(a * ns + b)];
        auto bi = static_cast<std::size_t>(b);
        if (m.real() != 0.0) {
          tre.push_back(psi.re[bi][c]); wre.push_back(m.real());
          tim.push_back(psi.im[bi][c]); wim.push_back(m.real());
        }
        if (m.imag() != 0.0) {
          tre.push_back(psi.im[bi][c]); wre.push_back(-m.imag());
          tim.push_back(psi.re[bi][c]); wim.push_back(m.imag());
        }
      }
      r.re[static_cast<std::size_t>(a)][c] = affine_sum(std::move(tre), std::move(wre));
      r.im[static_cast<std::size_t>(a)][c] = affine_sum(std::move(tim), std::move(wim));
    }
  return r;
}

SpinorForm exterior_derivative_spinor(const SpinorForm& psi) {
  return per_component(psi, psi.degree + 1,
                       [](const FormField& f) { return exterior_derivative(f); });
}

SpinorForm interior_spinor(const VectorField& xi, const SpinorForm& psi) {
  const int outDeg = psi.degree == 0 ? 0 : psi.degree - 1;
  return per_component(psi, outDeg,
                       [&](const FormField& f) { return interior_product(xi, f); });
}

SpinorForm lie_derivative_spinor(const VectorField& xi, const SpinorForm& psi) {
  return per_component(psi, psi.degree,
                       [&](const FormField& f) { return lie_derivative_form(xi, f); });
}

SpinorForm spin_action(const FormField& lambda, Signature sig,
                       const GammaRep& rep, const SpinorForm& psi) {
  const int n = sig.dim();
  if (lambda.vs.kind != ValueKind::Matrix || lambda.vs.n != n)
    throw ValidationError("spin_action: generator must be an n x n matrix form");
  if (lambda.dim != psi.dim) throw ValidationError("spin_action: charts differ");
  if (psi.ns != rep.ns) throw ValidationError("spin_action: spinor size mismatch");

  // reject constant generators that are not eta-antisymmetric
  {
    bool allConst = true;
    double worst = 0.0;
    const std::size_t ncq0 = lambda.comps[0].size();
    for (int a = 0; a < n && allConst; ++a)
      for (int b = 0; b < n && allConst; ++b)
        for (std::size_t c = 0; c < ncq0; ++c) {
          bool cab = false, cba = false;
          const double vab =
              sf_const_value(lambda.comps[static_cast<std::size_t>(a * n + b)][c], cab);
          const double vba =
              sf_const_value(lambda.comps[static_cast<std::size_t>(b * n + a)][c], cba);
          if (!cab || !cba) { allConst = false; break; }
          worst = std::max(worst, std::abs(sig.eta(a) * vab + sig.eta(b) * vba));
        }
    if (allConst && worst > 1e-12)
      throw ValidationError("spin_action: generator is not eta-antisymmetric");
  }

  const FormField low = lower_first(lambda, sig);
  const int ns = rep.ns;
  const std::size_t ncq = low.comps[0].size();

  // complex coefficient forms C[alpha][beta] = 1/4 sum_{ab} low_{ab} (G^a G^b)
  struct Acc { std::vector<SF> t; std::vector<double> w; };
  std::vector<Acc> cre(static_cast<std::size_t>(ns * ns) * ncq);
  std::vector<Acc> cim(static_cast<std::size_t>(ns * ns) * ncq);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto& comps = low.comps[static_cast<std::size_t>(a * n + b)];
      bool live = false;
      for (const SF& f : comps)
        if (!sf_is_zero(f)) { live = true; break; }
      if (!live) continue;
      const CMat prod = cmatmul(rep.gamma[static_cast<std::size_t>(a)],
                                rep.gamma[static_cast<std::size_t>(b)], ns);
      for (int al = 0; al < ns; ++al)
        for (int be = 0; be < ns; ++be) {
          const cplx m = 0.25 * prod[static_cast<std::size_t>(al * ns + be)];
          if (m == cplx{}) continue;
          for (std::size_t c = 0; c < ncq; ++c) {
            if (sf_is_zero(comps[c])) continue;
            const std::size_t slot = static_cast<std::size_t>(al * ns + be) * ncq + c;
            if (m.real() != 0.0) {
              cre[slot].t.push_back(comps[c]);
              cre[slot].w.push_back(m.real());
            }
            if (m.imag() != 0.0) {
              cim[slot].t.push_back(comps[c]);
              cim[slot].w.push_back(m.imag());
            }
          }
        }
    }

  SpinorForm out = spinor_zero(ns, lambda.degree + psi.degree, psi.dim);
  for (int al = 0; al < ns; ++al) {
    FormField accRe = form_zero(scalar_space(), out.degree, psi.dim);
    FormField accIm = accRe;
    for (int be = 0; be < ns; ++be) {
      FormField Cre = form_zero(scalar_space(), lambda.degree, psi.dim);
      FormField Cim = Cre;
      bool anyRe = false, anyIm = false;
      for (std::size_t c = 0; c < ncq; ++c) {
        const std::size_t slot = static_cast<std::size_t>(al * ns + be) * ncq + c;
        if (!cre[slot].t.empty()) {
          Cre.comps[0][c] = affine_sum(cre[slot].t, cre[slot].w);
          anyRe = true;
        }
        if (!cim[slot].t.empty()) {
          Cim.comps[0][c] = affine_sum(cim[slot].t, cim[slot].w);
          anyIm = true;
        }
      }
      if (!anyRe && !anyIm) continue;
      const FormField pre = scalar_slice(psi, be, false);
      const FormField pim = scalar_slice(psi, be, true);
      if (anyRe) {
        accRe = form_add(accRe, wedge(Cre, pre));
        accIm = form_add(accIm, wedge(Cre, pim));
      }
      if (anyIm) {
        accRe = form_sub(accRe, wedge(Cim, pim));
        accIm = form_add(accIm, wedge(Cim, pre));
      }
    }
    out.re[static_cast<std::size_t>(al)] = accRe.comps[0];
    out.im[static_cast<std::size_t>(al)] = accIm.comps[0];
  }
  return out;
}

SpinorForm spinor_cov_d(const FormField& omega, Signature sig,
                        const GammaRep& rep, const SpinorForm& psi) {
  if (psi.degree != 0)
    throw ValidationError("spinor_cov_d: only 0-forms are supported");
  return spinor_add(exterior_derivative_spinor(psi), spin_action(omega, sig, rep, psi));
}

SpinorForm kosmann_lie_spinor(const Coframe& e, const VectorField& xi,
                              const SpinorForm& psi, const GammaRep& rep) {
  const FormField B = kosmann_correction(e, xi);
  return spinor_add(lie_derivative_spinor(xi, psi), spin_action(B, e.sig, rep, psi));
}

SpinorForm kosmann_lie_spinor_lambda_route(const Coframe& e, const VectorField& xi,
                                           const SpinorForm& psi, const GammaRep& rep) {
  if (psi.degree != 0)
    throw ValidationError("kosmann_lie_spinor_lambda_route: only 0-forms are supported");
  const FormField omega = levi_civita(e);
  const FormField lamK =
      form_sub(interior_product(xi, omega), kosmann_correction(e, xi));
  const SpinorForm natural = interior_spinor(xi, spinor_cov_d(omega, e.sig, rep, psi));
  return spinor_sub(natural, spin_action(lamK, e.sig, rep, psi));
}

SpinorForm kosmann_lie_spinor_reduction_route(const Coframe& e, const VectorField& xi,
                                              const SpinorForm& psi, const GammaRep& rep) {
  if (psi.degree != 0)
    throw ValidationError("kosmann_lie_spinor_reduction_route: only 0-forms are supported");
  const int n = e.dim();
  const FormField omega = levi_civita(e);
  const SpinorForm D = spinor_cov_d(omega, e.sig, rep, psi);

  // frame components of xi and of the covariant differential
  const auto E = inverse_frame(e);
  std::vector<SF> xiframe(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    std::vector<SF> t;
    std::vector<double> w;
    for (int mu = 0; mu < n; ++mu) {
      if (sf_is_zero(xi.comps[static_cast<std::size_t>(mu)])) continue;
      t.push_back(sf_mul(e.e[static_cast<std::size_t>(b)][static_cast<std::size_t>(mu)],
                         xi.comps[static_cast<std::size_t>(mu)]));
      w.push_back(1.0);
    }
    xiframe[static_cast<std::size_t>(b)] = affine_sum(std::move(t), std::move(w));
  }
  SpinorForm first = spinor_zero(rep.ns, 0, psi.dim);
  for (int al = 0; al < rep.ns; ++al) {
    std::vector<SF> tre, tim;
    std::vector<double> w1, w2;
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < n; ++mu) {
        const SF Db_re = sf_mul(E[static_cast<std::size_t>(b)][static_cast<std::size_t>(mu)],
                                D.re[static_cast<std::size_t>(al)][static_cast<std::size_t>(mu)]);
        const SF Db_im = sf_mul(E[static_cast<std::size_t>(b)][static_cast<std::size_t>(mu)],
                                D.im[static_cast<std::size_t>(al)][static_cast<std::size_t>(mu)]);
        tre.push_back(sf_mul(xiframe[static_cast<std::size_t>(b)], Db_re));
        w1.push_back(1.0);
        tim.push_back(sf_mul(xiframe[static_cast<std::size_t>(b)], Db_im));
        w2.push_back(1.0);
      }
    first.re[static_cast<std::size_t>(al)][0] = affine_sum(std::move(tre), std::move(w1));
    first.im[static_cast<std::size_t>(al)][0] = affine_sum(std::move(tim), std::move(w2));
  }

  // -1/4 (d^omega i_xi e)_{[bd]} Gamma^b Gamma^d
  const FormField v = interior_product(xi, coframe_form(e));
  const FormField Nl = lower_first(frame_components(e, cov_d_vector(omega, v)), e.sig);
  const FormField A =
      form_scale(form_sub(Nl, form_value_transpose(Nl)), 0.5);
  const FormField gen = lower_first(form_scale(A, -1.0), e.sig);
  return spinor_add(first, spin_action(gen, e.sig, rep, psi));
}

double spinor_max_abs(const SpinorForm& a, const std::vector<std::vector<double>>& pts) {
  return form_max_abs(spinor_pack(a), pts);
}

double spinor_max_diff(const SpinorForm& a, const SpinorForm& b,
                       const std::vector<std::vector<double>>& pts) {
  check_shapes(a, b, "spinor_max_diff");
  return form_max_diff(spinor_pack(a), spinor_pack(b), pts);
}

CMat spin_generator(const std::vector<double>& lambda, Signature sig,
                    const GammaRep& rep) {
  const int n = sig.dim();
  if (static_cast<int>(lambda.size()) != n * n)
    throw ValidationError("spin_generator: size mismatch");
  const int ns = rep.ns;
  CMat out(static_cast<std::size_t>(ns) * ns, cplx{});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double lowered = sig.eta(a) * lambda[static_cast<std::size_t>(a * n + b)];
      if (lowered == 0.0) continue;
      const CMat prod = cmatmul(rep.gamma[static_cast<std::size_t>(a)],
                                rep.gamma[static_cast<std::size_t>(b)], ns);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += 0.25 * lowered * prod[k];
    }
  return out;
}

CMat cmatmul(const CMat& A, const CMat& B, int n) {
  CMat out(static_cast<std::size_t>(n) * n, cplx{});
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx a = A[static_cast<std::size_t>(i * n + k)];
      if (a == cplx{}) continue;
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(i * n + j)] += a * B[static_cast<std::size_t>(k * n + j)];
    }
  return out;
}

CMat mat_exp_complex(CMat M, int n) {
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(M[static_cast<std::size_t>(i * n + j)]);
    norm = std::max(norm, row);
  }
  int s = 0;
  while (norm > 0.5) { norm *= 0.5; ++s; }
  const double scale = std::ldexp(1.0, -s);
  for (auto& z : M) z *= scale;

  CMat out(static_cast<std::size_t>(n) * n, cplx{});
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i * n + i)] = 1.0;
  CMat term = out;
  for (int k = 1; k <= 16; ++k) {
    term = cmatmul(term, M, n);
    for (auto& z : term) z /= static_cast<double>(k);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += term[q];
  }
  for (int k = 0; k < s; ++k) out = cmatmul(out, out, n);
  return out;
}

std::vector<double> mat_exp_real(std::vector<double> M, int n) {
  CMat c(M.size());
  for (std::size_t k = 0; k < M.size(); ++k) c[k] = M[k];
  c = mat_exp_complex(std::move(c), n);
  std::vector<double> out(M.size());
  for (std::size_t k = 0; k < M.size(); ++k) out[k] = c[k].real();
  return out;
}

CMat cmat_inverse(CMat A, int n) {
  CMat inv(static_cast<std::size_t>(n) * n, cplx{});
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(A[static_cast<std::size_t>(col * n + col)]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(A[static_cast<std::size_t>(r * n + col)]);
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) throw ValidationError("cmat_inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(A[static_cast<std::size_t>(col * n + j)], A[static_cast<std::size_t>(piv * n + j)]);
        std::swap(inv[static_cast<std::size_t>(col * n + j)], inv[static_cast<std::size_t>(piv * n + j)]);
      }
    const cplx d = A[static_cast<std::size_t>(col * n + col)];
    for (int j = 0; j < n; ++j) {
      A[static_cast<std::size_t>(col * n + j)] /= d;
      inv[static_cast<std::size_t>(col * n + j)] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = A[static_cast<std::size_t>(r * n + col)];
      if (f == cplx{}) continue;
      for (int j = 0; j < n; ++j) {
        A[static_cast<std::size_t>(r * n + j)] -= f * A[static_cast<std::size_t>(col * n + j)];
        inv[static_cast<std::size_t>(r * n + j)] -= f * inv[static_cast<std::size_t>(col * n + j)];
      }
    }
  }
  return inv;
}

}  // namespace kosmann
