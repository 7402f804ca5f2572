#include "kosmann/forms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "kosmann/smallmat.hpp"

namespace kosmann {

// ---- multi-index utilities ------------------------------------------------

int combo_count(int dim, int p) {
  if (p < 0 || p > dim) return 0;
  long long c = 1;
  for (int i = 0; i < p; ++i) c = c * (dim - i) / (i + 1);
  return static_cast<int>(c);
}

const std::vector<std::vector<int>>& combos(int dim, int p) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, p);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> out;
  if (p >= 0 && p <= dim) {
    std::vector<int> cur(static_cast<std::size_t>(p));
    // lexicographic enumeration of increasing p-tuples from {0..dim-1}
    std::function<void(int, int)> rec = [&](int start, int k) {
      if (k == p) {
        out.push_back(cur);
        return;
      }
      for (int v = start; v < dim; ++v) {
        cur[static_cast<std::size_t>(k)] = v;
        rec(v + 1, k + 1);
      }
    };
    rec(0, 0);
  }
  return cache[key] = std::move(out);
}

int combo_rank(int dim, const std::vector<int>& combo) {
  const auto& all = combos(dim, static_cast<int>(combo.size()));
  const auto it = std::lower_bound(all.begin(), all.end(), combo);
  if (it == all.end() || *it != combo)
    throw InternalError("combo_rank: tuple not found");
  return static_cast<int>(it - all.begin());
}

int combo_insert(int dim, int idx, const std::vector<int>& rest, int& rankOut) {
  std::vector<int> merged;
  merged.reserve(rest.size() + 1);
  int sign = 1;
  bool placed = false;
  for (int r : rest) {
    if (r == idx) return 0;
    if (!placed && r > idx) {
      merged.push_back(idx);
      placed = true;
    }
    if (!placed) sign = -sign;
    merged.push_back(r);
  }
  if (!placed) merged.push_back(idx);
  rankOut = combo_rank(dim, merged);
  return sign;
}

namespace {

// Parity of the concatenation (J, K) as a permutation of the sorted merge;
// both J and K are increasing, so inversions only occur across the split.
int split_sign(const std::vector<int>& J, const std::vector<int>& K) {
  int inv = 0;
  for (int j : J)
    for (int k : K)
      if (j > k) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

void check_same_shape(const FormField& a, const FormField& b, const char* op) {
  if (!(a.vs == b.vs) || a.degree != b.degree || a.dim != b.dim)
    throw ValidationError(std::string(op) + ": mismatched form shapes");
}

}  // namespace

// ---- construction ---------------------------------------------------------

FormField form_zero(ValueSpace vs, int degree, int dim) {
  FormField f;
  f.vs = vs;
  f.degree = degree;
  f.dim = dim;
  const int nc = combo_count(dim, degree);
  f.comps.assign(static_cast<std::size_t>(vs.count()),
                 std::vector<SF>(static_cast<std::size_t>(nc), sf_const(0.0)));
  return f;
}

FormField form_from_components(ValueSpace vs, int degree, int dim,
                               std::vector<std::vector<SF>> comps) {
  FormField f;
  f.vs = vs;
  f.degree = degree;
  f.dim = dim;
  if (static_cast<int>(comps.size()) != vs.count())
    throw ValidationError("form_from_components: wrong value count");
  const std::size_t nc = static_cast<std::size_t>(combo_count(dim, degree));
  for (auto& row : comps)
    if (row.size() != nc)
      throw ValidationError("form_from_components: wrong component count");
  f.comps = std::move(comps);
  return f;
}

// ---- arithmetic -----------------------------------------------------------

FormField form_add(const FormField& a, const FormField& b) {
  check_same_shape(a, b, "form_add");
  FormField r = a;
  for (std::size_t v = 0; v < a.comps.size(); ++v)
    for (std::size_t c = 0; c < a.comps[v].size(); ++c)
      r.comps[v][c] = sf_add(a.comps[v][c], b.comps[v][c]);
  return r;
}

FormField form_sub(const FormField& a, const FormField& b) {
  check_same_shape(a, b, "form_sub");
  FormField r = a;
  for (std::size_t v = 0; v < a.comps.size(); ++v)
    for (std::size_t c = 0; c < a.comps[v].size(); ++c)
      r.comps[v][c] = sf_sub(a.comps[v][c], b.comps[v][c]);
  return r;
}

FormField form_scale(const FormField& a, double c) {
  FormField r = a;
  for (auto& row : r.comps)
    for (auto& f : row) f = sf_scale(f, c);
  return r;
}

FormField form_scale_field(const FormField& a, const SF& c) {
  FormField r = a;
  for (auto& row : r.comps)
    for (auto& f : row) f = sf_mul(c, f);
  return r;
}

FormField form_value_slice(const FormField& a, int valueIndex) {
  FormField r;
  r.vs = scalar_space();
  r.degree = a.degree;
  r.dim = a.dim;
  r.comps = {a.comps[static_cast<std::size_t>(valueIndex)]};
  return r;
}

FormField form_value_transpose(const FormField& a) {
  if (a.vs.kind != ValueKind::Matrix)
    throw ValidationError("form_value_transpose: matrix-valued form required");
  FormField r = a;
  const int n = a.vs.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.comps[static_cast<std::size_t>(i * n + j)] =
          a.comps[static_cast<std::size_t>(j * n + i)];
  return r;
}

// ---- exterior calculus ----------------------------------------------------

FormField exterior_derivative(const FormField& a) {
  FormField r = form_zero(a.vs, a.degree + 1, a.dim);
  if (a.degree + 1 > a.dim) return r;
  const auto& out = combos(a.dim, a.degree + 1);
  for (std::size_t v = 0; v < a.comps.size(); ++v) {
    for (std::size_t ci = 0; ci < out.size(); ++ci) {
      const auto& I = out[ci];
      std::vector<SF> terms;
      std::vector<double> w;
      for (std::size_t k = 0; k < I.size(); ++k) {
        std::vector<int> rest;
        rest.reserve(I.size() - 1);
        for (std::size_t m = 0; m < I.size(); ++m)
          if (m != k) rest.push_back(I[m]);
        const SF& comp = a.comps[v][static_cast<std::size_t>(combo_rank(a.dim, rest))];
        if (sf_is_zero(comp)) continue;
        terms.push_back(sf_partial(comp, I[k]));
        w.push_back((k % 2 == 0) ? 1.0 : -1.0);
      }
      r.comps[v][ci] = sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return r;
}

namespace {

struct ValuePair {
  int va, vb, vout;
};

std::vector<ValuePair> wedge_pairs(const ValueSpace& A, const ValueSpace& B,
                                   ValueSpace& out) {
  std::vector<ValuePair> pairs;
  if (A.kind == ValueKind::Scalar) {
    out = B;
    for (int v = 0; v < B.count(); ++v) pairs.push_back({0, v, v});
    return pairs;
  }
  if (B.kind == ValueKind::Scalar) {
    out = A;
    for (int v = 0; v < A.count(); ++v) pairs.push_back({v, 0, v});
    return pairs;
  }
  if (A.kind == ValueKind::Matrix && B.kind == ValueKind::Vector &&
      A.n == B.n) {
    out = B;
    for (int i = 0; i < A.n; ++i)
      for (int j = 0; j < A.n; ++j) pairs.push_back({i * A.n + j, j, i});
    return pairs;
  }
  if (A.kind == ValueKind::Matrix && B.kind == ValueKind::Matrix && A.n == B.n) {
    out = A;
    for (int i = 0; i < A.n; ++i)
      for (int j = 0; j < A.n; ++j)
        for (int k = 0; k < A.n; ++k)
          pairs.push_back({i * A.n + j, j * A.n + k, i * A.n + k});
    return pairs;
  }
  throw ValidationError("wedge: incompatible value spaces");
}

FormField wedge_product(const FormField& a, const FormField& b) {
  if (a.dim != b.dim) throw ValidationError("wedge: charts differ");
  ValueSpace outVs;
  const auto pairs = wedge_pairs(a.vs, b.vs, outVs);
  const int p = a.degree, q = b.degree, dim = a.dim;
  FormField r = form_zero(outVs, p + q, dim);
  if (p + q > dim) return r;
  const auto& outCombos = combos(dim, p + q);
  // positions of the p slots taken from `a`
  const auto& splits = combos(p + q, p);
  for (std::size_t ci = 0; ci < outCombos.size(); ++ci) {
    const auto& I = outCombos[ci];
    // accumulated per output value index
    std::vector<std::vector<SF>> terms(r.comps.size());
    std::vector<std::vector<double>> w(r.comps.size());
    for (const auto& S : splits) {
      std::vector<int> J, K;
      J.reserve(static_cast<std::size_t>(p));
      K.reserve(static_cast<std::size_t>(q));
      std::size_t si = 0;
      for (int pos = 0; pos < p + q; ++pos) {
        if (si < S.size() && S[si] == pos) {
          J.push_back(I[static_cast<std::size_t>(pos)]);
          ++si;
        } else {
          K.push_back(I[static_cast<std::size_t>(pos)]);
        }
      }
      const int sgn = split_sign(J, K);
      const int rj = combo_rank(dim, J);
      const int rk = combo_rank(dim, K);
      for (const auto& vp : pairs) {
        const SF& fa = a.comps[static_cast<std::size_t>(vp.va)][static_cast<std::size_t>(rj)];
        const SF& fb = b.comps[static_cast<std::size_t>(vp.vb)][static_cast<std::size_t>(rk)];
        if (sf_is_zero(fa) || sf_is_zero(fb)) continue;
        terms[static_cast<std::size_t>(vp.vout)].push_back(sf_mul(fa, fb));
        w[static_cast<std::size_t>(vp.vout)].push_back(sgn);
      }
    }
    for (std::size_t v = 0; v < r.comps.size(); ++v)
      r.comps[v][ci] = sf_affine(std::move(terms[v]), std::move(w[v]), 0.0);
  }
  return r;
}

}  // namespace

FormField wedge(const FormField& a, const FormField& b, WedgeAction action) {
  if (action == WedgeAction::Auto) return wedge_product(a, b);
  if (a.vs.kind != ValueKind::Matrix || b.vs.kind != ValueKind::Matrix)
    throw ValidationError("wedge bracket: matrix-valued forms required");
  const FormField ab = wedge_product(a, b);
  const FormField ba = wedge_product(b, a);
  const double sgn = (a.degree * b.degree) % 2 == 0 ? 1.0 : -1.0;
  return form_sub(ab, form_scale(ba, sgn));
}

FormField interior_product(const VectorField& xi, const FormField& a) {
  if (xi.dim != a.dim) throw ValidationError("interior_product: charts differ");
  if (a.degree == 0) return form_zero(a.vs, 0, a.dim);
  FormField r = form_zero(a.vs, a.degree - 1, a.dim);
  const auto& outCombos = combos(a.dim, a.degree - 1);
  for (std::size_t v = 0; v < a.comps.size(); ++v) {
    for (std::size_t ci = 0; ci < outCombos.size(); ++ci) {
      const auto& I = outCombos[ci];
      std::vector<SF> terms;
      std::vector<double> w;
      for (int mu = 0; mu < a.dim; ++mu) {
        int rank = -1;
        const int sgn = combo_insert(a.dim, mu, I, rank);
        if (sgn == 0) continue;
        const SF& comp = a.comps[v][static_cast<std::size_t>(rank)];
        if (sf_is_zero(comp) || sf_is_zero(xi.comps[static_cast<std::size_t>(mu)]))
          continue;
        terms.push_back(sf_mul(xi.comps[static_cast<std::size_t>(mu)], comp));
        w.push_back(sgn);
      }
      r.comps[v][ci] = sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return r;
}

FormField lie_derivative_form(const VectorField& xi, const FormField& a) {
  const FormField i_d = interior_product(xi, exterior_derivative(a));
  if (a.degree == 0) return i_d;
  const FormField d_i = exterior_derivative(interior_product(xi, a));
  return form_add(d_i, i_d);
}

SymTensor lie_derivative_metric(const VectorField& xi, const SymTensor& g) {
  const int n = g.dim;
  SymTensor r;
  r.dim = n;
  r.g.assign(static_cast<std::size_t>(n) * n, sf_const(0.0));
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int rho = 0; rho < n; ++rho) {
        const SF& xr = xi.comps[static_cast<std::size_t>(rho)];
        if (!sf_is_zero(xr)) {
          terms.push_back(sf_mul(xr, sf_partial(g.g[static_cast<std::size_t>(mu * n + nu)], rho)));
          w.push_back(1.0);
        }
        terms.push_back(sf_mul(g.g[static_cast<std::size_t>(rho * n + nu)],
                               sf_partial(xr, mu)));
        w.push_back(1.0);
        terms.push_back(sf_mul(g.g[static_cast<std::size_t>(mu * n + rho)],
                               sf_partial(xr, nu)));
        w.push_back(1.0);
      }
      r.g[static_cast<std::size_t>(mu * n + nu)] = sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return r;
}

FormField pullback(const std::vector<SF>& map, int sourceDim, const FormField& a) {
  const int tdim = a.dim;
  if (static_cast<int>(map.size()) != tdim)
    throw ValidationError("pullback: map arity mismatch");
  FormField r = form_zero(a.vs, a.degree, sourceDim);
  if (a.degree > sourceDim) return r;
  // Jacobian entries d map[j] / d x[i]
  std::vector<std::vector<SF>> jac(static_cast<std::size_t>(tdim));
  for (int j = 0; j < tdim; ++j) {
    jac[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(sourceDim));
    for (int i = 0; i < sourceDim; ++i)
      jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = sf_partial(map[j], i);
  }
  const auto& srcCombos = combos(sourceDim, a.degree);
  const auto& tgtCombos = combos(tdim, a.degree);
  const int p = a.degree;
  // permutations of 0..p-1 with signs, for minor determinants
  std::vector<std::pair<std::vector<int>, int>> perms;
  {
    std::vector<int> idx(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
    do {
      int inv = 0;
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
          if (idx[static_cast<std::size_t>(i)] > idx[static_cast<std::size_t>(j)]) ++inv;
      perms.emplace_back(idx, inv % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  for (std::size_t v = 0; v < a.comps.size(); ++v) {
    for (std::size_t si = 0; si < srcCombos.size(); ++si) {
      const auto& I = srcCombos[si];
      std::vector<SF> terms;
      std::vector<double> w;
      for (std::size_t ti = 0; ti < tgtCombos.size(); ++ti) {
        const auto& J = tgtCombos[ti];
        if (sf_is_zero(a.comps[v][ti])) continue;
        const SF pulled = sf_compose(a.comps[v][ti], map);
        // det of the minor jac[J][I]
        for (const auto& [perm, sgn] : perms) {
          SF prod = pulled;
          bool zero = false;
          for (int rI = 0; rI < p; ++rI) {
            const SF& entry =
                jac[static_cast<std::size_t>(J[static_cast<std::size_t>(perm[static_cast<std::size_t>(rI)])])]
                   [static_cast<std::size_t>(I[static_cast<std::size_t>(rI)])];
            if (sf_is_zero(entry)) { zero = true; break; }
            prod = sf_mul(prod, entry);
          }
          if (zero) continue;
          terms.push_back(prod);
          w.push_back(sgn);
        }
      }
      r.comps[v][si] = sf_affine(std::move(terms), std::move(w), 0.0);
    }
  }
  return r;
}

// ---- numeric evaluation ---------------------------------------------------

std::vector<std::vector<double>> eval_form(const FormField& a,
                                           std::span<const double> x) {
  EvalScope scope;
  std::vector<std::vector<double>> out(a.comps.size());
  for (std::size_t v = 0; v < a.comps.size(); ++v) {
    out[v].reserve(a.comps[v].size());
    for (const auto& f : a.comps[v]) out[v].push_back(f->ev0(x));
  }
  return out;
}

std::vector<double> eval_vector(const VectorField& v, std::span<const double> x) {
  EvalScope scope;
  std::vector<double> out;
  out.reserve(v.comps.size());
  for (const auto& f : v.comps) out.push_back(f->ev0(x));
  return out;
}

std::vector<double> eval_sym(const SymTensor& g, std::span<const double> x) {
  EvalScope scope;
  std::vector<double> out;
  out.reserve(g.g.size());
  for (const auto& f : g.g) out.push_back(f->ev0(x));
  return out;
}

double form_max_abs(const FormField& a,
                    const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) {
    const auto vals = eval_form(a, p);
    for (const auto& row : vals)
      for (double v : row) m = std::max(m, std::abs(v));
  }
  return m;
}

double form_max_diff(const FormField& a, const FormField& b,
                     const std::vector<std::vector<double>>& pts) {
  check_same_shape(a, b, "form_max_diff");
  double m = 0.0;
  for (const auto& p : pts) {
    const auto va = eval_form(a, p);
    const auto vb = eval_form(b, p);
    for (std::size_t v = 0; v < va.size(); ++v)
      for (std::size_t c = 0; c < va[v].size(); ++c)
        m = std::max(m, std::abs(va[v][c] - vb[v][c]));
  }
  return m;
}

double sym_max_diff(const SymTensor& a, const SymTensor& b,
                    const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) {
    const auto va = eval_sym(a, p);
    const auto vb = eval_sym(b, p);
    for (std::size_t i = 0; i < va.size(); ++i)
      m = std::max(m, std::abs(va[i] - vb[i]));
  }
  return m;
}

// ---- finite-difference transport oracle ------------------------------------

std::vector<double> flow_point(const VectorField& xi, std::vector<double> x,
                               double t, int steps) {
  EvalScope scope;
  const double h = t / steps;
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) k1[i] = xi.comps[i]->ev0(x);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    for (std::size_t i = 0; i < n; ++i) k2[i] = xi.comps[i]->ev0(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    for (std::size_t i = 0; i < n; ++i) k3[i] = xi.comps[i]->ev0(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    for (std::size_t i = 0; i < n; ++i) k4[i] = xi.comps[i]->ev0(tmp);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return x;
}

std::vector<std::vector<double>> flow_pullback_form(const VectorField& xi,
                                                    const FormField& a,
                                                    std::span<const double> x,
                                                    double t) {
  const int n = a.dim;
  const int steps = 8;
  std::vector<double> base(x.begin(), x.end());
  const auto y = flow_point(xi, base, t, steps);
  // finite-difference Jacobian of the flow map
  const double delta = 1e-6;
  std::vector<std::vector<double>> jac(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    auto xp = base, xm = base;
    xp[static_cast<std::size_t>(i)] += delta;
    xm[static_cast<std::size_t>(i)] -= delta;
    const auto yp = flow_point(xi, xp, t, steps);
    const auto ym = flow_point(xi, xm, t, steps);
    for (int j = 0; j < n; ++j)
      jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          (yp[static_cast<std::size_t>(j)] - ym[static_cast<std::size_t>(j)]) / (2.0 * delta);
  }
  const auto avals = eval_form(a, y);
  const int p = a.degree;
  const auto& srcCombos = combos(n, p);
  std::vector<std::vector<double>> out(a.comps.size(),
                                       std::vector<double>(srcCombos.size(), 0.0));
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (std::size_t v = 0; v < a.comps.size(); ++v) {
    for (std::size_t si = 0; si < srcCombos.size(); ++si) {
      const auto& I = srcCombos[si];
      double acc = 0.0;
      const auto& tgtCombos = combos(n, p);
      for (std::size_t ti = 0; ti < tgtCombos.size(); ++ti) {
        const auto& J = tgtCombos[ti];
        // det of jac[J][I]
        std::vector<double> M(static_cast<std::size_t>(p) * p);
        for (int r = 0; r < p; ++r)
          for (int c = 0; c < p; ++c)
            M[static_cast<std::size_t>(r * p + c)] =
                jac[static_cast<std::size_t>(J[static_cast<std::size_t>(r)])]
                   [static_cast<std::size_t>(I[static_cast<std::size_t>(c)])];
        acc += avals[v][ti] * (p == 0 ? 1.0 : mat_det(M, p));
      }
      out[v][si] = acc;
    }
  }
  return out;
}

}  // namespace kosmann
