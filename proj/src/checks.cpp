#include "kosmann/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

#include "kosmann/covlie.hpp"
#include "kosmann/error.hpp"
#include "kosmann/kk.hpp"
#include "kosmann/randomgen.hpp"
#include "kosmann/spinor.hpp"

namespace kosmann {

namespace {

// ---------------------------------------------------------------- reporting

std::string jesc(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == '"') out += "\\\"";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else if (c < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string jnum(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string shortnum(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string jpoint(const std::vector<double>& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += jnum(p[i]);
  }
  return out + "]";
}

const char* jbool(bool b) { return b ? "true" : "false"; }

struct Stopwatch {
  std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
  double lapMs() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last).count();
    last = now;
    return ms;
  }
};

// largest per-point residual together with where it happens
struct Worst {
  double value = 0.0;
  std::vector<double> point;
  void consider(double v, const std::vector<double>& p) {
    if (point.empty() || v > value) {
      value = v;
      point = p;
    }
  }
};

Worst worst_abs(const FormField& a, const std::vector<std::vector<double>>& pts) {
  Worst w;
  for (const auto& p : pts) w.consider(form_max_abs(a, {p}), p);
  return w;
}

Worst worst_diff(const FormField& a, const FormField& b,
                 const std::vector<std::vector<double>>& pts) {
  Worst w;
  for (const auto& p : pts) w.consider(form_max_diff(a, b, {p}), p);
  return w;
}

// ------------------------------------------------------------ seeded inputs

std::uint64_t suite_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

double gate(const GeometrySpec& spec, const SuiteConfig& cfg,
            const std::string& key, double fallback) {
  if (cfg.tol) return *cfg.tol;
  return spec.tolerance(key, fallback);
}

SF smooth_on(Rng& rng, const std::vector<std::string>& coords, double amp) {
  return sf_expr(Expression{random_smooth_expr(rng, coords, amp), coords});
}

VectorField random_field_on(const GeometrySpec& spec, Rng& rng, double amp) {
  VectorField xi;
  xi.dim = spec.chart.dim();
  for (int i = 0; i < xi.dim; ++i)
    xi.comps.push_back(smooth_on(rng, spec.chart.coords, amp));
  return xi;
}

// unit bias along the first coordinate keeps the witness contraction alive
VectorField biased_field_on(const GeometrySpec& spec, Rng& rng) {
  VectorField xi;
  xi.dim = spec.chart.dim();
  xi.comps.push_back(sf_add(sf_const(1.0), smooth_on(rng, spec.chart.coords, 0.3)));
  for (int i = 1; i < xi.dim; ++i)
    xi.comps.push_back(smooth_on(rng, spec.chart.coords, 0.5));
  return xi;
}

FormField so_valued_on(const GeometrySpec& spec, Rng& rng, double amp) {
  const Signature sig = spec.sig;
  const int n = sig.dim();
  FormField d = form_zero(matrix_space(n), 1, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int mu = 0; mu < n; ++mu) {
        SF s = smooth_on(rng, spec.chart.coords, amp);
        d.comps[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(mu)] =
            sig.eta(a) < 0 ? sf_neg(s) : s;
        d.comps[static_cast<std::size_t>(b * n + a)][static_cast<std::size_t>(mu)] =
            sig.eta(b) < 0 ? s : sf_neg(s);
      }
  return d;
}

// generator with a guaranteed slope, so exp of it is far from constant
FormField sloped_generator_on(const GeometrySpec& spec, Rng& rng) {
  const Signature sig = spec.sig;
  const int n = sig.dim();
  FormField A = form_zero(matrix_space(n), 0, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      SF s = smooth_on(rng, spec.chart.coords, 0.3);
      if (a == 0 && b == 1) s = sf_add(s, sf_scale(sf_coord(0), 0.7));
      A.comps[static_cast<std::size_t>(a * n + b)][0] = sig.eta(a) < 0 ? sf_neg(s) : s;
      A.comps[static_cast<std::size_t>(b * n + a)][0] = sig.eta(b) < 0 ? s : sf_neg(s);
    }
  return A;
}

FormField patch_algebra_valued(const TotalSpacePatch& patch, Rng& rng,
                               const std::vector<std::string>& coords, int degree,
                               double amp) {
  const int r = patch.repDim;
  FormField out = form_zero(matrix_space(r), degree, patch.baseDim);
  const int nc = combo_count(patch.baseDim, degree);
  for (const auto& gen : patch.algebra)
    for (int c = 0; c < nc; ++c) {
      const SF s = smooth_on(rng, coords, amp);
      for (int i = 0; i < r * r; ++i) {
        if (gen[static_cast<std::size_t>(i)] == 0.0) continue;
        SF term = sf_scale(s, gen[static_cast<std::size_t>(i)]);
        SF& slot = out.comps[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        slot = sf_is_zero(slot) ? term : sf_add(slot, term);
      }
    }
  return out;
}

FormField patch_vector_valued(const TotalSpacePatch& patch, Rng& rng,
                              const std::vector<std::string>& coords, int degree,
                              double amp) {
  FormField out = form_zero(vector_space(patch.repDim), degree, patch.baseDim);
  for (auto& value : out.comps)
    for (auto& slot : value) slot = smooth_on(rng, coords, amp);
  return out;
}

// e^a Gamma_a psi for a vector-valued 1-form and a spinor 0-form
SpinorForm clifford_pair(const FormField& e, Signature sig, const GammaRep& rep,
                         const SpinorForm& psi) {
  const int n = sig.dim();
  SpinorForm out = spinor_zero(rep.ns, 1, e.dim);
  for (int al = 0; al < rep.ns; ++al)
    for (int mu = 0; mu < e.dim; ++mu) {
      std::vector<SF> tre, tim;
      std::vector<double> wre, wim;
      for (int a = 0; a < n; ++a) {
        const SF& ea = e.comps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
        if (sf_is_zero(ea)) continue;
        for (int be = 0; be < rep.ns; ++be) {
          const cplx g = sig.eta(a) *
              rep.gamma[static_cast<std::size_t>(a)][static_cast<std::size_t>(al * rep.ns + be)];
          if (g == cplx{}) continue;
          auto bi = static_cast<std::size_t>(be);
          const SF pr = sf_mul(ea, psi.re[bi][0]);
          const SF pi = sf_mul(ea, psi.im[bi][0]);
          if (g.real() != 0.0) {
            tre.push_back(pr); wre.push_back(g.real());
            tim.push_back(pi); wim.push_back(g.real());
          }
          if (g.imag() != 0.0) {
            tre.push_back(pi); wre.push_back(-g.imag());
            tim.push_back(pr); wim.push_back(g.imag());
          }
        }
      }
      out.re[static_cast<std::size_t>(al)][static_cast<std::size_t>(mu)] =
          sf_affine(std::move(tre), std::move(wre), 0.0);
      out.im[static_cast<std::size_t>(al)][static_cast<std::size_t>(mu)] =
          sf_affine(std::move(tim), std::move(wim), 0.0);
    }
  return out;
}

// ----------------------------------------------------------------- suites

void suite_killing(const GeometrySpec& spec, const SuiteConfig& cfg,
                   std::vector<CheckRecord>& out) {
  if (spec.vfields.empty())
    throw ValidationError("killing: the file declares no [vectorfield.*] sections");
  const double tol = gate(spec, cfg, "killing", 1e-7);
  const auto pts = spec.points(16, suite_seed(cfg.seed, "killing"));
  for (const auto& vf : spec.vfields) {
    Stopwatch watch;
    const KillingReport kr = killing_check(spec.coframe, vf.field, pts, tol);
    const Worst w = worst_abs(kosmann_lie_coframe(spec.coframe, vf.field), pts);
    CheckRecord rec;
    rec.name = "killing:" + vf.name;
    rec.anchor = "killing-equivalence";
    rec.residual = w.value;
    rec.worst = w.point;
    rec.pass = kr.killing == kr.metricKilling;
    rec.note = std::string(kr.killing ? "killing" : "not killing") +
               "; metric route residual " + shortnum(kr.metricResidual);
    if (vf.killing && kr.killing != *vf.killing) {
      rec.pass = false;
      rec.note += "; the file expects the opposite verdict";
    }
    rec.runtimeMs = watch.lapMs();
    out.push_back(std::move(rec));
  }
}

void suite_equivalence(const GeometrySpec& spec, const SuiteConfig& cfg,
                       std::vector<CheckRecord>& out) {
  const double tolR = gate(spec, cfg, "equivalence", 1e-9);
  const double tolA = gate(spec, cfg, "antisymmetry", 1e-10);
  const std::uint64_t seed = suite_seed(cfg.seed, "kosmann-equivalence");
  const auto pts = spec.points(12, seed);
  Rng rng(seed);
  Stopwatch watch;
  Worst routes, anti;
  for (int trial = 0; trial < 3; ++trial) {
    const VectorField xi = random_field_on(spec, rng, 0.8);
    const FormField r1 = kosmann_lie_coframe(spec.coframe, xi);
    const FormField r2 = kosmann_lie_coframe_connection_route(spec.coframe, xi);
    const FormField r3 = kosmann_lie_coframe_correction_route(spec.coframe, xi);
    for (const auto& p : pts) {
      routes.consider(form_max_diff(r1, r2, {p}), p);
      routes.consider(form_max_diff(r1, r3, {p}), p);
    }
    const FormField low = lower_first(kosmann_correction(spec.coframe, xi), spec.sig);
    const FormField sym = form_add(low, form_value_transpose(low));
    for (const auto& p : pts) anti.consider(form_max_abs(sym, {p}), p);
  }
  out.push_back({"kosmann-equivalence:routes", "kosmann-route-agreement",
                 routes.value < tolR, routes.value, routes.point,
                 "three constructions on three random fields", watch.lapMs()});
  out.push_back({"kosmann-equivalence:antisymmetry", "kosmann-correction-antisymmetry",
                 anti.value < tolA, anti.value, anti.point,
                 "lowered correction plus its transpose", watch.lapMs()});
}

void suite_covariance(const GeometrySpec& spec, const SuiteConfig& cfg,
                      std::vector<CheckRecord>& out) {
  const double tol = gate(spec, cfg, "covariance", 1e-8);
  const std::uint64_t seed = suite_seed(cfg.seed, "covariance");
  const auto pts = spec.points(10, seed);
  Rng rng(seed);
  std::vector<std::pair<std::string, FormField>> gammas;
  for (const auto& gs : spec.gauges) gammas.emplace_back(gs.name, gs.gamma);
  for (int k = 0; k < 2; ++k)
    gammas.emplace_back("generated" + std::to_string(k),
                        matrix_exp_0form(sloped_generator_on(spec, rng)));
  const VectorField xi = biased_field_on(spec, rng);
  const FormField eForm = coframe_form(spec.coframe);
  const FormField lk = kosmann_lie_coframe(spec.coframe, xi);
  for (const auto& [name, gamma] : gammas) {
    Stopwatch watch;
    const double orth = orthogonality_residual(gamma, spec.sig, pts);
    if (orth > 1e-8) {
      out.push_back({"covariance:" + name, "kosmann-gauge-covariance", false, orth,
                     {}, "gauge matrix is not orthogonal on the box", watch.lapMs()});
      continue;
    }
    const Coframe rotated = coframe_from_form(wedge(gamma, eForm), spec.sig);
    const Worst w = worst_diff(kosmann_lie_coframe(rotated, xi), wedge(gamma, lk), pts);
    out.push_back({"covariance:" + name, "kosmann-gauge-covariance", w.value < tol,
                   w.value, w.point, "", watch.lapMs()});
  }
}

void suite_witness(const GeometrySpec& spec, const SuiteConfig& cfg,
                   std::vector<CheckRecord>& out) {
  const double floor = gate(spec, cfg, "witness", 1e-2);
  const std::uint64_t seed = suite_seed(cfg.seed, "noncovariance-witness");
  const auto pts = spec.points(10, seed);
  Rng rng(seed);
  Stopwatch watch;
  const FormField gamma = matrix_exp_0form(sloped_generator_on(spec, rng));
  const VectorField xi = biased_field_on(spec, rng);
  const FormField eForm = coframe_form(spec.coframe);
  const FormField defect = form_sub(lie_derivative_form(xi, wedge(gamma, eForm)),
                                    wedge(gamma, lie_derivative_form(xi, eForm)));
  const Worst w = worst_abs(defect, pts);
  out.push_back({"noncovariance-witness", "plain-transport-defect", w.value > floor,
                 w.value, w.point,
                 "pass means the plain derivative fails to transport", watch.lapMs()});
}

void suite_independence(const GeometrySpec& spec, const SuiteConfig& cfg,
                        std::vector<CheckRecord>& out) {
  const double tol = gate(spec, cfg, "independence", 1e-10);
  const std::uint64_t seed = suite_seed(cfg.seed, "connection-independence");
  const auto pts = spec.points(12, seed);
  Rng rng(seed);
  Stopwatch watch;
  const FormField lc = levi_civita(spec.coframe);
  double dev = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const FormField omega = form_add(lc, so_valued_on(spec, rng, 0.4));
    const FormField omegaHat = form_add(lc, so_valued_on(spec, rng, 0.4));
    const FormField lamForm = so_valued_on(spec, rng, 0.5);
    const CovariantizationData data = covdata_from_pair(
        omega, [lamForm](const VectorField& v) { return interior_product(v, lamForm); });
    const VectorField xi = random_field_on(spec, rng, 0.8);
    dev = std::max(dev, connection_independence_check(data, omegaHat, xi, pts));
  }
  out.push_back({"connection-independence", "correction-fixes-the-derivative",
                 dev < tol, dev, {}, "three random connection swaps", watch.lapMs()});
}

void suite_torsion(const GeometrySpec& spec, const SuiteConfig& cfg,
                   std::vector<CheckRecord>& out) {
  const double tolT = gate(spec, cfg, "torsion", 1e-10);
  const double tolB = gate(spec, cfg, "bianchi", 1e-8);
  const auto pts = spec.points(12, suite_seed(cfg.seed, "torsion"));
  Stopwatch watch;
  const FormField eForm = coframe_form(spec.coframe);
  const FormField lc = levi_civita(spec.coframe);
  const Worst t = worst_abs(torsion(eForm, lc), pts);
  out.push_back({"torsion:levi-civita", "metric-connection-torsion", t.value < tolT,
                 t.value, t.point, "", watch.lapMs()});
  const Worst b = worst_abs(cov_d_matrix(lc, curvature(lc)), pts);
  out.push_back({"torsion:bianchi", "curvature-bianchi", b.value < tolB, b.value,
                 b.point, "", watch.lapMs()});
}

void suite_ec(const GeometrySpec& spec, const SuiteConfig& cfg,
              std::vector<CheckRecord>& out) {
  const int n = spec.chart.dim();
  if (n < 3)
    throw ValidationError("ec-symmetry: needs a chart of dimension at least 3");
  const double tol = gate(spec, cfg, "ec", 1e-6);
  const std::uint64_t seed = suite_seed(cfg.seed, "ec-symmetry");
  const auto pts = spec.points(5, seed);
  Rng rng(seed);
  const FormField eForm = coframe_form(spec.coframe);
  const VectorField xi = random_field_on(spec, rng, 0.7);
  for (bool twist : {false, true}) {
    Stopwatch watch;
    FormField omega = levi_civita(spec.coframe);
    if (twist) omega = form_add(omega, so_valued_on(spec, rng, 0.3));
    const FormField de = form_add(interior_product(xi, torsion(eForm, omega)),
                                  cov_d_vector(omega, interior_product(xi, eForm)));
    const FormField dw = interior_product(xi, curvature(omega));
    const FormField Lext = ec_lagrangian(extend_with_parameter(eForm, de),
                                         extend_with_parameter(omega, dw), spec.sig);
    const int topRank = combo_rank(n + 1, combos(n, n)[0]);
    const SF dLdt = sf_partial(Lext.comps[0][static_cast<std::size_t>(topRank)], n);
    const FormField bnd = exterior_derivative(
        interior_product(xi, ec_lagrangian(eForm, omega, spec.sig)));
    Worst w;
    for (const auto& p : pts) {
      std::vector<double> pExt = p;
      pExt.push_back(0.0);
      w.consider(std::abs(sf_value(dLdt, pExt) - eval_form(bnd, p)[0][0]), p);
    }
    out.push_back({std::string("ec-symmetry:") + (twist ? "contorted" : "metric"),
                   "diffeomorphism-boundary-term", w.value < tol, w.value, w.point,
                   "", watch.lapMs()});
  }
}

void suite_spinor(const GeometrySpec& spec, const SuiteConfig& cfg,
                  std::vector<CheckRecord>& out) {
  const int n = spec.chart.dim();
  if (n > 6)
    throw ValidationError("spinor: gamma representation covers dimensions 1 to 6");
  const double tolR = gate(spec, cfg, "spinor", 1e-9);
  const double tolL = gate(spec, cfg, "leibniz", 1e-8);
  const std::uint64_t seed = suite_seed(cfg.seed, "spinor");
  const auto pts = spec.points(10, seed);
  Rng rng(seed);
  const GammaRep rep = build_gamma(spec.sig);
  std::vector<std::pair<std::string, SpinorForm>> psis;
  for (const auto& sp : spec.spinors) psis.emplace_back(sp.name, sp.psi);
  if (psis.empty())
    for (int k = 0; k < 2; ++k) {
      SpinorForm psi = spinor_zero(rep.ns, 0, n);
      for (int a = 0; a < rep.ns; ++a) {
        psi.re[static_cast<std::size_t>(a)][0] = smooth_on(rng, spec.chart.coords, 0.8);
        psi.im[static_cast<std::size_t>(a)][0] = smooth_on(rng, spec.chart.coords, 0.8);
      }
      psis.emplace_back("generated" + std::to_string(k), std::move(psi));
    }
  const VectorField xi = random_field_on(spec, rng, 0.8);
  for (const auto& [name, psi] : psis) {
    Stopwatch watch;
    const SpinorForm r1 = kosmann_lie_spinor(spec.coframe, xi, psi, rep);
    const SpinorForm r2 = kosmann_lie_spinor_lambda_route(spec.coframe, xi, psi, rep);
    const SpinorForm r3 = kosmann_lie_spinor_reduction_route(spec.coframe, xi, psi, rep);
    Worst w;
    for (const auto& p : pts) {
      w.consider(spinor_max_diff(r1, r2, {p}), p);
      w.consider(spinor_max_diff(r1, r3, {p}), p);
    }
    out.push_back({"spinor:" + name, "spinor-route-agreement", w.value < tolR,
                   w.value, w.point, "", watch.lapMs()});
  }
  Stopwatch watch;
  const FormField eForm = coframe_form(spec.coframe);
  const SpinorForm& psi = psis.front().second;
  const SpinorForm lhs =
      kosmann_lie_spinor(spec.coframe, xi, clifford_pair(eForm, spec.sig, rep, psi), rep);
  const SpinorForm rhs = spinor_add(
      clifford_pair(kosmann_lie_coframe(spec.coframe, xi), spec.sig, rep, psi),
      clifford_pair(eForm, spec.sig, rep, kosmann_lie_spinor(spec.coframe, xi, psi, rep)));
  Worst w;
  for (const auto& p : pts) w.consider(spinor_max_diff(lhs, rhs, {p}), p);
  out.push_back({"spinor:leibniz", "clifford-pairing-leibniz", w.value < tolL, w.value,
                 w.point, "derivative splits over the pairing", watch.lapMs()});
}

// --------------------------------------------------------- oracle plumbing

struct OracleGates {
  double lift, dev, ident, push;
};

OracleGates oracle_gates(const std::optional<double>& tol) {
  if (tol) return {*tol, *tol, *tol, *tol};
  return {1e-9, 1e-6, 1e-8, 1e-7};
}

std::vector<std::pair<const char*, double>> oracle_entries(const OracleReport& r) {
  return {{"lift_residual", r.liftResidual},
          {"conn_deviation", r.connDeviation},
          {"matter_deviation", r.matterDeviation},
          {"conn_rearrangement", r.connRearrangement},
          {"matter_rearrangement", r.matterRearrangement},
          {"horizontality", r.horizontality},
          {"equivariance", r.equivariance},
          {"pushforward_deviation", r.pushforwardDeviation},
          {"section_deviation", r.sectionDeviation}};
}

bool oracle_pass(const OracleReport& r, const OracleGates& g) {
  const auto ok = [](double v, double lim) { return v < 0.0 || v < lim; };
  return ok(r.liftResidual, g.lift) && ok(r.connDeviation, g.dev) &&
         ok(r.matterDeviation, g.dev) && ok(r.connRearrangement, g.dev) &&
         ok(r.matterRearrangement, g.dev) && ok(r.horizontality, g.ident) &&
         ok(r.equivariance, g.ident) && ok(r.pushforwardDeviation, g.push) &&
         ok(r.sectionDeviation, g.dev);
}

std::pair<const char*, double> oracle_extreme(const OracleReport& r) {
  std::pair<const char*, double> top{"lift_residual", -1.0};
  for (const auto& [name, v] : oracle_entries(r))
    if (v > top.second) top = {name, v};
  return top;
}

OracleReport oracle_run(const GeometrySpec& spec, GroupKind kind,
                        std::uint64_t seed, TotalSpacePatch* patchOut) {
  const TotalSpacePatch patch = build_patch(spec.chart.dim(), kind);
  Rng rng(seed);
  const auto& coords = spec.chart.coords;
  const FormField omega = patch_algebra_valued(patch, rng, coords, 1, 0.5);
  const FormField lambda = patch_algebra_valued(patch, rng, coords, 0, 0.5);
  const VectorField xi = random_field_on(spec, rng, 0.8);
  const FormField phi = patch_vector_valued(patch, rng, coords, 1, 0.5);
  const auto basePts = spec.points(6, seed + 1);
  if (patchOut) *patchOut = patch;
  return lift_and_compare(patch, omega, lambda, xi, &phi, basePts, seed + 2);
}

void suite_oracle(const GeometrySpec& spec, const SuiteConfig& cfg,
                  std::vector<CheckRecord>& out) {
  const int n = spec.chart.dim();
  std::vector<GroupKind> kinds;
  if (n + 1 <= 6) {
    kinds.push_back(GroupKind::SO2);
    kinds.push_back(GroupKind::SO11);
  }
  if (n + 3 <= 6) kinds.push_back(GroupKind::SO3);
  if (kinds.empty())
    throw ValidationError("oracle: chart dimension leaves no room for a structure group");
  const OracleGates g = oracle_gates(cfg.tol);
  for (GroupKind kind : kinds) {
    Stopwatch watch;
    const std::uint64_t seed =
        suite_seed(cfg.seed, std::string("oracle-") + group_tag(kind));
    const OracleReport rep = oracle_run(spec, kind, seed, nullptr);
    const auto [name, value] = oracle_extreme(rep);
    out.push_back({std::string("oracle:") + group_tag(kind), "bundle-lift-agreement",
                   oracle_pass(rep, g), value, {},
                   std::string("largest entry: ") + name, watch.lapMs()});
  }
}

// ------------------------------------------------------------- kk plumbing

KKSetup kk_setup_from(const GeometrySpec& spec, std::uint64_t seed) {
  KKSetup setup;
  setup.e = spec.coframe;
  for (const auto& fname : spec.kk.fieldNames) {
    const VectorFieldSpec* vf = spec.find_field(fname);
    if (!vf) throw InternalError("kk field lookup failed for '" + fname + "'");
    setup.fund.push_back(vf->field);
  }
  setup.fiberPeriods = spec.kk.periods;
  setup.samplePts = spec.points(10, seed);
  return setup;
}

void suite_kk(const GeometrySpec& spec, const SuiteConfig& cfg,
              std::vector<CheckRecord>& out) {
  if (!spec.kk.present)
    throw ValidationError("kk-reduce: the file has no [kk] section");
  const std::uint64_t seed = suite_seed(cfg.seed, "kk-reduce");
  const KKSetup setup = kk_setup_from(spec, seed);
  const auto& pts = setup.samplePts;
  Stopwatch watch;
  try {
    const KKConnection conn = kk_connection_form(setup);
    const SymTensor g = metric_from_coframe(setup.e);
    const VerticalFrame vert = gram_schmidt_vertical(conn.theta, dual_metric(g), pts);
    const ReducedFields red = extract_fields(setup);
    const Coframe ehat = adapted_coframe(setup, red.base, vert);
    const GaugeVerdict gv = adapted_gauge_check(setup, ehat);
    out.push_back({"kk-reduce:gauge", "adapted-frame-invariance", gv.pass, gv.residual,
                   {}, "plain transport residual " + shortnum(gv.naiveResidual),
                   watch.lapMs()});

    const double tolRec = gate(spec, cfg, "reconstruction", 1e-9);
    const SymTensor ghat = metric_from_coframe(ehat);
    Worst wrec;
    for (const auto& p : pts) wrec.consider(sym_max_diff(g, ghat, {p}), p);
    out.push_back({"kk-reduce:reconstruction", "metric-reassembly", wrec.value < tolRec,
                   wrec.value, wrec.point, "", watch.lapMs()});

    if (spec.expect.phi) {
      const double tolP = gate(spec, cfg, "phi", 1e-9);
      CheckRecord rec;
      rec.name = "kk-reduce:scalar";
      rec.anchor = "reduced-scalar-value";
      if (setup.fund.size() != 1) {
        rec.pass = false;
        rec.note = "scalar expectation needs a single fiber direction";
      } else {
        Worst wp;
        const SF got = red.phi.comps[0][0];
        for (const auto& p : pts)
          wp.consider(std::abs(sf_value(got, p) - sf_value(*spec.expect.phi, p)), p);
        rec.pass = wp.value < tolP;
        rec.residual = wp.value;
        rec.worst = wp.point;
      }
      rec.runtimeMs = watch.lapMs();
      out.push_back(std::move(rec));
    }

    if (!spec.kk.monopoleAxes.empty()) {
      const double tolM = gate(spec, cfg, "monopole", 1e-3);
      std::vector<double> mid;
      for (const auto& b : spec.chart.box) mid.push_back(0.5 * (b[0] + b[1]));
      const double period = setup.fiberPeriods.empty() ? 1.0 : setup.fiberPeriods[0];
      const double value = monopole_number(conn.theta, 0, spec.kk.monopoleAxes,
                                           spec.kk.monopoleBounds, mid, period);
      const double want =
          spec.expect.monopole ? *spec.expect.monopole : std::round(value);
      const double dev = std::abs(value - want);
      out.push_back({"kk-reduce:monopole", "flux-quantization", dev < tolM, dev, {},
                     "flux over period " + shortnum(value) + " against " +
                         shortnum(want), watch.lapMs()});
    }
  } catch (const ValidationError& err) {
    out.push_back({"kk-reduce:hypotheses", "reduction-hypotheses", false, 0.0, {},
                   err.what(), watch.lapMs()});
  }
}

using SuiteFn = void (*)(const GeometrySpec&, const SuiteConfig&,
                         std::vector<CheckRecord>&);

struct SuiteEntry {
  const char* name;
  SuiteFn fn;
};

constexpr SuiteEntry kSuites[] = {
    {"killing", suite_killing},
    {"kosmann-equivalence", suite_equivalence},
    {"covariance", suite_covariance},
    {"noncovariance-witness", suite_witness},
    {"connection-independence", suite_independence},
    {"torsion", suite_torsion},
    {"ec-symmetry", suite_ec},
    {"spinor", suite_spinor},
    {"oracle", suite_oracle},
    {"kk-reduce", suite_kk},
};

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSuites) v.push_back(s.name);
    v.push_back("all");
    return v;
  }();
  return names;
}

bool is_suite_name(const std::string& name) {
  for (const auto& s : suite_names())
    if (s == name) return true;
  return false;
}

std::vector<CheckRecord> run_suite(const GeometrySpec& spec, const std::string& suite,
                                   const SuiteConfig& cfg) {
  std::vector<CheckRecord> out;
  if (suite == "all") {
    if (spec.expect.suites.empty())
      throw ValidationError("all: the file lists no expected suite verdicts");
    for (const auto& [name, want] : spec.expect.suites) {
      std::vector<CheckRecord> sub = run_suite(spec, name, cfg);
      const bool got = records_pass(sub);
      if (want) {
        for (auto& r : sub) out.push_back(std::move(r));
      } else {
        double ms = 0.0;
        for (const auto& r : sub) ms += r.runtimeMs;
        out.push_back({name + ":expected-failure", "self-check", !got, 0.0, {},
                       got ? "suite passes although the file expects a failure"
                           : "suite fails as the file expects",
                       ms});
      }
    }
    return out;
  }
  for (const auto& s : kSuites)
    if (suite == s.name) {
      s.fn(spec, cfg, out);
      return out;
    }
  throw ValidationError("unknown suite '" + suite + "'");
}

bool records_pass(const std::vector<CheckRecord>& records) {
  if (records.empty()) return false;
  for (const auto& r : records)
    if (!r.pass) return false;
  return true;
}

std::string check_report_json(const GeometrySpec& spec, const std::string& suite,
                              const SuiteConfig& cfg,
                              const std::vector<CheckRecord>& records,
                              double totalMs) {
  std::string o;
  o += "{\n";
  o += "  \"tool\": \"kosmann\",\n";
  o += "  \"mode\": \"check\",\n";
  o += "  \"spec\": \"" + jesc(spec.path) + "\",\n";
  o += "  \"suite\": \"" + jesc(suite) + "\",\n";
  o += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
  o += std::string("  \"pass\": ") + jbool(records_pass(records)) + ",\n";
  if (records.empty()) {
    o += "  \"checks\": [],\n";
  } else {
    o += "  \"checks\": [\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const CheckRecord& r = records[i];
      o += "    {\n";
      o += "      \"name\": \"" + jesc(r.name) + "\",\n";
      o += "      \"anchor\": \"" + jesc(r.anchor) + "\",\n";
      o += std::string("      \"pass\": ") + jbool(r.pass) + ",\n";
      o += "      \"residual\": " + jnum(r.residual) + ",\n";
      o += "      \"worst_point\": " + jpoint(r.worst) + ",\n";
      o += "      \"note\": \"" + jesc(r.note) + "\",\n";
      o += "      \"runtime_ms\": " + jnum(r.runtimeMs) + "\n";
      o += i + 1 < records.size() ? "    },\n" : "    }\n";
    }
    o += "  ],\n";
  }
  o += "  \"runtime_ms\": " + jnum(totalMs) + "\n";
  o += "}\n";
  return o;
}

RenderedReport reduction_report(const GeometrySpec& spec, std::uint64_t seed) {
  if (!spec.kk.present)
    throw ValidationError("reduce: the file has no [kk] section");
  Stopwatch watch;
  const KKSetup setup = kk_setup_from(spec, suite_seed(seed, "reduce"));
  const auto& pts = setup.samplePts;
  const KKConnection conn = kk_connection_form(setup);
  const SymTensor g = metric_from_coframe(setup.e);
  const VerticalFrame vert = gram_schmidt_vertical(conn.theta, dual_metric(g), pts);
  const ReducedFields red = extract_fields(setup);
  const Coframe ehat = adapted_coframe(setup, red.base, vert);
  const GaugeVerdict gv = adapted_gauge_check(setup, ehat);
  double recon = 0.0;
  const SymTensor ghat = metric_from_coframe(ehat);
  for (const auto& p : pts) recon = std::max(recon, sym_max_diff(g, ghat, {p}));
  bool pass = gv.pass && recon < spec.tolerance("reconstruction", 1e-9);

  std::string o;
  o += "{\n";
  o += "  \"tool\": \"kosmann\",\n";
  o += "  \"mode\": \"reduce\",\n";
  o += "  \"spec\": \"" + jesc(spec.path) + "\",\n";
  o += "  \"seed\": " + std::to_string(seed) + ",\n";
  o += "  \"fiber_rank\": " + std::to_string(setup.fund.size()) + ",\n";
  o += "  \"leg_signs\": [";
  for (std::size_t i = 0; i < red.signs.size(); ++i) {
    if (i) o += ", ";
    o += std::to_string(red.signs[i]);
  }
  o += "],\n";
  o += "  \"gauge\": {\n";
  o += std::string("    \"pass\": ") + jbool(gv.pass) + ",\n";
  o += "    \"residual\": " + jnum(gv.residual) + ",\n";
  o += "    \"naive_residual\": " + jnum(gv.naiveResidual) + "\n";
  o += "  },\n";
  o += "  \"reconstruction_residual\": " + jnum(recon) + ",\n";
  if (setup.fund.size() == 1) {
    const SF phi = red.phi.comps[0][0];
    o += "  \"scalar\": {\n";
    o += "    \"points\": [";
    const std::size_t shown = std::min<std::size_t>(4, pts.size());
    for (std::size_t i = 0; i < shown; ++i) {
      if (i) o += ", ";
      o += jpoint(pts[i]);
    }
    o += "],\n";
    o += "    \"values\": [";
    for (std::size_t i = 0; i < shown; ++i) {
      if (i) o += ", ";
      o += jnum(sf_value(phi, pts[i]));
    }
    o += "]";
    if (spec.expect.phi) {
      double dev = 0.0;
      for (const auto& p : pts)
        dev = std::max(dev, std::abs(sf_value(phi, p) - sf_value(*spec.expect.phi, p)));
      pass = pass && dev < spec.tolerance("phi", 1e-9);
      o += ",\n    \"expected_deviation\": " + jnum(dev) + "\n";
    } else {
      o += "\n";
    }
    o += "  },\n";
  }
  if (!spec.kk.monopoleAxes.empty()) {
    std::vector<double> mid;
    for (const auto& b : spec.chart.box) mid.push_back(0.5 * (b[0] + b[1]));
    const double period = setup.fiberPeriods.empty() ? 1.0 : setup.fiberPeriods[0];
    const double value = monopole_number(conn.theta, 0, spec.kk.monopoleAxes,
                                         spec.kk.monopoleBounds, mid, period);
    const double want = spec.expect.monopole ? *spec.expect.monopole : std::round(value);
    const double dev = std::abs(value - want);
    pass = pass && dev < spec.tolerance("monopole", 1e-3);
    o += "  \"monopole\": {\n";
    o += "    \"value\": " + jnum(value) + ",\n";
    o += "    \"reference\": " + jnum(want) + ",\n";
    o += "    \"deviation\": " + jnum(dev) + "\n";
    o += "  },\n";
  }
  o += std::string("  \"pass\": ") + jbool(pass) + ",\n";
  o += "  \"runtime_ms\": " + jnum(watch.lapMs()) + "\n";
  o += "}\n";
  return {pass, o};
}

RenderedReport oracle_report(const GeometrySpec& spec, GroupKind kind,
                             std::uint64_t seed, std::optional<double> tol) {
  Stopwatch watch;
  TotalSpacePatch patch = build_patch(spec.chart.dim(), kind);
  const OracleReport rep =
      oracle_run(spec, kind, suite_seed(seed, std::string("oracle-") + group_tag(kind)),
                 &patch);
  const bool pass = oracle_pass(rep, oracle_gates(tol));

  std::string o;
  o += "{\n";
  o += "  \"tool\": \"kosmann\",\n";
  o += "  \"mode\": \"oracle\",\n";
  o += "  \"spec\": \"" + jesc(spec.path) + "\",\n";
  o += "  \"group\": \"" + std::string(group_tag(kind)) + "\",\n";
  o += "  \"seed\": " + std::to_string(seed) + ",\n";
  o += "  \"base_dim\": " + std::to_string(patch.baseDim) + ",\n";
  o += "  \"total_dim\": " + std::to_string(patch.dim()) + ",\n";
  for (const auto& [name, value] : oracle_entries(rep))
    o += "  \"" + std::string(name) + "\": " + jnum(value) + ",\n";
  o += std::string("  \"pass\": ") + jbool(pass) + ",\n";
  o += "  \"runtime_ms\": " + jnum(watch.lapMs()) + "\n";
  o += "}\n";
  return {pass, o};
}

}  // namespace kosmann
