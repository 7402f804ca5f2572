#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

// Acceptance sweep: one verdict line per criterion, backed by doctest
// assertions so a failure is visible both in the log and in the exit code.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "kosmann/covlie.hpp"
#include "kosmann/expr.hpp"
#include "kosmann/frame.hpp"
#include "kosmann/geospec.hpp"
#include "kosmann/kk.hpp"
#include "kosmann/oracle.hpp"
#include "kosmann/randomgen.hpp"
#include "kosmann/spinor.hpp"
#include "testutil.hpp"

using namespace kosmann;
using namespace kosmann::testutil;

namespace {

const char* const kFixtureNames[] = {"flat2d.geo",      "flat4d.geo",
                                     "s2.geo",          "s3_hopf.geo",
                                     "schwarzschild.geo", "product_s2xs1.geo",
                                     "warped.geo"};

std::string fixture(const std::string& name) {
  return std::string(KOSMANN_FIXTURES) + "/" + name;
}

void verdict(int k, const char* name, bool ok) {
  std::printf("[%s] %2d. %s\n", ok ? "PASS" : "FAIL", k, name);
  std::fflush(stdout);
}

Signature cycle_sig(int trial, int n) {
  return (trial % 2 == 0) ? Signature{0, n} : Signature{1, n - 1};
}

// eta_a (lk^a_mu e^a_nu + e^a_mu lk^a_nu), the metric shadow of lk
SymTensor kosmann_pairing(const Coframe& cf, const FormField& lk) {
  const int n = cf.sig.dim();
  SymTensor s;
  s.dim = n;
  s.g.assign(static_cast<std::size_t>(n) * n, sf_const(0.0));
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      std::vector<SF> terms;
      std::vector<double> w;
      for (int a = 0; a < n; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        terms.push_back(sf_mul(lk.comps[ai][static_cast<std::size_t>(mu)],
                               cf.e[ai][static_cast<std::size_t>(nu)]));
        w.push_back(cf.sig.eta(a));
        terms.push_back(sf_mul(cf.e[ai][static_cast<std::size_t>(mu)],
                               lk.comps[ai][static_cast<std::size_t>(nu)]));
        w.push_back(cf.sig.eta(a));
      }
      s.g[static_cast<std::size_t>(mu * n + nu)] =
          sf_affine(std::move(terms), std::move(w), 0.0);
    }
  return s;
}

FormField algebra_valued(const TotalSpacePatch& patch, Rng& rng, int degree,
                         double amp) {
  const auto coords = coord_names(patch.baseDim);
  const int r = patch.repDim;
  FormField out = form_zero(matrix_space(r), degree, patch.baseDim);
  const int nc = combo_count(patch.baseDim, degree);
  for (const auto& gen : patch.algebra)
    for (int c = 0; c < nc; ++c) {
      const SF s = smooth(rng, coords, amp);
      for (int i = 0; i < r * r; ++i) {
        if (gen[static_cast<std::size_t>(i)] == 0.0) continue;
        SF term = sf_scale(s, gen[static_cast<std::size_t>(i)]);
        SF& slot = out.comps[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        slot = sf_is_zero(slot) ? term : sf_add(slot, term);
      }
    }
  return out;
}

FormField vector_valued(const TotalSpacePatch& patch, Rng& rng, int degree,
                        double amp) {
  const auto coords = coord_names(patch.baseDim);
  FormField out = form_zero(vector_space(patch.repDim), degree, patch.baseDim);
  for (auto& value : out.comps)
    for (auto& slot : value) slot = smooth(rng, coords, amp);
  return out;
}

KKSetup setup_from(const GeometrySpec& spec, std::uint64_t seed) {
  KKSetup setup;
  setup.e = spec.coframe;
  for (const auto& name : spec.kk.fieldNames)
    setup.fund.push_back(spec.find_field(name)->field);
  setup.fiberPeriods = spec.kk.periods;
  setup.samplePts = spec.points(8, seed);
  return setup;
}

SpinorForm random_smooth_spinor(Rng& rng, int dim, int ns, double amp) {
  const auto coords = coord_names(dim);
  SpinorForm psi = spinor_zero(ns, 0, dim);
  for (int a = 0; a < ns; ++a) {
    psi.re[static_cast<std::size_t>(a)][0] = smooth(rng, coords, amp);
    psi.im[static_cast<std::size_t>(a)][0] = smooth(rng, coords, amp);
  }
  return psi;
}

// e^a Gamma_a psi
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

}  // namespace

TEST_CASE("1: kosmann derivative reproduces the metric lie derivative") {
  Rng rng(11001);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const Coframe cf = random_coframe(rng, cycle_sig(trial, n));
    const VectorField xi = random_vfield(rng, n, 0.8);
    const auto pts = cube_points(n, 4, 11100 + static_cast<std::uint64_t>(trial));
    const SymTensor lhs = lie_derivative_metric(xi, metric_from_coframe(cf));
    const SymTensor rhs = kosmann_pairing(cf, kosmann_lie_coframe(cf, xi));
    const double dev = sym_max_diff(lhs, rhs, pts);
    worst = std::max(worst, dev);
    ok = ok && dev < 1e-9;
  }
  CHECK(worst < 1e-9);
  verdict(1, "kosmann derivative reproduces the metric lie derivative", ok);
}

TEST_CASE("2: three kosmann constructions agree, correction antisymmetric") {
  Rng rng(12001);
  bool ok = true;
  double worstRoute = 0.0, worstAnti = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const Signature sig = cycle_sig(trial, n);
    const Coframe cf = random_coframe(rng, sig);
    const VectorField xi = random_vfield(rng, n, 0.8);
    const auto pts = cube_points(n, 4, 12100 + static_cast<std::uint64_t>(trial));
    const FormField r1 = kosmann_lie_coframe(cf, xi);
    const FormField r2 = kosmann_lie_coframe_connection_route(cf, xi);
    const FormField r3 = kosmann_lie_coframe_correction_route(cf, xi);
    const double dev =
        std::max({form_max_diff(r1, r2, pts), form_max_diff(r1, r3, pts),
                  form_max_diff(r2, r3, pts)});
    const FormField low = lower_first(kosmann_correction(cf, xi), sig);
    const double anti =
        form_max_abs(form_add(low, form_value_transpose(low)), pts);
    worstRoute = std::max(worstRoute, dev);
    worstAnti = std::max(worstAnti, anti);
    ok = ok && dev < 1e-9 && anti < 1e-10;
  }
  CHECK(worstRoute < 1e-9);
  CHECK(worstAnti < 1e-10);
  verdict(2, "three kosmann constructions agree, correction antisymmetric", ok);
}

TEST_CASE("3: killing verdicts on the bundled geometries") {
  bool ok = true;
  for (const char* name : kFixtureNames) {
    CAPTURE(name);
    const GeometrySpec spec = load_spec(fixture(name));
    const auto pts = spec.points(16, 13001);
    for (const auto& vf : spec.vfields) {
      if (!vf.killing) continue;
      CAPTURE(vf.name);
      const KillingReport kr = killing_check(spec.coframe, vf.field, pts);
      CHECK(kr.killing == *vf.killing);
      CHECK(kr.metricKilling == *vf.killing);
      ok = ok && kr.killing == *vf.killing && kr.metricKilling == *vf.killing;
    }
  }
  const GeometrySpec sch = load_spec(fixture("schwarzschild.geo"));
  const auto spts = sch.points(16, 13002);
  for (const char* name : {"tshift", "azimuth"}) {
    const KillingReport kr = killing_check(sch.coframe, sch.find_field(name)->field, spts);
    CHECK(kr.residual < 1e-9);
    ok = ok && kr.residual < 1e-9;
  }
  const GeometrySpec flat = load_spec(fixture("flat2d.geo"));
  const KillingReport dil =
      killing_check(flat.coframe, flat.find_field("dilation")->field, flat.points(16, 13003));
  CHECK(dil.residual > 0.1);
  CHECK(!dil.killing);
  const GeometrySpec s2 = load_spec(fixture("s2.geo"));
  const KillingReport tilt =
      killing_check(s2.coframe, s2.find_field("tilted")->field, s2.points(16, 13004));
  CHECK(tilt.killing);
  ok = ok && dil.residual > 0.1 && !dil.killing && tilt.killing;
  verdict(3, "killing verdicts on the bundled geometries", ok);
}

TEST_CASE("4: correction term survives connection swaps") {
  Rng rng(14001);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const Signature sig = cycle_sig(trial, n);
    const auto pts = cube_points(n, 4, 14100 + static_cast<std::uint64_t>(trial));
    const FormField omega = random_so_valued_form(rng, sig, 0.5);
    const FormField omegaHat = random_so_valued_form(rng, sig, 0.5);
    const FormField lamForm = random_so_valued_form(rng, sig, 0.5);
    const CovariantizationData data = covdata_from_pair(
        omega, [lamForm](const VectorField& v) { return interior_product(v, lamForm); });
    const VectorField xi = random_vfield(rng, n, 0.8);
    const double dev = connection_independence_check(data, omegaHat, xi, pts);
    worst = std::max(worst, dev);
    ok = ok && dev < 1e-10;
  }
  CHECK(worst < 1e-10);
  verdict(4, "correction term survives connection swaps", ok);
}

TEST_CASE("5: kosmann transforms covariantly, the plain derivative does not") {
  Rng rng(15001);
  bool ok = true;
  double worstCov = 0.0, weakestWitness = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const Signature sig = cycle_sig(trial, n);
    const Coframe cf = random_coframe(rng, sig);
    const FormField eForm = coframe_form(cf);
    const FormField gamma = matrix_exp_0form(sloped_so_generator(rng, sig));
    const VectorField xi = biased_vfield(rng, n);
    const auto pts = cube_points(n, 3, 15100 + static_cast<std::uint64_t>(trial));
    const Coframe rotated = coframe_from_form(wedge(gamma, eForm), sig);
    const double cov = form_max_diff(kosmann_lie_coframe(rotated, xi),
                                     wedge(gamma, kosmann_lie_coframe(cf, xi)), pts);
    const double witness =
        form_max_abs(form_sub(lie_derivative_form(xi, coframe_form(rotated)),
                              wedge(gamma, lie_derivative_form(xi, eForm))),
                     pts);
    worstCov = std::max(worstCov, cov);
    weakestWitness = std::min(weakestWitness, witness);
    ok = ok && cov < 1e-8 && witness > 0.01;
  }
  CHECK(worstCov < 1e-8);
  CHECK(weakestWitness > 0.01);
  verdict(5, "kosmann transforms covariantly, the plain derivative does not", ok);
}

TEST_CASE("6: levi-civita torsion, sphere curvature, bianchi identity") {
  bool ok = true;
  for (const char* name : kFixtureNames) {
    CAPTURE(name);
    const GeometrySpec spec = load_spec(fixture(name));
    const auto pts = spec.points(8, 16001);
    const FormField lc = levi_civita(spec.coframe);
    const double t = form_max_abs(torsion(coframe_form(spec.coframe), lc), pts);
    const double b = form_max_abs(cov_d_matrix(lc, curvature(lc)), pts);
    CHECK(t < 1e-10);
    CHECK(b < 1e-8);
    ok = ok && t < 1e-10 && b < 1e-8;
  }
  const GeometrySpec s2 = load_spec(fixture("s2.geo"));
  const auto pts = s2.points(10, 16002);
  const FormField F = curvature(levi_civita(s2.coframe));
  const FormField eForm = coframe_form(s2.coframe);
  const FormField e01 =
      wedge(form_value_slice(eForm, 0), form_value_slice(eForm, 1));
  const double up = form_max_diff(form_value_slice(F, 1), e01, pts);
  const double down =
      form_max_diff(form_value_slice(F, 2), form_scale(e01, -1.0), pts);
  const double diag = std::max(form_max_abs(form_value_slice(F, 0), pts),
                               form_max_abs(form_value_slice(F, 3), pts));
  CHECK(up < 1e-9);
  CHECK(down < 1e-9);
  CHECK(diag < 1e-9);
  ok = ok && up < 1e-9 && down < 1e-9 && diag < 1e-9;
  verdict(6, "levi-civita torsion, sphere curvature, bianchi identity", ok);
}

TEST_CASE("7: bundle oracle matches the base formulas") {
  bool ok = true;
  for (GroupKind kind : {GroupKind::SO2, GroupKind::SO3}) {
    CAPTURE(group_tag(kind));
    const TotalSpacePatch patch = build_patch(2, kind);
    for (int trial = 0; trial < 20; ++trial) {
      const std::uint64_t seed =
          17000 + 100 * static_cast<std::uint64_t>(kind == GroupKind::SO3) +
          static_cast<std::uint64_t>(trial);
      Rng rng(seed);
      const FormField omega = algebra_valued(patch, rng, 1, 0.5);
      const FormField lambda = algebra_valued(patch, rng, 0, 0.5);
      const VectorField xi = random_vfield(rng, 2, 0.8);
      const FormField phi = vector_valued(patch, rng, 1, 0.5);
      const auto basePts = cube_points(2, 5, seed + 1);
      const OracleReport rep =
          lift_and_compare(patch, omega, lambda, xi, &phi, basePts, seed + 2);
      CHECK(rep.connDeviation < 1e-6);
      CHECK(rep.matterDeviation < 1e-6);
      CHECK(rep.sectionDeviation < 1e-6);
      ok = ok && rep.connDeviation < 1e-6 && rep.matterDeviation < 1e-6 &&
           rep.sectionDeviation < 1e-6;
    }
    // lambda = 0: the pulled-back derivative is the curvature contraction
    Rng rng(17301 + static_cast<std::uint64_t>(kind == GroupKind::SO3));
    const FormField omega = algebra_valued(patch, rng, 1, 0.5);
    const FormField lambda = form_zero(matrix_space(patch.repDim), 0, 2);
    const VectorField xi = random_vfield(rng, 2, 0.8);
    const auto basePts = cube_points(2, 6, 17310);
    const FormField pulled = section_pullback(
        patch,
        lie_derivative_form(lift_vector(patch, omega, lambda, xi),
                            lift_connection(patch, omega)),
        {});
    const double natural =
        form_max_diff(pulled, interior_product(xi, curvature(omega)), basePts);
    CHECK(natural < 1e-6);
    ok = ok && natural < 1e-6;
  }
  verdict(7, "bundle oracle matches the base formulas", ok);
}

TEST_CASE("8: hopf reduction: metric split, dilaton, flux") {
  bool ok = true;
  const GeometrySpec spec = load_spec(fixture("s3_hopf.geo"));
  const KKSetup setup = setup_from(spec, 18001);
  const auto& pts = setup.samplePts;
  const KKConnection conn = kk_connection_form(setup);

  SymTensor half;
  half.dim = 3;
  half.g.assign(9, sf_const(0.0));
  half.g[0] = sf_const(0.25);
  half.g[4] = sf_expr(parse_expression("sin(th)^2/4", spec.chart.coords));
  const double hdev = sym_max_diff(conn.h, half, pts);
  CHECK(hdev < 1e-9);

  const SymTensor g = metric_from_coframe(setup.e);
  const VerticalFrame vert = gram_schmidt_vertical(conn.theta, dual_metric(g), pts);
  const ReducedFields red = extract_fields(setup);
  const Coframe ehat = adapted_coframe(setup, red.base, vert);
  const double recon = sym_max_diff(g, metric_from_coframe(ehat), pts);
  CHECK(recon < 1e-9);

  FormField halfConst = form_zero(matrix_space(1), 0, 3);
  halfConst.comps[0][0] = sf_const(0.5);
  const double phiDev = form_max_diff(red.phi, halfConst, pts);
  CHECK(phiDev < 1e-10);

  const GaugeVerdict gv = adapted_gauge_check(setup, ehat);
  CHECK(gv.pass);
  CHECK(gv.residual < 1e-8);

  std::vector<double> mid;
  for (const auto& b : spec.chart.box) mid.push_back(0.5 * (b[0] + b[1]));
  const double mono =
      monopole_number(conn.theta, 0, spec.kk.monopoleAxes, spec.kk.monopoleBounds,
                      mid, setup.fiberPeriods[0]);
  const double rel = std::abs(mono - (-1.0));  // flux / (4 pi) against -1
  CHECK(rel < 1e-3);

  ok = hdev < 1e-9 && recon < 1e-9 && phiDev < 1e-10 && gv.pass &&
       gv.residual < 1e-8 && rel < 1e-3;
  verdict(8, "hopf reduction: metric split, dilaton, flux", ok);
}

TEST_CASE("9: product and warped reductions carry the right scalar") {
  bool ok = true;
  {
    const GeometrySpec spec = load_spec(fixture("product_s2xs1.geo"));
    const KKSetup setup = setup_from(spec, 19001);
    const auto& pts = setup.samplePts;
    const ReducedFields red = extract_fields(setup);
    FormField one = form_zero(matrix_space(1), 0, 3);
    one.comps[0][0] = sf_const(1.0);
    const double dev = form_max_diff(red.phi, one, pts);
    CHECK(dev < 1e-9);
    const VerticalFrame vert = gram_schmidt_vertical(
        kk_connection_form(setup).theta, dual_metric(metric_from_coframe(setup.e)), pts);
    const GaugeVerdict gv =
        adapted_gauge_check(setup, adapted_coframe(setup, red.base, vert));
    CHECK(gv.residual < 1e-8);
    CHECK(gv.naiveResidual < 1e-8);
    ok = ok && dev < 1e-9 && gv.residual < 1e-8 && gv.naiveResidual < 1e-8;
  }
  {
    const GeometrySpec spec = load_spec(fixture("warped.geo"));
    const KKSetup setup = setup_from(spec, 19002);
    const auto& pts = setup.samplePts;
    const ReducedFields red = extract_fields(setup);
    FormField warp = form_zero(matrix_space(1), 0, 3);
    warp.comps[0][0] =
        sf_expr(parse_expression("exp(a/4 - 3*b/20)", spec.chart.coords));
    const double dev = form_max_diff(red.phi, warp, pts);
    CHECK(dev < 1e-9);
    const VerticalFrame vert = gram_schmidt_vertical(
        kk_connection_form(setup).theta, dual_metric(metric_from_coframe(setup.e)), pts);
    const GaugeVerdict gv =
        adapted_gauge_check(setup, adapted_coframe(setup, red.base, vert));
    CHECK(gv.residual < 1e-8);
    CHECK(gv.naiveResidual < 1e-8);
    ok = ok && dev < 1e-9 && gv.residual < 1e-8 && gv.naiveResidual < 1e-8;
  }
  verdict(9, "product and warped reductions carry the right scalar", ok);
}

TEST_CASE("10: spinor derivative: routes, clifford algebra, double cover") {
  bool ok = true;
  double worstClifford = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (int p = 0; p <= n; ++p) {
      const Signature sig{p, n - p};
      const GammaRep rep = build_gamma(sig);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const CMat ab = cmatmul(rep.gamma[static_cast<std::size_t>(a)],
                                  rep.gamma[static_cast<std::size_t>(b)], rep.ns);
          const CMat ba = cmatmul(rep.gamma[static_cast<std::size_t>(b)],
                                  rep.gamma[static_cast<std::size_t>(a)], rep.ns);
          for (int i = 0; i < rep.ns; ++i)
            for (int j = 0; j < rep.ns; ++j) {
              const auto k = static_cast<std::size_t>(i * rep.ns + j);
              cplx want{};
              if (a == b && i == j) want = 2.0 * sig.eta(a);
              worstClifford = std::max(worstClifford, std::abs(ab[k] + ba[k] - want));
            }
        }
    }
  CHECK(worstClifford == 0.0);
  ok = ok && worstClifford == 0.0;

  Rng rng(20001);
  double worstRoute = 0.0, worstLeibniz = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    const Signature sig = cycle_sig(trial, n);
    const GammaRep rep = build_gamma(sig);
    const Coframe cf = random_coframe(rng, sig);
    const VectorField xi = random_vfield(rng, n, 0.8);
    const SpinorForm psi = random_smooth_spinor(rng, n, rep.ns, 0.8);
    const auto pts = cube_points(n, 5, 20100 + static_cast<std::uint64_t>(trial));
    const SpinorForm r1 = kosmann_lie_spinor(cf, xi, psi, rep);
    const SpinorForm r2 = kosmann_lie_spinor_lambda_route(cf, xi, psi, rep);
    const SpinorForm r3 = kosmann_lie_spinor_reduction_route(cf, xi, psi, rep);
    worstRoute = std::max({worstRoute, spinor_max_diff(r1, r2, pts),
                           spinor_max_diff(r1, r3, pts)});
    const FormField eForm = coframe_form(cf);
    const SpinorForm lhs = kosmann_lie_spinor(cf, xi, clifford_pair(eForm, sig, rep, psi), rep);
    const SpinorForm rhs =
        spinor_add(clifford_pair(kosmann_lie_coframe(cf, xi), sig, rep, psi),
                   clifford_pair(eForm, sig, rep, r1));
    worstLeibniz = std::max(worstLeibniz, spinor_max_diff(lhs, rhs, pts));
  }
  CHECK(worstRoute < 1e-9);
  CHECK(worstLeibniz < 1e-8);
  ok = ok && worstRoute < 1e-9 && worstLeibniz < 1e-8;

  double worstCover = 0.0;
  for (const Signature sig : {Signature{0, 2}, Signature{0, 3}, Signature{1, 2},
                              Signature{1, 3}}) {
    const int n = sig.dim();
    const GammaRep rep = build_gamma(sig);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const double v = rng.uniform(-0.6, 0.6);
          A[static_cast<std::size_t>(a * n + b)] = sig.eta(a) * v;
          A[static_cast<std::size_t>(b * n + a)] = -sig.eta(b) * v;
        }
      const auto gamma = mat_exp_real(A, n);
      const CMat S = mat_exp_complex(spin_generator(A, sig, rep), rep.ns);
      const CMat Sinv = cmat_inverse(S, rep.ns);
      for (int a = 0; a < n; ++a) {
        const CMat conj = cmatmul(
            Sinv, cmatmul(rep.gamma[static_cast<std::size_t>(a)], S, rep.ns), rep.ns);
        CMat want(static_cast<std::size_t>(rep.ns) * rep.ns, cplx{});
        for (int b = 0; b < n; ++b) {
          const double c = gamma[static_cast<std::size_t>(a * n + b)];
          if (c == 0.0) continue;
          for (std::size_t k = 0; k < want.size(); ++k)
            want[k] += c * rep.gamma[static_cast<std::size_t>(b)][k];
        }
        for (std::size_t k = 0; k < want.size(); ++k)
          worstCover = std::max(worstCover, std::abs(conj[k] - want[k]));
      }
    }
  }
  CHECK(worstCover < 1e-8);
  ok = ok && worstCover < 1e-8;
  verdict(10, "spinor derivative: routes, clifford algebra, double cover", ok);
}

TEST_CASE("11: coframe variation is a lagrangian symmetry in dims 3 and 4") {
  Rng rng(21001);
  bool ok = true;
  double worst = 0.0;
  for (const int n : {3, 4}) {
    const Signature sig{n == 4 ? 1 : 0, n == 4 ? 3 : 3};
    const Coframe cf = random_coframe(rng, sig);
    const FormField e = coframe_form(cf);
    const VectorField xi = random_vfield(rng, n, 0.8);
    for (bool twist : {false, true}) {
      FormField omega = levi_civita(cf);
      if (twist) omega = form_add(omega, random_so_valued_form(rng, sig, 0.3));
      const FormField de = form_add(interior_product(xi, torsion(e, omega)),
                                    cov_d_vector(omega, interior_product(xi, e)));
      const FormField dw = interior_product(xi, curvature(omega));
      const FormField Lext = ec_lagrangian(extend_with_parameter(e, de),
                                           extend_with_parameter(omega, dw), sig);
      const int topRank = combo_rank(n + 1, combos(n, n)[0]);
      const SF dLdt = sf_partial(Lext.comps[0][static_cast<std::size_t>(topRank)], n);
      const FormField bnd = exterior_derivative(
          interior_product(xi, ec_lagrangian(e, omega, sig)));
      for (const auto& p :
           cube_points(n, 5, 21100 + static_cast<std::uint64_t>(n + (twist ? 10 : 0)))) {
        std::vector<double> pExt = p;
        pExt.push_back(0.0);
        const double dev = std::abs(sf_value(dLdt, pExt) - eval_form(bnd, p)[0][0]);
        worst = std::max(worst, dev);
        ok = ok && dev < 1e-6;
      }
    }
  }
  CHECK(worst < 1e-6);
  verdict(11, "coframe variation is a lagrangian symmetry in dims 3 and 4", ok);
}

TEST_CASE("12: expressions round-trip through printing, jets match differences") {
  Rng rng(22001);
  bool ok = true;
  double worstJet = 0.0;
  int count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(3));
    const auto coords = coord_names(k);
    const ExprPtr root = random_smooth_expr(rng, coords, 1.0);
    const SF f = sf_expr(Expression{root, coords});
    const std::string printed = print_expr(root);
    const SF g = sf_expr(parse_expression(printed, coords));
    const auto pts = cube_points(k, 3, 22100 + static_cast<std::uint64_t>(trial));
    for (const auto& p : pts) {
      const double fv = sf_value(f, p);
      const double gv = sf_value(g, p);
      ok = ok && std::abs(fv - gv) <= 1e-12 * std::max(1.0, std::abs(fv));
      for (int mu = 0; mu < k; ++mu) {
        const double jet = sf_value(sf_partial(f, mu), p);
        std::vector<double> hi = p, lo = p;
        const double h = 1e-5;
        hi[static_cast<std::size_t>(mu)] += h;
        lo[static_cast<std::size_t>(mu)] -= h;
        const double fd = (sf_value(f, hi) - sf_value(f, lo)) / (2.0 * h);
        const double rel = std::abs(jet - fd) / std::max(1.0, std::abs(jet));
        worstJet = std::max(worstJet, rel);
        ok = ok && rel < 1e-7;
        ++count;
      }
    }
  }
  CHECK(count >= 3000);
  CHECK(worstJet < 1e-7);
  verdict(12, "expressions round-trip through printing, jets match differences", ok);
}
