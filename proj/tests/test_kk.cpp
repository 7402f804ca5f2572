#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "kosmann/chart.hpp"
#include "kosmann/frame.hpp"
#include "kosmann/kk.hpp"
#include "kosmann/quadrature.hpp"
#include "testutil.hpp"

using namespace kosmann;
using namespace kosmann::testutil;

namespace {

VectorField coordinate_field(int n, int slot) {
  VectorField a;
  a.dim = n;
  a.comps.assign(static_cast<std::size_t>(n), sf_const(0.0));
  a.comps[static_cast<std::size_t>(slot)] = sf_const(1.0);
  return a;
}

// chart (x0, x1, x2) = (polar angle, azimuth, circle coordinate)
KKSetup product_setup() {
  const auto c = coord_names(3);
  KKSetup s;
  s.e.sig = {0, 3};
  s.e.e = {{sf_const(1.0), sf_const(0.0), sf_const(0.0)},
           {sf_const(0.0), sf_expr(parse_expression("sin(x0)", c)), sf_const(0.0)},
           {sf_const(0.0), sf_const(0.0), sf_const(1.0)}};
  s.fund = {coordinate_field(3, 2)};
  s.fiberPeriods = {2.0 * M_PI};
  s.samplePts = sample_box({{{0.4, 2.7}}, {{0.3, 5.9}}, {{0.2, 5.8}}}, 8, 3101);
  return s;
}

// left-invariant coframe of the unit three-sphere in Euler angles
// (x0, x1, x2) = (polar, azimuth, fiber), fiber period 4 pi
KKSetup hopf_setup() {
  const auto c = coord_names(3);
  auto ex = [&](const char* s) { return sf_expr(parse_expression(s, c)); };
  KKSetup s;
  s.e.sig = {0, 3};
  s.e.e = {{ex("cos(x2)/2"), ex("sin(x2)*sin(x0)/2"), sf_const(0.0)},
           {ex("0-sin(x2)/2"), ex("cos(x2)*sin(x0)/2"), sf_const(0.0)},
           {sf_const(0.0), ex("cos(x0)/2"), sf_const(0.5)}};
  s.fund = {coordinate_field(3, 2)};
  s.fiberPeriods = {4.0 * M_PI};
  s.samplePts = sample_box({{{0.4, 2.7}}, {{0.3, 5.9}}, {{0.3, 11.9}}}, 8, 3102);
  return s;
}

KKSetup warped_setup() {
  const auto c = coord_names(3);
  auto ex = [&](const char* s) { return sf_expr(parse_expression(s, c)); };
  KKSetup s;
  s.e.sig = {0, 3};
  s.e.e = {{sf_const(1.0), sf_const(0.0), sf_const(0.0)},
           {sf_const(0.0), sf_const(1.0), sf_const(0.0)},
           {sf_const(0.0), sf_const(0.0), ex("exp(x0/4 - 3*x1/20)")}};
  s.fund = {coordinate_field(3, 2)};
  s.samplePts = cube_points(3, 8, 3103);
  return s;
}

FormField constant_0form(ValueSpace vs, int dim, double v) {
  FormField f = form_zero(vs, 0, dim);
  f.comps[0][0] = sf_const(v);
  return f;
}

}  // namespace

TEST_CASE("gauss-legendre quadrature integrates smooth functions") {
  const QuadRule r = gauss_legendre(64);
  double wsum = 0.0;
  for (double w : r.w) wsum += w;
  CHECK(std::abs(wsum - 2.0) < 1e-13);
  for (int i = 0; i < 32; ++i)
    CHECK(std::abs(r.x[static_cast<std::size_t>(i)] +
                   r.x[static_cast<std::size_t>(63 - i)]) < 1e-14);

  const auto c1 = coord_names(1);
  const SF sine = sf_expr(parse_expression("sin(x0)", c1));
  CHECK(std::abs(integrate_box(sine, {0}, {{{0.0, M_PI}}}, {0.0}) - 2.0) < 1e-13);

  const auto c2 = coord_names(2);
  const SF sq = sf_expr(parse_expression("(x0 + x1)^2", c2));
  CHECK(std::abs(integrate_box(sq, {0, 1}, {{{0.0, 1.0}}, {{0.0, 1.0}}}, {0.0, 0.0}) -
                 7.0 / 6.0) < 1e-13);

  CHECK_THROWS_AS(integrate_box(sine, {}, {}, {0.0}), ValidationError);
  CHECK_THROWS_AS(integrate_box(sine, {2}, {{{0.0, 1.0}}}, {0.0}), ValidationError);
}

TEST_CASE("product bundle splits off a flat circle") {
  const KKSetup s = product_setup();
  const auto& pts = s.samplePts;
  const KKConnection conn = kk_connection_form(s);

  FormField dz = form_zero(vector_space(1), 1, 3);
  dz.comps[0][2] = sf_const(1.0);
  CHECK(form_max_diff(conn.theta, dz, pts) < 1e-12);
  CHECK(form_max_diff(conn.gV, constant_0form(matrix_space(1), 3, 1.0), pts) < 1e-12);

  // unit pairing with the fundamental field
  const FormField pairing = interior_product(s.fund[0], conn.theta);
  CHECK(form_max_diff(pairing, constant_0form(vector_space(1), 3, 1.0), pts) < 1e-12);

  // base metric is the sphere block
  const auto c = coord_names(3);
  SymTensor hexp;
  hexp.dim = 3;
  hexp.g.assign(9, sf_const(0.0));
  hexp.g[0] = sf_const(1.0);
  hexp.g[4] = sf_expr(parse_expression("sin(x0)^2", c));
  CHECK(sym_max_diff(conn.h, hexp, pts) < 1e-12);

  const SymTensor ginv = dual_metric(metric_from_coframe(s.e));
  const VerticalFrame vert = gram_schmidt_vertical(conn.theta, ginv, pts);
  CHECK(vert.signs == std::vector<int>{1});
  CHECK(form_max_diff(vert.frame, dz, pts) < 1e-12);
  CHECK(form_max_diff(vert.coeff, constant_0form(matrix_space(1), 3, 1.0), pts) < 1e-12);

  const BaseFrame base = signature_cholesky(conn.h, pts);
  CHECK(base.sig.p == 0);
  CHECK(base.sig.q == 2);
  FormField legs = form_zero(vector_space(2), 1, 3);
  legs.comps[0][0] = sf_const(1.0);
  legs.comps[1][1] = sf_expr(parse_expression("sin(x0)", c));
  CHECK(form_max_diff(base.legs, legs, pts) < 1e-12);

  const Coframe adapted = adapted_coframe(s, base, vert);
  CHECK(sym_max_diff(metric_from_coframe(adapted), metric_from_coframe(s.e), pts) < 1e-12);

  const GaugeVerdict v = adapted_gauge_check(s, adapted);
  CHECK(v.pass);
  CHECK(v.residual < 1e-12);
  CHECK(v.naiveResidual < 1e-12);

  const ReducedFields red = extract_fields(s);
  CHECK(form_max_diff(red.phi, constant_0form(matrix_space(1), 3, 1.0), pts) < 1e-12);

  CHECK(std::abs(monopole_number(conn.theta, 0, {0, 1}, {{{0.4, 2.7}}, {{0.3, 5.9}}},
                                 {1.0, 1.0, 1.0}, s.fiberPeriods[0])) < 1e-12);
}

TEST_CASE("warped product rescales the fiber leg") {
  const KKSetup s = warped_setup();
  const auto& pts = s.samplePts;
  const auto c = coord_names(3);
  const SF f = sf_expr(parse_expression("exp(x0/4 - 3*x1/20)", c));

  const KKConnection conn = kk_connection_form(s);
  FormField dz = form_zero(vector_space(1), 1, 3);
  dz.comps[0][2] = sf_const(1.0);
  CHECK(form_max_diff(conn.theta, dz, pts) < 1e-10);

  FormField f2 = form_zero(matrix_space(1), 0, 3);
  f2.comps[0][0] = sf_mul(f, f);
  CHECK(form_max_diff(conn.gV, f2, pts) < 1e-10);

  SymTensor hexp;
  hexp.dim = 3;
  hexp.g.assign(9, sf_const(0.0));
  hexp.g[0] = sf_const(1.0);
  hexp.g[4] = sf_const(1.0);
  CHECK(sym_max_diff(conn.h, hexp, pts) < 1e-10);

  const ReducedFields red = extract_fields(s);
  FormField phiexp = form_zero(matrix_space(1), 0, 3);
  phiexp.comps[0][0] = f;
  CHECK(form_max_diff(red.phi, phiexp, pts) < 1e-10);

  const SymTensor ginv = dual_metric(metric_from_coframe(s.e));
  const VerticalFrame vert = gram_schmidt_vertical(conn.theta, ginv, pts);
  const Coframe adapted = adapted_coframe(s, signature_cholesky(conn.h, pts), vert);
  CHECK(sym_max_diff(metric_from_coframe(adapted), metric_from_coframe(s.e), pts) < 1e-10);
  const GaugeVerdict v = adapted_gauge_check(s, adapted);
  CHECK(v.pass);
  CHECK(v.naiveResidual < 1e-8);
}

TEST_CASE("hopf fibration reduces to the half-radius sphere") {
  const KKSetup s = hopf_setup();
  const auto& pts = s.samplePts;
  const auto c = coord_names(3);

  // invariance holds in the kosmann sense but not naively
  CHECK(form_max_abs(kosmann_lie_coframe(s.e, s.fund[0]), pts) < 1e-9);
  CHECK(form_max_abs(lie_derivative_form(s.fund[0], coframe_form(s.e)), pts) > 0.1);

  const KKConnection conn = kk_connection_form(s);
  FormField texp = form_zero(vector_space(1), 1, 3);
  texp.comps[0][1] = sf_expr(parse_expression("cos(x0)", c));
  texp.comps[0][2] = sf_const(1.0);
  CHECK(form_max_diff(conn.theta, texp, pts) < 1e-9);
  CHECK(form_max_diff(conn.gV, constant_0form(matrix_space(1), 3, 0.25), pts) < 1e-10);

  SymTensor hexp;
  hexp.dim = 3;
  hexp.g.assign(9, sf_const(0.0));
  hexp.g[0] = sf_const(0.25);
  hexp.g[4] = sf_expr(parse_expression("sin(x0)^2/4", c));
  CHECK(sym_max_diff(conn.h, hexp, pts) < 1e-9);

  const SymTensor ginv = dual_metric(metric_from_coframe(s.e));
  const VerticalFrame vert = gram_schmidt_vertical(conn.theta, ginv, pts);
  CHECK(form_max_diff(vert.coeff, constant_0form(matrix_space(1), 3, 0.5), pts) < 1e-10);

  const BaseFrame base = signature_cholesky(conn.h, pts);
  FormField legs = form_zero(vector_space(2), 1, 3);
  legs.comps[0][0] = sf_const(0.5);
  legs.comps[1][1] = sf_expr(parse_expression("sin(x0)/2", c));
  CHECK(form_max_diff(base.legs, legs, pts) < 1e-9);

  const Coframe adapted = adapted_coframe(s, base, vert);
  CHECK(sym_max_diff(metric_from_coframe(adapted), metric_from_coframe(s.e), pts) < 1e-9);

  const GaugeVerdict v = adapted_gauge_check(s, adapted);
  CHECK(v.pass);
  CHECK(v.residual < 1e-8);
  CHECK(v.naiveResidual < 1e-8);

  // naive and kosmann derivatives agree on the adapted coframe itself
  CHECK(form_max_diff(kosmann_lie_coframe(adapted, s.fund[0]),
                      lie_derivative_form(s.fund[0], coframe_form(adapted)), pts) < 1e-8);

  const ReducedFields red = extract_fields(s);
  CHECK(form_max_diff(red.phi, constant_0form(matrix_space(1), 3, 0.5), pts) < 1e-10);
  CHECK(red.signs == std::vector<int>{1});

  // an invariant block rotation of the adapted coframe keeps both residuals
  FormField rot = form_zero(matrix_space(3), 0, 3);
  rot.comps[0][0] = sf_const(std::cos(0.9));
  rot.comps[1][0] = sf_const(-std::sin(0.9));
  rot.comps[3][0] = sf_const(std::sin(0.9));
  rot.comps[4][0] = sf_const(std::cos(0.9));
  rot.comps[8][0] = sf_const(1.0);
  const Coframe rotated =
      coframe_from_form(gauge_transform_coframe(rot, coframe_form(adapted)), adapted.sig);
  const GaugeVerdict vr = adapted_gauge_check(s, rotated);
  CHECK(vr.pass);
  CHECK(vr.naiveResidual < 1e-8);

  // a fiber-dependent rotation breaks the gauge
  auto ex = [&](const char* t) { return sf_expr(parse_expression(t, c)); };
  FormField bad = form_zero(matrix_space(3), 0, 3);
  bad.comps[0][0] = ex("cos(7*x2/10)");
  bad.comps[1][0] = ex("0-sin(7*x2/10)");
  bad.comps[3][0] = ex("sin(7*x2/10)");
  bad.comps[4][0] = ex("cos(7*x2/10)");
  bad.comps[8][0] = sf_const(1.0);
  const Coframe misgauged =
      coframe_from_form(gauge_transform_coframe(bad, coframe_form(adapted)), adapted.sig);
  const GaugeVerdict vb = adapted_gauge_check(s, misgauged);
  CHECK_FALSE(vb.pass);
  CHECK(vb.residual > 0.01);

  // monopole flux through the base box
  const double mono = monopole_number(conn.theta, 0, {0, 1}, {{{0.0, M_PI}}, {{0.0, 2.0 * M_PI}}},
                                      {1.0, 1.0, 1.0}, s.fiberPeriods[0]);
  CHECK(std::abs(mono + 1.0) < 1e-3);
  const double monoFlip = monopole_number(conn.theta, 0, {1, 0}, {{{0.0, 2.0 * M_PI}}, {{0.0, M_PI}}},
                                          {1.0, 1.0, 1.0}, s.fiberPeriods[0]);
  CHECK(std::abs(monoFlip - 1.0) < 1e-3);
}

TEST_CASE("gram-schmidt handles oblique and timelike fibers") {
  // two oblique flat fiber legs with gram matrix [[1, 1/2], [1/2, 1]]
  FormField theta = form_zero(vector_space(2), 1, 4);
  theta.comps[0][2] = sf_const(1.0);
  theta.comps[1][2] = sf_const(0.5);
  theta.comps[1][3] = sf_const(std::sqrt(3.0) / 2.0);
  SymTensor flat;
  flat.dim = 4;
  flat.g.assign(16, sf_const(0.0));
  for (int i = 0; i < 4; ++i) flat.g[static_cast<std::size_t>(5 * i)] = sf_const(1.0);
  const auto pts = cube_points(4, 4, 3104);

  const VerticalFrame vert = gram_schmidt_vertical(theta, flat, pts);
  CHECK(vert.signs == std::vector<int>({1, 1}));
  FormField fexp = form_zero(vector_space(2), 1, 4);
  fexp.comps[0][2] = sf_const(1.0);
  fexp.comps[1][3] = sf_const(1.0);
  CHECK(form_max_diff(vert.frame, fexp, pts) < 1e-12);
  FormField cexp = form_zero(matrix_space(2), 0, 4);
  cexp.comps[0][0] = sf_const(1.0);
  cexp.comps[2][0] = sf_const(-1.0 / std::sqrt(3.0));
  cexp.comps[3][0] = sf_const(2.0 / std::sqrt(3.0));
  CHECK(form_max_diff(vert.coeff, cexp, pts) < 1e-12);
  // structurally triangular
  CHECK(sf_is_zero(vert.coeff.comps[1][0]));

  // timelike fiber leg on a minkowski chart
  FormField dt = form_zero(vector_space(1), 1, 2);
  dt.comps[0][0] = sf_const(1.0);
  SymTensor mink;
  mink.dim = 2;
  mink.g = {sf_const(-1.0), sf_const(0.0), sf_const(0.0), sf_const(1.0)};
  const auto pts2 = cube_points(2, 4, 3105);
  const VerticalFrame tl = gram_schmidt_vertical(dt, mink, pts2);
  CHECK(tl.signs == std::vector<int>{-1});
  CHECK(form_max_diff(tl.frame, dt, pts2) < 1e-12);

  FormField degenerate = form_zero(vector_space(1), 1, 2);
  CHECK_THROWS_AS(gram_schmidt_vertical(degenerate, mink, pts2), ValidationError);
}

TEST_CASE("setup validation rejects broken hypotheses") {
  // null fundamental field on a minkowski chart
  {
    KKSetup s;
    s.e.sig = {1, 1};
    s.e.e = {{sf_const(1.0), sf_const(0.0)}, {sf_const(0.0), sf_const(1.0)}};
    VectorField a;
    a.dim = 2;
    a.comps = {sf_const(1.0), sf_const(1.0)};
    s.fund = {a};
    s.samplePts = cube_points(2, 4, 3106);
    CHECK_THROWS_AS(kk_connection_form(s), ValidationError);
  }
  // non-abelian pair of fields
  {
    KKSetup s;
    s.e.sig = {0, 4};
    s.e.e.assign(4, std::vector<SF>(4, sf_const(0.0)));
    for (int i = 0; i < 4; ++i) s.e.e[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = sf_const(1.0);
    VectorField b = coordinate_field(4, 3);
    b.comps[3] = sf_coord(2);
    s.fund = {coordinate_field(4, 2), b};
    s.samplePts = cube_points(4, 4, 3107);
    CHECK_THROWS_AS(kk_connection_form(s), ValidationError);
  }
  // coframe that is not invariant along the fiber
  {
    const auto c = coord_names(3);
    KKSetup s;
    s.e.sig = {0, 3};
    s.e.e = {{sf_const(1.0), sf_const(0.0), sf_const(0.0)},
             {sf_const(0.0), sf_const(1.0), sf_const(0.0)},
             {sf_const(0.0), sf_const(0.0),
              sf_expr(parse_expression("1 + sin(x2)/3", c))}};
    s.fund = {coordinate_field(3, 2)};
    s.samplePts = cube_points(3, 4, 3108);
    CHECK_THROWS_AS(kk_connection_form(s), ValidationError);
  }
}
