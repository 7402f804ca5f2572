#include "kosmann/randomgen.hpp"

namespace kosmann {

namespace {

ExprPtr random_leaf(Rng& rng, const std::vector<std::string>& coords) {
  switch (rng.below(4)) {
    case 0: {
      // Small literals from a fixed menu keep printing exact.
      static const double menu[] = {0.0, 1.0, 2.0, 3.0, 0.5, 0.25, 1.5, 7.0};
      return ex_num(menu[rng.below(8)]);
    }
    case 1: {
      auto n = std::make_shared<Expr>();
      n->kind = ExprKind::Const;
      n->num = 3.14159265358979323846;
      n->name = "pi";
      return n;
    }
    default: {
      const int i = static_cast<int>(rng.below(coords.size()));
      return ex_var(i, coords[static_cast<std::size_t>(i)]);
    }
  }
}

}  // namespace

ExprPtr random_expr(Rng& rng, const std::vector<std::string>& coords, int depth) {
  if (depth <= 0 || rng.below(5) == 0) return random_leaf(rng, coords);
  switch (rng.below(8)) {
    case 0: return ex_bin(ExprKind::Add, random_expr(rng, coords, depth - 1),
                          random_expr(rng, coords, depth - 1));
    case 1: return ex_bin(ExprKind::Sub, random_expr(rng, coords, depth - 1),
                          random_expr(rng, coords, depth - 1));
    case 2: return ex_bin(ExprKind::Mul, random_expr(rng, coords, depth - 1),
                          random_expr(rng, coords, depth - 1));
    case 3: return ex_bin(ExprKind::Div, random_expr(rng, coords, depth - 1),
                          random_expr(rng, coords, depth - 1));
    case 4: return ex_bin(ExprKind::Pow, random_expr(rng, coords, depth - 1),
                          random_expr(rng, coords, depth - 1));
    case 5: return ex_neg(random_expr(rng, coords, depth - 1));
    case 6: {
      static const Func unary[] = {Func::Sin, Func::Cos, Func::Tan, Func::Sinh,
                                   Func::Cosh, Func::Tanh, Func::Exp, Func::Log,
                                   Func::Sqrt, Func::Abs};
      return ex_call(unary[rng.below(10)], {random_expr(rng, coords, depth - 1)});
    }
    default:
      return ex_call(Func::Atan2, {random_expr(rng, coords, depth - 1),
                                   random_expr(rng, coords, depth - 1)});
  }
}

namespace {

// c0 + sum c_i x_i with |c| <= scale.
ExprPtr random_linear(Rng& rng, const std::vector<std::string>& coords, double scale) {
  ExprPtr e = ex_num(rng.uniform(0.0, scale));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (rng.below(2) == 0) continue;
    const double c = rng.uniform(-scale, scale);
    ExprPtr term = ex_bin(ExprKind::Mul, ex_num(std::abs(c)),
                          ex_var(static_cast<int>(i), coords[i]));
    e = ex_bin(c < 0 ? ExprKind::Sub : ExprKind::Add, e, term);
  }
  return e;
}

ExprPtr random_smooth_factor(Rng& rng, const std::vector<std::string>& coords) {
  ExprPtr arg = random_linear(rng, coords, 0.7);
  switch (rng.below(4)) {
    case 0: return ex_call(Func::Sin, {arg});
    case 1: return ex_call(Func::Cos, {arg});
    case 2: return ex_call(Func::Tanh, {arg});
    default: return arg;
  }
}

}  // namespace

ExprPtr random_smooth_expr(Rng& rng, const std::vector<std::string>& coords,
                           double amplitude) {
  const int terms = rng.rangei(1, 3);
  ExprPtr e = nullptr;
  for (int t = 0; t < terms; ++t) {
    const double w = rng.uniform(0.2, 1.0) * amplitude / terms;
    ExprPtr f = ex_bin(ExprKind::Mul, ex_num(w), random_smooth_factor(rng, coords));
    if (rng.below(3) == 0)
      f = ex_bin(ExprKind::Mul, f, random_smooth_factor(rng, coords));
    if (!e)
      e = f;
    else
      e = ex_bin(rng.below(2) ? ExprKind::Add : ExprKind::Sub, e, f);
  }
  return e;
}

}  // namespace kosmann
