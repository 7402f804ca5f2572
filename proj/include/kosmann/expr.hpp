#pragma once

// Scalar expression language over named chart coordinates.
//
// Grammar (lowest to highest precedence):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?          right-associative
//   primary:= number | identifier | identifier '(' args ')' | '(' expr ')'
//
// Functions: sin cos tan sinh cosh tanh exp log sqrt abs atan2(y,x).
// Constant: pi.  Evaluation is generic over nested jets; division by zero,
// log of a nonpositive value and sqrt of a negative value raise DomainError
// instead of propagating non-finite values.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kosmann/error.hpp"
#include "kosmann/jet.hpp"

namespace kosmann {

enum class ExprKind { Number, Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs, Atan2 };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  double num = 0.0;          // Number / Const value
  int var = -1;              // Var: coordinate index
  std::string name;          // Var / Const name
  Func func = Func::Sin;     // Call
  std::vector<ExprPtr> args;
  std::size_t offset = 0;    // byte offset in the source, for diagnostics
};

// A parsed expression bound to an ordered coordinate list.
struct Expression {
  ExprPtr root;
  std::vector<std::string> coords;
};

Expression parse_expression(const std::string& text,
                            const std::vector<std::string>& coords);

// Canonical form: minimal parentheses, stable number formatting.  Reparsing
// the result yields a structurally identical tree.
std::string print_expr(const ExprPtr& e);
std::string print_expression(const Expression& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

const char* func_name(Func f);

// Node constructors for programmatic building (tests, generated charts).
ExprPtr ex_num(double v);
ExprPtr ex_var(int index, const std::string& name);
ExprPtr ex_neg(ExprPtr a);
ExprPtr ex_bin(ExprKind op, ExprPtr a, ExprPtr b);
ExprPtr ex_call(Func f, std::vector<ExprPtr> args);

// ---- generic evaluation ---------------------------------------------------

namespace detail {

[[noreturn]] void throw_domain(const char* what, const Expr& node);

inline bool integral_exponent(double v, long& n) {
  if (!(v >= -1024.0 && v <= 1024.0)) return false;
  const double r = std::nearbyint(v);
  if (r != v) return false;
  n = static_cast<long>(r);
  return true;
}

template <class T>
T eval_pow(const Expr& node, const T& base, const T& expo) {
  long n = 0;
  if (jet_is_const(expo) && integral_exponent(jet_value(expo), n)) {
    if (n < 0 && jet_value(base) == 0.0) throw_domain("division by zero", node);
    return jm::powi(base, n);
  }
  const double bv = jet_value(base);
  if (bv < 0.0) throw_domain("negative base with non-integer exponent", node);
  if (bv == 0.0) throw_domain("zero base with non-integer exponent", node);
  return jm::exp(expo * jm::log(base));
}

}  // namespace detail

template <class T>
T eval_expr(const Expr& node, std::span<const T> vals) {
  switch (node.kind) {
    case ExprKind::Number:
    case ExprKind::Const:
      return T(node.num);
    case ExprKind::Var:
      return vals[static_cast<std::size_t>(node.var)];
    case ExprKind::Neg:
      return -eval_expr(*node.args[0], vals);
    case ExprKind::Add:
      return eval_expr(*node.args[0], vals) + eval_expr(*node.args[1], vals);
    case ExprKind::Sub:
      return eval_expr(*node.args[0], vals) - eval_expr(*node.args[1], vals);
    case ExprKind::Mul:
      return eval_expr(*node.args[0], vals) * eval_expr(*node.args[1], vals);
    case ExprKind::Div: {
      const T a = eval_expr(*node.args[0], vals);
      const T b = eval_expr(*node.args[1], vals);
      if (jet_value(b) == 0.0) detail::throw_domain("division by zero", node);
      return a / b;
    }
    case ExprKind::Pow: {
      const T a = eval_expr(*node.args[0], vals);
      const T b = eval_expr(*node.args[1], vals);
      return detail::eval_pow(node, a, b);
    }
    case ExprKind::Call: {
      const T a = eval_expr(*node.args[0], vals);
      switch (node.func) {
        case Func::Sin:  return jm::sin(a);
        case Func::Cos:  return jm::cos(a);
        case Func::Tan:  return jm::tan(a);
        case Func::Sinh: return jm::sinh(a);
        case Func::Cosh: return jm::cosh(a);
        case Func::Tanh: return jm::tanh(a);
        case Func::Exp:  return jm::exp(a);
        case Func::Log:
          if (jet_value(a) <= 0.0) detail::throw_domain("log of a nonpositive value", node);
          return jm::log(a);
        case Func::Sqrt:
          if (jet_value(a) < 0.0) detail::throw_domain("sqrt of a negative value", node);
          return jm::sqrt(a);
        case Func::Abs:  return jm::abs(a);
        case Func::Atan2: {
          const T b = eval_expr(*node.args[1], vals);
          if (jet_value(a) == 0.0 && jet_value(b) == 0.0)
            detail::throw_domain("atan2 at the origin", node);
          return jm::atan2(a, b);
        }
      }
      throw InternalError("unhandled function");
    }
  }
  throw InternalError("unhandled expression node");
}

inline double eval(const Expression& e, std::span<const double> vals) {
  return eval_expr<double>(*e.root, vals);
}
inline double eval(const Expression& e, std::initializer_list<double> vals) {
  return eval_expr<double>(*e.root, std::span<const double>(vals.begin(), vals.size()));
}

// Value and gradient in one pass.
struct Grad {
  double value;
  std::vector<double> d;
};
Grad eval_grad(const Expression& e, std::span<const double> x);

// Dense second derivatives via one nested-jet pass.
struct Hessian {
  double value;
  std::vector<double> grad;
  std::vector<double> h;  // row-major dim*dim, symmetric
};
Hessian eval_hessian(const Expression& e, std::span<const double> x);

}  // namespace kosmann
