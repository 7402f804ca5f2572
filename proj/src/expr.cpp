#include "kosmann/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <map>

namespace kosmann {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Atan2: return "atan2";
  }
  return "?";
}

namespace {

const std::map<std::string, Func, std::less<>>& func_table() {
  static const std::map<std::string, Func, std::less<>> t = {
      {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
      {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh},
      {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt},
      {"abs", Func::Abs},   {"atan2", Func::Atan2}};
  return t;
}

int func_arity(Func f) { return f == Func::Atan2 ? 2 : 1; }

struct Token {
  enum class Kind { Num, Ident, Op, LParen, RParen, Comma, End };
  Kind kind;
  double num = 0.0;
  std::string text;
  char op = 0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) { advance(); }
  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.offset = pos_;
    if (pos_ >= src_.size()) {
      cur_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      cur_.num = std::strtod(begin, &end);
      if (end == begin) throw ParseError("malformed number", pos_);
      cur_.kind = Token::Kind::Num;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = pos_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      cur_.kind = Token::Kind::Ident;
      cur_.text = src_.substr(pos_, j - pos_);
      pos_ = j;
      return;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        cur_.kind = Token::Kind::Op;
        cur_.op = c;
        break;
      case '(': cur_.kind = Token::Kind::LParen; break;
      case ')': cur_.kind = Token::Kind::RParen; break;
      case ',': cur_.kind = Token::Kind::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token cur_;
};

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& coords)
      : lex_(text), coords_(coords) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::End)
      throw ParseError("unexpected trailing input", t.offset);
    return e;
  }

 private:
  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    while (lex_.peek().kind == Token::Kind::Op &&
           (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      const Token t = lex_.take();
      ExprPtr rhs = parse_term();
      e = ex_bin(t.op == '+' ? ExprKind::Add : ExprKind::Sub, e, rhs);
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    while (lex_.peek().kind == Token::Kind::Op &&
           (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      const Token t = lex_.take();
      ExprPtr rhs = parse_unary();
      e = ex_bin(t.op == '*' ? ExprKind::Mul : ExprKind::Div, e, rhs);
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (lex_.peek().kind == Token::Kind::Op && lex_.peek().op == '-') {
      lex_.take();
      return ex_neg(parse_unary());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (lex_.peek().kind == Token::Kind::Op && lex_.peek().op == '^') {
      lex_.take();
      // Right-associative; the exponent may carry a unary minus.
      ExprPtr expo = parse_unary();
      return ex_bin(ExprKind::Pow, base, expo);
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::Num:
        return ex_num(t.num);
      case Token::Kind::Ident:
        return resolve_ident(t);
      case Token::Kind::LParen: {
        ExprPtr e = parse_sum();
        expect_rparen();
        return e;
      }
      default:
        throw ParseError("expected a value", t.offset);
    }
  }

  ExprPtr resolve_ident(const Token& t) {
    if (lex_.peek().kind == Token::Kind::LParen) {
      const auto it = func_table().find(t.text);
      if (it == func_table().end())
        throw ParseError("unknown function '" + t.text + "'", t.offset);
      lex_.take();  // '('
      std::vector<ExprPtr> args;
      args.push_back(parse_sum());
      while (lex_.peek().kind == Token::Kind::Comma) {
        lex_.take();
        args.push_back(parse_sum());
      }
      expect_rparen();
      if (static_cast<int>(args.size()) != func_arity(it->second))
        throw ParseError("function '" + t.text + "' expects " +
                             std::to_string(func_arity(it->second)) + " argument(s)",
                         t.offset);
      auto e = ex_call(it->second, std::move(args));
      const_cast<Expr*>(e.get())->offset = t.offset;
      return e;
    }
    if (t.text == "pi") {
      auto n = std::make_shared<Expr>();
      n->kind = ExprKind::Const;
      n->num = 3.14159265358979323846;
      n->name = "pi";
      n->offset = t.offset;
      return n;
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == t.text) {
        auto e = ex_var(static_cast<int>(i), t.text);
        const_cast<Expr*>(e.get())->offset = t.offset;
        return e;
      }
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.offset);
  }

  void expect_rparen() {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::RParen)
      throw ParseError("expected ')'", t.offset);
  }

  Lexer lex_;
  const std::vector<std::string>& coords_;
};

}  // namespace

Expression parse_expression(const std::string& text,
                            const std::vector<std::string>& coords) {
  for (const auto& c : coords) {
    if (c == "pi" || func_table().count(c))
      throw ValidationError("coordinate name '" + c + "' shadows a builtin");
  }
  Parser p(text, coords);
  return Expression{p.parse(), coords};
}

ExprPtr ex_num(double v) {
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::Number;
  n->num = v;
  return n;
}

ExprPtr ex_var(int index, const std::string& name) {
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::Var;
  n->var = index;
  n->name = name;
  return n;
}

ExprPtr ex_neg(ExprPtr a) {
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::Neg;
  n->args = {std::move(a)};
  return n;
}

ExprPtr ex_bin(ExprKind op, ExprPtr a, ExprPtr b) {
  auto n = std::make_shared<Expr>();
  n->kind = op;
  n->args = {std::move(a), std::move(b)};
  return n;
}

ExprPtr ex_call(Func f, std::vector<ExprPtr> args) {
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::Call;
  n->func = f;
  n->args = std::move(args);
  return n;
}

namespace {

// Precedence levels used by the printer: 0 additive, 1 multiplicative,
// 2 unary minus, 3 power, 4 atom.
int node_prec(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Add: case ExprKind::Sub: return 0;
    case ExprKind::Mul: case ExprKind::Div: return 1;
    case ExprKind::Neg: return 2;
    case ExprKind::Pow: return 3;
    default: return 4;
  }
}

void print_number(double v, std::string& out) {
  char buf[40];
  // Shortest representation that round-trips the double.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  out += buf;
}

void print_node(const Expr& e, int ctx, std::string& out) {
  const int prec = node_prec(e);
  const bool paren = prec < ctx;
  if (paren) out += '(';
  switch (e.kind) {
    case ExprKind::Number: print_number(e.num, out); break;
    case ExprKind::Const: out += e.name; break;
    case ExprKind::Var: out += e.name; break;
    case ExprKind::Neg:
      out += '-';
      // A nested unary minus is parenthesized for readability.
      print_node(*e.args[0], e.args[0]->kind == ExprKind::Neg ? 4 : 2, out);
      break;
    case ExprKind::Add:
      print_node(*e.args[0], 0, out);
      out += " + ";
      print_node(*e.args[1], 1, out);
      break;
    case ExprKind::Sub:
      print_node(*e.args[0], 0, out);
      out += " - ";
      print_node(*e.args[1], 1, out);
      break;
    case ExprKind::Mul:
      print_node(*e.args[0], 1, out);
      out += "*";
      print_node(*e.args[1], 2, out);
      break;
    case ExprKind::Div:
      print_node(*e.args[0], 1, out);
      out += "/";
      print_node(*e.args[1], 2, out);
      break;
    case ExprKind::Pow:
      print_node(*e.args[0], 4, out);
      out += "^";
      print_node(*e.args[1], 3, out);
      break;
    case ExprKind::Call:
      out += func_name(e.func);
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*e.args[i], 0, out);
      }
      out += ')';
      break;
  }
  if (paren) out += ')';
}

}  // namespace

std::string print_expr(const ExprPtr& e) {
  std::string out;
  print_node(*e, 0, out);
  return out;
}

std::string print_expression(const Expression& e) { return print_expr(e.root); }

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Number:
    case ExprKind::Const:
      return a->num == b->num;
    case ExprKind::Var:
      return a->var == b->var;
    case ExprKind::Call:
      if (a->func != b->func) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace detail {
[[noreturn]] void throw_domain(const char* what, const Expr& node) {
  auto copy = std::make_shared<Expr>(node);
  throw DomainError(std::string(what) + " in '" + print_expr(copy) + "'");
}
}  // namespace detail

Grad eval_grad(const Expression& e, std::span<const double> x) {
  std::vector<double> pt(x.begin(), x.end());
  const auto seeded = seed_all(pt);
  const J1 r = eval_expr<J1>(*e.root, std::span<const J1>(seeded));
  Grad g;
  g.value = r.v;
  g.d.assign(pt.size(), 0.0);
  for (std::size_t i = 0; i < r.d.size(); ++i) g.d[i] = r.d[i];
  return g;
}

Hessian eval_hessian(const Expression& e, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> pt(x.begin(), x.end());
  const auto inner = seed_all(pt);
  std::vector<J2> seeded;
  seeded.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    J2 j(inner[i], n);
    for (std::size_t k = 0; k < n; ++k) j.d[k] = J1(i == k ? 1.0 : 0.0);
    seeded.push_back(std::move(j));
  }
  const J2 r = eval_expr<J2>(*e.root, std::span<const J2>(seeded));
  Hessian h;
  h.value = r.v.v;
  h.grad.assign(n, 0.0);
  h.h.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n && i < r.v.d.size(); ++i) h.grad[i] = r.v.d[i];
  for (std::size_t i = 0; i < n && i < r.d.size(); ++i)
    for (std::size_t k = 0; k < n && k < r.d[i].d.size(); ++k)
      h.h[i * n + k] = r.d[i].d[k];
  return h;
}

}  // namespace kosmann
