#pragma once

// Forward-mode jets: a value plus first derivatives along a set of active
// directions.  Nesting Jet<Jet<...>> gives higher mixed derivatives without
// symbolic differentiation.  A jet with an empty slot vector is a constant;
// binary ops broadcast constants against seeded operands.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace kosmann {

template <class T>
struct Jet {
  T v{};
  std::vector<T> d;

  Jet() = default;
  Jet(const T& value) : v(value) {}
  Jet(const T& value, std::size_t slots) : v(value), d(slots, T{}) {}
  // promote a plain number through any nesting depth
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Jet(double value) : v(value) {}

  std::size_t slots() const { return d.size(); }
};

using J0 = double;
using J1 = Jet<double>;
using J2 = Jet<J1>;
using J3 = Jet<J2>;
using J4 = Jet<J3>;

// ---- scalar helpers -------------------------------------------------------

inline double jet_value(double x) { return x; }
template <class T>
double jet_value(const Jet<T>& x) { return jet_value(x.v); }

inline bool jet_is_const(double) { return true; }
template <class T>
bool jet_is_const(const Jet<T>& x) {
  for (const auto& s : x.d)
    if (!(jet_value(s) == 0.0 && jet_is_const(s))) return false;
  return true;
}

// Serializes every stored double, in deterministic order.
inline void jet_dump(double x, std::vector<double>& out) { out.push_back(x); }
template <class T>
void jet_dump(const Jet<T>& x, std::vector<double>& out) {
  jet_dump(x.v, out);
  out.push_back(static_cast<double>(x.d.size()));
  for (const auto& s : x.d) jet_dump(s, out);
}

namespace detail {
template <class T>
std::size_t merged_slots(const Jet<T>& a, const Jet<T>& b) {
  const std::size_t na = a.slots(), nb = b.slots();
  if (na != 0 && nb != 0 && na != nb)
    throw std::logic_error("jet slot mismatch");
  return na != 0 ? na : nb;
}
template <class T>
const T& slot_or_zero(const Jet<T>& a, std::size_t i, const T& zero) {
  return i < a.slots() ? a.d[i] : zero;
}
}  // namespace detail

// ---- arithmetic -----------------------------------------------------------

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  const std::size_t n = detail::merged_slots(a, b);
  Jet<T> r(a.v + b.v);
  r.d.reserve(n);
  const T zero{};
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::slot_or_zero(a, i, zero) + detail::slot_or_zero(b, i, zero));
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  const std::size_t n = detail::merged_slots(a, b);
  Jet<T> r(a.v - b.v);
  r.d.reserve(n);
  const T zero{};
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::slot_or_zero(a, i, zero) - detail::slot_or_zero(b, i, zero));
  return r;
}

template <class T>
Jet<T> operator-(const Jet<T>& a) {
  Jet<T> r(-a.v);
  r.d.reserve(a.slots());
  for (const auto& s : a.d) r.d.push_back(-s);
  return r;
}

template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  const std::size_t n = detail::merged_slots(a, b);
  Jet<T> r(a.v * b.v);
  r.d.reserve(n);
  const T zero{};
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::slot_or_zero(a, i, zero) * b.v +
                  a.v * detail::slot_or_zero(b, i, zero));
  return r;
}

template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  const std::size_t n = detail::merged_slots(a, b);
  Jet<T> r(a.v / b.v);
  r.d.reserve(n);
  const T zero{};
  const T bb = b.v * b.v;
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back((detail::slot_or_zero(a, i, zero) * b.v -
                   a.v * detail::slot_or_zero(b, i, zero)) / bb);
  return r;
}

template <class T> Jet<T> operator+(const Jet<T>& a, double c) { return a + Jet<T>(T(c)); }
template <class T> Jet<T> operator+(double c, const Jet<T>& a) { return Jet<T>(T(c)) + a; }
template <class T> Jet<T> operator-(const Jet<T>& a, double c) { return a - Jet<T>(T(c)); }
template <class T> Jet<T> operator-(double c, const Jet<T>& a) { return Jet<T>(T(c)) - a; }
template <class T> Jet<T> operator*(const Jet<T>& a, double c) { return a * Jet<T>(T(c)); }
template <class T> Jet<T> operator*(double c, const Jet<T>& a) { return Jet<T>(T(c)) * a; }
template <class T> Jet<T> operator/(const Jet<T>& a, double c) { return a / Jet<T>(T(c)); }
template <class T> Jet<T> operator/(double c, const Jet<T>& a) { return Jet<T>(T(c)) / a; }

// ---- elementary functions (chain rule) ------------------------------------

namespace jm {

using std::abs; using std::atan2; using std::cos; using std::cosh; using std::exp;
using std::log; using std::sin; using std::sinh; using std::sqrt; using std::tan;
using std::tanh;

template <class T> Jet<T> sin(const Jet<T>&);
template <class T> Jet<T> cos(const Jet<T>&);
template <class T> Jet<T> tan(const Jet<T>&);
template <class T> Jet<T> sinh(const Jet<T>&);
template <class T> Jet<T> cosh(const Jet<T>&);
template <class T> Jet<T> tanh(const Jet<T>&);
template <class T> Jet<T> exp(const Jet<T>&);
template <class T> Jet<T> log(const Jet<T>&);
template <class T> Jet<T> sqrt(const Jet<T>&);
template <class T> Jet<T> abs(const Jet<T>&);
template <class T> Jet<T> atan2(const Jet<T>&, const Jet<T>&);

template <class T>
Jet<T> chain(const Jet<T>& a, const T& val, const T& deriv) {
  Jet<T> r(val);
  r.d.reserve(a.slots());
  for (const auto& s : a.d) r.d.push_back(deriv * s);
  return r;
}

template <class T> Jet<T> sin(const Jet<T>& a)  { return chain(a, sin(a.v), cos(a.v)); }
template <class T> Jet<T> cos(const Jet<T>& a)  { return chain(a, cos(a.v), -sin(a.v)); }
template <class T> Jet<T> tan(const Jet<T>& a)  {
  const T t = tan(a.v);
  return chain(a, t, T(1.0) + t * t);
}
template <class T> Jet<T> sinh(const Jet<T>& a) { return chain(a, sinh(a.v), cosh(a.v)); }
template <class T> Jet<T> cosh(const Jet<T>& a) { return chain(a, cosh(a.v), sinh(a.v)); }
template <class T> Jet<T> tanh(const Jet<T>& a) {
  const T t = tanh(a.v);
  return chain(a, t, T(1.0) - t * t);
}
template <class T> Jet<T> exp(const Jet<T>& a)  {
  const T e = exp(a.v);
  return chain(a, e, e);
}
template <class T> Jet<T> log(const Jet<T>& a)  { return chain(a, log(a.v), T(1.0) / a.v); }
template <class T> Jet<T> sqrt(const Jet<T>& a) {
  const T s = sqrt(a.v);
  return chain(a, s, T(0.5) / s);
}
template <class T> Jet<T> abs(const Jet<T>& a) {
  const double sgn = jet_value(a.v) < 0.0 ? -1.0 : (jet_value(a.v) > 0.0 ? 1.0 : 0.0);
  return chain(a, abs(a.v), T(sgn));
}
template <class T>
Jet<T> atan2(const Jet<T>& y, const Jet<T>& x) {
  const std::size_t n = detail::merged_slots(y, x);
  Jet<T> r(atan2(y.v, x.v));
  r.d.reserve(n);
  const T zero{};
  const T den = x.v * x.v + y.v * y.v;
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back((x.v * detail::slot_or_zero(y, i, zero) -
                   y.v * detail::slot_or_zero(x, i, zero)) / den);
  return r;
}
// abs on Jet values of T needs T's abs; double case is covered by std::abs.

// Integer power by repeated multiplication: stays valid for negative bases.
inline double powi(double a, long n) {
  if (n < 0) return 1.0 / powi(a, -n);
  double r = 1.0, b = a;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) r = r * b;
    b = b * b;
  }
  return r;
}
template <class T>
Jet<T> powi(const Jet<T>& a, long n) {
  if (n < 0) return Jet<T>(T(1.0)) / powi(a, -n);
  Jet<T> r(T(1.0)), b = a;
  for (long k = n; k > 0; k >>= 1) {
    if (k & 1) r = r * b;
    b = b * b;
  }
  return r;
}

}  // namespace jm

// Seeds coordinate jets: one active slot per coordinate of x.
inline std::vector<J1> seed_all(const std::vector<double>& x) {
  std::vector<J1> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    J1 j(x[i], x.size());
    j.d[i] = 1.0;
    out.push_back(std::move(j));
  }
  return out;
}

// Seeds a single direction on top of already-built values of type T.
template <class T>
std::vector<Jet<T>> seed_direction(const std::vector<T>& x, std::size_t dir) {
  std::vector<Jet<T>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Jet<T> j(x[i], 1);
    if (i == dir) j.d[0] = T(1.0);
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace kosmann
