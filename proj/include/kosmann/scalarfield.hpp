#pragma once

// Lazily-evaluated scalar functions on a chart.  A field can be evaluated at
// plain points or at nested jets up to depth 4; derived operators (partial
// derivatives, compositions, pointwise linear algebra) stay evaluable at any
// remaining depth, so stacked geometric operators never need symbolic
// differentiation.  Depth 4 covers a one-parameter directional derivative of
// second-order curvature data built over first-order connection data.

#include <any>
#include <memory>
#include <span>
#include <vector>

#include "kosmann/error.hpp"
#include "kosmann/expr.hpp"
#include "kosmann/jet.hpp"

namespace kosmann {

class ScalarField;
using SF = std::shared_ptr<const ScalarField>;

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double ev0(std::span<const double> x) const = 0;
  virtual J1 ev1(std::span<const J1> x) const = 0;
  virtual J2 ev2(std::span<const J2> x) const = 0;
  virtual J3 ev3(std::span<const J3> x) const = 0;
  virtual J4 ev4(std::span<const J4> x) const = 0;
};

template <class T>
T sf_eval(const ScalarField& f, std::span<const T> x);
template <> inline double sf_eval<double>(const ScalarField& f, std::span<const double> x) { return f.ev0(x); }
template <> inline J1 sf_eval<J1>(const ScalarField& f, std::span<const J1> x) { return f.ev1(x); }
template <> inline J2 sf_eval<J2>(const ScalarField& f, std::span<const J2> x) { return f.ev2(x); }
template <> inline J3 sf_eval<J3>(const ScalarField& f, std::span<const J3> x) { return f.ev3(x); }
template <> inline J4 sf_eval<J4>(const ScalarField& f, std::span<const J4> x) { return f.ev4(x); }

template <class T> constexpr int jet_depth_of = -1;
template <> inline constexpr int jet_depth_of<double> = 0;
template <> inline constexpr int jet_depth_of<J1> = 1;
template <> inline constexpr int jet_depth_of<J2> = 2;
template <> inline constexpr int jet_depth_of<J3> = 3;
template <> inline constexpr int jet_depth_of<J4> = 4;

// ---- evaluation cache -----------------------------------------------------
//
// Repeated subfields (an inverse-coframe entry under several consumers, say)
// get re-evaluated at the same point many times in a deep composite.  An
// EvalScope memoizes (node, depth, input bits) -> result for its lifetime.
// Purely an optimization: results are bit-identical with and without it.

namespace cachedetail {

struct Key {
  const void* node;
  int depth;
  std::vector<double> bits;
  bool operator==(const Key& o) const {
    return node == o.node && depth == o.depth && bits == o.bits;
  }
};
struct KeyHash {
  std::size_t operator()(const Key& k) const;
};

bool cache_active();
const std::any* cache_find(const Key& k);
void cache_store(Key k, std::any v);

template <class T>
void dump_inputs(std::span<const T> x, std::vector<double>& out) {
  for (const auto& v : x) jet_dump(v, out);
}

}  // namespace cachedetail

class EvalScope {
 public:
  EvalScope();
  ~EvalScope();
  EvalScope(const EvalScope&) = delete;
  EvalScope& operator=(const EvalScope&) = delete;
};

// CRTP adapter: a derived node implements `template <class T> T evalT(span<const T>)`
// once and gets the whole ladder plus caching.
template <class D>
class FieldBase : public ScalarField {
 public:
  double ev0(std::span<const double> x) const final { return run<double>(x); }
  J1 ev1(std::span<const J1> x) const final { return run<J1>(x); }
  J2 ev2(std::span<const J2> x) const final { return run<J2>(x); }
  J3 ev3(std::span<const J3> x) const final { return run<J3>(x); }
  J4 ev4(std::span<const J4> x) const final { return run<J4>(x); }

 private:
  template <class T>
  T run(std::span<const T> x) const {
    const D& self = static_cast<const D&>(*this);
    if (!cachedetail::cache_active()) return self.template evalT<T>(x);
    cachedetail::Key k{this, jet_depth_of<T>, {}};
    k.bits.reserve(x.size() * 4);
    cachedetail::dump_inputs(x, k.bits);
    if (const std::any* hit = cachedetail::cache_find(k))
      return std::any_cast<T>(*hit);
    T r = self.template evalT<T>(x);
    cachedetail::cache_store(std::move(k), std::any(r));
    return r;
  }
};

// ---- generic pointwise maps ----------------------------------------------

// A function applied pointwise to already-evaluated input fields, generic in
// the scalar type.  Producing a whole output vector at once lets component
// fields share one (cached) evaluation of a linear solve or factorization.
class PointwiseMap {
 public:
  virtual ~PointwiseMap() = default;
  virtual int nout() const = 0;
  virtual void run0(std::span<const double>, std::vector<double>&) const = 0;
  virtual void run1(std::span<const J1>, std::vector<J1>&) const = 0;
  virtual void run2(std::span<const J2>, std::vector<J2>&) const = 0;
  virtual void run3(std::span<const J3>, std::vector<J3>&) const = 0;
  virtual void run4(std::span<const J4>, std::vector<J4>&) const = 0;
};

template <class F>
class MapImpl : public PointwiseMap {
 public:
  MapImpl(int nout, F f) : nout_(nout), f_(std::move(f)) {}
  int nout() const override { return nout_; }
  void run0(std::span<const double> in, std::vector<double>& out) const override { f_(in, out); }
  void run1(std::span<const J1> in, std::vector<J1>& out) const override { f_(in, out); }
  void run2(std::span<const J2> in, std::vector<J2>& out) const override { f_(in, out); }
  void run3(std::span<const J3> in, std::vector<J3>& out) const override { f_(in, out); }
  void run4(std::span<const J4> in, std::vector<J4>& out) const override { f_(in, out); }

 private:
  int nout_;
  F f_;
};

// ---- constructors ---------------------------------------------------------

SF sf_const(double c);
SF sf_expr(Expression e);
SF sf_coord(int index);  // the bare coordinate x_i

// bias + sum_i weights[i] * terms[i]; collapses nested constants.
SF sf_affine(std::vector<SF> terms, std::vector<double> weights, double bias);
SF sf_add(SF a, SF b);
SF sf_sub(SF a, SF b);
SF sf_scale(SF a, double c);
SF sf_neg(SF a);
SF sf_mul(SF a, SF b);
SF sf_div(SF a, SF b);
SF sf_sqrt(SF a);

// d/dx_mu, evaluable up to depth 3 callers (depth 4 inputs throw).
SF sf_partial(SF f, int mu);

// target(maps_0(x), ..., maps_{m-1}(x))
SF sf_compose(SF target, std::vector<SF> maps);

// Shared pointwise computation with vector output; returns one field per output.
std::vector<SF> sf_pointwise(std::vector<SF> inputs,
                             std::shared_ptr<const PointwiseMap> map);

template <class F>
std::vector<SF> sf_pointwise_fn(std::vector<SF> inputs, int nout, F f) {
  return sf_pointwise(std::move(inputs),
                      std::make_shared<MapImpl<F>>(nout, std::move(f)));
}

bool sf_is_zero(const SF& f);   // structurally the constant 0
double sf_const_value(const SF& f, bool& isConst);

// Point evaluation helpers (open their own EvalScope).
double sf_value(const SF& f, std::span<const double> x);
std::vector<double> sf_gradient(const SF& f, std::span<const double> x);

}  // namespace kosmann
