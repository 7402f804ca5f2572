#include "kosmann/scalarfield.hpp"

#include <cstring>
#include <unordered_map>
#include <utility>

namespace kosmann {

// ---- cache ----------------------------------------------------------------

namespace cachedetail {

std::size_t KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(reinterpret_cast<std::uintptr_t>(k.node));
  mix(static_cast<std::uint64_t>(k.depth));
  for (double b : k.bits) {
    std::uint64_t u;
    std::memcpy(&u, &b, sizeof u);
    mix(u);
  }
  return static_cast<std::size_t>(h);
}

namespace {
struct CacheState {
  int active = 0;
  std::unordered_map<Key, std::any, KeyHash> map;
};
thread_local CacheState g_cache;
}  // namespace

bool cache_active() { return g_cache.active > 0; }

const std::any* cache_find(const Key& k) {
  auto it = g_cache.map.find(k);
  return it == g_cache.map.end() ? nullptr : &it->second;
}

void cache_store(Key k, std::any v) {
  g_cache.map.emplace(std::move(k), std::move(v));
}

}  // namespace cachedetail

EvalScope::EvalScope() { ++cachedetail::g_cache.active; }
EvalScope::~EvalScope() {
  if (--cachedetail::g_cache.active == 0) cachedetail::g_cache.map.clear();
}

// ---- leaf nodes -----------------------------------------------------------

namespace {

class ConstField final : public ScalarField {
 public:
  explicit ConstField(double c) : c_(c) {}
  double value() const { return c_; }
  double ev0(std::span<const double>) const override { return c_; }
  J1 ev1(std::span<const J1>) const override { return J1(c_); }
  J2 ev2(std::span<const J2>) const override { return J2(J1(c_)); }
  J3 ev3(std::span<const J3>) const override { return J3(J2(J1(c_))); }
  J4 ev4(std::span<const J4>) const override { return J4(J3(J2(J1(c_)))); }

 private:
  double c_;
};

class CoordField final : public ScalarField {
 public:
  explicit CoordField(int i) : i_(static_cast<std::size_t>(i)) {}
  double ev0(std::span<const double> x) const override { return x[i_]; }
  J1 ev1(std::span<const J1> x) const override { return x[i_]; }
  J2 ev2(std::span<const J2> x) const override { return x[i_]; }
  J3 ev3(std::span<const J3> x) const override { return x[i_]; }
  J4 ev4(std::span<const J4> x) const override { return x[i_]; }

 private:
  std::size_t i_;
};

class ExprField final : public FieldBase<ExprField> {
 public:
  explicit ExprField(Expression e) : e_(std::move(e)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    return eval_expr<T>(*e_.root, x);
  }

 private:
  Expression e_;
};

class AffineField final : public FieldBase<AffineField> {
 public:
  AffineField(std::vector<SF> terms, std::vector<double> w, double bias)
      : terms_(std::move(terms)), w_(std::move(w)), bias_(bias) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    T acc(bias_);
    for (std::size_t i = 0; i < terms_.size(); ++i)
      acc = acc + sf_eval<T>(*terms_[i], x) * w_[i];
    return acc;
  }

 private:
  std::vector<SF> terms_;
  std::vector<double> w_;
  double bias_;
};

class MulField final : public FieldBase<MulField> {
 public:
  MulField(SF a, SF b) : a_(std::move(a)), b_(std::move(b)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    return sf_eval<T>(*a_, x) * sf_eval<T>(*b_, x);
  }

 private:
  SF a_, b_;
};

class DivField final : public FieldBase<DivField> {
 public:
  DivField(SF a, SF b) : a_(std::move(a)), b_(std::move(b)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    T den = sf_eval<T>(*b_, x);
    if (jet_value(den) == 0.0) throw DomainError("division by zero in a field quotient");
    return sf_eval<T>(*a_, x) / den;
  }

 private:
  SF a_, b_;
};

class SqrtField final : public FieldBase<SqrtField> {
 public:
  explicit SqrtField(SF a) : a_(std::move(a)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    T v = sf_eval<T>(*a_, x);
    if (jet_value(v) < 0.0) throw DomainError("sqrt of a negative field value");
    return jm::sqrt(v);
  }

 private:
  SF a_;
};

class PartialField final : public FieldBase<PartialField> {
 public:
  PartialField(SF f, int mu) : f_(std::move(f)), mu_(static_cast<std::size_t>(mu)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    if constexpr (std::is_same_v<T, J4>) {
      (void)x;
      throw InternalError("jet depth exceeded in partial derivative");
    } else {
      std::vector<T> pt(x.begin(), x.end());
      const auto seeded = seed_direction(pt, mu_);
      const Jet<T> r = sf_eval<Jet<T>>(*f_, std::span<const Jet<T>>(seeded));
      return r.slots() ? r.d[0] : T{};
    }
  }

 private:
  SF f_;
  std::size_t mu_;
};

class ComposeField final : public FieldBase<ComposeField> {
 public:
  ComposeField(SF target, std::vector<SF> maps)
      : target_(std::move(target)), maps_(std::move(maps)) {}
  template <class T>
  T evalT(std::span<const T> x) const {
    std::vector<T> y;
    y.reserve(maps_.size());
    for (const auto& m : maps_) y.push_back(sf_eval<T>(*m, x));
    return sf_eval<T>(*target_, std::span<const T>(y));
  }

 private:
  SF target_;
  std::vector<SF> maps_;
};

class VecNode {
 public:
  VecNode(std::vector<SF> inputs, std::shared_ptr<const PointwiseMap> map)
      : inputs_(std::move(inputs)), map_(std::move(map)) {}

  template <class T>
  std::vector<T> evalVec(std::span<const T> x) const {
    if (!cachedetail::cache_active()) return compute<T>(x);
    cachedetail::Key k{this, jet_depth_of<T>, {}};
    cachedetail::dump_inputs(x, k.bits);
    if (const std::any* hit = cachedetail::cache_find(k))
      return std::any_cast<std::vector<T>>(*hit);
    std::vector<T> r = compute<T>(x);
    cachedetail::cache_store(std::move(k), std::any(r));
    return r;
  }

 private:
  template <class T>
  std::vector<T> compute(std::span<const T> x) const {
    std::vector<T> in;
    in.reserve(inputs_.size());
    for (const auto& f : inputs_) in.push_back(sf_eval<T>(*f, x));
    std::vector<T> out(static_cast<std::size_t>(map_->nout()));
    const std::span<const T> inspan(in);
    if constexpr (std::is_same_v<T, double>) map_->run0(inspan, out);
    else if constexpr (std::is_same_v<T, J1>) map_->run1(inspan, out);
    else if constexpr (std::is_same_v<T, J2>) map_->run2(inspan, out);
    else if constexpr (std::is_same_v<T, J3>) map_->run3(inspan, out);
    else map_->run4(inspan, out);
    if (static_cast<int>(out.size()) != map_->nout())
      throw InternalError("pointwise map produced wrong output count");
    return out;
  }

  std::vector<SF> inputs_;
  std::shared_ptr<const PointwiseMap> map_;
};

class VecComponent final : public ScalarField {
 public:
  VecComponent(std::shared_ptr<const VecNode> node, int idx)
      : node_(std::move(node)), idx_(static_cast<std::size_t>(idx)) {}
  double ev0(std::span<const double> x) const override { return node_->evalVec<double>(x)[idx_]; }
  J1 ev1(std::span<const J1> x) const override { return node_->evalVec<J1>(x)[idx_]; }
  J2 ev2(std::span<const J2> x) const override { return node_->evalVec<J2>(x)[idx_]; }
  J3 ev3(std::span<const J3> x) const override { return node_->evalVec<J3>(x)[idx_]; }
  J4 ev4(std::span<const J4> x) const override { return node_->evalVec<J4>(x)[idx_]; }

 private:
  std::shared_ptr<const VecNode> node_;
  std::size_t idx_;
};

}  // namespace

// ---- constructors ---------------------------------------------------------

SF sf_const(double c) { return std::make_shared<ConstField>(c); }
SF sf_expr(Expression e) { return std::make_shared<ExprField>(std::move(e)); }
SF sf_coord(int index) { return std::make_shared<CoordField>(index); }

double sf_const_value(const SF& f, bool& isConst) {
  if (auto* c = dynamic_cast<const ConstField*>(f.get())) {
    isConst = true;
    return c->value();
  }
  isConst = false;
  return 0.0;
}

bool sf_is_zero(const SF& f) {
  bool isConst = false;
  const double v = sf_const_value(f, isConst);
  return isConst && v == 0.0;
}

SF sf_affine(std::vector<SF> terms, std::vector<double> weights, double bias) {
  if (terms.size() != weights.size())
    throw InternalError("sf_affine: weight count mismatch");
  std::vector<SF> t;
  std::vector<double> w;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (weights[i] == 0.0) continue;
    bool isConst = false;
    const double cv = sf_const_value(terms[i], isConst);
    if (isConst) {
      bias += weights[i] * cv;
      continue;
    }
    t.push_back(std::move(terms[i]));
    w.push_back(weights[i]);
  }
  if (t.empty()) return sf_const(bias);
  if (t.size() == 1 && w[0] == 1.0 && bias == 0.0) return t[0];
  return std::make_shared<AffineField>(std::move(t), std::move(w), bias);
}

SF sf_add(SF a, SF b) { return sf_affine({std::move(a), std::move(b)}, {1.0, 1.0}, 0.0); }
SF sf_sub(SF a, SF b) { return sf_affine({std::move(a), std::move(b)}, {1.0, -1.0}, 0.0); }
SF sf_scale(SF a, double c) { return sf_affine({std::move(a)}, {c}, 0.0); }
SF sf_neg(SF a) { return sf_scale(std::move(a), -1.0); }

SF sf_mul(SF a, SF b) {
  bool ca = false, cb = false;
  const double va = sf_const_value(a, ca);
  const double vb = sf_const_value(b, cb);
  if (ca && cb) return sf_const(va * vb);
  if (ca) return sf_scale(std::move(b), va);
  if (cb) return sf_scale(std::move(a), vb);
  return std::make_shared<MulField>(std::move(a), std::move(b));
}

SF sf_div(SF a, SF b) {
  bool cb = false;
  const double vb = sf_const_value(b, cb);
  if (cb) {
    if (vb == 0.0) throw DomainError("division by constant zero field");
    return sf_scale(std::move(a), 1.0 / vb);
  }
  if (sf_is_zero(a)) return sf_const(0.0);
  return std::make_shared<DivField>(std::move(a), std::move(b));
}

SF sf_sqrt(SF a) { return std::make_shared<SqrtField>(std::move(a)); }

SF sf_partial(SF f, int mu) {
  if (sf_is_zero(f)) return sf_const(0.0);
  bool isConst = false;
  sf_const_value(f, isConst);
  if (isConst) return sf_const(0.0);
  return std::make_shared<PartialField>(std::move(f), mu);
}

SF sf_compose(SF target, std::vector<SF> maps) {
  bool isConst = false;
  const double v = sf_const_value(target, isConst);
  if (isConst) return sf_const(v);
  return std::make_shared<ComposeField>(std::move(target), std::move(maps));
}

std::vector<SF> sf_pointwise(std::vector<SF> inputs,
                             std::shared_ptr<const PointwiseMap> map) {
  const int n = map->nout();
  auto node = std::make_shared<const VecNode>(std::move(inputs), std::move(map));
  std::vector<SF> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(std::make_shared<VecComponent>(node, i));
  return out;
}

double sf_value(const SF& f, std::span<const double> x) {
  EvalScope scope;
  return f->ev0(x);
}

std::vector<double> sf_gradient(const SF& f, std::span<const double> x) {
  EvalScope scope;
  std::vector<double> pt(x.begin(), x.end());
  const auto seeded = seed_all(pt);
  const J1 r = f->ev1(std::span<const J1>(seeded));
  std::vector<double> g(pt.size(), 0.0);
  for (std::size_t i = 0; i < r.d.size(); ++i) g[i] = r.d[i];
  return g;
}

}  // namespace kosmann
