#pragma once

// Type-erased vector-valued expressions of the chart coordinates. An
// expression is any callable `template <class S> std::vector<S>(std::span<const S>)`
// and is compiled once for each supported scalar type.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/jet.hpp"

namespace qcr {

using DualD = Dual<double>;
using JetD = Jet2<double>;
using JetDual = Jet2<DualD>;

namespace detail {

template <class S>
struct EvalIface {
  virtual ~EvalIface() = default;
  virtual std::vector<S> eval(std::span<const S> x) const = 0;
};

template <class... Ss>
struct MultiEval : EvalIface<Ss>... {};

template <class Iface, class F, class... Ss>
struct EvalModel;

template <class Iface, class F>
struct EvalModel<Iface, F> : Iface {
  F f;
  explicit EvalModel(F fn) : f(std::move(fn)) {}
};

template <class Iface, class F, class S, class... Rest>
struct EvalModel<Iface, F, S, Rest...> : EvalModel<Iface, F, Rest...> {
  using EvalModel<Iface, F, Rest...>::EvalModel;
  std::vector<S> eval(std::span<const S> x) const override { return this->f(x); }
};

}  // namespace detail

// Returns a reason string when the point is outside the region where the
// expression's chart is valid.
using DomainCheck = std::function<std::optional<std::string>(std::span<const double>)>;

template <class... Ss>
class BasicExpr {
 public:
  BasicExpr() = default;

  template <class F>
  BasicExpr(int in_dim, int out_dim, F f)
      : in_(in_dim),
        out_(out_dim),
        impl_(std::make_shared<detail::EvalModel<detail::MultiEval<Ss...>, F, Ss...>>(std::move(f))) {}

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  explicit operator bool() const { return static_cast<bool>(impl_); }

  template <class S>
  std::vector<S> operator()(std::span<const S> x) const {
    const detail::EvalIface<S>& e = *impl_;
    return e.eval(x);
  }
  template <class S>
  std::vector<S> operator()(const std::vector<S>& x) const {
    return (*this)(std::span<const S>(x));
  }

  BasicExpr with_domain(DomainCheck check) const {
    BasicExpr r = *this;
    r.domain_ = std::move(check);
    return r;
  }
  const DomainCheck& domain() const { return domain_; }
  void require_domain(std::span<const double> p) const {
    if (domain_)
      if (auto why = domain_(p)) throw DomainError(*why);
  }

 private:
  int in_ = 0;
  int out_ = 0;
  std::shared_ptr<const detail::MultiEval<Ss...>> impl_;
  DomainCheck domain_;
};

// Fields, forms and frame maps.
using FieldExpr = BasicExpr<double, JetD, JetDual>;

// Defining functions must also accept one extra dual layer, which is how
// their gradients are differentiated to second order.
using DefiningFunction =
    BasicExpr<double, JetD, JetDual, DualD, Dual<JetD>, Dual<JetDual>>;

}  // namespace qcr
