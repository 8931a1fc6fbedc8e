#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <type_traits>
#include <vector>

namespace qcr {

// Forward-mode number carrying one directional derivative.
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() : v(0.0), d(0.0) {}
  template <class U>
    requires std::is_constructible_v<T, const U&>
  Dual(const U& c) : v(c), d(0.0) {}
  Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
  }
  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), cos(a.v) * a.d};
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -(sin(a.v) * a.d)};
  }
};

// Second-order Taylor data of a scalar in the chart coordinates.
// Empty grad/hess means the jet is a constant.
template <class R>
class Jet2 {
 public:
  R val{};
  std::vector<R> g;
  std::vector<R> h;  // packed upper triangle, row major

  Jet2() : val(0.0) {}
  template <class U>
    requires std::is_constructible_v<R, const U&>
  Jet2(const U& c) : val(c) {}

  static Jet2 variable(const R& x, int i, int n) {
    Jet2 j(x);
    j.g.assign(n, R(0.0));
    j.g[i] = R(1.0);
    j.h.assign(n * (n + 1) / 2, R(0.0));
    return j;
  }

  int dim() const { return static_cast<int>(g.size()); }
  bool is_constant() const { return g.empty(); }

  static int packed(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  R grad(int i) const { return g.empty() ? R(0.0) : g[i]; }
  R hess(int i, int j) const { return h.empty() ? R(0.0) : h[packed(i, j, dim())]; }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) { return combine(a, b, 1.0); }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) { return combine(a, b, -1.0); }
  friend Jet2 operator-(const Jet2& a) {
    Jet2 r(-a.val);
    r.g.reserve(a.g.size());
    for (const auto& x : a.g) r.g.push_back(-x);
    r.h.reserve(a.h.size());
    for (const auto& x : a.h) r.h.push_back(-x);
    return r;
  }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(a.val * b.val);
    if (a.is_constant() && b.is_constant()) return r;
    if (a.is_constant()) return scaled(b, a.val);
    if (b.is_constant()) return scaled(a, b.val);
    const int n = a.dim();
    r.g.resize(n);
    r.h.resize(a.h.size());
    for (int i = 0; i < n; ++i) r.g[i] = a.val * b.g[i] + b.val * a.g[i];
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++k)
        r.h[k] = a.val * b.h[k] + b.val * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.is_constant()) return scaled(a, R(1.0) / b.val);
    R inv = R(1.0) / b.val;
    return a * chain(b, inv, -(inv * inv), 2.0 * inv * inv * inv);
  }
  Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
  Jet2& operator-=(const Jet2& o) { return *this = *this - o; }
  Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
  Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

  // f(x) given f(x0), f'(x0), f''(x0).
  static Jet2 chain(const Jet2& x, const R& f0, const R& f1, const R& f2) {
    Jet2 r(f0);
    if (x.is_constant()) return r;
    const int n = x.dim();
    r.g.resize(n);
    r.h.resize(x.h.size());
    for (int i = 0; i < n; ++i) r.g[i] = f1 * x.g[i];
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++k) r.h[k] = f1 * x.h[k] + f2 * x.g[i] * x.g[j];
    return r;
  }

  friend Jet2 sqrt(const Jet2& x) {
    using std::sqrt;
    R s = sqrt(x.val);
    return chain(x, s, R(0.5) / s, R(-0.25) / (s * x.val));
  }
  friend Jet2 exp(const Jet2& x) {
    using std::exp;
    R e = exp(x.val);
    return chain(x, e, e, e);
  }
  friend Jet2 log(const Jet2& x) {
    using std::log;
    R inv = R(1.0) / x.val;
    return chain(x, log(x.val), inv, -(inv * inv));
  }
  friend Jet2 sin(const Jet2& x) {
    using std::cos;
    using std::sin;
    R s = sin(x.val);
    return chain(x, s, cos(x.val), -s);
  }
  friend Jet2 cos(const Jet2& x) {
    using std::cos;
    using std::sin;
    R c = cos(x.val);
    return chain(x, c, -sin(x.val), -c);
  }

 private:
  static Jet2 scaled(const Jet2& a, const R& s) {
    Jet2 r(a.val * s);
    r.g.reserve(a.g.size());
    for (const auto& x : a.g) r.g.push_back(x * s);
    r.h.reserve(a.h.size());
    for (const auto& x : a.h) r.h.push_back(x * s);
    return r;
  }
  static Jet2 combine(const Jet2& a, const Jet2& b, double sign) {
    Jet2 r(a.val + R(sign) * b.val);
    if (a.is_constant() && b.is_constant()) return r;
    if (b.is_constant()) {
      r.g = a.g;
      r.h = a.h;
      return r;
    }
    if (a.is_constant()) {
      Jet2 s = scaled(b, R(sign));
      s.val = r.val;
      return s;
    }
    r.g.resize(a.g.size());
    r.h.resize(a.h.size());
    for (std::size_t i = 0; i < a.g.size(); ++i) r.g[i] = a.g[i] + R(sign) * b.g[i];
    for (std::size_t i = 0; i < a.h.size(); ++i) r.h[i] = a.h[i] + R(sign) * b.h[i];
    return r;
  }
};

// First-order jet: value and gradient.
template <class R>
class Jet1 {
 public:
  R val{};
  std::vector<R> g;

  Jet1() : val(0.0) {}
  template <class U>
    requires std::is_constructible_v<R, const U&>
  Jet1(const U& c) : val(c) {}

  int dim() const { return static_cast<int>(g.size()); }
  bool is_constant() const { return g.empty(); }
  R grad(int i) const { return g.empty() ? R(0.0) : g[i]; }

  friend Jet1 operator+(const Jet1& a, const Jet1& b) { return combine(a, b, 1.0); }
  friend Jet1 operator-(const Jet1& a, const Jet1& b) { return combine(a, b, -1.0); }
  friend Jet1 operator-(const Jet1& a) {
    Jet1 r(-a.val);
    for (const auto& x : a.g) r.g.push_back(-x);
    return r;
  }
  friend Jet1 operator*(const Jet1& a, const Jet1& b) {
    Jet1 r(a.val * b.val);
    if (a.is_constant() && b.is_constant()) return r;
    const int n = std::max(a.dim(), b.dim());
    r.g.resize(n);
    for (int i = 0; i < n; ++i) {
      R t(0.0);
      if (!b.is_constant()) t = a.val * b.g[i];
      if (!a.is_constant()) t = t + b.val * a.g[i];
      r.g[i] = t;
    }
    return r;
  }
  friend Jet1 operator/(const Jet1& a, const Jet1& b) {
    R inv = R(1.0) / b.val;
    Jet1 r(a.val * inv);
    if (a.is_constant() && b.is_constant()) return r;
    const int n = std::max(a.dim(), b.dim());
    r.g.resize(n);
    for (int i = 0; i < n; ++i) r.g[i] = (a.grad(i) - r.val * b.grad(i)) * inv;
    return r;
  }
  Jet1& operator+=(const Jet1& o) { return *this = *this + o; }
  Jet1& operator-=(const Jet1& o) { return *this = *this - o; }
  Jet1& operator*=(const Jet1& o) { return *this = *this * o; }
  Jet1& operator/=(const Jet1& o) { return *this = *this / o; }

  friend Jet1 sqrt(const Jet1& x) {
    using std::sqrt;
    Jet1 r(sqrt(x.val));
    R f1 = R(0.5) / r.val;
    for (const auto& gi : x.g) r.g.push_back(f1 * gi);
    return r;
  }
  friend Jet1 exp(const Jet1& x) {
    using std::exp;
    Jet1 r(exp(x.val));
    for (const auto& gi : x.g) r.g.push_back(r.val * gi);
    return r;
  }
  friend Jet1 log(const Jet1& x) {
    using std::log;
    Jet1 r(log(x.val));
    for (const auto& gi : x.g) r.g.push_back(gi / x.val);
    return r;
  }

 private:
  static Jet1 combine(const Jet1& a, const Jet1& b, double sign) {
    Jet1 r(a.val + R(sign) * b.val);
    if (a.is_constant() && b.is_constant()) return r;
    const int n = std::max(a.dim(), b.dim());
    r.g.resize(n);
    for (int i = 0; i < n; ++i) r.g[i] = a.grad(i) + R(sign) * b.grad(i);
    return r;
  }
};

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }
template <class R>
double value_of(const Jet2<R>& x) { return value_of(x.val); }
template <class R>
double value_of(const Jet1<R>& x) { return value_of(x.val); }

// Drops the second-order part.
template <class R>
Jet1<R> first_order(const Jet2<R>& x) {
  Jet1<R> r(x.val);
  r.g = x.g;
  return r;
}

// Partial derivative along coordinate i, kept to first order.
template <class R>
Jet1<R> partial(const Jet2<R>& x, int i) {
  Jet1<R> r(x.grad(i));
  if (x.is_constant()) return r;
  const int n = x.dim();
  r.g.resize(n);
  for (int j = 0; j < n; ++j) r.g[j] = x.hess(i, j);
  return r;
}

// Derivative along the direction u (given by its chart components).
template <class R>
R directional(const Jet1<R>& f, const std::vector<R>& u) {
  R s(0.0);
  if (f.is_constant()) return s;
  for (std::size_t i = 0; i < u.size(); ++i) s = s + f.g[i] * u[i];
  return s;
}

template <class R>
std::vector<R> values(const std::vector<Jet1<R>>& v) {
  std::vector<R> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.val);
  return r;
}

template <class R>
std::vector<Jet2<R>> variables(const std::vector<R>& p) {
  const int n = static_cast<int>(p.size());
  std::vector<Jet2<R>> x;
  x.reserve(n);
  for (int i = 0; i < n; ++i) x.push_back(Jet2<R>::variable(p[i], i, n));
  return x;
}

}  // namespace qcr
