#pragma once

#include <span>
#include <vector>

#include "qcr/dense.hpp"
#include "qcr/expr.hpp"

namespace qcr {

// Evaluates an expression at p with second-order jets in all coordinates.
template <class R, class E>
std::vector<Jet2<R>> jet_eval(const E& f, const std::vector<R>& p) {
  const auto x = variables(p);
  return f(std::span<const Jet2<R>>(x));
}

template <class R>
std::vector<Jet1<R>> first_order(const std::vector<Jet2<R>>& v) {
  std::vector<Jet1<R>> r;
  r.reserve(v.size());
  for (const auto& e : v) r.push_back(first_order(e));
  return r;
}

// [X,Y] from second-order jets of both fields, kept to first order.
template <class R>
std::vector<Jet1<R>> bracket(const std::vector<Jet2<R>>& X, const std::vector<Jet2<R>>& Y) {
  const int n = static_cast<int>(X.size());
  std::vector<Jet1<R>> out(n);
  for (int i = 0; i < n; ++i) {
    Jet1<R> s(0.0);
    for (int j = 0; j < n; ++j)
      s += first_order(X[j]) * partial(Y[i], j) - first_order(Y[j]) * partial(X[i], j);
    out[i] = s;
  }
  return out;
}

// [X,Y] at the base point from first-order jets of both fields.
template <class R>
Vec<R> bracket(const std::vector<Jet1<R>>& X, const std::vector<Jet1<R>>& Y) {
  const int n = static_cast<int>(X.size());
  Vec<R> out(n, R(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!Y[i].is_constant()) out[i] += X[j].val * Y[i].g[j];
      if (!X[i].is_constant()) out[i] -= Y[j].val * X[i].g[j];
    }
  return out;
}

// Exterior derivative of a one-form as an antisymmetric matrix of first-order jets:
// (d theta)_{ij} = d_i theta_j - d_j theta_i.
template <class R>
Mat<Jet1<R>> exterior_derivative(const std::vector<Jet2<R>>& theta) {
  const int n = static_cast<int>(theta.size());
  Mat<Jet1<R>> d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = partial(theta[j], i) - partial(theta[i], j);
      d(j, i) = -d(i, j);
    }
  return d;
}

template <class T>
Mat<double> value_mat_of_jets(const Mat<Jet1<T>>& m) {
  Mat<double> r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = value_of(m.a[i]);
  return r;
}

struct BracketValue {
  std::vector<double> value;
  Mat<double> jacobian;  // jacobian(i, j) = d_j [X,Y]^i
};

BracketValue lie_bracket(const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p);

// d theta (X, Y) at p, exact through jets.
double exterior_d(const FieldExpr& theta, const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p);

// Central-difference estimate of d theta (X, Y); test oracle.
double fd_oracle_d(const FieldExpr& theta, const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p,
                   double step);

}  // namespace qcr
