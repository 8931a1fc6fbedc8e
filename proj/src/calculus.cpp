#include "qcr/calculus.hpp"

namespace qcr {

namespace {

double pair(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> shifted(const std::vector<double>& p, const std::vector<double>& u, double t) {
  std::vector<double> q = p;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += t * u[i];
  return q;
}

}  // namespace

BracketValue lie_bracket(const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p) {
  X.require_domain(p);
  Y.require_domain(p);
  const auto b = bracket(jet_eval(X, p), jet_eval(Y, p));
  const int n = static_cast<int>(p.size());
  BracketValue out{std::vector<double>(n), Mat<double>(n, n)};
  for (int i = 0; i < n; ++i) {
    out.value[i] = b[i].val;
    for (int j = 0; j < n; ++j) out.jacobian(i, j) = b[i].grad(j);
  }
  return out;
}

double exterior_d(const FieldExpr& theta, const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p) {
  theta.require_domain(p);
  X.require_domain(p);
  Y.require_domain(p);
  const auto d = exterior_derivative(jet_eval(theta, p));
  const auto x = X(p);
  const auto y = Y(p);
  double s = 0.0;
  for (int i = 0; i < d.rows; ++i)
    for (int j = 0; j < d.cols; ++j) s += x[i] * d(i, j).val * y[j];
  return s;
}

double fd_oracle_d(const FieldExpr& theta, const FieldExpr& X, const FieldExpr& Y, const std::vector<double>& p,
                   double step) {
  const auto x = X(p);
  const auto y = Y(p);
  auto along = [&](const std::vector<double>& dir, auto&& f) {
    return (f(shifted(p, dir, step)) - f(shifted(p, dir, -step))) / (2.0 * step);
  };
  auto theta_on = [&](const FieldExpr& V) {
    return [&](const std::vector<double>& q) { return pair(theta(q), V(q)); };
  };
  const double xy = along(x, theta_on(Y));
  const double yx = along(y, theta_on(X));
  std::vector<double> br(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto comp = [i](const FieldExpr& V) { return [&V, i](const std::vector<double>& q) { return V(q)[i]; }; };
    br[i] = along(x, comp(Y)) - along(y, comp(X));
  }
  return xy - yx - pair(theta(p), br);
}

}  // namespace qcr
