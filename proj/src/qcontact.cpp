#include "qcr/qcontact.hpp"

#include <algorithm>
#include <cmath>

#include "qcr/canonical.hpp"
#include "qcr/hypercr.hpp"

namespace qcr {

namespace {

double operator_norm(const SymMatrix& A) {
  double m = 0.0;
  for (double e : eigenvalues(A)) m = std::max(m, std::abs(e));
  return m;
}

struct ReebSystem {
  std::array<Vec<double>, 3> reeb;
  double residual = 0.0;  // relative to the right-hand side
};

ReebSystem reeb_system(const ManifoldSpec& M, const Point& p) {
  const HyperCRPointData d = build_point_data(M, p);
  const int m = static_cast<int>(d.Q_basis.size());
  const int N = static_cast<int>(d.p.size());

  Mat<double> Theta(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) Theta(a, b) = dot(d.theta[a], d.triple[b]);
  const Mat<double> C = inverse(Theta);
  std::array<Vec<double>, 3> base;
  for (int a = 0; a < 3; ++a) {
    base[a] = Vec<double>(N, 0.0);
    for (int b = 0; b < 3; ++b) base[a] = axpy(C(b, a), d.triple[b], std::move(base[a]));
  }

  // D_a(u, v) = u^T D_a v
  auto form = [&](int a, const Vec<double>& u, const Vec<double>& v) { return bilinear(u, d.dtheta[a], v); };
  const int unknowns = 3 * m;
  const int rows = 3 * m + 3 * m;
  Mat<double> A(rows, unknowns);
  Vec<double> rhs(rows, 0.0);
  int row = 0;
  for (int a = 0; a < 3; ++a)
    for (int j = 0; j < m; ++j, ++row) {
      for (int i = 0; i < m; ++i) A(row, a * m + i) = form(a, d.Q_basis[i], d.Q_basis[j]);
      rhs[row] = -form(a, base[a], d.Q_basis[j]);
    }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (int j = 0; j < m; ++j, ++row) {
        for (int i = 0; i < m; ++i) {
          A(row, a * m + i) += form(b, d.Q_basis[i], d.Q_basis[j]);
          A(row, b * m + i) += form(a, d.Q_basis[i], d.Q_basis[j]);
        }
        rhs[row] = -(form(b, base[a], d.Q_basis[j]) + form(a, base[b], d.Q_basis[j]));
      }
  const auto ls = least_squares(A, rhs);
  ReebSystem out;
  out.residual = ls.residual / std::max(1.0, std::sqrt(dot(rhs, rhs)));
  for (int a = 0; a < 3; ++a) {
    out.reeb[a] = base[a];
    for (int i = 0; i < m; ++i) out.reeb[a] = axpy(ls.x[a * m + i], d.Q_basis[i], std::move(out.reeb[a]));
  }
  return out;
}

}  // namespace

ContactReport compat_check(const ManifoldSpec& M, const Point& p, bool solve_reeb, double tol) {
  const PseudohermitianTensors t = levi_tensors(M, p);
  ContactReport r;
  const double scale = operator_norm(t.levi);
  for (int a = 0; a < 3; ++a) {
    const Mat<double> diff = t.levi.dense() - t.complex_levi[a].dense();
    double dev = 0.0;
    for (double e : diff.a) dev = std::max(dev, std::abs(e));
    r.per_structure[a] = dev / scale;
    r.compat_deviation = std::max(r.compat_deviation, r.per_structure[a]);
  }
  if (solve_reeb) {
    const ReebSystem s = reeb_system(M, p);
    r.reeb_residual = s.residual;
    if (s.residual <= tol) {
      r.reeb = s.reeb;
      if (M.n >= 2) r.canonical_match = triple_angle(s.reeb, solve_canonical(M, p).triple);
    }
  }
  return r;
}

std::array<Vec<double>, 3> reeb_solve(const ManifoldSpec& M, const Point& p, double tol) {
  const ReebSystem s = reeb_system(M, p);
  if (s.residual > tol) throw NoReebField("Reeb conditions are inconsistent (residual " + std::to_string(s.residual) + ")");
  return s.reeb;
}

double reeb_residual(const ManifoldSpec& M, const Point& p) { return reeb_system(M, p).residual; }

double canonical_equals_reeb(const ManifoldSpec& M, const Point& p, double tol) {
  return triple_angle(reeb_solve(M, p, tol), solve_canonical(M, p).triple);
}

}  // namespace qcr
