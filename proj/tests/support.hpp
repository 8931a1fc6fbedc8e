#pragma once

// Independent closed-form oracles shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qcr/canonical.hpp"
#include "qcr/catalog.hpp"
#include "qcr/hypercr.hpp"

namespace qcr::oracle {

inline double max_abs(const Mat<double>& a) {
  double m = 0.0;
  for (double x : a.a) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const Mat<double>& a, const Mat<double>& b) { return max_abs(a - b); }

inline double max_diff(const Vec<double>& a, const Vec<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double dot(const Vec<double>& a, const Vec<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Mat<double> scaled_identity(int k, double s) {
  Mat<double> r(k, k);
  for (int i = 0; i < k; ++i) r(i, i) = s;
  return r;
}

inline std::vector<Vec<double>> frame_at(const ManifoldSpec& M, const Point& p) {
  std::vector<Vec<double>> v;
  for (const auto& f : M.frame_fields) v.push_back(f(p));
  return v;
}

// Ellipsoid: Levi and the three complex Levi forms as sums over z = x0 + i x1, w = x2 + i x3.
struct EllipsoidForms {
  Mat<double> levi;
  std::array<Mat<double>, 3> complex_levi;
};

inline EllipsoidForms ellipsoid_forms(const EllipsoidConstants& k, const std::vector<Vec<double>>& v) {
  using C = std::complex<double>;
  const int m = static_cast<int>(v.size());
  EllipsoidForms f;
  f.levi = Mat<double>(m, m);
  for (auto& c : f.complex_levi) c = Mat<double>(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (std::size_t q = 0; q < k.b.size(); ++q) {
        const C zi(v[i][4 * q], v[i][4 * q + 1]), zj(v[j][4 * q], v[j][4 * q + 1]);
        const C wi(v[i][4 * q + 2], v[i][4 * q + 3]), wj(v[j][4 * q + 2], v[j][4 * q + 3]);
        const double zz = std::real(zi * std::conj(zj)), ww = std::real(wi * std::conj(wj));
        const double bd = k.b[q] + k.d[q];
        f.levi(i, j) += bd * (zz + ww);
        f.complex_levi[0](i, j) += 2.0 * (k.b[q] * zz + k.d[q] * ww);
        f.complex_levi[1](i, j) += bd * (zz + ww) + 2.0 * (k.a[q] + k.c[q]) * std::real(zi * zj + std::conj(wi * wj));
        f.complex_levi[2](i, j) += bd * (zz + ww) + 2.0 * (k.a[q] - k.c[q]) * std::real(zi * zj - std::conj(wi * wj));
      }
  return f;
}

inline EllipsoidConstants generic_ellipsoid() {
  EllipsoidConstants k;
  k.a = {0.3, 0.1, 0.2};
  k.b = {1.0, 1.5, 2.0};
  k.c = {0.25, -0.1, 0.05};
  k.d = {1.2, 0.8, 1.7};
  return k;
}

// Deformed Heisenberg: diagonal of the forms on the frame X^0..X^3 of block alpha.
struct DeformedDiagonal {
  double levi;
  std::array<std::array<double, 4>, 3> complex_levi;
  std::array<double, 4> h;
};

inline DeformedDiagonal deformed_diagonal(const DeformationConstants& k, int n, int al) {
  auto A = [&](int a) { return k.A[a][al]; };
  auto B = [&](int a) { return k.B[a][al]; };
  auto C = [&](int a) { return k.C[a][al]; };
  auto D = [&](int a) { return k.D[a][al]; };
  const double L = k.lambda(0, al);
  const double sA = A(0) + A(1) + A(2), sB = B(0) + B(1) + B(2), sC = C(0) + C(1) + C(2), sD = D(0) + D(1) + D(2);
  DeformedDiagonal d;
  d.levi = L / 4.0;
  d.complex_levi[0] = {A(0) + B(0), A(0) + B(0), C(0) + D(0), C(0) + D(0)};
  d.complex_levi[1] = {A(1) + C(1), B(1) + D(1), A(1) + C(1), B(1) + D(1)};
  d.complex_levi[2] = {A(2) + D(2), B(2) + C(2), B(2) + C(2), A(2) + D(2)};
  d.h = {(n + 2) * L - B(0) - C(1) - D(2) - sA, (n + 2) * L - A(0) - D(1) - C(2) - sB,
         (n + 2) * L - D(0) - A(1) - B(2) - sC, (n + 2) * L - C(0) - B(1) - A(2) - sD};
  for (auto& row : d.complex_levi)
    for (double& x : row) x *= 0.5;
  for (double& x : d.h) x *= 0.5;
  return d;
}

// Random constants with A^a + B^a + C^a + D^a independent of a (integrable).
inline DeformationConstants random_integrable_deformation(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  DeformationConstants k = DeformationConstants::uniform(n, 1, 1, 1, 1);
  for (int al = 0; al < n; ++al) {
    const double L = 4.0 + u(rng);
    for (int a = 0; a < 3; ++a) {
      k.A[a][al] = u(rng);
      k.B[a][al] = u(rng);
      k.C[a][al] = u(rng);
      k.D[a][al] = L - k.A[a][al] - k.B[a][al] - k.C[a][al];
    }
  }
  return k;
}

// Lambda depends on a: A^1 is raised above the uniform value.
inline DeformationConstants non_integrable_deformation(int n) {
  DeformationConstants k = DeformationConstants::uniform(n, 2.0, 2.0, 2.0, 2.0);
  for (int al = 0; al < n; ++al) k.A[0][al] = 3.0;
  return k;
}

inline DeformationConstants indefinite_deformation(int n) {
  const double t = -n / 3.0;
  return DeformationConstants::uniform(n, n + 1.0, t, t, t);
}

// Hopf T^3: 2 Levi + 2 (d mu)^2 with mu = -log |x|^2 on the quaternionic block.
inline Mat<double> hopf_h(const Mat<double>& levi, const Point& p, const std::vector<Vec<double>>& v) {
  const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
  const int m = static_cast<int>(v.size());
  std::vector<double> dmu(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < 4; ++r) dmu[i] += -2.0 * p[r] * v[i][r] / r2;
  Mat<double> h = 2.0 * levi;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h(i, j) += 2.0 * dmu[i] * dmu[j];
  return h;
}

// Smooth scalar test function: linear part plus a bounded quadratic wave.
inline FieldExpr random_scalar(int dim, std::mt19937_64& rng, double amplitude = 0.3) {
  std::normal_distribution<double> g(0.0, amplitude);
  std::vector<double> lin(dim), quad(dim), freq(dim);
  for (int i = 0; i < dim; ++i) {
    lin[i] = g(rng);
    quad[i] = g(rng);
    freq[i] = 1.0 + std::abs(g(rng));
  }
  return FieldExpr(dim, 1, [=]<class S>(std::span<const S> x) {
    S s(0.0);
    for (int i = 0; i < dim; ++i) {
      s += lin[i] * x[i];
      s += quad[i] * sin(freq[i] * x[i] * x[(i + 1) % dim]);
    }
    return std::vector<S>{s};
  });
}

inline std::vector<double> random_coeffs(int m, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> c(m);
  for (double& x : c) x = g(rng);
  return c;
}

// Random connection-form-like tensor: A(x, k, l) antisymmetric in (k, l).
inline FormTensor<double> random_form(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FormTensor<double> w;
  w.n = n;
  const int m = 4 * n;
  w.A.assign(static_cast<std::size_t>(m) * m * m, 0.0);
  for (int x = 0; x < m; ++x)
    for (int k = 0; k < m; ++k)
      for (int l = k + 1; l < m; ++l) {
        const double v = g(rng);
        w.at(x, k, l) = v;
        w.at(x, l, k) = -v;
      }
  return w;
}

// Part of the connection form orthogonal to sp(n) + sp(1) and to E (x) H.
inline FormTensor<double> non_eh_obstruction(const FormTensor<double>& w) {
  const int n = w.n, m = 4 * n;
  const auto I = standard_structures(n);
  FormTensor<double> obs;
  obs.n = n;
  obs.A.assign(w.A.size(), 0.0);
  for (int x = 0; x < m; ++x) {
    Mat<double> om(m, m);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) om(k, l) = w.at(x, k, l);
    const auto parts = project_obs(om, I);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) obs.at(x, k, l) = parts.obs(k, l);
  }
  const auto eh = EHProjector::get(n).project(obs);
  for (std::size_t e = 0; e < obs.A.size(); ++e) obs.A[e] -= eh.A[e];
  return obs;
}

inline double max_abs(const FormTensor<double>& a, const FormTensor<double>& b) {
  double m = 0.0;
  for (std::size_t e = 0; e < a.A.size(); ++e) m = std::max(m, std::abs(a.A[e] - b.A[e]));
  return m;
}

}  // namespace qcr::oracle
