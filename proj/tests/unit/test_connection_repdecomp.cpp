#include <gtest/gtest.h>

#include "qcr/connection.hpp"
#include "qcr/repdecomp.hpp"
#include "support.hpp"

using namespace qcr;
using namespace qcr::oracle;

namespace {

std::vector<ManifoldSpec> spaces() {
  std::mt19937_64 rng(41);
  return {make_sphere(2), make_heisenberg(2), make_deformed_heisenberg(2, random_integrable_deformation(2, rng)),
          make_ellipsoid(2, generic_ellipsoid()), make_t3_hopf({2.0, 0.5})};
}

// (g . w)(x, k, l) = sum g_xa g_kb g_lc w(a, b, c)
FormTensor<double> act(const Mat<double>& g, const FormTensor<double>& w) {
  const int m = 4 * w.n;
  FormTensor<double> t1 = w, t2 = w, t3 = w;
  for (int x = 0; x < m; ++x)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += g(l, c) * w.at(x, k, c);
        t1.at(x, k, l) = s;
      }
  for (int x = 0; x < m; ++x)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += g(k, b) * t1.at(x, b, l);
        t2.at(x, k, l) = s;
      }
  for (int x = 0; x < m; ++x)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += g(x, a) * t2.at(a, k, l);
        t3.at(x, k, l) = s;
      }
  return t3;
}

Mat<double> transpose(const Mat<double>& a) { return a.transpose(); }

// Element of Sp(n) Sp(1): Cayley transform of a random sp(n) element times cos t + sin t I_1.
Mat<double> random_group_element(int n, std::mt19937_64& rng) {
  const int m = 4 * n;
  const auto I = standard_structures(n);
  std::normal_distribution<double> g;
  Mat<double> A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      A(i, j) = g(rng);
      A(j, i) = -A(i, j);
    }
  const Mat<double> X = 0.3 * project_obs(A, I).sp_n;
  const Mat<double> one = scaled_identity(m, 1.0);
  const Mat<double> cay = inverse(one - 0.5 * X) * (one + 0.5 * X);
  const double t = g(rng);
  return cay * (std::cos(t) * one + std::sin(t) * I[0]);
}

Mat<double> slice(const FormTensor<double>& w, int x) {
  const int m = 4 * w.n;
  Mat<double> r(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) r(k, l) = w.at(x, k, l);
  return r;
}

}  // namespace

TEST(Connection, StructuralChecksHoldForAnyAdmissibleTriple) {
  std::mt19937_64 rng(2);
  for (const auto& M : spaces())
    for (const auto& p : sample_points(M, 3, 4))
      for (int shifted = 0; shifted < 2; ++shifted) {
        ConnectionOptions o;
        if (shifted) o.shift_coeffs = random_coeffs(4 * M.n, rng, 0.5);
        const auto t = koszul_connection(M, p, o);
        const auto c = connection_checks(t);
        EXPECT_LT(c.skew, 1e-10) << M.name;
        EXPECT_LT(c.torsion_q, 1e-10) << M.name;
        EXPECT_LT(c.torsion_perp, 1e-10) << M.name;
        EXPECT_LT(c.symmetry_q, 1e-10) << M.name;
        EXPECT_LT(c.symmetry_perp, 1e-10) << M.name;
        EXPECT_LT(c.cross_block, 1e-10) << M.name;
      }
}

TEST(Connection, PreservesTheMetricFamily) {
  for (const auto& M : spaces())
    for (const auto& p : sample_points(M, 2, 5)) {
      const auto t = koszul_connection(M, p);
      for (double k : {0.5, 1.0, 2.0}) EXPECT_LT(metric_residual(M, t, k), 1e-9) << M.name << " k=" << k;
    }
}

TEST(Connection, AdaptedFrameIsLeviOrthonormalAndQuaternionic) {
  for (const auto& M : spaces()) {
    const auto t = koszul_connection(M, sample_points(M, 1, 6)[0]);
    const int m = t.m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) EXPECT_NEAR(t.gram(i, j), i == j ? t.eps_sign[i] : 0.0, 1e-10);
    const auto I = standard_structures(M.n);
    for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff(t.I_eps[a], I[a]), 1e-10) << M.name;
  }
}

TEST(Connection, QBlockMatchesOrthonormalFrameFormula) {
  for (const auto& M : spaces()) {
    const auto t = koszul_connection(M, sample_points(M, 1, 7)[0]);
    const auto direct = direct_q_connection(t);
    const int m = t.m;
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          worst = std::max(worst, std::abs(direct[(static_cast<std::size_t>(i) * m + j) * m + k] - t.gam(i, j, k)));
    EXPECT_LT(worst, 1e-10) << M.name;
  }
}

TEST(Connection, FormChangeUnderTripleShiftHasClosedForm) {
  std::mt19937_64 rng(8);
  for (const auto& M : spaces()) {
    const auto p = sample_points(M, 1, 8)[0];
    const int m = 4 * M.n;
    const auto c = random_coeffs(m, rng, 0.5);
    ConnectionOptions o;
    o.shift_coeffs = c;
    const auto t0 = koszul_connection(M, p), t1 = koszul_connection(M, p, o);
    pipeline::FramePlan plan;
    const auto P = point_pipeline(M, p, {}, plan);
    std::vector<Vec<double>> e;
    for (const auto& x : P.eps) e.push_back(values(x));
    double worst = 0.0;
    for (int x = 0; x < m; ++x)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double predicted = 0.0;
          for (int a = 0; a < 3; ++a) {
            const Mat<double> D = pipeline::values_of(P.J.dtheta[a]);
            const Vec<double> iv = t0.I_eps[a] * c;
            auto g = [&](int j) { return t0.eps_sign[j] * iv[j]; };  // g(I_a V, eps_j)
            predicted += bilinear(e[x], D, e[k]) * g(l) - bilinear(e[x], D, e[l]) * g(k) - bilinear(e[k], D, e[l]) * g(x);
          }
          worst = std::max(worst, std::abs(t1.omega.at(x, k, l) - t0.omega.at(x, k, l) - predicted));
        }
    EXPECT_LT(worst, 1e-10) << M.name;
  }
}

TEST(Curvature, JetsAgreeWithFiniteDifferences) {
  for (const auto& M : {make_ellipsoid(2, generic_ellipsoid()), make_t3_hopf({2.0, 0.5})}) {
    const auto p = sample_points(M, 1, 9)[0];
    const auto a = curvature(M, p);
    const auto b = curvature(M, p, {}, Differentiation::finite_difference);
    double big = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < a.R.size(); ++i) {
      big = std::max(big, std::abs(a.R[i]));
      worst = std::max(worst, std::abs(a.R[i] - b.R[i]));
    }
    EXPECT_LT(worst / big, 1e-7) << M.name;
  }
}

TEST(Curvature, ModelSpaces) {
  for (int n : {1, 2}) {
    const auto S = make_sphere(n);
    const auto rep = curvature(S, sample_points(S, 1, 10)[0]);
    EXPECT_NEAR(rep.s, 8.0 * n * (n + 2), 1e-8);
    EXPECT_LT(max_diff(rep.r, scaled_identity(4 * n, 2.0 * (n + 2))), 1e-8);
    // curvature is antisymmetric in the first pair
    for (int i = 0; i < rep.K; ++i)
      for (int j = 0; j < rep.K; ++j) EXPECT_NEAR(rep.riemann(i, j, 0, 1), -rep.riemann(j, i, 0, 1), 1e-10);
  }
  const auto H = make_heisenberg(2);
  for (double x : curvature(H, sample_points(H, 1, 10)[0]).R) EXPECT_NEAR(x, 0.0, 1e-10);
}

TEST(Curvature, RejectsFirstOrderShift) {
  const auto S = make_sphere(2);
  const auto p = sample_points(S, 1, 1)[0];
  ConnectionOptions o;
  o.triple_shift = pipeline::JVec<double>(S.dim);
  EXPECT_THROW(curvature(S, p, o), BadParams);
}

TEST(RepDecomp, ProjectionRanks) {
  for (int n : {1, 2, 3}) {
    const int m = 4 * n;
    const auto I = standard_structures(n);
    double spn = 0.0, sp1 = 0.0, obs = 0.0;
    for (int k = 0; k < m; ++k)
      for (int l = k + 1; l < m; ++l) {
        Mat<double> E(m, m);
        E(k, l) = 1.0 / std::sqrt(2.0);
        E(l, k) = -E(k, l);
        const auto parts = project_obs(E, I);
        auto inner = [&](const Mat<double>& a) {
          double s = 0.0;
          for (std::size_t i = 0; i < a.a.size(); ++i) s += a.a[i] * E.a[i];
          return s;
        };
        spn += inner(parts.sp_n);
        sp1 += inner(parts.sp_1);
        obs += inner(parts.obs);
      }
    EXPECT_NEAR(spn, n * (2 * n + 1), 1e-10) << n;
    EXPECT_NEAR(sp1, 3.0, 1e-10) << n;
    EXPECT_NEAR(obs, 2 * n * (4 * n - 1) - n * (2 * n + 1) - 3, 1e-10) << n;
  }
}

TEST(RepDecomp, PartsOfKnownElements) {
  const auto I = standard_structures(2);
  // I_a lies in sp(1)
  auto parts = project_obs(I[1], I);
  EXPECT_LT(max_abs(parts.sp_n), 1e-14);
  EXPECT_LT(max_abs(parts.obs), 1e-14);
  EXPECT_LT(max_diff(parts.sp_1, I[1]), 1e-14);
  // a matrix commuting with every I_a lies in sp(n)
  std::mt19937_64 rng(3);
  Mat<double> A(8, 8);
  std::normal_distribution<double> g;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) A(i, j) = g(rng), A(j, i) = -A(i, j);
  const Mat<double> X = project_obs(A, I).sp_n;
  for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff(X * I[a], I[a] * X), 1e-12);
  parts = project_obs(X, I);
  EXPECT_LT(max_diff(parts.sp_n, X), 1e-12);
  EXPECT_LT(max_abs(parts.sp_1) + max_abs(parts.obs), 1e-12);
  Mat<double> sym(8, 8);
  sym(0, 1) = sym(1, 0) = 1.0;
  EXPECT_THROW(project_obs(sym, I), NotAntisymmetric);
}

TEST(RepDecomp, ExplicitCoefficientsMatchProjector) {
  std::mt19937_64 rng(5);
  // traceless part of Lambda^2 E vanishes for n = 1
  EXPECT_EQ(EHProjector::get(1).span_rank(), 0);
  for (int n : {2, 3}) {
    const auto& P = EHProjector::get(n);
    EXPECT_EQ(P.span_rank(), 4 * n);
    for (int t = 0; t < 50; ++t) {
      const auto w = random_form(n, rng);
      const auto ex = eh_coefficients(w);
      const auto ab = P.coefficients(w);
      for (std::size_t i = 0; i < ex.size(); ++i)
        EXPECT_LT(std::abs(std::complex<double>(ex[i].re, ex[i].im) - ab[i]), 1e-10) << n;
      // the coefficients only see the E (x) H part
      const auto proj = P.project(w);
      const auto ex2 = eh_coefficients(proj);
      for (std::size_t i = 0; i < ex.size(); ++i)
        EXPECT_LT(std::hypot(ex[i].re - ex2[i].re, ex[i].im - ex2[i].im), 1e-10);
    }
  }
}

TEST(RepDecomp, NonEHComponentsMoveWithoutQuaternionicContact) {
  std::mt19937_64 rng(10);
  const auto M = make_ellipsoid(2, generic_ellipsoid());
  const auto p = sample_points(M, 1, 11)[0];
  ConnectionOptions o;
  o.shift_coeffs = random_coeffs(8, rng, 0.7);
  EXPECT_GT(max_abs(non_eh_obstruction(koszul_connection(M, p).omega),
                    non_eh_obstruction(koszul_connection(M, p, o).omega)),
            1e-3);
}

TEST(RepDecomp, ProjectorIsIdempotentAndEquivariant) {
  std::mt19937_64 rng(6);
  const int n = 2;
  const auto& P = EHProjector::get(n);
  for (int t = 0; t < 5; ++t) {
    const auto w = random_form(n, rng);
    const auto pw = P.project(w);
    EXPECT_LT(max_abs(P.project(pw), pw), 1e-12);
    const Mat<double> g = random_group_element(n, rng);
    EXPECT_LT(max_diff(g * transpose(g), scaled_identity(4 * n, 1.0)), 1e-12);
    EXPECT_LT(max_abs(P.project(act(g, w)), act(g, pw)), 1e-10);
    // obstruction splitting commutes with the group too
    const auto I = standard_structures(n);
    const Mat<double> om = slice(w, 0);
    const auto a = project_obs(g * om * transpose(g), I);
    const auto b = project_obs(om, I);
    EXPECT_LT(max_diff(a.obs, g * b.obs * transpose(g)), 1e-10);
    EXPECT_LT(max_diff(a.sp_n, g * b.sp_n * transpose(g)), 1e-10);
  }
}

// Holds when d theta_a(X, I_a Y) is the same form for every a; the generic
// ellipsoid and a random deformation leak the shift into other components.
TEST(RepDecomp, NonEHComponentsIgnoreTheTriple) {
  std::mt19937_64 rng(9);
  for (const auto& M : {make_sphere(2), make_heisenberg(2), make_sphere(3),
                        make_ellipsoid(2, EllipsoidConstants::quaternionic({1.0, 2.0, 3.0}))}) {
    const auto p = sample_points(M, 1, 11)[0];
    const auto base = non_eh_obstruction(koszul_connection(M, p).omega);
    for (int t = 0; t < 3; ++t) {
      ConnectionOptions o;
      o.shift_coeffs = random_coeffs(4 * M.n, rng, 0.7);
      const auto w = koszul_connection(M, p, o).omega;
      EXPECT_LT(max_abs(base, non_eh_obstruction(w)), 1e-9) << M.name;
    }
  }
}
