#include <gtest/gtest.h>

#include <complex>

#include "qcr/canonical.hpp"
#include "qcr/qcontact.hpp"
#include "support.hpp"

using namespace qcr;
using namespace qcr::oracle;

namespace {

ManifoldSpec quaternionic_ellipsoid(int n) {
  std::vector<double> d;
  for (int q = 0; q <= n; ++q) d.push_back(1.0 + q);
  return make_ellipsoid(n, EllipsoidConstants::quaternionic(d));
}

double df_along(const FieldExpr& f, const Point& p, const Vec<double>& e) {
  const auto x = variables(p);
  const JetD fx = f(std::span<const JetD>(x))[0];
  double s = 0.0;
  for (std::size_t r = 0; r < e.size(); ++r) s += fx.grad(static_cast<int>(r)) * e[r];
  return s;
}

}  // namespace

TEST(Canonical, Errors) {
  const auto S1 = make_sphere(1);
  EXPECT_THROW(solve_canonical(S1, sample_points(S1, 1, 1)[0]), DimensionSeven);
  const auto S = make_sphere(2);
  ConnectionOptions o;
  o.triple_shift = pipeline::JVec<double>(S.dim);
  EXPECT_THROW(solve_canonical(S, sample_points(S, 1, 1)[0], o), BadParams);
  const auto I = make_deformed_heisenberg(2, indefinite_deformation(2));
  EXPECT_THROW(solve_canonical(I, sample_points(I, 1, 1)[0]), NotUltraPseudoconvex);
}

TEST(Canonical, ModelTriplesAreAlreadyCanonical) {
  for (const auto& M : {make_sphere(2), make_heisenberg(2), make_sphere(3)})
    for (const auto& p : sample_points(M, 3, 2)) {
      const auto s = solve_canonical(M, p);
      EXPECT_LT(s.initial, 1e-10) << M.name;
      for (double v : s.v_eps) EXPECT_NEAR(v, 0.0, 1e-10) << M.name;
      const auto d = build_point_data(M, p);
      for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff(s.triple[a], d.triple[a]), 1e-10) << M.name;
    }
}

TEST(Canonical, ResultDoesNotDependOnTheReference) {
  std::mt19937_64 rng(3);
  for (const auto& M : {make_sphere(2), make_ellipsoid(2, generic_ellipsoid()),
                        make_deformed_heisenberg(2, random_integrable_deformation(2, rng))})
    for (const auto& p : sample_points(M, 2, 3)) {
      const auto base = solve_canonical(M, p);
      EXPECT_LT(base.residual, 1e-9);
      for (int t = 0; t < 3; ++t) {
        ConnectionOptions o;
        o.shift_coeffs = random_coeffs(8, rng, 0.5);
        const auto s = solve_canonical(M, p, o);
        EXPECT_GT(s.initial, 1e-3) << M.name;
        EXPECT_LT(s.residual, 1e-9) << M.name;
        for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff(s.triple[a], base.triple[a]), 1e-9) << M.name;
        for (int j = 0; j < 8; ++j) EXPECT_NEAR(s.v_eps[j], base.v_eps[j] - o.shift_coeffs[j], 1e-9);
      }
    }
}

TEST(Canonical, CoefficientsMoveAffinelyWithTheShift) {
  std::mt19937_64 rng(4);
  const auto M = make_ellipsoid(2, generic_ellipsoid());
  const int n = 2;
  const auto p = sample_points(M, 1, 4)[0];
  const auto base = solve_canonical(M, p);
  const Mat<double> h = base.h.dense();
  ConnectionOptions o;
  o.shift_coeffs = random_coeffs(4 * n, rng, 0.5);
  const auto s = solve_canonical(M, p, o);
  std::vector<double> hv(4 * n, 0.0);
  for (int a = 0; a < 4 * n; ++a)
    for (int j = 0; j < 4 * n; ++j) hv[a] += o.shift_coeffs[j] * h(j, a);
  const double k = -(3.0 * n - 3.0) / (2.0 * n);
  for (int i = 0; i < 2 * n; ++i) {
    const int a = 4 * (i / 2) + 2 * (i % 2);
    const std::complex<double> hvi(hv[a] / std::sqrt(2.0), -hv[a + 1] / std::sqrt(2.0));
    const std::complex<double> diff(s.eh_before[i].re - base.eh_before[i].re, s.eh_before[i].im - base.eh_before[i].im);
    EXPECT_LT(std::abs(diff - k * hvi), 1e-9) << i;
  }
}

TEST(Canonical, ConformalCorrectionSolvesItsEquation) {
  std::mt19937_64 rng(6);
  for (const auto& M : {make_sphere(2), make_ellipsoid(2, generic_ellipsoid())}) {
    const FieldExpr f = random_scalar(M.dim, rng);
    for (const auto& p : sample_points(M, 2, 6)) {
      const auto ct = conformal_triple(M, p, f);
      const Mat<double> h = solve_canonical(M, p).h.dense();
      pipeline::FramePlan plan;
      const auto P = point_pipeline(M, p, {}, plan);
      const int n = M.n;
      for (int j = 0; j < 4 * n; ++j) {
        double hw = 0.0;
        for (int i = 0; i < 4 * n; ++i) hw += h(j, i) * ct.w_eps[i];
        EXPECT_NEAR(hw, -(2.0 * n + 1.0) * df_along(f, p, values(P.eps[j])), 1e-9) << M.name;
      }
      const auto s = solve_canonical(conformal_scale(M, f), p);
      for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff(s.triple[a], ct.triple[a]), 1e-8) << M.name;
    }
  }
}

TEST(Canonical, GluesAcrossPointDependentGauges) {
  const auto S = make_sphere(2);
  std::mt19937_64 rng(7);
  for (const auto& p : sample_points(S, 3, 7)) {
    const auto r = gluing_check(S, sp_rotation(SpMatrix::random(2, rng)), p);
    EXPECT_LT(r.angle, 1e-7);
    EXPECT_LT(r.connection, 1e-7);
  }
  const auto E = make_ellipsoid(2, generic_ellipsoid());
  const auto p = sample_points(E, 1, 7)[0];
  EXPECT_LT(gluing_check(E, constant_rotation(random_rotation(rng), E.dim), p).angle, 1e-7);
}

TEST(QContact, ModelReebFieldsAreTheTriple) {
  for (const auto& M : {make_sphere(2), make_heisenberg(2), make_sphere(1)})
    for (const auto& p : sample_points(M, 3, 8)) {
      const auto rep = compat_check(M, p, true);
      EXPECT_LT(rep.compat_deviation, 1e-10) << M.name;
      ASSERT_TRUE(rep.reeb.has_value()) << M.name;
      const auto d = build_point_data(M, p);
      for (int a = 0; a < 3; ++a) EXPECT_LT(max_diff((*rep.reeb)[a], d.triple[a]), 1e-9) << M.name;
      if (M.n >= 2) {
        ASSERT_TRUE(rep.canonical_match.has_value());
        EXPECT_LT(*rep.canonical_match, 1e-7);
      }
    }
}

TEST(QContact, GenericEllipsoidIsNotQuaternionicContact) {
  const auto M = make_ellipsoid(2, generic_ellipsoid());
  for (const auto& p : sample_points(M, 3, 9)) {
    EXPECT_GT(compat_check(M, p).compat_deviation, 0.01);
    EXPECT_GT(reeb_residual(M, p), 1e-6);
    EXPECT_THROW(reeb_solve(M, p), NoReebField);
  }
}

TEST(QContact, CompatibleStructuresHaveProportionalH) {
  for (int n : {1, 2}) {
    const auto M = quaternionic_ellipsoid(n);
    for (const auto& p : sample_points(M, 3, 10)) {
      EXPECT_LT(compat_check(M, p).compat_deviation, 1e-9);
      const auto basis = build_point_data(M, p).Q_basis;
      const auto f = forms_on(M, p, basis);
      EXPECT_LT(max_diff(f.h, (2.0 * n + 1.0) * f.levi), 1e-9) << n;
      const auto R = reeb_solve(M, p);
      const auto d = build_point_data(M, p);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(dot(d.theta[a], R[b]), a == b ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(QContact, CanonicalTripleIsReebOnCompatibleStructures) {
  const auto M = quaternionic_ellipsoid(2);
  for (const auto& p : sample_points(M, 3, 11)) EXPECT_LT(canonical_equals_reeb(M, p), 1e-7);
}

TEST(QContact, CompatibilitySurvivesConformalScaling) {
  std::mt19937_64 rng(12);
  for (const auto& M : {make_sphere(2), quaternionic_ellipsoid(2)}) {
    const auto C = conformal_scale(M, random_scalar(M.dim, rng));
    for (const auto& p : sample_points(M, 2, 12)) EXPECT_LT(compat_check(C, p).compat_deviation, 1e-9) << M.name;
  }
}
