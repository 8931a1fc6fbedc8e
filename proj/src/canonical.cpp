#include "qcr/canonical.hpp"

#include <algorithm>
#include <cmath>

#include "qcr/hypercr.hpp"

namespace qcr {

namespace {

using pipeline::FramePlan;
using pipeline::JVec;

double max_abs(const std::vector<Cx<double>>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::hypot(c.re, c.im));
  return m;
}

template <class R>
Vec<R> ambient(const Vec<R>& coeffs, const std::vector<JVec<R>>& eps) {
  Vec<R> v(eps.front().size(), R(0.0));
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    for (std::size_t r = 0; r < v.size(); ++r) v[r] += coeffs[j] * eps[j][r].val;
  return v;
}

// Frame-directional derivatives d(i, r) = f_i(V_r) turned into a chart gradient;
// the normal direction of a hypersurface gets zero.
JVec<double> jet_from_directional(const Vec<double>& value, const Mat<double>& D, const Mat<double>& F) {
  const int N = F.rows;
  const Mat<double> G = solve(F.transpose(), D);  // G(s, r) = d_s V_r
  JVec<double> out(N);
  for (int r = 0; r < N; ++r) {
    out[r] = Jet1<double>(value[r]);
    out[r].g.resize(N);
    for (int s = 0; s < N; ++s) out[r].g[s] = G(s, r);
  }
  return out;
}

void require_canonical_inputs(const ManifoldSpec& M, const ConnectionOptions& opt) {
  if (M.n == 1) throw DimensionSeven("the canonical triple needs dimension greater than seven");
  if (opt.triple_shift) throw BadParams("reference shifts must be given as frame coefficients");
}

}  // namespace

CanonicalSolution solve_canonical(const ManifoldSpec& M, const Point& p, const ConnectionOptions& reference) {
  require_canonical_inputs(M, reference);
  M.require_chart(p);
  CanonicalSolution sol;
  sol.n = M.n;
  FramePlan plan;
  const auto P = point_pipeline(M, p, reference, plan);
  const auto S = canonical_system(P);
  sol.h = SymMatrix(S.H);
  sol.h_class = definiteness(sol.h);
  if (sol.h_class != Definiteness::positive && sol.h_class != Definiteness::negative)
    throw NotUltraPseudoconvex(std::string("h is ") + std::string(to_string(sol.h_class)));
  sol.h_condition = condition_number(sol.h);
  sol.eh_before = S.eh;
  sol.initial = max_abs(S.eh);
  sol.v_eps = solve(S.H, S.b);
  sol.V = ambient(sol.v_eps, P.eps);

  // first-order jet of V from dual passes along the frame
  const int N = P.core.N, K = P.core.K;
  Mat<double> D(N, N);
  for (int i = 0; i < K; ++i) {
    const auto Pd = dual_pipeline(M, p, reference, plan, values(P.core.f[i]));
    const auto Sd = canonical_system(Pd);
    const Vec<DualD> vd = solve(Sd.H, Sd.b);
    const Vec<DualD> Vd = ambient(vd, Pd.eps);
    for (int r = 0; r < N; ++r) D(i, r) = Vd[r].d;
  }
  sol.V_jet = jet_from_directional(sol.V, D, P.core.F);

  ConnectionOptions corrected = reference;
  corrected.triple_shift = sol.V_jet;
  sol.table = koszul_connection(M, p, corrected);
  for (int a = 0; a < 3; ++a) sol.triple[a] = sol.table.frame[sol.table.m + a];
  sol.eh_after = eh_coefficients(sol.table.omega);
  sol.residual = max_abs(sol.eh_after);
  return sol;
}

ConformalTriple conformal_triple(const ManifoldSpec& M, const Point& p, const FieldExpr& f) {
  const CanonicalSolution base = solve_canonical(M, p);
  const int n = M.n;
  FramePlan plan;
  const auto P = point_pipeline(M, p, {}, plan);
  const auto S = canonical_system(P);
  const int m = 4 * n;
  const auto x = variables(p);
  const JetD fx = f(std::span<const JetD>(x))[0];
  Vec<double> rhs(m);
  for (int j = 0; j < m; ++j) {
    const Vec<double> e = values(P.eps[j]);
    double df = 0.0;
    for (std::size_t r = 0; r < e.size(); ++r) df += fx.grad(static_cast<int>(r)) * e[r];
    rhs[j] = -(2.0 * n + 1.0) * df;
  }
  ConformalTriple out;
  out.w_eps = solve(S.H, rhs);
  out.W = ambient(out.w_eps, P.eps);
  const double scale = std::exp(-2.0 * f(p)[0]);
  const auto& J = base.table;
  FramePlan plan2;
  ConnectionOptions corrected;
  corrected.triple_shift = base.V_jet;
  const auto Pc = point_pipeline(M, p, corrected, plan2);
  for (int a = 0; a < 3; ++a) {
    const Vec<double> iw = pipeline::values_of(Pc.J.Itil[a]) * out.W;
    out.triple[a] = J.frame[J.m + a];
    for (std::size_t r = 0; r < iw.size(); ++r) out.triple[a][r] = scale * (out.triple[a][r] + 2.0 * iw[r]);
  }
  return out;
}

double triple_angle(const std::array<Vec<double>, 3>& a, const std::array<Vec<double>, 3>& b) {
  const Mat<double> A = Mat<double>::from_columns({a[0], a[1], a[2]});
  const Mat<double> B = Mat<double>::from_columns({b[0], b[1], b[2]});
  const auto angles = principal_angles(A, B);
  return *std::max_element(angles.begin(), angles.end());
}

GluingReport gluing_check(const ManifoldSpec& M, const FieldExpr& rotation, const Point& p) {
  const ManifoldSpec R = gauge_rotate(M, rotation);
  const CanonicalSolution s1 = solve_canonical(M, p);
  const CanonicalSolution s2 = solve_canonical(R, p);
  GluingReport rep;
  rep.angle = triple_angle(s1.triple, s2.triple);

  ConnectionOptions o1, o2;
  o1.triple_shift = s1.V_jet;
  o2.triple_shift = s2.V_jet;
  FramePlan plan1, plan2;
  const auto P1 = point_pipeline(M, p, o1, plan1);
  const auto P2 = point_pipeline(R, p, o2, plan2);
  const ConnectionTable& t1 = s1.table;
  const ConnectionTable& t2 = s2.table;
  const int m = t1.m, K = t1.K, N = t1.N;

  // frame of the rotated structure, with the normal for hypersurfaces, as jets
  pipeline::JMat<double> F2(N, N);
  for (int k = 0; k < K; ++k)
    for (int r = 0; r < N; ++r) F2(r, k) = P2.core.f[k][r];
  if (P2.J.hypersurface())
    for (int r = 0; r < N; ++r) F2(r, K) = P2.J.normal[r];
  const Mat<double> F2v = pipeline::values_of(F2);

  double scale = 1.0;
  for (double g : t1.gamma) scale = std::max(scale, std::abs(g));
  for (int i = 0; i < m; ++i) {
    const Vec<double> dir = solve(F2v, values(P1.eps[i]));
    for (int j = 0; j < m; ++j) {
      const JVec<double> y = solve(F2, P1.eps[j]);
      const JVec<double> yk(y.begin(), y.begin() + K);
      Vec<double> comps(K, 0.0);
      for (int k = 0; k < K; ++k) comps = axpy(dir[k], covariant_derivative(t2, k, yk), std::move(comps));
      Vec<double> rhs(N, 0.0), lhs(N, 0.0);
      for (int l = 0; l < K; ++l) {
        rhs = axpy(comps[l], t2.frame[l], std::move(rhs));
        lhs = axpy(t1.gam(i, j, l), t1.frame[l], std::move(lhs));
      }
      for (int r = 0; r < N; ++r) rep.connection = std::max(rep.connection, std::abs(lhs[r] - rhs[r]) / scale);
    }
  }
  return rep;
}

}  // namespace qcr
