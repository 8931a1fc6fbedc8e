#include "qcr/connection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcr {

namespace {

using pipeline::FramePlan;
using pipeline::JVec;

template <class R>
pipeline::PipelineOptions<R> options_for(const ConnectionOptions& opt) {
  pipeline::PipelineOptions<R> o;
  o.catalog_frame = opt.catalog_frame;
  o.require_definite = opt.require_definite;
  o.shift_coeffs = opt.shift_coeffs;
  return o;
}

// Carries a first-order shift to a dual pass along `dir`. Only its value and
// first derivative are known, so second derivatives of the shifted triple are lost.
JVec<DualD> lift_shift(const JVec<double>& v, const Vec<double>& dir) {
  JVec<DualD> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    r[i] = Jet1<DualD>(DualD(v[i].val, directional(v[i], dir)));
    for (double g : v[i].g) r[i].g.push_back(DualD(g, 0.0));
  }
  return r;
}

pipeline::PointPipeline<DualD> dual_pass(const ManifoldSpec& M, const ConnectionTable& t, const Vec<double>& dir) {
  return dual_pipeline(M, t.p, t.options, t.plan, dir);
}

pipeline::PointPipeline<double> value_pass(const ManifoldSpec& M, const ConnectionTable& t, const Point& x) {
  if (t.options.triple_shift) throw BadParams("shifted triples are only known to first order at the base point");
  FramePlan plan = t.plan;
  return pipeline::run_pipeline(M, x, options_for<double>(t.options), plan);
}

}  // namespace

pipeline::PointPipeline<double> point_pipeline(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt,
                                               FramePlan& plan) {
  auto o = options_for<double>(opt);
  o.triple_shift = opt.triple_shift;
  return pipeline::run_pipeline(M, p, o, plan);
}

pipeline::PointPipeline<DualD> dual_pipeline(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt,
                                             const FramePlan& plan, const Vec<double>& dir) {
  auto o = options_for<DualD>(opt);
  if (opt.triple_shift) o.triple_shift = lift_shift(*opt.triple_shift, dir);
  FramePlan replay = plan;
  return pipeline::run_pipeline(M, pipeline::seeded(p, dir), o, replay);
}

ConnectionTable koszul_connection(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt) {
  M.require_chart(p);
  ConnectionTable t;
  t.options = opt;
  t.p = p;
  const auto P = point_pipeline(M, p, opt, t.plan);
  const auto& C = P.core;
  t.n = C.n;
  t.m = C.m;
  t.K = C.K;
  t.N = C.N;
  for (const auto& f : C.f) t.frame.push_back(values(f));
  t.eps_sign = P.eps_sign;
  t.gram = pipeline::values_of(C.G);
  t.gamma = C.gamma;
  const int K = t.K;
  t.brackets.assign(static_cast<std::size_t>(K) * K * K, 0.0);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int l = 0; l < K; ++l) t.brackets[(static_cast<std::size_t>(i) * K + j) * K + l] = C.c(i, j, l);
  t.omega = form_tensor(C);
  t.I_eps = structure_on_frame(P);
  return t;
}

std::vector<double> direct_q_connection(const ConnectionTable& t) {
  const int m = t.m;
  // g([f_i, f_j], f_k) on Q
  auto gb = [&](int i, int j, int k) {
    double s = 0.0;
    for (int l = 0; l < m; ++l) s += t.c(i, j, l) * t.gram(l, k);
    return s;
  };
  std::vector<double> out(static_cast<std::size_t>(m) * m * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double v = 0.5 * (gb(i, j, k) - gb(j, k, i) + gb(k, i, j));
        out[(static_cast<std::size_t>(i) * m + j) * m + k] = v / t.gram(k, k);
      }
  return out;
}

Vec<double> covariant_derivative(const ConnectionTable& t, int i, const JVec<double>& y) {
  const int K = t.K;
  Vec<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    out[k] += directional(y[k], t.frame[i]);
    for (int l = 0; l < K; ++l) out[l] += y[k].val * t.gam(i, k, l);
  }
  return out;
}

ConnectionChecks connection_checks(const ConnectionTable& t) {
  ConnectionChecks r;
  const int m = t.m, K = t.K, n2 = 2 * t.n;
  auto bump = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  for (int x = 0; x < m; ++x)
    for (int I = 0; I < n2; ++I)
      for (int J = 0; J < n2; ++J) {
        const Cx<double> herm = t.omega.on_real(x, I, J + n2) + t.omega.on_real(x, J, I + n2).conj();
        bump(r.skew, std::hypot(herm.re, herm.im));
        const Cx<double> sym = t.omega.on_real(x, I, J) + t.omega.on_real(x, J, I);
        bump(r.skew, std::hypot(sym.re, sym.im));
      }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) bump(r.torsion_q, t.torsion(i, j, l));
  for (int i = m; i < K; ++i)
    for (int j = m; j < K; ++j)
      for (int l = m; l < K; ++l) bump(r.torsion_perp, t.torsion(i, j, l));
  // X -> Tor(U, X)_Q is g-symmetric
  for (int u = m; u < K; ++u)
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) {
        double a = 0.0, b = 0.0;
        for (int l = 0; l < m; ++l) {
          a += t.torsion(u, x, l) * t.gram(l, y);
          b += t.torsion(u, y, l) * t.gram(l, x);
        }
        bump(r.symmetry_q, a - b);
      }
  // U -> Tor(U, X)_{Q-perp} is g-perp-symmetric
  for (int x = 0; x < m; ++x)
    for (int u = m; u < K; ++u)
      for (int v = m; v < K; ++v) {
        double a = 0.0, b = 0.0;
        for (int l = m; l < K; ++l) {
          a += t.torsion(u, x, l) * t.gram(l, v);
          b += t.torsion(v, x, l) * t.gram(l, u);
        }
        bump(r.symmetry_perp, a - b);
      }
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int l = 0; l < K; ++l)
        if ((j < m) != (l < m)) bump(r.cross_block, t.gam(i, j, l));
  return r;
}

double metric_residual(const ManifoldSpec& M, const ConnectionTable& t, double k) {
  const int K = t.K, m = t.m;
  auto weight = [&](int j) { return j < m ? 1.0 : k; };
  double worst = 0.0;
  for (int i = 0; i < K; ++i) {
    const auto P = dual_pass(M, t, t.frame[i]);
    for (int j = 0; j < K; ++j)
      for (int l = 0; l < K; ++l) {
        if ((j < m) != (l < m)) continue;
        const double w = weight(j);
        double res = w * P.core.G(j, l).val.d;
        for (int q = 0; q < K; ++q) {
          res -= t.gam(i, j, q) * weight(q) * t.gram(q, l);
          res -= t.gam(i, l, q) * weight(q) * t.gram(j, q);
        }
        worst = std::max(worst, std::abs(res));
      }
  }
  return worst;
}

CurvatureReport curvature(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt, Differentiation how,
                          double step) {
  if (opt.triple_shift) throw BadParams("curvature needs the triple as a field, not a first-order shift");
  const ConnectionTable t = koszul_connection(M, p, opt);
  const int K = t.K, m = t.m;
  const std::size_t K3 = static_cast<std::size_t>(K) * K * K;

  // dG[i][(j*K + k)*K + l] = f_i(gamma(j,k,l))
  std::vector<std::vector<double>> dG(K, std::vector<double>(K3, 0.0));
  for (int i = 0; i < K; ++i) {
    if (how == Differentiation::jets) {
      const auto P = dual_pass(M, t, t.frame[i]);
      for (std::size_t e = 0; e < K3; ++e) dG[i][e] = P.core.gamma[e].d;
    } else {
      auto at = [&](double s) {
        return value_pass(M, t, axpy(s, t.frame[i], t.p)).core.gamma;
      };
      const auto a1 = at(step), b1 = at(-step), a2 = at(2.0 * step), b2 = at(-2.0 * step);
      for (std::size_t e = 0; e < K3; ++e)
        dG[i][e] = (8.0 * (a1[e] - b1[e]) - (a2[e] - b2[e])) / (12.0 * step);
    }
  }
  auto dgam = [&](int i, int j, int k, int l) { return dG[i][(static_cast<std::size_t>(j) * K + k) * K + l]; };

  CurvatureReport rep;
  rep.m = m;
  rep.K = K;
  rep.R.assign(K3 * K, 0.0);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          double s = dgam(i, j, k, l) - dgam(j, i, k, l);
          for (int q = 0; q < K; ++q) {
            s += t.gam(j, k, q) * t.gam(i, q, l) - t.gam(i, k, q) * t.gam(j, q, l);
            s -= t.c(i, j, q) * t.gam(q, k, l);
          }
          rep.R[((static_cast<std::size_t>(i) * K + j) * K + k) * K + l] = s;
        }

  rep.ricci = Mat<double>(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += rep.riemann(i, j, k, i);
      rep.ricci(j, k) = s;
    }
  const Mat<double> sym = SymMatrix(rep.ricci).dense();
  rep.r = 0.25 * sym;
  for (int a = 0; a < 3; ++a) rep.r = rep.r + 0.25 * (t.I_eps[a].transpose() * sym * t.I_eps[a]);
  Mat<double> gq(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gq(i, j) = t.gram(i, j);
  const Mat<double> ginv = inverse(gq);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) rep.s += ginv(j, k) * rep.ricci(j, k);
  return rep;
}

}  // namespace qcr
