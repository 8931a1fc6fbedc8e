#pragma once

// Per-point evaluation pipeline, generic over the scalar R (double, or a dual
// number carrying one directional derivative). Quantities that connection
// coefficients depend on are carried as first-order jets, so brackets of frame
// fields come out exactly.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "qcr/algebra.hpp"
#include "qcr/calculus.hpp"
#include "qcr/manifold.hpp"

namespace qcr {

// Minimal complex number over any real scalar.
template <class R>
struct Cx {
  R re{}, im{};

  Cx() : re(0.0), im(0.0) {}
  Cx(R r) : re(std::move(r)), im(0.0) {}
  Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend Cx operator*(double s, const Cx& a) { return {s * a.re, s * a.im}; }
  Cx& operator+=(const Cx& o) { return *this = *this + o; }
  Cx& operator-=(const Cx& o) { return *this = *this - o; }
  Cx conj() const { return {re, -im}; }
};

namespace pipeline {

template <class R>
using JVec = Vec<Jet1<R>>;
template <class R>
using JMat = Mat<Jet1<R>>;

template <class R>
JMat<R> reshape_square(const std::vector<Jet2<R>>& flat, int N) {
  JMat<R> m(N, N);
  for (int i = 0; i < N * N; ++i) m.a[i] = first_order(flat[i]);
  return m;
}

template <class R>
Jet1<R> pair(const JVec<R>& form, const JVec<R>& v) {
  Jet1<R> s(0.0);
  for (std::size_t i = 0; i < v.size(); ++i) s += form[i] * v[i];
  return s;
}

template <class R>
R pair_values(const JVec<R>& form, const Vec<R>& v) {
  R s(0.0);
  for (std::size_t i = 0; i < v.size(); ++i) s += form[i].val * v[i];
  return s;
}

template <class R>
Mat<R> values_of(const JMat<R>& m) {
  Mat<R> r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = m.a[i].val;
  return r;
}

// theta, d theta, structure tensors, triple and (for hypersurfaces) the normal
// covector at a point, to first order.
template <class R>
struct StructureJets {
  int n = 0;
  int N = 0;
  std::array<JVec<R>, 3> theta;
  std::array<JMat<R>, 3> dtheta;
  std::array<JMat<R>, 3> S;
  std::array<JVec<R>, 3> triple;
  JVec<R> normal;
  // S_a (1 - T_a theta_a): equals I_a on Q, kills T_a, sends T_b to T_c.
  std::array<JMat<R>, 3> Itil;

  bool hypersurface() const { return !normal.empty(); }
  int rank() const { return 4 * n; }

  void refresh() {
    for (int a = 0; a < 3; ++a) {
      const JVec<R> st = S[a] * triple[a];
      Itil[a] = S[a];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) Itil[a](i, j) -= st[i] * theta[a][j];
    }
  }

  // T_a -> T_a + 2 I_a V for V in Q.
  void shift_triple(const JVec<R>& V) {
    std::array<JVec<R>, 3> t;
    for (int a = 0; a < 3; ++a) {
      const JVec<R> iv = Itil[a] * V;
      t[a] = triple[a];
      for (int i = 0; i < N; ++i) t[a][i] += Jet1<R>(2.0) * iv[i];
    }
    triple = std::move(t);
    refresh();
  }

  JVec<R> apply_I(int a, const JVec<R>& v) const { return Itil[a] * v; }
};

template <class R>
StructureJets<R> structure_jets(const ManifoldSpec& M, const Vec<R>& p) {
  StructureJets<R> J;
  J.n = M.n;
  J.N = M.dim;
  const auto x = variables(p);
  const std::span<const Jet2<R>> sx(x);
  for (int a = 0; a < 3; ++a) {
    const auto th = M.theta[a](sx);
    J.theta[a] = first_order(th);
    J.dtheta[a] = exterior_derivative(th);
    J.S[a] = reshape_square(M.structure[a](sx), J.N);
    J.triple[a] = first_order(M.triple[a](sx));
  }
  if (M.drho) J.normal = first_order((*M.drho)(sx));
  J.refresh();
  return J;
}

// Pivot choices, recorded on the first pass and replayed on derivative passes
// so the frames stay the same smooth fields.
struct FramePlan {
  std::vector<int> q_order;
  std::vector<int> eps_order;
};

// Euclidean-orthonormal basis of Q by pivoted Gram-Schmidt on the projector
// onto the common kernel of the thetas (and d rho).
template <class R>
std::vector<JVec<R>> q_basis(const StructureJets<R>& J, FramePlan& plan) {
  const int N = J.N;
  const int m = J.rank();
  std::vector<const JVec<R>*> rows = {&J.theta[0], &J.theta[1], &J.theta[2]};
  if (J.hypersurface()) rows.push_back(&J.normal);
  const int c = static_cast<int>(rows.size());
  JMat<R> C(c, N);
  for (int k = 0; k < c; ++k)
    for (int i = 0; i < N; ++i) C(k, i) = (*rows[k])[i];
  JMat<R> W;
  try {
    W = solve(C * C.transpose(), C);
  } catch (const SingularSystem&) {
    throw DegenerateStructure("the structure covectors are linearly dependent");
  }
  std::vector<JVec<R>> P(N, JVec<R>(N));
  for (int i = 0; i < N; ++i)
    for (int r = 0; r < N; ++r) {
      Jet1<R> s(r == i ? 1.0 : 0.0);
      for (int k = 0; k < c; ++k) s -= C(k, r) * W(k, i);
      P[i][r] = s;
    }

  std::vector<JVec<R>> q;
  auto reduce = [&q](JVec<R> w) {
    for (const auto& e : q) {
      const Jet1<R> c = dot(w, e);
      w = axpy(-c, e, std::move(w));
    }
    return w;
  };
  const bool fresh = plan.q_order.empty();
  std::vector<bool> used(N, false);
  for (int s = 0; s < m; ++s) {
    int pick = -1;
    JVec<R> v;
    if (!fresh) {
      pick = plan.q_order[s];
      v = reduce(P[pick]);
    } else {
      double best = -1.0;
      for (int i = 0; i < N; ++i) {
        if (used[i]) continue;
        JVec<R> w = reduce(P[i]);
        const double nv = value_of(dot(w, w));
        if (nv > best * (1.0 + 1e-12)) {
          best = nv;
          pick = i;
          v = std::move(w);
        }
      }
      if (best < 1e-14) throw DegenerateStructure("Q has dimension below 4n");
      plan.q_order.push_back(pick);
    }
    used[pick] = true;
    const Jet1<R> inv = Jet1<R>(1.0) / sqrt(dot(v, v));
    q.push_back(scale(inv, std::move(v)));
  }
  if (fresh) {
    for (int i = 0; i < N; ++i) {
      if (used[i]) continue;
      const JVec<R> w = reduce(P[i]);
      if (value_of(dot(w, w)) > 1e-12)
        throw DegenerateStructure("Q has dimension above 4n (residual " + std::to_string(value_of(dot(w, w))) + ")");
    }
  }
  return q;
}

// (1/2)(d theta_a(X, I_a Y) + d theta_a(I_b X, I_c Y)) as an ambient bilinear
// form; a = 0 is the defining expression, a = 1, 2 the other two.
template <class R>
JMat<R> levi_expression(const StructureJets<R>& J, int a) {
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  JMat<R> L = J.dtheta[a] * J.Itil[a] + J.Itil[b].transpose() * (J.dtheta[a] * J.Itil[c]);
  for (auto& e : L.a) e = Jet1<R>(0.5) * e;
  return L;
}

template <class R>
JMat<R> symmetrized(const JMat<R>& A) {
  JMat<R> S = A;
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) S(i, j) = Jet1<R>(0.5) * (A(i, j) + A(j, i));
  return S;
}

// d theta_a(., I_a .)
template <class R>
JMat<R> complex_levi(const StructureJets<R>& J, int a) {
  return J.dtheta[a] * J.Itil[a];
}

// Gram matrix of a bilinear form on a list of vectors (values only).
template <class R>
Mat<R> gram_values(const JMat<R>& A, const std::vector<JVec<R>>& v) {
  const int k = static_cast<int>(v.size());
  const Mat<R> a = values_of(A);
  Mat<R> g(k, k);
  for (int i = 0; i < k; ++i) {
    const Vec<R> vi = values(v[i]);
    for (int j = 0; j < k; ++j) g(i, j) = bilinear(vi, a, values(v[j]));
  }
  return g;
}

// Levi-orthonormal frame (e, I1 e, I2 e, I3 e, ...) built from the Q basis.
template <class R>
std::vector<JVec<R>> adapted_frame(const StructureJets<R>& J, const std::vector<JVec<R>>& q, const JMat<R>& L,
                                   FramePlan& plan, std::vector<double>& signs) {
  const int n = J.n;
  std::vector<JVec<R>> eps;
  signs.clear();
  auto reduce = [&](JVec<R> w) {
    for (std::size_t j = 0; j < eps.size(); ++j) {
      const Jet1<R> c = Jet1<R>(signs[j]) * bilinear(w, L, eps[j]);
      w = axpy(-c, eps[j], std::move(w));
    }
    return w;
  };
  const bool fresh = plan.eps_order.empty();
  std::vector<bool> used(q.size(), false);
  for (int k = 0; k < n; ++k) {
    int pick = -1;
    JVec<R> v;
    if (!fresh) {
      pick = plan.eps_order[k];
      v = reduce(q[pick]);
    } else {
      double best = -1.0;
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (used[i]) continue;
        JVec<R> w = reduce(q[i]);
        const double nv = std::abs(value_of(bilinear(w, L, w)));
        if (nv > best * (1.0 + 1e-12)) {
          best = nv;
          pick = static_cast<int>(i);
          v = std::move(w);
        }
      }
      plan.eps_order.push_back(pick);
    }
    used[pick] = true;
    const Jet1<R> s = bilinear(v, L, v);
    const double sign = value_of(s) < 0.0 ? -1.0 : 1.0;
    const Jet1<R> inv = Jet1<R>(1.0) / sqrt(Jet1<R>(sign) * s);
    const JVec<R> e = scale(inv, std::move(v));
    eps.push_back(e);
    signs.push_back(sign);
    for (int a = 0; a < 3; ++a) {
      eps.push_back(J.apply_I(a, e));
      signs.push_back(sign);
    }
  }
  return eps;
}

// Connection coefficients of the Koszul-type connection in a frame
// f = (Q frame, T_1, T_2, T_3): nabla_{f_i} f_j = sum_l gamma(i,j,l) f_l.
template <class R>
struct Core {
  int n = 0;
  int m = 0;  // rank of Q
  int K = 0;  // frame size 4n+3
  int N = 0;  // chart dimension
  std::vector<JVec<R>> f;
  Mat<R> F;              // N x N: frame columns, plus the normal for hypersurfaces
  JMat<R> G;             // K x K Gram matrix, block diagonal
  std::vector<R> br;     // bracket components, (i*K + j)*N + l
  std::vector<R> gamma;  // (i*K + j)*K + l

  R c(int i, int j, int l) const { return br[(static_cast<std::size_t>(i) * K + j) * N + l]; }
  R gam(int i, int j, int l) const { return gamma[(static_cast<std::size_t>(i) * K + j) * K + l]; }
  R torsion(int i, int j, int l) const { return gam(i, j, l) - gam(j, i, l) - c(i, j, l); }
  bool in_q(int i) const { return i < m; }
};

template <class R>
Core<R> connection_core(const StructureJets<R>& J, const std::vector<JVec<R>>& qframe, const JMat<R>& L) {
  Core<R> C;
  C.n = J.n;
  C.m = 4 * J.n;
  C.K = C.m + 3;
  C.N = J.N;
  const int K = C.K, N = C.N, m = C.m;
  C.f = qframe;
  for (int a = 0; a < 3; ++a) C.f.push_back(J.triple[a]);

  C.F = Mat<R>(N, N);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < N; ++i) C.F(i, k) = C.f[k][i].val;
  if (J.hypersurface()) {
    Vec<R> nv(N);
    for (int i = 0; i < N; ++i) nv[i] = J.normal[i].val;
    for (int i = 0; i < N; ++i) C.F(i, K) = nv[i];
  }

  C.G = JMat<R>(K, K);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) C.G(i, j) = C.G(j, i) = bilinear(C.f[i], L, C.f[j]);
  std::vector<std::array<Jet1<R>, 3>> th(K);
  for (int i = m; i < K; ++i)
    for (int a = 0; a < 3; ++a) th[i][a] = pair(J.theta[a], C.f[i]);
  for (int i = m; i < K; ++i)
    for (int j = i; j < K; ++j) C.G(i, j) = C.G(j, i) = th[i][0] * th[j][0] + th[i][1] * th[j][1] + th[i][2] * th[j][2];

  // brackets, decomposed in the frame
  const int pairs = K * (K - 1) / 2;
  Mat<R> B(N, pairs);
  {
    int col = 0;
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j, ++col) {
        const Vec<R> b = bracket(C.f[i], C.f[j]);
        for (int r = 0; r < N; ++r) B(r, col) = b[r];
      }
  }
  const Mat<R> coef = solve(C.F, B);
  C.br.assign(static_cast<std::size_t>(K) * K * N, R(0.0));
  {
    int col = 0;
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j, ++col)
        for (int l = 0; l < N; ++l) {
          C.br[(static_cast<std::size_t>(i) * K + j) * N + l] = coef(l, col);
          C.br[(static_cast<std::size_t>(j) * K + i) * N + l] = -coef(l, col);
        }
  }

  // derivative of the Gram entries along frame vectors
  std::vector<Vec<R>> fv(K);
  for (int i = 0; i < K; ++i) fv[i] = values(C.f[i]);
  std::vector<R> dG(static_cast<std::size_t>(K) * K * K, R(0.0));
  auto dg = [&](int i, int j, int k) -> R& { return dG[(static_cast<std::size_t>(i) * K + j) * K + k]; };
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        if ((j < m) == (k < m)) dg(i, j, k) = directional(C.G(j, k), fv[i]);

  auto g = [&](int i, int j) { return C.G(i, j).val; };
  auto c = [&](int i, int j, int l) { return C.br[(static_cast<std::size_t>(i) * K + j) * N + l]; };

  C.gamma.assign(static_cast<std::size_t>(K) * K * K, R(0.0));
  for (int blk = 0; blk < 2; ++blk) {
    const int lo = blk == 0 ? 0 : m;
    const int hi = blk == 0 ? m : K;
    const int d = hi - lo;
    Mat<R> Gb(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Gb(i, j) = g(lo + i, lo + j);
    // right-hand sides g(nabla_{f_i} f_j, f_k) for j, k in this block
    Mat<R> rhs(d, K * d);
    for (int i = 0; i < K; ++i)
      for (int j = lo; j < hi; ++j)
        for (int k = lo; k < hi; ++k) {
          R s(0.0);
          const bool same = (i < m) == (blk == 0);
          if (same) {
            s = dg(i, j, k) + dg(j, i, k) - dg(k, i, j);
            for (int l = lo; l < hi; ++l) s += c(i, j, l) * g(l, k) - c(i, k, l) * g(l, j) - c(j, k, l) * g(l, i);
          } else if (blk == 0) {
            // i transverse, j, k in Q
            s = dg(i, j, k);
            for (int l = lo; l < hi; ++l) s += c(i, j, l) * g(l, k) - c(i, k, l) * g(j, l);
          } else {
            // i in Q, j, k transverse
            s = dg(i, j, k);
            for (int l = lo; l < hi; ++l) s += -(c(j, i, l) * g(l, k)) + c(k, i, l) * g(j, l);
          }
          rhs(k - lo, i * d + (j - lo)) = 0.5 * s;
        }
    const Mat<R> sol = solve(Gb, rhs);
    for (int i = 0; i < K; ++i)
      for (int j = lo; j < hi; ++j)
        for (int l = lo; l < hi; ++l)
          C.gamma[(static_cast<std::size_t>(i) * K + j) * K + l] = sol(l - lo, i * d + (j - lo));
  }
  return C;
}

template <class R>
struct PipelineOptions {
  bool catalog_frame = false;          // use the manifold's frame fields instead of the adapted frame
  bool require_definite = true;        // reject indefinite Levi forms
  std::optional<JVec<R>> triple_shift; // V: use T_a + 2 I_a V
  std::vector<double> shift_coeffs;     // adds V = sum c_j eps_j to the shift
};

template <class R>
struct PointPipeline {
  StructureJets<R> J;
  std::vector<JVec<R>> q;
  JMat<R> levi;  // symmetrized ambient Levi form
  std::vector<JVec<R>> eps;
  std::vector<double> eps_sign;
  Core<R> core;
};

template <class R>
PointPipeline<R> run_pipeline(const ManifoldSpec& M, const Vec<R>& p, const PipelineOptions<R>& opt,
                              FramePlan& plan) {
  PointPipeline<R> P;
  const bool first_pass = plan.q_order.empty();
  P.J = structure_jets(M, p);
  P.q = q_basis(P.J, plan);
  P.levi = symmetrized(levi_expression(P.J, 0));
  if (first_pass && opt.require_definite) {
    const Mat<R> lq = gram_values(P.levi, P.q);
    const auto cls = definiteness(SymMatrix(value_mat(lq)));
    if (cls != Definiteness::positive && cls != Definiteness::negative)
      throw NotStronglyPseudoconvex(std::string("Levi form is ") + std::string(to_string(cls)));
  }
  if (opt.catalog_frame) {
    if (M.frame_fields.empty()) throw BadParams(M.name + " has no catalog frame fields");
    const auto x = variables(p);
    for (const auto& X : M.frame_fields) P.eps.push_back(first_order(X(std::span<const Jet2<R>>(x))));
    P.eps_sign.assign(P.eps.size(), 1.0);
  } else {
    P.eps = adapted_frame(P.J, P.q, P.levi, plan, P.eps_sign);
  }
  // Q, the Levi form on Q and the frame do not depend on the triple.
  if (opt.triple_shift || !opt.shift_coeffs.empty()) {
    JVec<R> V = opt.triple_shift ? *opt.triple_shift : JVec<R>(P.J.N, Jet1<R>(0.0));
    for (std::size_t j = 0; j < opt.shift_coeffs.size(); ++j) {
      const Jet1<R> c(opt.shift_coeffs[j]);
      V = axpy(c, P.eps[j], std::move(V));
    }
    P.J.shift_triple(V);
  }
  P.core = connection_core(P.J, P.eps, P.levi);
  return P;
}

// Seeds a point with a directional derivative.
inline Vec<DualD> seeded(const Vec<double>& p, const Vec<double>& dir) {
  Vec<DualD> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = DualD(p[i], dir[i]);
  return r;
}

}  // namespace pipeline
}  // namespace qcr
