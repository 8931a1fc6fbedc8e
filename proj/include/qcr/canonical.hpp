#pragma once

#include <array>
#include <vector>

#include "qcr/connection.hpp"
#include "qcr/repdecomp.hpp"

namespace qcr {

// h on the adapted frame, the E (x) H coefficients of the connection form, and
// the right-hand side of the real linear system H v = b whose solution V = sum v_j eps_j
// removes them.
template <class R>
struct CanonicalSystem {
  Mat<R> H;
  Vec<R> b;
  std::vector<Cx<R>> eh;
};

template <class R>
CanonicalSystem<R> canonical_system(const pipeline::PointPipeline<R>& P) {
  const int n = P.J.n;
  const int m = 4 * n;
  pipeline::JMat<R> h = P.levi;
  for (auto& e : h.a) e = Jet1<R>(2.0 * n + 4.0) * e;
  for (int a = 0; a < 3; ++a) h = h - pipeline::symmetrized(pipeline::complex_levi(P.J, a));
  CanonicalSystem<R> S;
  S.H = pipeline::gram_values(h, P.eps);
  S.eh = eh_coefficients(form_tensor(P.core));
  S.b.assign(m, R(0.0));
  const double c = std::sqrt(2.0) * 2.0 * n / (3.0 * n - 3.0);
  for (int i = 0; i < 2 * n; ++i) {
    const int a = 4 * (i / 2) + 2 * (i % 2);
    S.b[a] = c * S.eh[i].re;
    S.b[a + 1] = -c * S.eh[i].im;
  }
  return S;
}

struct CanonicalSolution {
  int n = 0;
  Vec<double> V;                 // correction, ambient components
  Vec<double> v_eps;             // correction on the adapted frame
  pipeline::JVec<double> V_jet;  // correction to first order
  std::array<Vec<double>, 3> triple;
  ConnectionTable table;         // connection of the corrected triple
  std::vector<Cx<double>> eh_before, eh_after;
  double initial = 0.0;   // max |E (x) H coefficient| of the reference triple
  double residual = 0.0;  // same after correction
  SymMatrix h;
  Definiteness h_class = Definiteness::degenerate;
  double h_condition = 0.0;
};

// Canonical triple T_a + 2 I_a V from a reference triple. The reference may be
// shifted by `shift_coeffs` (a field on the adapted frame) but not by a
// first-order `triple_shift`. Throws DimensionSeven for n = 1 and
// NotUltraPseudoconvex unless h is definite.
CanonicalSolution solve_canonical(const ManifoldSpec& M, const Point& p, const ConnectionOptions& reference = {});

struct ConformalTriple {
  Vec<double> W;       // ambient
  Vec<double> w_eps;   // on the adapted frame
  std::array<Vec<double>, 3> triple;  // e^{-2f}(T_a + 2 I_a W), T the canonical triple of M
};

// h(W, X) = -(2n+1) df(X) on Q; f is a scalar field on the chart.
ConformalTriple conformal_triple(const ManifoldSpec& M, const Point& p, const FieldExpr& f);

struct GluingReport {
  double angle = 0.0;       // largest principal angle between the canonical three-plane fields
  double connection = 0.0;  // max |nabla_X Y - nabla'_X Y| on adapted-frame pairs of Q
};

// Canonical data of M against gauge_rotate(M, rotation).
GluingReport gluing_check(const ManifoldSpec& M, const FieldExpr& rotation, const Point& p);

// Largest principal angle between the spans of two triples.
double triple_angle(const std::array<Vec<double>, 3>& a, const std::array<Vec<double>, 3>& b);

}  // namespace qcr
