#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "qcr/manifold.hpp"
#include "qcr/pipeline.hpp"

namespace qcr {

// Connection form on Q in the adapted frame: A(x,k,l) = g(nabla_{eps_x} eps_k, eps_l).
//
// Complex frame indices: for I < 2n, e_I = (eps_a - i eps_{a+1}) / sqrt 2 with
// a = 4(I/2) + 2(I%2); I + 2n denotes the conjugate of e_I.
//
//   complex index | real pair
//   e_{2k}        | eps_{4k},   eps_{4k+1}
//   e_{2k+1}      | eps_{4k+2}, eps_{4k+3}
template <class R>
struct FormTensor {
  int n = 0;
  std::vector<R> A;

  int m() const { return 4 * n; }
  const R& at(int x, int k, int l) const { return A[(static_cast<std::size_t>(x) * m() + k) * m() + l]; }
  R& at(int x, int k, int l) { return A[(static_cast<std::size_t>(x) * m() + k) * m() + l]; }

  // omega(X; Y, Z) = g(nabla_X Y, Z), extended complex-trilinearly, on complex frame indices.
  Cx<R> operator()(int X, int Y, int Z) const {
    const auto x = unit(X), y = unit(Y), z = unit(Z);
    Cx<R> s;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const Cx<R> c = x.c[i] * y.c[j] * z.c[k];
          const R& a = at(x.idx[i], y.idx[j], z.idx[k]);
          s += Cx<R>(c.re * a, c.im * a);
        }
    return s;
  }

  // Same with a real frame vector eps_x in the first slot.
  Cx<R> on_real(int x, int Y, int Z) const {
    const auto y = unit(Y), z = unit(Z);
    Cx<R> s;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const Cx<R> c = y.c[j] * z.c[k];
        const R& a = at(x, y.idx[j], z.idx[k]);
        s += Cx<R>(c.re * a, c.im * a);
      }
    return s;
  }

 private:
  struct Unit {
    std::array<int, 2> idx;
    std::array<Cx<R>, 2> c;
  };
  Unit unit(int I) const {
    const bool bar = I >= 2 * n;
    const int J = bar ? I - 2 * n : I;
    const int a = 4 * (J / 2) + 2 * (J % 2);
    const double r = 1.0 / std::sqrt(2.0);
    return {{a, a + 1}, {Cx<R>(R(r), R(0.0)), Cx<R>(R(0.0), R(bar ? r : -r))}};
  }
};

template <class R>
FormTensor<R> form_tensor(const pipeline::Core<R>& C) {
  FormTensor<R> w;
  w.n = C.n;
  const int m = C.m;
  w.A.assign(static_cast<std::size_t>(m) * m * m, R(0.0));
  for (int x = 0; x < m; ++x)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        R s(0.0);
        for (int q = 0; q < m; ++q) s += C.gam(x, k, q) * C.G(q, l).val;
        w.at(x, k, l) = s;
      }
  return w;
}

// I_a in adapted-frame coordinates: column j holds the components of I_a eps_j.
template <class R>
std::array<Mat<R>, 3> structure_on_frame(const pipeline::PointPipeline<R>& P) {
  const int m = static_cast<int>(P.eps.size());
  const Mat<R> L = pipeline::values_of(P.levi);
  std::array<Mat<R>, 3> out;
  std::vector<Vec<R>> ev;
  for (const auto& e : P.eps) ev.push_back(values(e));
  for (int a = 0; a < 3; ++a) {
    const Mat<R> Ia = pipeline::values_of(P.J.Itil[a]);
    out[a] = Mat<R>(m, m);
    for (int j = 0; j < m; ++j) {
      const Vec<R> v = Ia * ev[j];
      for (int i = 0; i < m; ++i) out[a](i, j) = R(P.eps_sign[i]) * bilinear(v, L, ev[i]);
    }
  }
  return out;
}

struct ConnectionOptions {
  bool catalog_frame = false;     // use the manifold's own frame fields on Q
  bool require_definite = true;
  std::optional<pipeline::JVec<double>> triple_shift;  // V, giving T_a + 2 I_a V
  std::vector<double> shift_coeffs;                    // V = sum c_j eps_j as a field, added to the shift
};

// Full per-point pipeline for the given options; records the frame plan.
pipeline::PointPipeline<double> point_pipeline(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt,
                                               pipeline::FramePlan& plan);
// Replays `plan` in a dual-number pass seeded along `dir`.
pipeline::PointPipeline<DualD> dual_pipeline(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt,
                                             const pipeline::FramePlan& plan, const Vec<double>& dir);

// Connection of a given admissible three-plane field in the frame
// f = (eps_1..eps_4n, T_1, T_2, T_3).
struct ConnectionTable {
  int n = 0;
  int m = 0;
  int K = 0;
  int N = 0;
  Point p;
  std::vector<Vec<double>> frame;
  std::vector<double> eps_sign;
  Mat<double> gram;                  // K x K
  std::array<Mat<double>, 3> I_eps;  // I_a on the eps frame
  std::vector<double> gamma;         // nabla_{f_i} f_j = sum_l gamma(i,j,l) f_l
  std::vector<double> brackets;      // [f_i, f_j] = sum_l c(i,j,l) f_l
  FormTensor<double> omega;
  pipeline::FramePlan plan;
  ConnectionOptions options;

  double gam(int i, int j, int l) const { return gamma[idx(i, j, l)]; }
  double c(int i, int j, int l) const { return brackets[idx(i, j, l)]; }
  double torsion(int i, int j, int l) const { return gam(i, j, l) - gam(j, i, l) - c(i, j, l); }
  bool in_q(int i) const { return i < m; }

 private:
  std::size_t idx(int i, int j, int l) const { return (static_cast<std::size_t>(i) * K + j) * K + l; }
};

ConnectionTable koszul_connection(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt = {});

// Same coefficients on Q from the orthonormal-frame formula
// g(nabla_i f_j, f_k) = (g([i,j],k) - g([j,k],i) + g([k,i],j)) / 2.
std::vector<double> direct_q_connection(const ConnectionTable& t);

// Components of nabla_{f_i} Y in the frame f, for Y = sum y_k f_k with the
// coefficients y_k given as first-order jets in chart coordinates.
Vec<double> covariant_derivative(const ConnectionTable& t, int i, const pipeline::JVec<double>& y);

struct ConnectionChecks {
  double skew = 0.0;          // skew-hermitian / skew-symmetric defect of omega
  double torsion_q = 0.0;     // |Tor(X,Y)_Q| on Q frame pairs
  double torsion_perp = 0.0;  // |Tor(U,V)_{Q-perp}| on triple pairs
  double symmetry_q = 0.0;    // g-symmetry defect of X -> Tor(U,X)_Q
  double symmetry_perp = 0.0; // g-symmetry defect of U -> Tor(U,X)_{Q-perp}
  double cross_block = 0.0;   // coefficients mixing Q and Q-perp
};
ConnectionChecks connection_checks(const ConnectionTable& t);

// max |(nabla g_k)(f_i; f_j, f_l)| for g_k = Levi + k (theta_1^2 + theta_2^2 + theta_3^2),
// with the derivative of g_k taken from a separate derivative pass.
double metric_residual(const ManifoldSpec& M, const ConnectionTable& t, double k);

enum class Differentiation { jets, finite_difference };

struct CurvatureReport {
  int m = 0;
  int K = 0;
  std::vector<double> R;  // R(f_i, f_j) f_k = sum_l R(i,j,k,l) f_l
  Mat<double> ricci;      // on the eps frame
  Mat<double> r;          // quaternion-hermitian part
  double s = 0.0;

  double riemann(int i, int j, int k, int l) const {
    return R[((static_cast<std::size_t>(i) * K + j) * K + k) * K + l];
  }
};

// R(X,Y) = [nabla_X, nabla_Y] - nabla_{[X,Y]}; Ric(X,Y) = trace of Z -> R(Z,X)Y over Q.
// Coefficient derivatives come from dual-number passes, or from a
// Richardson-extrapolated central difference with the given step.
CurvatureReport curvature(const ManifoldSpec& M, const Point& p, const ConnectionOptions& opt = {},
                          Differentiation how = Differentiation::jets, double step = 1e-3);

}  // namespace qcr
