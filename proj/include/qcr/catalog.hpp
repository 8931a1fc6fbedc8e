#pragma once

#include <array>
#include <complex>
#include <random>
#include <vector>

#include "qcr/algebra.hpp"
#include "qcr/manifold.hpp"

namespace qcr {

ManifoldSpec make_sphere(int n);
ManifoldSpec make_heisenberg(int n);

// Constants of the deformed Heisenberg frame: A[a][alpha] for a = 0,1,2.
struct DeformationConstants {
  std::array<std::vector<double>, 3> A, B, C, D;

  static DeformationConstants uniform(int n, double a, double b, double c, double d);
  // Lambda_alpha computed with the given index a.
  double lambda(int a, int alpha) const { return A[a][alpha] + B[a][alpha] + C[a][alpha] + D[a][alpha]; }
};

ManifoldSpec make_deformed_heisenberg(int n, const DeformationConstants& k);

// Real hypersurface rho = 0 in H^{n+1}; rho acts on 4n+4 real coordinates.
ManifoldSpec make_hypersurface(std::string name, int n, DefiningFunction rho);

struct EllipsoidConstants {
  std::vector<double> a, b, c, d;  // one entry per quaternionic coordinate
  static EllipsoidConstants quaternionic(std::vector<double> b);
};
ManifoldSpec make_ellipsoid(int n, const EllipsoidConstants& k);

// Trivial T^3 bundle over the Hopf surface (H \ 0)/<alpha>, on the covering chart.
ManifoldSpec make_t3_hopf(std::complex<double> alpha);

// Levi form of a hypersurface from the complex Hessian of rho, as a bilinear
// form on ambient vectors (meaningful on Q).
Mat<double> levi_from_rho(const ManifoldSpec& M, const Point& p);

// Cayley-type map from the sphere minus (0,...,0,-1) to Heisenberg coordinates.
Point cayley(const Point& q);
struct CayleyGauge {
  double lambda;
  Quaternion sigma;
};
CayleyGauge cayley_gauge(const Point& q);
// |F^* theta_H - lambda sigma theta_S sigma^{-1}| over a basis of T_q S.
double cayley_pullback_residual(const Point& q);

// (n+2)x(n+2) quaternionic matrix preserving the form |q'|^2 - |q_{n+2}|^2.
struct SpMatrix {
  int size = 0;
  std::vector<Quaternion> m;  // row major

  Quaternion& at(int i, int j) { return m[static_cast<std::size_t>(i) * size + j]; }
  const Quaternion& at(int i, int j) const { return m[static_cast<std::size_t>(i) * size + j]; }

  static SpMatrix identity(int n);
  // exp of a random Lie algebra element; `boost` scales the off-diagonal part.
  static SpMatrix random(int n, std::mt19937_64& rng, double boost = 0.5, bool compact_only = false);
  // max deviation from gamma^* J gamma = J
  double defect() const;
};

Point sp_action(const SpMatrix& g, const Point& q);
// sigma_gamma(q) and lambda(q) = 1/|cq+d|^2
CayleyGauge sp_gauge(const SpMatrix& g, const Point& q);

struct PullbackResiduals {
  double form = 0.0;    // gamma^* theta_S against lambda sigma theta_S sigma^{-1}
  double triple = 0.0;  // transformed T_v against e^{-2f}[T_u - 2 I_u d_b f^#]
};
PullbackResiduals pullback_check(const SpMatrix& g, const Point& q);

// Rotation u -> sigma_gamma u sigma_gamma^{-1} of the imaginary units, as a
// 3x3 row-major field on the sphere chart.
FieldExpr sp_rotation(const SpMatrix& g);
// f = -log |cq + d|, so that lambda = e^{2f}.
FieldExpr sp_conformal_factor(const SpMatrix& g);

}  // namespace qcr
