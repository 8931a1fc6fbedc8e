#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qcr/algebra.hpp"
#include "qcr/manifold.hpp"

namespace qcr {

struct HyperCRPointData {
  Point p;
  std::array<Vec<double>, 3> theta;
  std::vector<Vec<double>> Q_basis;     // 4n Euclidean-orthonormal vectors
  std::array<Mat<double>, 3> Ia_on_Q;   // I_a in Q_basis coordinates
  std::array<Vec<double>, 3> triple;
  std::array<Mat<double>, 3> I_ext;     // ambient extension: I_a on Q, T_a -> 0, T_b -> T_c
  std::array<Mat<double>, 3> dtheta;    // (d theta_a)_{ij}, d theta(X,Y) = X^T D Y
  Vec<double> normal;                   // d rho for hypersurfaces, else empty
};

HyperCRPointData build_point_data(const ManifoldSpec& M, const Point& p);

struct IntegrabilityReport {
  double kernel = 0.0;  // max |theta_a([X,Y] - [I_a X, I_a Y])|
  double q_defect = 0.0;  // max |theta_b(I_a([X,Y] - [I_aX,I_aY]) - [X,I_aY] - [I_aX,Y])|
};

// Frame-field pairs plus `trials` random combinations of the Q basis.
IntegrabilityReport check_integrability(const ManifoldSpec& M, const Point& p, int trials = 20,
                                        std::uint64_t seed = 1);

struct FamilyStructure {
  std::vector<Vec<double>> basis;  // Q basis followed by two transverse vectors
  Mat<double> I_v;                 // in `basis` coordinates
};

FamilyStructure family_structure(const ManifoldSpec& M, const Point& p, const std::array<double, 3>& v);

struct PseudohermitianTensors {
  SymMatrix levi;                           // in Q_basis
  std::array<SymMatrix, 3> complex_levi;    // d theta_a(., I_a .)
  std::array<Mat<double>, 3> levi_variants; // the three defining expressions, unsymmetrized
  SymMatrix h;
  SymMatrix gperp;                          // theta_1^2 + theta_2^2 + theta_3^2 on the triple
  Definiteness levi_class = Definiteness::degenerate;
  Definiteness h_class = Definiteness::degenerate;
  double variant_spread = 0.0;              // max disagreement among levi_variants
  double h_condition = 0.0;
};

// Throws LeviInconsistent when the three defining expressions disagree beyond
// 1e-8 max(1, |Levi|).
PseudohermitianTensors levi_tensors(const ManifoldSpec& M, const Point& p);

// Levi form evaluated on arbitrary ambient vectors (columns of `vecs`).
Mat<double> levi_on(const ManifoldSpec& M, const Point& p, const std::vector<Vec<double>>& vecs);

struct FormsOn {
  Mat<double> levi;
  std::array<Mat<double>, 3> complex_levi;  // symmetrized d theta_a(., I_a .)
  Mat<double> h;
};
// The same tensors on arbitrary ambient vectors (meaningful for vectors in Q).
FormsOn forms_on(const ManifoldSpec& M, const Point& p, const std::vector<Vec<double>>& vecs);

// theta'_a = sum_b s_ab theta_b, I'_a = sum_b s_ab I_b, T'_a = sum_b s_ab T_b.
// `rotation` returns 9 row-major entries. Probes sample points and throws
// NotRotation when S^T S != 1 or det S != 1 beyond 1e-10.
ManifoldSpec gauge_rotate(const ManifoldSpec& M, FieldExpr rotation, int probes = 8);

FieldExpr constant_rotation(const Mat<double>& S, int dim);
Mat<double> random_rotation(std::mt19937_64& rng);

// theta' = e^{2f} theta, T' = e^{-2f} T; the structure is unchanged.
ManifoldSpec conformal_scale(const ManifoldSpec& M, FieldExpr f);

// Checks on the sphere family of structures, for constant unit v.
struct FamilyIntegrability {
  double kernel = 0.0;   // theta_v([X, I_v Y] + [I_v X, Y])
  double q_defect = 0.0; // theta_a(I_v([X,I_vY] + [I_vX,Y]) + [X,Y] - [I_vX,I_vY])
};
FamilyIntegrability family_integrability(const ManifoldSpec& M, const Point& p, const std::array<double, 3>& v,
                                         int trials = 20, std::uint64_t seed = 1);

// Max spread over `count` random unit v orthogonal to u of d theta_u(I_v X, I_v Y), on Q basis pairs.
double replacing_spread(const ManifoldSpec& M, const Point& p, const std::array<double, 3>& u, int count = 10,
                        std::uint64_t seed = 1);

// d theta_u(X, I_u Y) + d theta_u(I_v X, I_{u x v} Y) against d theta_1(X, I_1 Y) + d theta_1(I_2 X, I_3 Y).
double levi_rotation_residual(const ManifoldSpec& M, const Point& p, const std::array<double, 3>& u,
                              const std::array<double, 3>& v);

}  // namespace qcr
