#pragma once

#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include "qcr/dense.hpp"

namespace qcr {

// Hamilton quaternion w + x i + y j + z k with i j = k.
template <class T = double>
struct Quat {
  T w{}, x{}, y{}, z{};

  Quat() : w(0.0), x(0.0), y(0.0), z(0.0) {}
  Quat(T w_, T x_, T y_, T z_) : w(std::move(w_)), x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}
  static Quat real(T r) { return Quat(std::move(r), T(0.0), T(0.0), T(0.0)); }

  friend Quat operator+(const Quat& a, const Quat& b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Quat operator-(const Quat& a, const Quat& b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Quat operator-(const Quat& a) { return {-a.w, -a.x, -a.y, -a.z}; }
  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator*(const T& s, const Quat& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }

  Quat conj() const { return {w, -x, -y, -z}; }
  T norm2() const { return w * w + x * x + y * y + z * z; }
  Quat inverse() const {
    T n2 = norm2();
    return {w / n2, -x / n2, -y / n2, -z / n2};
  }
  T operator[](int i) const { return i == 0 ? w : i == 1 ? x : i == 2 ? y : z; }
};

using Quaternion = Quat<double>;

template <class T>
T norm(const Quat<T>& q) {
  using std::sqrt;
  return sqrt(q.norm2());
}

inline Quaternion quat_mul(const Quaternion& p, const Quaternion& q) { return p * q; }

// Unit imaginary quaternion for index a in {0,1,2} (i, j, k).
template <class T = double>
Quat<T> imaginary_unit(int a) {
  Quat<T> q;
  if (a == 0) q.x = T(1.0);
  if (a == 1) q.y = T(1.0);
  if (a == 2) q.z = T(1.0);
  return q;
}

// Row vector of quaternions: a point of H^m stored as 4m reals, block k = (w,x,y,z).
// Real coordinates (x0,x1,x2,x3) of a block correspond to the quaternion
// x0 - x1 i - x2 j - x3 k.
template <class T>
Quat<T> coords_to_quat(const T* c) {
  return Quat<T>(c[0], -c[1], -c[2], -c[3]);
}
template <class T>
void quat_to_coords(const Quat<T>& q, T* c) {
  c[0] = q.w;
  c[1] = -q.x;
  c[2] = -q.y;
  c[3] = -q.z;
}

// Right multiplication by v^{-1} for v in {i, j, k}, as a 4x4 real matrix on one
// coordinate block.
std::array<std::array<double, 4>, 4> right_structure_block(int a);

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n, 0.0) {}
  // Symmetrizes its input.
  explicit SymMatrix(const Mat<double>& m);

  int size() const { return n_; }
  double operator()(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }
  void set(int i, int j, double v) {
    e_[static_cast<std::size_t>(i) * n_ + j] = v;
    e_[static_cast<std::size_t>(j) * n_ + i] = v;
  }
  Mat<double> dense() const;
  double max_abs() const;

 private:
  int n_ = 0;
  std::vector<double> e_;
};

enum class Definiteness { positive, negative, indefinite, degenerate };

std::string_view to_string(Definiteness d);

inline constexpr double kDefaultTol = 1e-9;

std::vector<double> eigenvalues(const SymMatrix& A);
Definiteness definiteness(const SymMatrix& A, double tol = kDefaultTol);
// Ratio of largest to smallest eigenvalue magnitude.
double condition_number(const SymMatrix& A);

// Solves A x = b for definite A; throws NotDefinite otherwise.
std::vector<double> solve_definite(const SymMatrix& A, const std::vector<double>& b, double tol = kDefaultTol);

struct NullspaceResult {
  std::vector<std::vector<double>> basis;
  int dimension = 0;
};

// Orthonormal basis of {x : |Ax| <= tol |A| |x|}.
NullspaceResult nullspace(const Mat<double>& A, double tol = kDefaultTol);

// Least-squares solution of A x = b and the residual norm |Ax - b|.
struct LeastSquares {
  std::vector<double> x;
  double residual = 0.0;
};
LeastSquares least_squares(const Mat<double>& A, const std::vector<double>& b);

// Principal angles (radians) between the column spans of A and B.
std::vector<double> principal_angles(const Mat<double>& A, const Mat<double>& B);

}  // namespace qcr
