#pragma once

// Small dense linear algebra generic over the scalar type, so the same
// routines run on doubles, duals and jets. Pivoting looks at values only.

#include <cmath>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/jet.hpp"

namespace qcr {

template <class T>
using Vec = std::vector<T>;

template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0.0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
  // Matrix whose columns are the given vectors.
  static Mat from_columns(const std::vector<Vec<T>>& cs) {
    Mat m(static_cast<int>(cs.front().size()), static_cast<int>(cs.size()));
    for (int j = 0; j < m.cols; ++j)
      for (int i = 0; i < m.rows; ++i) m(i, j) = cs[j][i];
    return m;
  }

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  Vec<T> column(int j) const {
    Vec<T> c(rows);
    for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
    return c;
  }
  Mat transpose() const {
    Mat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    Mat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        const T& xik = x(i, k);
        for (int j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }
  friend Vec<T> operator*(const Mat& x, const Vec<T>& v) {
    Vec<T> r(x.rows, T(0.0));
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) r[i] += x(i, k) * v[k];
    return r;
  }
  friend Mat operator+(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
  }
  friend Mat operator-(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
    return x;
  }
  friend Mat operator*(const T& s, Mat x) {
    for (auto& e : x.a) e = s * e;
    return x;
  }
};

template <class T>
T dot(const Vec<T>& x, const Vec<T>& y) {
  T s(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

template <class T>
Vec<T> axpy(const T& s, const Vec<T>& x, Vec<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
  return y;
}

template <class T>
Vec<T> scale(const T& s, Vec<T> x) {
  for (auto& e : x) e = s * e;
  return x;
}

template <class T>
Vec<T> operator+(Vec<T> x, const Vec<T>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  return x;
}

template <class T>
Vec<T> operator-(Vec<T> x, const Vec<T>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
  return x;
}

// x^T A y
template <class T>
T bilinear(const Vec<T>& x, const Mat<T>& A, const Vec<T>& y) {
  T s(0.0);
  for (int i = 0; i < A.rows; ++i) {
    T row(0.0);
    for (int j = 0; j < A.cols; ++j) row += A(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

template <class T, class U>
Vec<U> cast_vec(const Vec<T>& v) {
  Vec<U> r;
  r.reserve(v.size());
  for (const auto& e : v) r.push_back(U(e));
  return r;
}

template <class T>
Vec<double> value_vec(const Vec<T>& v) {
  Vec<double> r;
  r.reserve(v.size());
  for (const auto& e : v) r.push_back(value_of(e));
  return r;
}

template <class T>
Mat<double> value_mat(const Mat<T>& m) {
  Mat<double> r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = value_of(m.a[i]);
  return r;
}

// Solves A X = B by Gaussian elimination with partial pivoting.
template <class T>
Mat<T> solve(Mat<T> A, Mat<T> B) {
  const int n = A.rows;
  double scale_max = 0.0;
  for (const auto& e : A.a) scale_max = std::max(scale_max, std::abs(value_of(e)));
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(value_of(A(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(value_of(A(i, k)));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= 1e-14 * scale_max || best == 0.0) throw SingularSystem("pivot vanished in dense solve");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      for (int j = 0; j < B.cols; ++j) std::swap(B(k, j), B(piv, j));
    }
    const T inv = T(1.0) / A(k, k);
    for (int i = k + 1; i < n; ++i) {
      const T f = A(i, k) * inv;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      for (int j = 0; j < B.cols; ++j) B(i, j) -= f * B(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    const T inv = T(1.0) / A(k, k);
    for (int j = 0; j < B.cols; ++j) {
      T s = B(k, j);
      for (int i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
      B(k, j) = s * inv;
    }
  }
  return B;
}

template <class T>
Vec<T> solve(const Mat<T>& A, const Vec<T>& b) {
  Mat<T> B(static_cast<int>(b.size()), 1);
  for (std::size_t i = 0; i < b.size(); ++i) B.a[i] = b[i];
  return solve(A, std::move(B)).a;
}

template <class T>
Mat<T> inverse(const Mat<T>& A) {
  return solve(A, Mat<T>::identity(A.rows));
}

}  // namespace qcr
