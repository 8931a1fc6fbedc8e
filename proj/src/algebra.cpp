#include "qcr/algebra.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace qcr {

namespace {

Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(i, j) = m(i, j);
  return r;
}

}  // namespace

std::array<std::array<double, 4>, 4> right_structure_block(int a) {
  std::array<std::array<double, 4>, 4> m{};
  const Quaternion vinv = imaginary_unit(a).inverse();
  for (int c = 0; c < 4; ++c) {
    double e[4] = {0, 0, 0, 0};
    e[c] = 1.0;
    const Quaternion img = coords_to_quat(e) * vinv;
    double out[4];
    quat_to_coords(img, out);
    for (int r = 0; r < 4; ++r) m[r][c] = out[r];
  }
  return m;
}

SymMatrix::SymMatrix(const Mat<double>& m) : SymMatrix(m.rows) {
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) set(i, j, 0.5 * (m(i, j) + m(j, i)));
}

Mat<double> SymMatrix::dense() const {
  Mat<double> m(n_, n_);
  m.a = e_;
  return m;
}

double SymMatrix::max_abs() const {
  double s = 0.0;
  for (double v : e_) s = std::max(s, std::abs(v));
  return s;
}

std::string_view to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive: return "positive";
    case Definiteness::negative: return "negative";
    case Definiteness::indefinite: return "indefinite";
    case Definiteness::degenerate: return "degenerate";
  }
  return "degenerate";
}

std::vector<double> eigenvalues(const SymMatrix& A) {
  if (A.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(A.dense()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Definiteness definiteness(const SymMatrix& A, double tol) {
  const auto ev = eigenvalues(A);
  double top = 0.0;
  for (double l : ev) top = std::max(top, std::abs(l));
  if (top == 0.0) return Definiteness::degenerate;
  int pos = 0, neg = 0;
  for (double l : ev) {
    if (std::abs(l) <= tol * top) return Definiteness::degenerate;
    (l > 0 ? pos : neg)++;
  }
  if (neg == 0) return Definiteness::positive;
  if (pos == 0) return Definiteness::negative;
  return Definiteness::indefinite;
}

double condition_number(const SymMatrix& A) {
  const auto ev = eigenvalues(A);
  double lo = INFINITY, hi = 0.0;
  for (double l : ev) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  return lo == 0.0 ? INFINITY : hi / lo;
}

std::vector<double> solve_definite(const SymMatrix& A, const std::vector<double>& b, double tol) {
  const Definiteness d = definiteness(A, tol);
  if (d != Definiteness::positive && d != Definiteness::negative)
    throw NotDefinite(std::string("matrix is ") + std::string(to_string(d)));
  Eigen::MatrixXd M = to_eigen(A.dense());
  if (d == Definiteness::negative) M = -M;
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd r = d == Definiteness::negative ? Eigen::VectorXd(-rhs) : Eigen::VectorXd(rhs);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  Eigen::VectorXd x = llt.solve(r);
  // one step of iterative refinement
  x += llt.solve(r - M * x);
  return {x.data(), x.data() + x.size()};
}

NullspaceResult nullspace(const Mat<double>& A, double tol) {
  NullspaceResult out;
  const int k = A.cols;
  if (k == 0) return out;
  Eigen::MatrixXd M = to_eigen(A);
  if (A.rows == 0 || M.norm() == 0.0) {
    for (int i = 0; i < k; ++i) {
      std::vector<double> e(k, 0.0);
      e[i] = 1.0;
      out.basis.push_back(std::move(e));
    }
    out.dimension = k;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s(0);
  const Eigen::MatrixXd& V = svd.matrixV();
  for (int j = 0; j < k; ++j) {
    const double sj = j < s.size() ? s(j) : 0.0;
    if (sj <= tol * top) {
      out.basis.emplace_back(V.col(j).data(), V.col(j).data() + k);
    }
  }
  out.dimension = static_cast<int>(out.basis.size());
  return out;
}

LeastSquares least_squares(const Mat<double>& A, const std::vector<double>& b) {
  Eigen::MatrixXd M = to_eigen(A);
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = M.completeOrthogonalDecomposition().solve(rhs);
  LeastSquares out;
  out.x.assign(x.data(), x.data() + x.size());
  out.residual = (M * x - rhs).norm();
  return out;
}

std::vector<double> principal_angles(const Mat<double>& A, const Mat<double>& B) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(to_eigen(A)), qb(to_eigen(B));
  Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(A.rows, A.cols);
  Eigen::MatrixXd Qb = qb.householderQ() * Eigen::MatrixXd::Identity(B.rows, B.cols);
  std::vector<double> angles;
  // sines from the projection residual are accurate for small angles
  Eigen::MatrixXd resid = Qb - Qa * (Qa.transpose() * Qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> rs(resid);
  for (int i = 0; i < rs.singularValues().size(); ++i)
    angles.push_back(std::asin(std::min(1.0, rs.singularValues()(i))));
  std::sort(angles.begin(), angles.end());
  return angles;
}

}  // namespace qcr
