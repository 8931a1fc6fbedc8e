#include "qcr/repdecomp.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace qcr {

namespace {

using C = std::complex<double>;
using CVec = std::vector<C>;
using CMat = std::vector<C>;  // m x m row major

double frob(const Mat<double>& a, const Mat<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) s += a.a[i] * b.a[i];
  return s;
}

// Abstract E, H bases and their images in Q (x) C, on the adapted frame.
// E index a in [0, 2n): a even <-> e_{2k-1}, a odd <-> e_{2k} (k = a/2 + 1).
struct Tables {
  int n;
  int m;

  CVec frame_vector(int a, bool bar) const {
    CVec v(m, 0.0);
    const int base = 4 * (a / 2) + 2 * (a % 2);
    const double r = 1.0 / std::sqrt(2.0);
    v[base] = r;
    v[base + 1] = C(0.0, bar ? r : -r);
    return v;
  }

  // e_a (x) f_h
  CVec vec(int a, int h) const {
    const bool odd = a % 2 == 0;  // e_{2k-1}
    if (h == 1) return frame_vector(a, false);
    if (odd) return frame_vector(a + 1, true);  // e_{2k-1} f1 <-> conj e_{2k}
    CVec v = frame_vector(a - 1, true);         // e_{2k} f1 <-> -conj e_{2k-1}
    for (auto& x : v) x = -x;
    return v;
  }

  CMat wedge(const CVec& x, const CVec& y) const {
    CMat w(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) w[k * m + l] = 0.5 * (x[k] * y[l] - y[k] * x[l]);
    return w;
  }

  static void add(CMat& acc, const CMat& w, C s) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * w[i];
  }

  // sum_m e_{2m-1} ^ e_{2m} with the given conjugations
  CMat symplectic(bool bar1, bool bar2) const {
    CMat acc(static_cast<std::size_t>(m) * m, 0.0);
    for (int q = 0; q < n; ++q) add(acc, wedge(frame_vector(2 * q, bar1), frame_vector(2 * q + 1, bar2)), 1.0);
    return acc;
  }

  // (e_a ^ e_b)_0 (x) sym, sym in {0: f1f1, 1: f2f2, 2: f1f2}
  CMat lambda(int a, int b, int sym) const {
    const bool a_odd = a % 2 == 0, b_odd = b % 2 == 0;
    CMat acc(static_cast<std::size_t>(m) * m, 0.0);
    auto e = [&](int idx, bool bar) { return frame_vector(idx, bar); };
    if (a_odd && b_odd) {
      // a = 2k-1, b = 2l-1
      const int k2 = a + 1, l2 = b + 1;  // e_{2k}, e_{2l}
      if (sym == 0) add(acc, wedge(e(k2, true), e(l2, true)), 1.0);
      if (sym == 1) add(acc, wedge(e(a, false), e(b, false)), 1.0);
      if (sym == 2) {
        add(acc, wedge(e(a, false), e(l2, true)), 0.5);
        add(acc, wedge(e(b, false), e(k2, true)), -0.5);
      }
      return acc;
    }
    if (!a_odd && !b_odd) {
      // a = 2k, b = 2l
      const int k1 = a - 1, l1 = b - 1;
      if (sym == 0) add(acc, wedge(e(k1, true), e(l1, true)), 1.0);
      if (sym == 1) add(acc, wedge(e(a, false), e(b, false)), 1.0);
      if (sym == 2) {
        add(acc, wedge(e(k1, true), e(b, false)), -0.5);
        add(acc, wedge(e(l1, true), e(a, false)), 0.5);
      }
      return acc;
    }
    if (a_odd && !b_odd) {
      CMat r = lambda(b, a, sym);
      for (auto& x : r) x = -x;
      return r;
    }
    // a = 2k, b = 2l-1
    const int k1 = a - 1, l2 = b + 1;
    const bool diag = a / 2 == b / 2;
    if (sym == 0) {
      add(acc, wedge(e(k1, true), e(l2, true)), -1.0);
      if (diag) add(acc, symplectic(true, true), 1.0 / n);
    }
    if (sym == 1) {
      add(acc, wedge(e(a, false), e(b, false)), 1.0);
      if (diag) add(acc, symplectic(false, false), 1.0 / n);
    }
    if (sym == 2) {
      add(acc, wedge(e(k1, true), e(b, false)), -0.5);
      add(acc, wedge(e(l2, true), e(a, false)), -0.5);
      if (diag) {
        for (int q = 0; q < n; ++q) {
          add(acc, wedge(e(2 * q, true), e(2 * q, false)), 0.5 / n);
          add(acc, wedge(e(2 * q + 1, true), e(2 * q + 1, false)), 0.5 / n);
        }
      }
    }
    return acc;
  }

  // f_h . f_s as an index into {f1f1, f2f2, f1f2}
  static int sym_of(int h, int s) { return h != s ? 2 : h; }

  std::vector<C> element(int i, int s) const {
    std::vector<C> b(static_cast<std::size_t>(m) * m * m, 0.0);
    // s_E(e_i) = sum_k [e_{2k-1} (x) (e_{2k} ^ e_i)_0 - e_{2k} (x) (e_{2k-1} ^ e_i)_0]
    // s_H(f_s) = f1 (x) (f2 f_s) - f2 (x) (f1 f_s)
    for (int k = 0; k < n; ++k)
      for (int te = 0; te < 2; ++te) {
        const int u = te == 0 ? 2 * k : 2 * k + 1;
        const int partner = te == 0 ? 2 * k + 1 : 2 * k;
        const double se = te == 0 ? 1.0 : -1.0;
        for (int th = 0; th < 2; ++th) {
          const int other = th == 0 ? 1 : 0;
          const double sh = th == 0 ? 1.0 : -1.0;
          const CVec v = vec(u, th);
          const CMat w = lambda(partner, i, sym_of(other, s));
          for (int x = 0; x < m; ++x) {
            if (v[x] == 0.0) continue;
            for (int kl = 0; kl < m * m; ++kl) b[static_cast<std::size_t>(x) * m * m + kl] += se * sh * v[x] * w[kl];
          }
        }
      }
    return b;
  }
};

}  // namespace

ObstructionParts project_obs(const Mat<double>& omega, const std::array<Mat<double>, 3>& I, double tol) {
  const int d = omega.rows;
  double scale = 0.0, asym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      scale = std::max(scale, std::abs(omega(i, j)));
      asym = std::max(asym, std::abs(omega(i, j) + omega(j, i)));
    }
  if (asym > tol * std::max(1.0, scale)) throw NotAntisymmetric("connection form value is not antisymmetric");
  ObstructionParts r;
  r.sp_n = omega;
  for (int a = 0; a < 3; ++a) r.sp_n = r.sp_n - I[a] * omega * I[a];
  r.sp_n = 0.25 * r.sp_n;
  r.sp_1 = Mat<double>(d, d);
  for (int a = 0; a < 3; ++a) r.sp_1 = r.sp_1 + (frob(omega, I[a]) / frob(I[a], I[a])) * I[a];
  r.obs = omega - r.sp_n - r.sp_1;
  return r;
}

std::array<Mat<double>, 3> standard_structures(int n) {
  // On each block (e, I1 e, I2 e, I3 e), with I1 I2 = I3.
  static const int table[3][4][2] = {
      {{1, 1}, {0, -1}, {3, 1}, {2, -1}},  // I1: e->I1e, I1e->-e, I2e->I3e, I3e->-I2e
      {{2, 1}, {3, -1}, {0, -1}, {1, 1}},  // I2: e->I2e, I1e->-I3e, I2e->-e, I3e->I1e
      {{3, 1}, {2, 1}, {1, -1}, {0, -1}},  // I3: e->I3e, I1e->I2e, I2e->-I1e, I3e->-e
  };
  std::array<Mat<double>, 3> out;
  for (int a = 0; a < 3; ++a) {
    out[a] = Mat<double>(4 * n, 4 * n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < 4; ++j) out[a](4 * k + table[a][j][0], 4 * k + j) = table[a][j][1];
  }
  return out;
}

EHProjector::EHProjector(int n) : n_(n) {
  const Tables T{n, 4 * n};
  for (int i = 0; i < 2 * n; ++i)
    for (int s = 0; s < 2; ++s) basis_.push_back(T.element(i, s));
  // Real span of the basis images, orthonormalized in the Euclidean tensor product.
  const std::size_t len = basis_.front().size();
  for (const auto& b : basis_)
    for (int part = 0; part < 2; ++part) {
      std::vector<double> v(len);
      for (std::size_t e = 0; e < len; ++e) v[e] = part == 0 ? b[e].real() : b[e].imag();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : orthonormal_) {
          double c = 0.0;
          for (std::size_t e = 0; e < len; ++e) c += v[e] * u[e];
          for (std::size_t e = 0; e < len; ++e) v[e] -= c * u[e];
        }
      double nv = 0.0;
      for (double x : v) nv += x * x;
      if (nv < 1e-20) continue;
      nv = std::sqrt(nv);
      for (double& x : v) x /= nv;
      orthonormal_.push_back(std::move(v));
    }
}

const EHProjector& EHProjector::get(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<EHProjector>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<EHProjector>(n);
  return *slot;
}

std::complex<double> EHProjector::pairing(const FormTensor<double>& w, int i, int s) const {
  const auto& b = basis(i, s);
  std::complex<double> acc = 0.0;
  for (std::size_t e = 0; e < b.size(); ++e) acc += b[e] * w.A[e];
  return acc;
}

std::vector<std::complex<double>> EHProjector::coefficients(const FormTensor<double>& w) const {
  // The coefficient against e_i is the pairing with s_E(e_i) (x) s_H(f_2).
  std::vector<std::complex<double>> out;
  for (int i = 0; i < 2 * n_; ++i) out.push_back(pairing(w, i, 1));
  return out;
}

FormTensor<double> EHProjector::project(const FormTensor<double>& w) const {
  FormTensor<double> r;
  r.n = n_;
  r.A.assign(w.A.size(), 0.0);
  for (const auto& u : orthonormal_) {
    double c = 0.0;
    for (std::size_t e = 0; e < u.size(); ++e) c += u[e] * w.A[e];
    for (std::size_t e = 0; e < u.size(); ++e) r.A[e] += c * u[e];
  }
  return r;
}

}  // namespace qcr
