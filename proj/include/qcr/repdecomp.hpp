#pragma once

#include <array>
#include <complex>
#include <vector>

#include "qcr/connection.hpp"

namespace qcr {

struct ObstructionParts {
  Mat<double> sp_n;  // commutes with every I_a
  Mat<double> sp_1;  // in span{I_1, I_2, I_3}
  Mat<double> obs;   // trace-orthogonal remainder
};

// Orthogonal splitting of an antisymmetric matrix, with I_a orthogonal complex
// structures satisfying the quaternion relations. Throws NotAntisymmetric.
ObstructionParts project_obs(const Mat<double>& omega, const std::array<Mat<double>, 3>& I, double tol = 1e-10);

// Standard quaternionic structures on R^{4n} matching the adapted frame:
// I_a eps_{4k} = eps_{4k+a+1}.
std::array<Mat<double>, 3> standard_structures(int n);

// The E (x) H coefficients of a connection form on Q, from the explicit sums:
// entry 2l is the coefficient against e_{2l}, entry 2l+1 against e_{2l+1}
// (complex frame indices as in FormTensor).
template <class R>
std::vector<Cx<R>> eh_coefficients(const FormTensor<R>& w) {
  const int n = w.n;
  const int b = 2 * n;  // offset of conjugate indices
  const double half = 0.5, inv2n = 1.0 / (2.0 * n), invn = 1.0 / n;
  std::vector<Cx<R>> out;
  for (int l = 0; l < n; ++l) {
    const int L1 = 2 * l, L2 = 2 * l + 1;
    Cx<R> first, second;
    for (int k = 0; k < n; ++k) {
      const int K1 = 2 * k, K2 = 2 * k + 1;
      first += half * (w(K1, K1 + b, L1) - w(K1, K2, L2 + b));
      first += w(K1 + b, K1, L1);
      first += half * (w(K2, K1, L2 + b) + w(K2, K2 + b, L1));
      first += w(K2 + b, K2, L1);
      first += inv2n * (w(L1, K1, K1 + b) + w(L1, K2, K2 + b));
      first += invn * w(L2 + b, K1, K2);

      second += half * (w(K1, K1 + b, L2) + w(K1, K2, L1 + b));
      second += w(K1 + b, K1, L2);
      second += half * (w(K2, K2 + b, L2) - w(K2, K1, L1 + b));
      second += w(K2 + b, K2, L2);
      second += inv2n * (w(L2, K1, K1 + b) + w(L2, K2, K2 + b));
      second -= invn * w(L1 + b, K1, K2);
    }
    out.push_back(first);
    out.push_back(second);
  }
  return out;
}

// Abstract route: E (x) H realized inside Q^* (x) (sp(n) + sp(1))^perp through the
// embeddings E -> E (x) L20(E) and H -> H (x) S2(H), mapped to tensors on the
// adapted frame. Built once per n and cached.
class EHProjector {
 public:
  explicit EHProjector(int n);
  static const EHProjector& get(int n);

  int n() const { return n_; }
  int dim() const { return 4 * n_; }

  // Complex tensor b(x,k,l) of the basis element s_E(e_i) (x) s_H(f_s),
  // s = 0 for f_1, 1 for f_2.
  const std::vector<std::complex<double>>& basis(int i, int s) const { return basis_[2 * i + s]; }

  // <omega, B_(i,s)> = sum b(x,k,l) A(x,k,l).
  std::complex<double> pairing(const FormTensor<double>& w, int i, int s) const;

  // E (x) H coefficients read off the pairings; agrees with eh_coefficients.
  std::vector<std::complex<double>> coefficients(const FormTensor<double>& w) const;

  // Orthogonal projection of the tensor onto its E (x) H component.
  FormTensor<double> project(const FormTensor<double>& w) const;

  // Real dimension of the span of the basis images (4n when consistent).
  int span_rank() const { return static_cast<int>(orthonormal_.size()); }
  const std::vector<std::vector<double>>& span() const { return orthonormal_; }

 private:
  int n_;
  std::vector<std::vector<std::complex<double>>> basis_;
  std::vector<std::vector<double>> orthonormal_;
};

}  // namespace qcr
