#include "qcr/hypercr.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "qcr/pipeline.hpp"

namespace qcr {

namespace {

using pipeline::JMat;
using pipeline::JVec;
using JV = JVec<double>;
using Arr3 = std::array<double, 3>;

struct Setup {
  pipeline::StructureJets<double> J;
  std::vector<JV> q;
};

Setup setup(const ManifoldSpec& M, const Point& p) {
  M.require_chart(p);
  Setup s;
  s.J = pipeline::structure_jets(M, p);
  pipeline::FramePlan plan;
  s.q = pipeline::q_basis(s.J, plan);
  return s;
}

// Q-coordinate matrix of an ambient bilinear form.
Mat<double> on_q(const Mat<double>& A, const std::vector<JV>& q) {
  const int m = static_cast<int>(q.size());
  std::vector<Vec<double>> qv;
  for (const auto& e : q) qv.push_back(values(e));
  Mat<double> r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = bilinear(qv[i], A, qv[j]);
  return r;
}

double max_abs_diff(const Mat<double>& a, const Mat<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) d = std::max(d, std::abs(a.a[i] - b.a[i]));
  return d;
}

JV combination(const std::vector<JV>& q, const Vec<double>& c) {
  JV r(q.front().size(), Jet1<double>(0.0));
  for (std::size_t i = 0; i < q.size(); ++i) r = axpy(Jet1<double>(c[i]), q[i], std::move(r));
  return r;
}

// Pairs of Q fields: basis pairs plus random combinations.
std::vector<std::pair<JV, JV>> field_pairs(const std::vector<JV>& q, int trials, std::uint64_t seed) {
  std::vector<std::pair<JV, JV>> out;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) out.emplace_back(q[i], q[j]);
  auto rng = point_rng(seed, 0x51u);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Vec<double> a(q.size()), b(q.size());
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    out.emplace_back(combination(q, a), combination(q, b));
  }
  return out;
}

double pair_theta(const JV& theta, const Vec<double>& v) { return pipeline::pair_values(theta, v); }

Vec<double> cross(const Arr3& a, const Arr3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Arr3 normalized(const Vec<double>& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Orthonormal pair spanning the plane orthogonal to the unit vector u.
std::pair<Arr3, Arr3> complement(const Arr3& u) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(u[i]) < std::abs(u[k])) k = i;
  Arr3 e{0.0, 0.0, 0.0};
  e[k] = 1.0;
  const Arr3 w1 = normalized(cross(u, e));
  const Arr3 w2 = normalized(cross(u, w1));
  return {w1, w2};
}

void require_unit(const Arr3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (std::abs(n - 1.0) > 1e-10) throw BadParams("direction must be a unit vector");
}

template <class T>
Mat<T> combine_mats(const Arr3& v, const std::array<Mat<T>, 3>& m) {
  Mat<T> r(m[0].rows, m[0].cols);
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += T(v[a]) * m[a].a[i];
  return r;
}

std::array<Mat<double>, 3> values3(const std::array<JMat<double>, 3>& m) {
  return {pipeline::values_of(m[0]), pipeline::values_of(m[1]), pipeline::values_of(m[2])};
}

}  // namespace

HyperCRPointData build_point_data(const ManifoldSpec& M, const Point& p) {
  const Setup s = setup(M, p);
  HyperCRPointData d;
  d.p = p;
  for (const auto& e : s.q) d.Q_basis.push_back(values(e));
  const int m = static_cast<int>(d.Q_basis.size());
  for (int a = 0; a < 3; ++a) {
    d.theta[a] = values(s.J.theta[a]);
    d.triple[a] = values(s.J.triple[a]);
    d.I_ext[a] = pipeline::values_of(s.J.Itil[a]);
    d.dtheta[a] = pipeline::values_of(s.J.dtheta[a]);
    d.Ia_on_Q[a] = Mat<double>(m, m);
    for (int j = 0; j < m; ++j) {
      const Vec<double> v = d.I_ext[a] * d.Q_basis[j];
      for (int i = 0; i < m; ++i) d.Ia_on_Q[a](i, j) = dot(d.Q_basis[i], v);
    }
  }
  if (s.J.hypersurface()) d.normal = values(s.J.normal);
  return d;
}

IntegrabilityReport check_integrability(const ManifoldSpec& M, const Point& p, int trials, std::uint64_t seed) {
  const Setup s = setup(M, p);
  const auto& J = s.J;
  const auto I = values3(J.Itil);
  IntegrabilityReport rep;
  for (const auto& [X, Y] : field_pairs(s.q, trials, seed)) {
    const Vec<double> xy = bracket(X, Y);
    for (int a = 0; a < 3; ++a) {
      const JV IX = J.apply_I(a, X);
      const JV IY = J.apply_I(a, Y);
      const Vec<double> diff = xy - bracket(IX, IY);
      rep.kernel = std::max(rep.kernel, std::abs(pair_theta(J.theta[a], diff)));
      const Vec<double> w = (I[a] * diff - bracket(X, IY)) - bracket(IX, Y);
      for (int b = 0; b < 3; ++b) rep.q_defect = std::max(rep.q_defect, std::abs(pair_theta(J.theta[b], w)));
    }
  }
  return rep;
}

FamilyStructure family_structure(const ManifoldSpec& M, const Point& p, const Arr3& v) {
  require_unit(v);
  const Setup s = setup(M, p);
  FamilyStructure fs;
  for (const auto& e : s.q) fs.basis.push_back(values(e));
  const auto [w1, w2] = complement(v);
  for (const auto& w : {w1, w2}) {
    Vec<double> t(s.J.N, 0.0);
    for (int a = 0; a < 3; ++a) t = axpy(w[a], values(s.J.triple[a]), std::move(t));
    fs.basis.push_back(t);
  }
  const Mat<double> Iv = combine_mats(v, values3(s.J.Itil));
  const Mat<double> B = Mat<double>::from_columns(fs.basis);
  const int k = static_cast<int>(fs.basis.size());
  fs.I_v = Mat<double>(k, k);
  for (int j = 0; j < k; ++j) {
    const auto ls = least_squares(B, Iv * fs.basis[j]);
    for (int i = 0; i < k; ++i) fs.I_v(i, j) = ls.x[i];
  }
  return fs;
}

PseudohermitianTensors levi_tensors(const ManifoldSpec& M, const Point& p) {
  const Setup s = setup(M, p);
  const auto& J = s.J;
  const int n = J.n;
  PseudohermitianTensors t;
  for (int a = 0; a < 3; ++a)
    t.levi_variants[a] = on_q(pipeline::values_of(pipeline::levi_expression(J, a)), s.q);
  t.levi = SymMatrix(t.levi_variants[0]);
  t.variant_spread =
      std::max(max_abs_diff(t.levi_variants[0], t.levi_variants[1]), max_abs_diff(t.levi_variants[0], t.levi_variants[2]));
  if (t.variant_spread > 1e-8 * std::max(1.0, t.levi.max_abs()))
    throw LeviInconsistent("defining expressions of the Levi form disagree by " + std::to_string(t.variant_spread));
  Mat<double> h = t.levi.dense();
  for (auto& e : h.a) e *= (2.0 * n + 4.0);
  for (int a = 0; a < 3; ++a) {
    const Mat<double> cl = on_q(pipeline::values_of(pipeline::complex_levi(J, a)), s.q);
    t.complex_levi[a] = SymMatrix(cl);
    h = h - t.complex_levi[a].dense();
  }
  t.h = SymMatrix(h);
  t.gperp = SymMatrix(3);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      double g = 0.0;
      for (int c = 0; c < 3; ++c)
        g += pair_theta(J.theta[c], values(J.triple[a])) * pair_theta(J.theta[c], values(J.triple[b]));
      t.gperp.set(a, b, g);
    }
  t.levi_class = definiteness(t.levi);
  t.h_class = definiteness(t.h);
  t.h_condition = condition_number(t.h);
  return t;
}

Mat<double> levi_on(const ManifoldSpec& M, const Point& p, const std::vector<Vec<double>>& vecs) {
  M.require_chart(p);
  const auto J = pipeline::structure_jets(M, p);
  const Mat<double> L = pipeline::values_of(pipeline::symmetrized(pipeline::levi_expression(J, 0)));
  const int k = static_cast<int>(vecs.size());
  Mat<double> r(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) r(i, j) = bilinear(vecs[i], L, vecs[j]);
  return r;
}

FormsOn forms_on(const ManifoldSpec& M, const Point& p, const std::vector<Vec<double>>& vecs) {
  M.require_chart(p);
  const auto J = pipeline::structure_jets(M, p);
  const int k = static_cast<int>(vecs.size());
  auto on = [&](const Mat<double>& A) {
    Mat<double> r(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) r(i, j) = bilinear(vecs[i], A, vecs[j]);
    return r;
  };
  FormsOn f;
  f.levi = on(pipeline::values_of(pipeline::symmetrized(pipeline::levi_expression(J, 0))));
  f.h = (2.0 * J.n + 4.0) * f.levi;
  for (int a = 0; a < 3; ++a) {
    f.complex_levi[a] = on(pipeline::values_of(pipeline::symmetrized(pipeline::complex_levi(J, a))));
    f.h = f.h - f.complex_levi[a];
  }
  return f;
}

FieldExpr constant_rotation(const Mat<double>& S, int dim) {
  std::vector<double> e = S.a;
  return FieldExpr(dim, 9, [e]<class T>(std::span<const T>) {
    std::vector<T> r;
    for (double x : e) r.push_back(T(x));
    return r;
  });
}

Mat<double> random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Quaternion s(g(rng), g(rng), g(rng), g(rng));
  s = (1.0 / norm(s)) * s;
  Mat<double> R(3, 3);
  for (int b = 0; b < 3; ++b) {
    const Quaternion img = s * imaginary_unit(b) * s.conj();
    for (int a = 0; a < 3; ++a) R(a, b) = img[a + 1];
  }
  return R;
}

ManifoldSpec gauge_rotate(const ManifoldSpec& M, FieldExpr rotation, int probes) {
  if (rotation.out_dim() != 9 || rotation.in_dim() != M.dim) throw BadParams("rotation field must map the chart to 3x3");
  for (const auto& p : sample_points(M, probes, 0x9a7e)) {
    const auto s = rotation(p);
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double d = 0.0;
        for (int c = 0; c < 3; ++c) d += s[3 * c + a] * s[3 * c + b];
        worst = std::max(worst, std::abs(d - (a == b ? 1.0 : 0.0)));
      }
    const double det = s[0] * (s[4] * s[8] - s[5] * s[7]) - s[1] * (s[3] * s[8] - s[5] * s[6]) +
                       s[2] * (s[3] * s[7] - s[4] * s[6]);
    if (worst > 1e-10 || std::abs(det - 1.0) > 1e-10) throw NotRotation("gauge field is not SO(3)-valued");
  }
  ManifoldSpec R = M;
  R.name = M.name + "+gauge";
  const auto theta = M.theta;
  const auto structure = M.structure;
  const auto triple = M.triple;
  const int N = M.dim;
  auto rotate = [rotation](const std::array<FieldExpr, 3>& src, int a, int width) {
    return FieldExpr(rotation.in_dim(), width, [=]<class T>(std::span<const T> x) {
      const auto s = rotation(x);
      std::vector<T> out(width, T(0.0));
      for (int b = 0; b < 3; ++b) {
        const auto v = src[b](x);
        for (int i = 0; i < width; ++i) out[i] += s[3 * a + b] * v[i];
      }
      return out;
    });
  };
  for (int a = 0; a < 3; ++a) {
    R.theta[a] = rotate(theta, a, N);
    R.structure[a] = rotate(structure, a, N * N);
    R.triple[a] = rotate(triple, a, N);
  }
  return R;
}

ManifoldSpec conformal_scale(const ManifoldSpec& M, FieldExpr f) {
  if (f.out_dim() != 1 || f.in_dim() != M.dim) throw BadParams("conformal factor must be a scalar on the chart");
  ManifoldSpec R = M;
  R.name = M.name + "+conformal";
  for (int a = 0; a < 3; ++a) {
    const FieldExpr th = M.theta[a];
    const FieldExpr tr = M.triple[a];
    R.theta[a] = FieldExpr(M.dim, M.dim, [th, f]<class T>(std::span<const T> x) {
      using std::exp;
      const T e = exp(2.0 * f(x)[0]);
      auto v = th(x);
      for (auto& c : v) c = e * c;
      return v;
    });
    R.triple[a] = FieldExpr(M.dim, M.dim, [tr, f]<class T>(std::span<const T> x) {
      using std::exp;
      const T e = exp(-2.0 * f(x)[0]);
      auto v = tr(x);
      for (auto& c : v) c = e * c;
      return v;
    });
  }
  return R;
}

FamilyIntegrability family_integrability(const ManifoldSpec& M, const Point& p, const Arr3& v, int trials,
                                         std::uint64_t seed) {
  require_unit(v);
  const Setup s = setup(M, p);
  const auto& J = s.J;
  const JMat<double> Iv = combine_mats(v, J.Itil);
  const Mat<double> Ivv = pipeline::values_of(Iv);
  JV theta_v(J.N, Jet1<double>(0.0));
  for (int a = 0; a < 3; ++a) theta_v = axpy(Jet1<double>(v[a]), J.theta[a], std::move(theta_v));
  FamilyIntegrability rep;
  for (const auto& [X, Y] : field_pairs(s.q, trials, seed)) {
    const JV IX = Iv * X;
    const JV IY = Iv * Y;
    const Vec<double> mixed = bracket(X, IY) + bracket(IX, Y);
    rep.kernel = std::max(rep.kernel, std::abs(pair_theta(theta_v, mixed)));
    const Vec<double> w = (Ivv * mixed + bracket(X, Y)) - bracket(IX, IY);
    for (int a = 0; a < 3; ++a) rep.q_defect = std::max(rep.q_defect, std::abs(pair_theta(J.theta[a], w)));
  }
  return rep;
}

double replacing_spread(const ManifoldSpec& M, const Point& p, const Arr3& u, int count, std::uint64_t seed) {
  require_unit(u);
  const Setup s = setup(M, p);
  const auto I = values3(s.J.Itil);
  const Mat<double> Du = combine_mats(u, values3(s.J.dtheta));
  const auto [w1, w2] = complement(u);
  auto rng = point_rng(seed, 0x7e1u);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::vector<Mat<double>> samples;
  for (int k = 0; k < count; ++k) {
    const double t = angle(rng);
    Arr3 v;
    for (int a = 0; a < 3; ++a) v[a] = std::cos(t) * w1[a] + std::sin(t) * w2[a];
    const Mat<double> Iv = combine_mats(v, I);
    samples.push_back(on_q(Iv.transpose() * Du * Iv, s.q));
  }
  double spread = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) spread = std::max(spread, max_abs_diff(samples[0], samples[k]));
  return spread;
}

double levi_rotation_residual(const ManifoldSpec& M, const Point& p, const Arr3& u, const Arr3& v) {
  require_unit(u);
  require_unit(v);
  if (std::abs(u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) > 1e-10) throw BadParams("u and v must be orthogonal");
  const Setup s = setup(M, p);
  const auto I = values3(s.J.Itil);
  const auto D = values3(s.J.dtheta);
  const Vec<double> uv = cross(u, v);
  const Arr3 w{uv[0], uv[1], uv[2]};
  const Mat<double> Du = combine_mats(u, D);
  const Mat<double> lhs = Du * combine_mats(u, I) + combine_mats(v, I).transpose() * Du * combine_mats(w, I);
  const Mat<double> rhs = D[0] * I[0] + I[1].transpose() * D[0] * I[2];
  return max_abs_diff(on_q(lhs, s.q), on_q(rhs, s.q));
}

}  // namespace qcr
