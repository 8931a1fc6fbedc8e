#include "qcr/catalog.hpp"

#include <cmath>
#include <numbers>
#include <span>

#include "qcr/calculus.hpp"

namespace qcr {

namespace {

using Block = std::array<std::array<double, 4>, 4>;

const std::array<Block, 3>& structure_blocks() {
  static const std::array<Block, 3> b = {right_structure_block(0), right_structure_block(1),
                                         right_structure_block(2)};
  return b;
}

// Gradient of a defining function through one extra dual layer.
template <class S>
std::vector<S> gradient_of(const DefiningFunction& rho, std::span<const S> x) {
  const std::size_t N = x.size();
  std::vector<Dual<S>> xd;
  xd.reserve(N);
  for (const auto& xi : x) xd.emplace_back(xi);
  std::vector<S> g(N);
  for (std::size_t i = 0; i < N; ++i) {
    xd[i].d = S(1.0);
    g[i] = rho(std::span<const Dual<S>>(xd))[0].d;
    xd[i].d = S(0.0);
  }
  return g;
}

// Applies the a-th right structure to every 4-block of v (transpose if asked).
template <class S>
std::vector<S> apply_blocks(int a, const std::vector<S>& v, bool transpose) {
  const Block& M = structure_blocks()[a];
  std::vector<S> out(v.size(), S(0.0));
  for (std::size_t k = 0; k + 3 < v.size(); k += 4)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double m = transpose ? M[c][r] : M[r][c];
        if (m != 0.0) out[k + r] += m * v[k + c];
      }
  return out;
}

template <class S>
std::vector<S> constant_block_structure(int a, int N) {
  std::vector<S> out(static_cast<std::size_t>(N) * N, S(0.0));
  const Block& M = structure_blocks()[a];
  for (int k = 0; k + 3 < N; k += 4)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) out[(k + r) * N + k + c] = S(M[r][c]);
  return out;
}

// Structure in the frame (Q frame, triple): block action on Q, T_b -> T_c, T_c -> -T_b, T_a -> 0.
Mat<double> frame_structure(int a, int n) {
  const int N = 4 * n + 3;
  Mat<double> S(N, N);
  const Block& M = structure_blocks()[a];
  for (int al = 0; al < n; ++al)
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) S(4 * al + r, 4 * al + c) = M[r][c];
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  S(4 * n + c, 4 * n + b) = 1.0;
  S(4 * n + b, 4 * n + c) = -1.0;
  return S;
}

// Structure tensor in coordinates for a chart with a global frame: F Shat F^{-1}.
FieldExpr framed_structure(int a, int n, std::vector<FieldExpr> frame, std::array<FieldExpr, 3> triple) {
  const int N = 4 * n + 3;
  Mat<double> shat = frame_structure(a, n);
  return FieldExpr(N, N * N, [=]<class S>(std::span<const S> x) {
    Mat<S> F(N, N);
    for (int k = 0; k < N; ++k) {
      const auto col = k < 4 * n ? frame[k](x) : triple[k - 4 * n](x);
      for (int i = 0; i < N; ++i) F(i, k) = col[i];
    }
    Mat<S> FS(N, N);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        for (int j = 0; j < N; ++j)
          if (shat(k, j) != 0.0) FS(i, j) += shat(k, j) * F(i, k);
      }
    // S = FS F^{-1}  <=>  F^T S^T = FS^T
    const Mat<S> St = solve(F.transpose(), FS.transpose());
    std::vector<S> out(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) out[i * N + j] = St(j, i);
    return out;
  });
}

double norm2(const Point& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

Point gaussian_point(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Point p(N);
  for (auto& x : p) x = g(rng);
  return p;
}

// Newton projection onto rho = 0 along the gradient.
std::optional<Point> project_to_level(const DefiningFunction& rho, Point x) {
  for (int it = 0; it < 100; ++it) {
    const double r = rho(x)[0];
    if (std::abs(r) <= 1e-12) return x;
    const auto g = gradient_of(rho, std::span<const double>(x));
    const double g2 = norm2(g);
    if (g2 < 1e-300) return std::nullopt;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= r * g[i] / g2;
  }
  return std::nullopt;
}

// Quaternion-valued helpers on generic scalars.
template <class S>
Quat<S> quat_at(std::span<const S> x, int block) {
  return coords_to_quat(x.data() + 4 * block);
}

template <class S>
Quat<S> qscale(const S& s, const Quat<S>& q) {
  return {s * q.w, s * q.x, s * q.y, s * q.z};
}

}  // namespace

void ManifoldSpec::require_chart(const Point& p) const {
  if (static_cast<int>(p.size()) != dim) throw DomainError("point has wrong dimension for " + name);
  if (chart)
    if (auto why = chart(p)) throw DomainError(*why);
}

std::mt19937_64 point_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x71cdu};
  return std::mt19937_64(seq);
}

std::vector<Point> sample_points(const ManifoldSpec& M, int count, std::uint64_t seed) {
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto rng = point_rng(seed, static_cast<std::uint64_t>(i));
    pts.push_back(M.sampler(rng));
  }
  return pts;
}

ManifoldSpec make_hypersurface(std::string name, int n, DefiningFunction rho) {
  if (n < 1) throw BadParams("n must be at least 1");
  const int N = 4 * n + 4;
  if (rho.in_dim() != N) throw BadParams("defining function must take 4n+4 coordinates");
  ManifoldSpec M;
  M.name = std::move(name);
  M.n = n;
  M.dim = N;
  M.rho = rho;
  M.drho = FieldExpr(N, N, [rho]<class S>(std::span<const S> x) { return gradient_of(rho, x); });
  for (int a = 0; a < 3; ++a) {
    M.theta[a] = FieldExpr(N, N, [rho, a]<class S>(std::span<const S> x) {
      auto g = apply_blocks(a, gradient_of(rho, x), true);
      for (auto& e : g) e = -0.5 * e;
      return g;
    });
    M.structure[a] = FieldExpr(N, N * N, [a, N]<class S>(std::span<const S>) {
      return constant_block_structure<S>(a, N);
    });
    M.triple[a] = FieldExpr(N, N, [rho, a]<class S>(std::span<const S> x) {
      const auto g = gradient_of(rho, x);
      S g2(0.0);
      for (const auto& e : g) g2 += e * e;
      auto t = apply_blocks(a, g, false);
      for (auto& e : t) e = 2.0 * e / g2;
      return t;
    });
  }
  M.chart = [rho](std::span<const double> p) -> std::optional<std::string> {
    const double r = rho(p)[0];
    if (std::abs(r) > 1e-9) return "point is off the hypersurface (|rho| = " + std::to_string(r) + ")";
    if (norm2(gradient_of(rho, p)) == 0.0) return std::string("d rho vanishes");
    return std::nullopt;
  };
  M.sampler = [rho, N](std::mt19937_64& rng) {
    for (;;) {
      if (auto p = project_to_level(rho, gaussian_point(N, rng))) return *p;
    }
  };
  return M;
}

ManifoldSpec make_sphere(int n) {
  if (n < 1) throw BadParams("n must be at least 1");
  const int N = 4 * n + 4;
  DefiningFunction rho(N, 1, []<class S>(std::span<const S> x) {
    S s(-1.0);
    for (const auto& e : x) s += e * e;
    return std::vector<S>{s};
  });
  ManifoldSpec M = make_hypersurface("sphere", n, rho);
  M.sampler = [N](std::mt19937_64& rng) {
    Point p = gaussian_point(N, rng);
    const double r = std::sqrt(norm2(p));
    for (auto& x : p) x /= r;
    return p;
  };
  return M;
}

EllipsoidConstants EllipsoidConstants::quaternionic(std::vector<double> b) {
  EllipsoidConstants k;
  k.a.assign(b.size(), 0.0);
  k.c.assign(b.size(), 0.0);
  k.b = b;
  k.d = std::move(b);
  return k;
}

ManifoldSpec make_ellipsoid(int n, const EllipsoidConstants& k) {
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  if (n < 1) throw BadParams("n must be at least 1");
  if (k.a.size() != m || k.b.size() != m || k.c.size() != m || k.d.size() != m)
    throw BadParams("ellipsoid needs n+1 values for each of a, b, c, d");
  for (std::size_t i = 0; i < m; ++i)
    if (!(k.b[i] > 0.0 && k.d[i] > 0.0)) throw BadParams("ellipsoid needs b_i > 0 and d_i > 0");
  DefiningFunction rho(4 * n + 4, 1, [k, m]<class S>(std::span<const S> x) {
    S s(-1.0);
    for (std::size_t i = 0; i < m; ++i) {
      const S& x0 = x[4 * i];
      const S& x1 = x[4 * i + 1];
      const S& x2 = x[4 * i + 2];
      const S& x3 = x[4 * i + 3];
      s += (2.0 * k.a[i]) * (x0 * x0 - x1 * x1) + k.b[i] * (x0 * x0 + x1 * x1) +
           (2.0 * k.c[i]) * (x2 * x2 - x3 * x3) + k.d[i] * (x2 * x2 + x3 * x3);
    }
    return std::vector<S>{s};
  });
  ManifoldSpec M = make_hypersurface("ellipsoid", n, rho);
  for (std::size_t i = 0; i < m; ++i) {
    const auto idx = std::to_string(i + 1);
    M.params["a" + idx] = k.a[i];
    M.params["b" + idx] = k.b[i];
    M.params["c" + idx] = k.c[i];
    M.params["d" + idx] = k.d[i];
  }
  const int N = M.dim;
  M.sampler = [rho, N](std::mt19937_64& rng) {
    for (;;) {
      Point u = gaussian_point(N, rng);
      const double q = rho(u)[0] + 1.0;
      if (q <= 1e-6) continue;
      for (auto& x : u) x /= std::sqrt(q);
      if (auto p = project_to_level(rho, u)) return *p;
    }
  };
  return M;
}

DeformationConstants DeformationConstants::uniform(int n, double a, double b, double c, double d) {
  DeformationConstants k;
  for (int i = 0; i < 3; ++i) {
    k.A[i].assign(n, a);
    k.B[i].assign(n, b);
    k.C[i].assign(n, c);
    k.D[i].assign(n, d);
  }
  return k;
}

namespace {

ManifoldSpec framed_chart(std::string name, int n, std::array<FieldExpr, 3> theta, std::vector<FieldExpr> frame,
                          std::array<FieldExpr, 3> triple) {
  ManifoldSpec M;
  M.name = std::move(name);
  M.n = n;
  M.dim = 4 * n + 3;
  M.theta = std::move(theta);
  M.frame_fields = frame;
  M.triple = triple;
  for (int a = 0; a < 3; ++a) M.structure[a] = framed_structure(a, n, frame, triple);
  return M;
}

}  // namespace

ManifoldSpec make_deformed_heisenberg(int n, const DeformationConstants& k) {
  if (n < 1) throw BadParams("n must be at least 1");
  for (const auto* arr : {&k.A, &k.B, &k.C, &k.D})
    for (const auto& v : *arr)
      if (static_cast<int>(v.size()) != n) throw BadParams("deformation constants need n values per index");
  const int N = 4 * n + 3;
  const int t0 = 4 * n;

  std::vector<FieldExpr> frame;
  for (int al = 0; al < n; ++al)
    for (int r = 0; r < 4; ++r) {
      frame.emplace_back(N, N, [=]<class S>(std::span<const S> x) {
        std::vector<S> v(N, S(0.0));
        const S& x0 = x[4 * al];
        const S& x1 = x[4 * al + 1];
        const S& x2 = x[4 * al + 2];
        const S& x3 = x[4 * al + 3];
        v[4 * al + r] = S(1.0);
        switch (r) {
          case 0:
            v[t0] = k.A[0][al] * x1;
            v[t0 + 1] = k.A[1][al] * x2;
            v[t0 + 2] = k.A[2][al] * x3;
            break;
          case 1:
            v[t0] = -k.B[0][al] * x0;
            v[t0 + 1] = -k.B[1][al] * x3;
            v[t0 + 2] = k.B[2][al] * x2;
            break;
          case 2:
            v[t0] = k.C[0][al] * x3;
            v[t0 + 1] = -k.C[1][al] * x0;
            v[t0 + 2] = -k.C[2][al] * x1;
            break;
          default:
            v[t0] = -k.D[0][al] * x2;
            v[t0 + 1] = k.D[1][al] * x1;
            v[t0 + 2] = -k.D[2][al] * x0;
        }
        return v;
      });
    }

  std::array<FieldExpr, 3> theta;
  for (int a = 0; a < 3; ++a) {
    theta[a] = FieldExpr(N, N, [=]<class S>(std::span<const S> x) {
      std::vector<S> w(N, S(0.0));
      w[t0 + a] = S(0.5);
      for (int al = 0; al < n; ++al) {
        const int o = 4 * al;
        const double A = k.A[a][al], B = k.B[a][al], C = k.C[a][al], D = k.D[a][al];
        const S& x0 = x[o];
        const S& x1 = x[o + 1];
        const S& x2 = x[o + 2];
        const S& x3 = x[o + 3];
        if (a == 0) {
          w[o] = -0.5 * A * x1;
          w[o + 1] = 0.5 * B * x0;
          w[o + 2] = -0.5 * C * x3;
          w[o + 3] = 0.5 * D * x2;
        } else if (a == 1) {
          w[o] = -0.5 * A * x2;
          w[o + 1] = 0.5 * B * x3;
          w[o + 2] = 0.5 * C * x0;
          w[o + 3] = -0.5 * D * x1;
        } else {
          w[o] = -0.5 * A * x3;
          w[o + 1] = -0.5 * B * x2;
          w[o + 2] = 0.5 * C * x1;
          w[o + 3] = 0.5 * D * x0;
        }
      }
      return w;
    });
  }

  std::array<FieldExpr, 3> triple;
  for (int a = 0; a < 3; ++a)
    triple[a] = FieldExpr(N, N, [=]<class S>(std::span<const S>) {
      std::vector<S> v(N, S(0.0));
      v[t0 + a] = S(2.0);
      return v;
    });

  ManifoldSpec M = framed_chart("deformed_heisenberg", n, theta, frame, triple);
  for (int a = 0; a < 3; ++a)
    for (int al = 0; al < n; ++al) {
      const auto key = std::to_string(a + 1) + "_" + std::to_string(al + 1);
      M.params["A" + key] = k.A[a][al];
      M.params["B" + key] = k.B[a][al];
      M.params["C" + key] = k.C[a][al];
      M.params["D" + key] = k.D[a][al];
    }
  M.sampler = [N](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Point p(N);
    for (auto& x : p) x = u(rng);
    return p;
  };
  return M;
}

ManifoldSpec make_heisenberg(int n) {
  ManifoldSpec M = make_deformed_heisenberg(n, DeformationConstants::uniform(n, 2.0, 2.0, 2.0, 2.0));
  M.name = "heisenberg";
  M.params.clear();
  return M;
}

ManifoldSpec make_t3_hopf(std::complex<double> alpha) {
  if (!(std::abs(alpha) > 1.0)) throw BadParams("the Hopf surface needs |alpha| > 1");
  constexpr int n = 1;
  constexpr int N = 7;
  // I_a d mu as covector components on the H block, mu = -log |x|^2
  auto twisted_dmu = []<class S>(int a, std::span<const S> x) {
    S r2(0.0);
    for (int i = 0; i < 4; ++i) r2 += x[i] * x[i];
    std::vector<S> g(4);
    for (int i = 0; i < 4; ++i) g[i] = -2.0 * x[i] / r2;
    return apply_blocks(a, g, true);
  };

  std::array<FieldExpr, 3> theta;
  for (int a = 0; a < 3; ++a)
    theta[a] = FieldExpr(N, N, [=]<class S>(std::span<const S> x) {
      auto w = twisted_dmu.template operator()<S>(a, x);
      w.resize(N, S(0.0));
      w[4 + a] = S(1.0);
      return w;
    });

  std::vector<FieldExpr> frame;
  for (int i = 0; i < 4; ++i)
    frame.emplace_back(N, N, [=]<class S>(std::span<const S> x) {
      std::vector<S> v(N, S(0.0));
      v[i] = S(1.0);
      for (int a = 0; a < 3; ++a) v[4 + a] = -twisted_dmu.template operator()<S>(a, x)[i];
      return v;
    });

  std::array<FieldExpr, 3> triple;
  for (int a = 0; a < 3; ++a)
    triple[a] = FieldExpr(N, N, [=]<class S>(std::span<const S>) {
      std::vector<S> v(N, S(0.0));
      v[4 + a] = S(1.0);
      return v;
    });

  ManifoldSpec M = framed_chart("t3_hopf", n, theta, frame, triple);
  M.params["alpha_re"] = alpha.real();
  M.params["alpha_im"] = alpha.imag();
  M.chart = [](std::span<const double> p) -> std::optional<std::string> {
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] < 1e-24) return std::string("origin is excluded");
    return std::nullopt;
  };
  const double top = std::abs(alpha);
  M.sampler = [top](std::mt19937_64& rng) {
    Point u = gaussian_point(4, rng);
    const double len = std::sqrt(norm2(u));
    std::uniform_real_distribution<double> radius(1.0, top);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double r = radius(rng);
    Point p(N);
    for (int i = 0; i < 4; ++i) p[i] = r * u[i] / len;
    for (int a = 0; a < 3; ++a) p[4 + a] = angle(rng);
    return p;
  };
  return M;
}

Mat<double> levi_from_rho(const ManifoldSpec& M, const Point& p) {
  if (!M.rho) throw BadParams(M.name + " has no defining function");
  using C = std::complex<double>;
  const int N = M.dim;
  const auto r = jet_eval(*M.rho, p)[0];
  Mat<double> H(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) H(i, j) = r.hess(i, j);
  const C I(0.0, 1.0);
  // complex derivative operators and one-forms per quaternionic block
  auto op = [&](int block, int which, bool bar) {
    std::vector<C> v(N, 0.0);
    const int o = 4 * block + 2 * which;
    v[o] = 0.5;
    v[o + 1] = bar ? 0.5 * I : -0.5 * I;
    return v;
  };
  auto second = [&](const std::vector<C>& u, const std::vector<C>& v) {
    C s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += u[i] * H(i, j) * v[j];
    return s;
  };
  auto form = [&](int block, int which, bool bar, int coord) -> C {
    const int o = 4 * block + 2 * which;
    if (coord == o) return 1.0;
    if (coord == o + 1) return bar ? -I : I;
    return 0.0;
  };
  // symmetric product of two one-forms on coordinate vectors e_i, e_j
  auto sym = [&](int b1, int w1, bool c1, int b2, int w2, bool c2, int i, int j) {
    return 0.5 * (form(b1, w1, c1, i) * form(b2, w2, c2, j) + form(b2, w2, c2, i) * form(b1, w1, c1, j));
  };
  const int m = M.n + 1;
  Mat<double> L(N, N);
  for (int h = 0; h < m; ++h)
    for (int l = 0; l < m; ++l) {
      const C zz = second(op(h, 0, false), op(l, 0, true));
      const C ww = second(op(h, 1, true), op(l, 1, false));
      const C zw = second(op(h, 0, false), op(l, 1, true));
      const C zbw = second(op(h, 0, true), op(l, 1, false));
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          C s = (zz + ww) * (sym(h, 0, false, l, 0, true, i, j) + sym(h, 1, true, l, 1, false, i, j));
          s += zw * (sym(h, 0, false, l, 1, true, i, j) - sym(h, 1, true, l, 0, false, i, j));
          s += zbw * (sym(h, 0, true, l, 1, false, i, j) - sym(h, 1, false, l, 0, true, i, j));
          L(i, j) += s.real();
        }
    }
  return L;
}

// Cayley map ----------------------------------------------------------------

namespace {

template <class S>
std::vector<S> cayley_generic(std::span<const S> q) {
  const int m = static_cast<int>(q.size()) / 4;
  const int n = m - 1;
  const Quat<S> last = quat_at(q, n);
  const Quat<S> one_plus = Quat<S>::real(S(1.0)) + last;
  const Quat<S> inv = one_plus.inverse();
  std::vector<S> out(4 * n + 3);
  for (int al = 0; al < n; ++al) quat_to_coords(quat_at(q, al) * inv, out.data() + 4 * al);
  const Quat<S> tau = inv - one_plus.conj().inverse();
  out[4 * n] = tau.x;
  out[4 * n + 1] = tau.y;
  out[4 * n + 2] = tau.z;
  return out;
}

Quaternion theta_quat(const ManifoldSpec& M, const Point& p, const Point& X) {
  double c[3];
  for (int a = 0; a < 3; ++a) {
    const auto w = M.theta[a](p);
    c[a] = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) c[a] += w[i] * X[i];
  }
  return {0.0, c[0], c[1], c[2]};
}

// Derivative of a map along X via duals.
template <class F>
Point push_forward(F&& map, const Point& q, const Point& X) {
  std::vector<DualD> qd;
  for (std::size_t i = 0; i < q.size(); ++i) qd.emplace_back(q[i], X[i]);
  const auto out = map(std::span<const DualD>(qd));
  Point v;
  for (const auto& e : out) v.push_back(e.d);
  return v;
}

// Orthonormal basis of the tangent space of the unit sphere at q.
std::vector<Point> sphere_tangent_basis(const Point& q) {
  Mat<double> A(1, static_cast<int>(q.size()));
  A.a = q;
  return nullspace(A, 1e-12).basis;
}

void require_sphere(const Point& q) {
  if (q.size() < 8 || q.size() % 4 != 0) throw DomainError("sphere point needs 4(n+1) coordinates, n >= 1");
  if (std::abs(norm2(q) - 1.0) > 1e-9) throw DomainError("point is not on the unit sphere");
}

double quat_dist(const Quaternion& a, const Quaternion& b) {
  return std::max({std::abs(a.w - b.w), std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace

Point cayley(const Point& q) {
  require_sphere(q);
  const int n = static_cast<int>(q.size()) / 4 - 1;
  const Quaternion last = coords_to_quat(q.data() + 4 * n);
  if ((Quaternion::real(1.0) + last).norm2() < 1e-24) throw SingularPoint("Cayley map is singular at q_{n+1} = -1");
  return cayley_generic(std::span<const double>(q));
}

CayleyGauge cayley_gauge(const Point& q) {
  require_sphere(q);
  const int n = static_cast<int>(q.size()) / 4 - 1;
  const Quaternion s = Quaternion::real(1.0) + coords_to_quat(q.data() + 4 * n);
  const double len2 = s.norm2();
  if (len2 < 1e-24) throw SingularPoint("Cayley gauge is singular at q_{n+1} = -1");
  return {1.0 / len2, (1.0 / std::sqrt(len2)) * s};
}

double cayley_pullback_residual(const Point& q) {
  const int n = static_cast<int>(q.size()) / 4 - 1;
  const Point F = cayley(q);
  const auto [lambda, sigma] = cayley_gauge(q);
  static thread_local std::map<int, std::pair<ManifoldSpec, ManifoldSpec>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_pair(make_sphere(n), make_heisenberg(n))).first;
  const auto& [S, H] = it->second;
  double worst = 0.0;
  for (const auto& X : sphere_tangent_basis(q)) {
    const Point dF = push_forward([](auto x) { return cayley_generic(x); }, q, X);
    const Quaternion lhs = theta_quat(H, F, dF);
    const Quaternion rhs = lambda * (sigma * theta_quat(S, q, X) * sigma.inverse());
    worst = std::max(worst, quat_dist(lhs, rhs));
  }
  return worst;
}

// Sp(n+1,1) -------------------------------------------------------------------

namespace {

using QMat = std::vector<Quaternion>;

QMat qmat_mul(const QMat& A, const QMat& B, int m) {
  QMat C(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      const Quaternion& a = A[i * m + k];
      for (int j = 0; j < m; ++j) C[i * m + j] = C[i * m + j] + a * B[k * m + j];
    }
  return C;
}

template <class S>
Quat<S> lift(const Quaternion& q) {
  return {S(q.w), S(q.x), S(q.y), S(q.z)};
}

// cq + d and the image point, generic in the scalar.
template <class S>
std::pair<std::vector<Quat<S>>, Quat<S>> sp_parts(const SpMatrix& g, std::span<const S> x) {
  const int m = g.size;
  const int n1 = m - 1;
  std::vector<Quat<S>> q;
  for (int i = 0; i < n1; ++i) q.push_back(quat_at(x, i));
  std::vector<Quat<S>> top(n1);
  Quat<S> den = lift<S>(g.at(n1, n1));
  for (int j = 0; j < n1; ++j) den = den + lift<S>(g.at(n1, j)) * q[j];
  for (int i = 0; i < n1; ++i) {
    Quat<S> s = lift<S>(g.at(i, n1));
    for (int j = 0; j < n1; ++j) s = s + lift<S>(g.at(i, j)) * q[j];
    top[i] = s;
  }
  return {top, den};
}

template <class S>
std::vector<S> sp_action_generic(const SpMatrix& g, std::span<const S> x) {
  auto [top, den] = sp_parts(g, x);
  const Quat<S> inv = den.inverse();
  std::vector<S> out(x.size());
  for (std::size_t i = 0; i < top.size(); ++i) quat_to_coords(top[i] * inv, out.data() + 4 * i);
  return out;
}

}  // namespace

SpMatrix SpMatrix::identity(int n) {
  SpMatrix g;
  g.size = n + 2;
  g.m.assign(static_cast<std::size_t>(g.size) * g.size, Quaternion());
  for (int i = 0; i < g.size; ++i) g.at(i, i) = Quaternion::real(1.0);
  return g;
}

SpMatrix SpMatrix::random(int n, std::mt19937_64& rng, double boost, bool compact_only) {
  const int m = n + 2;
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto rq = [&] { return Quaternion(gauss(rng), gauss(rng), gauss(rng), gauss(rng)); };
  auto rim = [&] { return Quaternion(0.0, gauss(rng), gauss(rng), gauss(rng)); };
  QMat X(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m - 1; ++i) {
    X[i * m + i] = 0.5 * rim();
    for (int j = i + 1; j < m - 1; ++j) {
      X[i * m + j] = 0.5 * rq();
      X[j * m + i] = -X[i * m + j].conj();
    }
    if (!compact_only) {
      X[i * m + (m - 1)] = boost * rq();
      X[(m - 1) * m + i] = X[i * m + (m - 1)].conj();
    }
  }
  X[(m - 1) * m + (m - 1)] = 0.5 * rim();
  // scaling and squaring
  double nrm = 0.0;
  for (const auto& q : X) nrm = std::max(nrm, std::sqrt(q.norm2()));
  int squarings = 0;
  while (nrm * m > 0.25) {
    nrm *= 0.5;
    ++squarings;
  }
  const double s = std::ldexp(1.0, -squarings);
  for (auto& q : X) q = s * q;
  SpMatrix E = identity(n);
  QMat term = E.m;
  for (int k = 1; k <= 24; ++k) {
    term = qmat_mul(term, X, m);
    for (auto& q : term) q = (1.0 / k) * q;
    for (std::size_t i = 0; i < term.size(); ++i) E.m[i] = E.m[i] + term[i];
  }
  for (int i = 0; i < squarings; ++i) E.m = qmat_mul(E.m, E.m, m);
  return E;
}

double SpMatrix::defect() const {
  const int m = size;
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Quaternion s;
      for (int k = 0; k < m; ++k) {
        const double sign = k == m - 1 ? -1.0 : 1.0;
        s = s + sign * (at(k, i).conj() * at(k, j));
      }
      const double target = i == j ? (i == m - 1 ? -1.0 : 1.0) : 0.0;
      worst = std::max(worst, quat_dist(s, Quaternion::real(target)));
    }
  return worst;
}

Point sp_action(const SpMatrix& g, const Point& q) {
  require_sphere(q);
  if (static_cast<int>(q.size()) != 4 * (g.size - 1)) throw DomainError("group element and point sizes differ");
  return sp_action_generic(g, std::span<const double>(q));
}

CayleyGauge sp_gauge(const SpMatrix& g, const Point& q) {
  const Quaternion den = sp_parts(g, std::span<const double>(q)).second;
  const double len2 = den.norm2();
  return {1.0 / len2, (1.0 / std::sqrt(len2)) * den};
}

FieldExpr sp_rotation(const SpMatrix& g) {
  const int N = 4 * (g.size - 1);
  return FieldExpr(N, 9, [g]<class S>(std::span<const S> x) {
    const Quat<S> den = sp_parts(g, x).second;
    const Quat<S> inv = den.inverse();
    std::vector<S> r(9);
    for (int b = 0; b < 3; ++b) {
      const Quat<S> img = den * imaginary_unit<S>(b) * inv;
      for (int a = 0; a < 3; ++a) r[3 * a + b] = img[a + 1];
    }
    return r;
  });
}

FieldExpr sp_conformal_factor(const SpMatrix& g) {
  const int N = 4 * (g.size - 1);
  return FieldExpr(N, 1, [g]<class S>(std::span<const S> x) {
    using std::log;
    const Quat<S> den = sp_parts(g, x).second;
    return std::vector<S>{-0.5 * log(den.norm2())};
  });
}

PullbackResiduals pullback_check(const SpMatrix& g, const Point& q) {
  const int n = g.size - 2;
  const Point qp = sp_action(g, q);
  const auto [lambda, sigma] = sp_gauge(g, q);
  static thread_local std::map<int, ManifoldSpec> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_sphere(n)).first;
  const ManifoldSpec& S = it->second;
  const int N = S.dim;
  auto act = [&g](auto x) { return sp_action_generic(g, x); };

  PullbackResiduals out;
  const auto basis = sphere_tangent_basis(q);
  std::vector<Point> images;
  for (const auto& X : basis) {
    const Point dX = push_forward(act, q, X);
    images.push_back(dX);
    const Quaternion lhs = theta_quat(S, qp, dX);
    const Quaternion rhs = lambda * (sigma * theta_quat(S, q, X) * sigma.inverse());
    out.form = std::max(out.form, quat_dist(lhs, rhs));
  }

  // f = -log |cq+d| and its gradient in ambient coordinates
  std::vector<DualD> qd(q.begin(), q.end());
  Point grad_f(N);
  for (int i = 0; i < N; ++i) {
    qd[i].d = 1.0;
    const auto den = sp_parts(g, std::span<const DualD>(qd)).second;
    grad_f[i] = (-0.5 * log(den.norm2())).d;
    qd[i].d = 0.0;
  }
  const double f = -0.5 * std::log(1.0 / lambda);
  // Q at q is the Euclidean complement of q H.
  Point df_sharp = grad_f;
  for (int a = -1; a < 3; ++a) {
    Point v(N);
    for (int k = 0; k <= n; ++k) {
      Quaternion qk = coords_to_quat(q.data() + 4 * k);
      if (a >= 0) qk = qk * imaginary_unit(a);
      quat_to_coords(qk, v.data() + 4 * k);
    }
    double c = 0.0;
    for (int i = 0; i < N; ++i) c += v[i] * grad_f[i];
    for (int i = 0; i < N; ++i) df_sharp[i] -= c * v[i];
  }
  for (auto& x : df_sharp) x *= 0.5;  // Levi = 2 Euclidean on Q

  const Mat<double> D = Mat<double>::from_columns(images);
  for (int a = 0; a < 3; ++a) {
    const Quaternion v = imaginary_unit(a);
    // (gamma^{-1})_* T_v at q
    Point Tv(N);
    for (int k = 0; k <= n; ++k) quat_to_coords(coords_to_quat(qp.data() + 4 * k) * v.inverse(), Tv.data() + 4 * k);
    const auto ls = least_squares(D, Tv);
    Point lhs(N, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (int i = 0; i < N; ++i) lhs[i] += ls.x[j] * basis[j][i];
    const Quaternion u = sigma.inverse() * v * sigma;
    const Quaternion uinv = u.inverse();
    Point rhs(N);
    for (int k = 0; k <= n; ++k) {
      const Quaternion t = coords_to_quat(q.data() + 4 * k) * uinv - 2.0 * (coords_to_quat(df_sharp.data() + 4 * k) * uinv);
      quat_to_coords(t, rhs.data() + 4 * k);
    }
    const double scale = std::exp(-2.0 * f);
    for (int i = 0; i < N; ++i) out.triple = std::max(out.triple, std::abs(lhs[i] - scale * rhs[i]) + ls.residual);
  }
  return out;
}

}  // namespace qcr
