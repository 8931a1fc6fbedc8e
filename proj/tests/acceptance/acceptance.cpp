// Runs every acceptance criterion at n = 2 over 50 sample points and prints one
// line per criterion. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qcr/qcontact.hpp"
#include "support.hpp"

using namespace qcr;
using namespace qcr::oracle;

namespace {

constexpr int kN = 2;
constexpr int kPoints = 50;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records a measured value against a bound; `above` flips the comparison.
struct Check {
  Outcome& out;
  void le(const std::string& what, double value, double bound) {
    const bool ok = value <= bound;
    out.pass = out.pass && ok;
    append(what, value, ok ? "<=" : ">", bound);
  }
  void gt(const std::string& what, double value, double bound) {
    const bool ok = value > bound;
    out.pass = out.pass && ok;
    append(what, value, ok ? ">" : "<=", bound);
  }
  void truth(const std::string& what, bool ok) {
    out.pass = out.pass && ok;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what + (ok ? " ok" : " FAILED");
  }
  void append(const std::string& what, double v, const char* rel, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.0e", what.c_str(), v, rel, b);
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += buf;
  }
};

Outcome sphere_levi() {
  Outcome o;
  Check c{o};
  const auto M = make_sphere(kN);
  double worst = 0.0;
  for (const auto& p : sample_points(M, kPoints, kSeed)) {
    // Q_basis is Euclidean-orthonormal, so the round metric on it is the identity.
    const auto t = levi_tensors(M, p);
    worst = std::max(worst, max_diff(t.levi.dense(), scaled_identity(4 * kN, 2.0)));
  }
  c.le("|Levi - 2 round|", worst, 1e-8);
  return o;
}

Outcome heisenberg_levi() {
  Outcome o;
  Check c{o};
  const auto M = make_heisenberg(kN);
  double worst = 0.0;
  for (const auto& p : sample_points(M, kPoints, kSeed)) {
    const auto f = forms_on(M, p, frame_at(M, p));
    worst = std::max(worst, max_diff(f.levi, scaled_identity(4 * kN, 2.0)));
  }
  c.le("|Levi(X,X) - 2 delta|", worst, 1e-10);
  return o;
}

Outcome ellipsoid() {
  Outcome o;
  Check c{o};
  const auto k = generic_ellipsoid();
  const auto M = make_ellipsoid(kN, k);
  double levi = 0.0, cl = 0.0, dev_min = 1e300;
  for (const auto& p : sample_points(M, kPoints, kSeed)) {
    const auto basis = build_point_data(M, p).Q_basis;
    const auto f = forms_on(M, p, basis);
    const auto ref = ellipsoid_forms(k, basis);
    levi = std::max(levi, max_diff(f.levi, ref.levi));
    for (int a = 0; a < 3; ++a) cl = std::max(cl, max_diff(f.complex_levi[a], ref.complex_levi[a]));
    dev_min = std::min(dev_min, compat_check(M, p).compat_deviation);
  }
  c.le("Levi closed form", levi, 1e-8);
  c.le("complex Levi closed forms", cl, 1e-8);
  c.gt("generic compat deviation (min)", dev_min, 0.01);
  const auto Q = make_ellipsoid(kN, EllipsoidConstants::quaternionic({1.0, 1.5, 2.0}));
  double dev_max = 0.0;
  for (const auto& p : sample_points(Q, kPoints, kSeed)) dev_max = std::max(dev_max, compat_check(Q, p).compat_deviation);
  c.le("quaternionic compat deviation", dev_max, 1e-8);
  return o;
}

Outcome integrability() {
  Outcome o;
  Check c{o};
  std::mt19937_64 rng(kSeed);
  const std::vector<ManifoldSpec> catalog = {
      make_sphere(kN),
      make_heisenberg(kN),
      make_deformed_heisenberg(kN, random_integrable_deformation(kN, rng)),
      make_ellipsoid(kN, generic_ellipsoid()),
      make_ellipsoid(kN, EllipsoidConstants::quaternionic({1.0, 1.5, 2.0})),
      make_t3_hopf({2.0, 0.5}),
  };
  for (const auto& M : catalog) {
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto r = check_integrability(M, p);
      worst = std::max({worst, r.kernel, r.q_defect});
    }
    c.le(M.name, worst, 1e-8);
  }
  const auto bad = make_deformed_heisenberg(kN, non_integrable_deformation(kN));
  double least = 1e300;
  for (const auto& p : sample_points(bad, kPoints, kSeed)) {
    const auto r = check_integrability(bad, p);
    least = std::min(least, std::max(r.kernel, r.q_defect));
  }
  c.gt("non-integrable preset (min)", least, 0.1);
  return o;
}

Outcome h_tensor() {
  Outcome o;
  Check c{o};
  {
    const auto M = make_sphere(kN);
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto t = levi_tensors(M, p);
      worst = std::max(worst, max_diff(t.h.dense(), (2.0 * kN + 1.0) * t.levi.dense()));
    }
    c.le("sphere h - (2n+1) Levi", worst, 1e-8);
  }
  {
    const auto M = make_t3_hopf({2.0, 0.5});
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto v = frame_at(M, p);
      const auto f = forms_on(M, p, v);
      worst = std::max(worst, max_diff(f.h, hopf_h(f.levi, p, v)));
    }
    c.le("Hopf h - 2 Levi - 2 dmu^2", worst, 1e-8);
  }
  {
    std::mt19937_64 rng(kSeed);
    const auto k = random_integrable_deformation(kN, rng);
    const auto M = make_deformed_heisenberg(kN, k);
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto f = forms_on(M, p, frame_at(M, p));
      for (int al = 0; al < kN; ++al) {
        const auto d = deformed_diagonal(k, kN, al);
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(f.h(4 * al + i, 4 * al + i) - d.h[i]));
      }
    }
    c.le("deformed h diagonal", worst, 1e-10);
  }
  {
    const auto M = make_deformed_heisenberg(kN, indefinite_deformation(kN));
    bool all = true;
    for (const auto& p : sample_points(M, kPoints, kSeed))
      all = all && levi_tensors(M, p).h_class == Definiteness::indefinite;
    c.truth("indefinite preset classified indefinite", all);
  }
  return o;
}

Outcome canonical() {
  Outcome o;
  Check c{o};
  std::mt19937_64 rng(kSeed);
  const std::vector<ManifoldSpec> spaces = {make_sphere(kN),
                                            make_deformed_heisenberg(kN, random_integrable_deformation(kN, rng)),
                                            make_ellipsoid(kN, generic_ellipsoid())};
  double initial = 1e300, residual = 0.0, recover = 0.0;
  for (const auto& M : spaces)
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto base = solve_canonical(M, p);
      ConnectionOptions ref;
      ref.shift_coeffs = random_coeffs(4 * kN, rng, 0.5);
      const auto s = solve_canonical(M, p, ref);
      initial = std::min(initial, s.initial);
      residual = std::max({residual, s.residual, base.residual});
      Vec<double> expect = base.v_eps;
      for (int j = 0; j < 4 * kN; ++j) expect[j] -= ref.shift_coeffs[j];
      recover = std::max(recover, max_diff(s.v_eps, expect));
    }
  c.gt("perturbed E(x)H coefficient (min)", initial, 1e-2);
  c.le("after correction", residual, 1e-8);
  c.le("perturb-recover", recover, 1e-9);
  bool seven = false;
  try {
    solve_canonical(make_sphere(1), sample_points(make_sphere(1), 1, kSeed)[0]);
  } catch (const DimensionSeven&) {
    seven = true;
  }
  c.truth("n = 1 raises DimensionSeven", seven);
  return o;
}

Outcome curvature_check() {
  Outcome o;
  Check c{o};
  {
    const auto M = make_heisenberg(kN);
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed))
      for (double x : curvature(M, p).R) worst = std::max(worst, std::abs(x));
    c.le("Heisenberg |R|", worst, 1e-8);
  }
  {
    const auto M = make_sphere(kN);
    const double s_ref = 8.0 * kN * (kN + 2);
    double r_rel = 0.0, s_rel = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) {
      const auto rep = curvature(M, p);
      // the adapted frame is Levi-orthonormal, so Levi is the identity there
      const Mat<double> want = scaled_identity(4 * kN, 2.0 * (kN + 2));
      r_rel = std::max(r_rel, max_diff(rep.r, want) / max_abs(want));
      s_rel = std::max(s_rel, std::abs(rep.s - s_ref) / s_ref);
    }
    c.le("sphere r vs 2(n+2) Levi (rel)", r_rel, 1e-6);
    c.le("sphere s vs 8n(n+2) (rel)", s_rel, 1e-6);
  }
  return o;
}

Outcome conformal() {
  Outcome o;
  Check c{o};
  const auto M = make_sphere(kN);
  std::mt19937_64 rng(kSeed);
  const auto pts = sample_points(M, kPoints, kSeed);
  double w_err = 0.0, t_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const FieldExpr f = random_scalar(M.dim, rng);
    const auto S = conformal_scale(M, f);
    for (int i = 0; i < 10; ++i) {
      const Point& p = pts[(trial * 10 + i) % pts.size()];
      const auto ct = conformal_triple(M, p, f);
      // -d_b f^sharp on the Levi-orthonormal adapted frame: w_j = -df(eps_j)
      pipeline::FramePlan plan;
      const auto P = point_pipeline(M, p, {}, plan);
      const auto x = variables(p);
      const JetD fx = f(std::span<const JetD>(x))[0];
      for (int j = 0; j < 4 * kN; ++j) {
        const Vec<double> e = values(P.eps[j]);
        double df = 0.0;
        for (std::size_t r = 0; r < e.size(); ++r) df += fx.grad(static_cast<int>(r)) * e[r];
        w_err = std::max(w_err, std::abs(ct.w_eps[j] + P.eps_sign[j] * df));
      }
      const auto sol = solve_canonical(S, p);
      for (int a = 0; a < 3; ++a) t_err = std::max(t_err, max_diff(sol.triple[a], ct.triple[a]));
    }
  }
  c.le("W + d_b f#", w_err, 1e-8);
  c.le("rescaled canonical triple", t_err, 1e-8);
  return o;
}

Outcome gauge() {
  Outcome o;
  Check c{o};
  const auto M = make_sphere(kN);
  std::mt19937_64 rng(kSeed);
  const auto pts = sample_points(M, kPoints, kSeed);
  double levi = 0.0, angle = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto R = gauge_rotate(M, constant_rotation(random_rotation(rng), M.dim));
    const auto basis = build_point_data(M, p).Q_basis;
    levi = std::max(levi, max_diff(levi_on(M, p, basis), levi_on(R, p, basis)));
    if (i % 5 == 0) angle = std::max(angle, gluing_check(M, constant_rotation(random_rotation(rng), M.dim), p).angle);
  }
  c.le("Levi under SO(3) gauge", levi, 1e-9);
  c.le("canonical plane angle", angle, 1e-7);
  double form = 0.0, triple = 0.0, point_angle = 0.0;
  for (int g = 0; g < 10; ++g) {
    const auto G = SpMatrix::random(kN, rng);
    const auto& p = pts[g];
    const auto r = pullback_check(G, p);
    form = std::max(form, r.form);
    triple = std::max(triple, r.triple);
    point_angle = std::max(point_angle, gluing_check(M, sp_rotation(G), p).angle);
  }
  c.le("Sp(n+1,1) pullback", form, 1e-8);
  c.le("Sp(n+1,1) triple law", triple, 1e-8);
  c.le("point-dependent gauge angle", point_angle, 1e-7);
  return o;
}

Outcome rep_theory() {
  Outcome o;
  Check c{o};
  std::mt19937_64 rng(kSeed);
  for (int n : {2, 3}) {
    const auto& P = EHProjector::get(n);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto w = random_form(n, rng);
      const auto ex = eh_coefficients(w);
      const auto ab = P.coefficients(w);
      for (std::size_t i = 0; i < ex.size(); ++i)
        worst = std::max(worst, std::abs(std::complex<double>(ex[i].re, ex[i].im) - ab[i]));
    }
    c.le("explicit vs projector n=" + std::to_string(n), worst, 1e-10);
  }
  const auto M = make_sphere(kN);
  double drift = 0.0;
  for (const auto& p : sample_points(M, kPoints, kSeed)) {
    const auto base = non_eh_obstruction(koszul_connection(M, p).omega);
    ConnectionOptions shifted;
    shifted.shift_coeffs = random_coeffs(4 * kN, rng, 0.5);
    drift = std::max(drift, max_abs(base, non_eh_obstruction(koszul_connection(M, p, shifted).omega)));
  }
  c.le("non-E(x)H drift under triple change", drift, 1e-8);
  return o;
}

Outcome reeb() {
  Outcome o;
  Check c{o};
  const std::vector<ManifoldSpec> spaces = {make_sphere(kN), make_heisenberg(kN),
                                            make_ellipsoid(kN, EllipsoidConstants::quaternionic({1.0, 1.5, 2.0}))};
  for (const auto& M : spaces) {
    double worst = 0.0;
    for (const auto& p : sample_points(M, kPoints, kSeed)) worst = std::max(worst, canonical_equals_reeb(M, p));
    c.le(M.name, worst, 1e-7);
  }
  return o;
}

Outcome appendix() {
  Outcome o;
  Check c{o};
  const auto M = make_sphere(kN);
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto unit = [&] {
    std::array<double, 3> v{g(rng), g(rng), g(rng)};
    const double l = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (double& x : v) x /= l;
    return v;
  };
  const auto pts = sample_points(M, kPoints, kSeed);
  double fam = 0.0, spread = 0.0, rot = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto& p = pts[t];
    const auto v = unit();
    const auto r = family_integrability(M, p, v);
    fam = std::max({fam, r.kernel, r.q_defect});
    spread = std::max(spread, replacing_spread(M, p, v));
    // second unit orthogonal to the first
    auto w = unit();
    const double d = w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
    for (int i = 0; i < 3; ++i) w[i] -= d * v[i];
    const double l = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    for (double& x : w) x /= l;
    rot = std::max(rot, levi_rotation_residual(M, p, v, w));
  }
  c.le("family integrability", fam, 1e-8);
  c.le("replacing independence", spread, 1e-9);
  c.le("Levi from rotated pairs", rot, 1e-9);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"sphere Levi form", sphere_levi},
      {"Heisenberg Levi form", heisenberg_levi},
      {"ellipsoid closed forms and qc deviation", ellipsoid},
      {"integrability", integrability},
      {"h-tensor closed forms", h_tensor},
      {"canonical connection", canonical},
      {"curvature", curvature_check},
      {"conformal law", conformal},
      {"gauge and gluing", gauge},
      {"representation cross-check", rep_theory},
      {"Reeb and canonical agreement", reeb},
      {"sphere family identities", appendix},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %-44s %s (%.1fs) %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
