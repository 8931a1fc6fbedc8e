#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <thread>

#include <boost/crc.hpp>

#include "qcr/canonical.hpp"
#include "qcr/catalog.hpp"
#include "qcr/connection.hpp"
#include "qcr/hypercr.hpp"
#include "qcr/qcontact.hpp"
#include "qcr/repdecomp.hpp"

namespace qcrlab {

using namespace qcr;

namespace {

struct PointResult {
  Json values = Json::object();
  double residual = 0.0;
  bool pass = false;
  std::optional<std::pair<std::string, std::string>> error;  // kind, message
};

using TaskFn = std::function<PointResult(const ManifoldSpec&, const Point&, std::mt19937_64&, double)>;

Json flat(const Mat<double>& m) { return Json(m.a); }
Json flat(const SymMatrix& m) { return flat(m.dense()); }

double max_abs_diff(const Mat<double>& a, const Mat<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

double max_abs_diff(const Vec<double>& a, const Vec<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Mat<double> scaled_identity(int k, double s) {
  Mat<double> r(k, k);
  for (int i = 0; i < k; ++i) r(i, i) = s;
  return r;
}

std::array<double, 3> random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::array<double, 3> v{g(rng), g(rng), g(rng)};
  const double l = std::hypot(v[0], v[1], v[2]);
  for (double& x : v) x /= l;
  return v;
}

std::array<double, 3> orthogonal_unit(const std::array<double, 3>& v, std::mt19937_64& rng) {
  auto w = random_unit(rng);
  const double d = w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
  for (int i = 0; i < 3; ++i) w[i] -= d * v[i];
  const double l = std::hypot(w[0], w[1], w[2]);
  for (double& x : w) x /= l;
  return w;
}

Json complex_list(const std::vector<Cx<double>>& c) {
  Json out = Json::array();
  for (const auto& z : c) out.push_back(Json::array({z.re, z.im}));
  return out;
}

PointResult integrability_task(const ManifoldSpec& M, const Point& p, std::mt19937_64& rng, double tol) {
  PointResult r;
  const auto rep = check_integrability(M, p, 20, rng());
  r.values["kernel"] = rep.kernel;
  r.values["q_defect"] = rep.q_defect;
  r.residual = std::max(rep.kernel, rep.q_defect);
  if (M.name == "sphere") {
    const auto v = random_unit(rng);
    const auto w = orthogonal_unit(v, rng);
    const auto fam = family_integrability(M, p, v, 20, rng());
    const double spread = replacing_spread(M, p, v, 10, rng());
    const double rot = levi_rotation_residual(M, p, v, w);
    r.values["family_v"] = v;
    r.values["family_kernel"] = fam.kernel;
    r.values["family_q_defect"] = fam.q_defect;
    r.values["replacing_spread"] = spread;
    r.values["levi_rotation_residual"] = rot;
    r.residual = std::max({r.residual, fam.kernel, fam.q_defect, spread, rot});
  }
  r.pass = r.residual <= tol;
  return r;
}

// Known Levi forms on frames of the model spaces.
std::optional<double> levi_closed_form(const ManifoldSpec& M, const Point& p, const PseudohermitianTensors& t) {
  if (M.name == "sphere") return max_abs_diff(t.levi.dense(), scaled_identity(M.rank(), 2.0));
  if (M.name == "heisenberg" || M.name == "deformed_heisenberg") {
    std::vector<Vec<double>> frame;
    for (const auto& f : M.frame_fields) frame.push_back(f(p));
    const Mat<double> L = levi_on(M, p, frame);
    Mat<double> want(M.rank(), M.rank());
    for (int al = 0; al < M.n; ++al) {
      double lambda = 8.0;
      if (M.name == "deformed_heisenberg") {
        const auto key = "1_" + std::to_string(al + 1);
        lambda = M.params.at("A" + key) + M.params.at("B" + key) + M.params.at("C" + key) + M.params.at("D" + key);
      }
      for (int i = 0; i < 4; ++i) want(4 * al + i, 4 * al + i) = lambda / 4.0;
    }
    return max_abs_diff(L, want);
  }
  return std::nullopt;
}

PointResult levi_task(const ManifoldSpec& M, const Point& p, std::mt19937_64&, double tol) {
  PointResult r;
  const auto t = levi_tensors(M, p);
  r.values["levi"] = flat(t.levi);
  r.values["eigenvalues"] = eigenvalues(t.levi);
  r.values["class"] = std::string(to_string(t.levi_class));
  r.values["variant_spread"] = t.variant_spread;
  r.residual = t.variant_spread;
  if (const auto dev = levi_closed_form(M, p, t)) {
    r.values["closed_form_deviation"] = *dev;
    r.residual = std::max(r.residual, *dev);
  }
  r.pass = r.residual <= tol;
  return r;
}

bool definite(Definiteness d) { return d == Definiteness::positive || d == Definiteness::negative; }

PointResult pseudoconvexity_task(const ManifoldSpec& M, const Point& p, std::mt19937_64&, double tol) {
  PointResult r;
  const auto t = levi_tensors(M, p);
  const auto lc = definiteness(t.levi, tol), hc = definiteness(t.h, tol);
  r.values["levi_class"] = std::string(to_string(lc));
  r.values["h_class"] = std::string(to_string(hc));
  r.values["levi_eigenvalues"] = eigenvalues(t.levi);
  r.values["h_eigenvalues"] = eigenvalues(t.h);
  r.values["h_condition"] = t.h_condition;
  r.values["h"] = flat(t.h);
  r.pass = definite(lc) && definite(hc);
  r.residual = r.pass ? 0.0 : 1.0;
  return r;
}

PointResult canonical_task(const ManifoldSpec& M, const Point& p, std::mt19937_64&, double tol) {
  PointResult r;
  const auto s = solve_canonical(M, p);
  const auto w = koszul_connection(M, p).omega;
  const auto explicit_eh = eh_coefficients(w);
  const auto abstract_eh = EHProjector::get(M.n).coefficients(w);
  double gap = 0.0;
  for (std::size_t i = 0; i < explicit_eh.size(); ++i)
    gap = std::max(gap, std::abs(std::complex<double>(explicit_eh[i].re, explicit_eh[i].im) - abstract_eh[i]));
  r.values["V"] = s.V;
  r.values["v_frame"] = s.v_eps;
  r.values["triple"] = Json::array({s.triple[0], s.triple[1], s.triple[2]});
  r.values["eh_before"] = complex_list(s.eh_before);
  r.values["eh_initial"] = s.initial;
  r.values["eh_residual"] = s.residual;
  r.values["projector_gap"] = gap;
  r.values["h_condition"] = s.h_condition;
  r.residual = std::max(s.residual, gap);
  r.pass = r.residual <= tol;
  return r;
}

PointResult curvature_task(const ManifoldSpec& M, const Point& p, std::mt19937_64&, double tol) {
  PointResult r;
  const auto rep = curvature(M, p);
  r.values["s"] = rep.s;
  r.values["r"] = flat(rep.r);
  r.values["ricci"] = flat(rep.ricci);
  double big = 0.0;
  for (double x : rep.R) big = std::max(big, std::abs(x));
  if (M.name == "sphere") {
    const double n = M.n;
    const Mat<double> want = scaled_identity(M.rank(), 2.0 * (n + 2.0));
    const double s_ref = 8.0 * n * (n + 2.0);
    r.values["reference"] = "r = 2(n+2) Levi, s = 8n(n+2)";
    r.residual = std::max(max_abs_diff(rep.r, want) / (2.0 * (n + 2.0)), std::abs(rep.s - s_ref) / s_ref);
  } else if (M.name == "heisenberg") {
    r.values["reference"] = "R = 0";
    r.residual = big;
  } else {
    const auto fd = curvature(M, p, {}, Differentiation::finite_difference);
    r.values["reference"] = "finite differences";
    r.residual = max_abs_diff(rep.R, fd.R) / std::max(1.0, big);
  }
  r.pass = r.residual <= tol;
  return r;
}

PointResult qcontact_task(const ManifoldSpec& M, const Point& p, std::mt19937_64&, double tol) {
  PointResult r;
  const auto rep = compat_check(M, p, true, tol);
  r.values["compat_deviation"] = rep.compat_deviation;
  r.values["per_structure"] = rep.per_structure;
  r.values["reeb_residual"] = rep.reeb_residual;
  r.values["reeb_exists"] = rep.reeb.has_value();
  r.residual = rep.compat_deviation;
  if (rep.reeb) r.values["reeb"] = Json::array({(*rep.reeb)[0], (*rep.reeb)[1], (*rep.reeb)[2]});
  if (rep.canonical_match) {
    r.values["canonical_angle"] = *rep.canonical_match;
    r.residual = std::max(r.residual, *rep.canonical_match);
  }
  r.pass = r.residual <= tol;
  return r;
}

PointResult gluing_task(const ManifoldSpec& M, const Point& p, std::mt19937_64& rng, double tol) {
  PointResult r;
  const Mat<double> S = random_rotation(rng);
  const FieldExpr rot = constant_rotation(S, M.dim);
  const auto R = gauge_rotate(M, rot);
  const auto basis = build_point_data(M, p).Q_basis;
  const double levi = max_abs_diff(levi_on(M, p, basis), levi_on(R, p, basis));
  const auto g = gluing_check(M, rot, p);
  r.values["rotation"] = flat(S);
  r.values["levi_change"] = levi;
  r.values["plane_angle"] = g.angle;
  r.values["connection_change"] = g.connection;
  r.residual = std::max({levi, g.angle, g.connection});
  r.pass = r.residual <= tol;
  return r;
}

FieldExpr random_scalar(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<double> lin(dim), quad(dim), freq(dim);
  for (int i = 0; i < dim; ++i) {
    lin[i] = g(rng);
    quad[i] = g(rng);
    freq[i] = 1.0 + std::abs(g(rng));
  }
  return FieldExpr(dim, 1, [=]<class S>(std::span<const S> x) {
    S s(0.0);
    for (int i = 0; i < dim; ++i) {
      s += lin[i] * x[i];
      s += quad[i] * sin(freq[i] * x[i] * x[(i + 1) % dim]);
    }
    return std::vector<S>{s};
  });
}

PointResult conformal_task(const ManifoldSpec& M, const Point& p, std::mt19937_64& rng, double tol) {
  PointResult r;
  const FieldExpr f = random_scalar(M.dim, rng);
  const auto ct = conformal_triple(M, p, f);
  const auto sol = solve_canonical(conformal_scale(M, f), p);
  double diff = 0.0;
  for (int a = 0; a < 3; ++a) diff = std::max(diff, max_abs_diff(sol.triple[a], ct.triple[a]));
  r.values["f"] = f(p)[0];
  r.values["W"] = ct.W;
  r.values["triple"] = Json::array({ct.triple[0], ct.triple[1], ct.triple[2]});
  r.values["triple_difference"] = diff;
  r.residual = diff;
  r.pass = r.residual <= tol;
  return r;
}

TaskFn task_fn(const std::string& name) {
  static const std::map<std::string, TaskFn> fns = {
      {"integrability", integrability_task}, {"levi", levi_task},         {"pseudoconvexity", pseudoconvexity_task},
      {"canonical", canonical_task},         {"curvature", curvature_task}, {"qcontact", qcontact_task},
      {"gluing", gluing_task},               {"conformal", conformal_task},
  };
  return fns.at(name);
}

PointResult guarded(const TaskFn& fn, const ManifoldSpec& M, const Point& p, std::mt19937_64& rng, double tol) {
  try {
    return fn(M, p, rng, tol);
  } catch (const qcr::Error& e) {
    PointResult r;
    r.error = std::make_pair(e.kind(), std::string(e.what()));
    return r;
  } catch (const std::exception& e) {
    PointResult r;
    r.error = std::make_pair(std::string("InternalError"), std::string(e.what()));
    return r;
  }
}

// Distributes indices [0, count) over workers; results land in index order.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_json(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad + Json(it.key()).dump() + sep;
        write_json(out, it.value(), indent, depth + 1);
      }
      out += close + '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat_array = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat_array ? ", " : ",";
        first = false;
        if (!flat_array) out += pad;
        write_json(out, e, indent, depth + 1);
      }
      out += (flat_array ? "" : close) + ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

int thread_budget() {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QCRLAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) return std::min(cap, hw);
    } catch (const std::exception&) {
    }
  }
  return hw;
}

Json run(const RunConfig& cfg, int threads) {
  const ManifoldSpec M = build_manifold(cfg);
  const auto points = sample_points(M, cfg.samples, cfg.seed);

  Json report;
  Json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["tool"] = "qcrlab";
  meta["started_at"] = timestamp();
  meta["threads"] = threads;
  Json manifold;
  manifold["name"] = cfg.manifold;
  manifold["n"] = cfg.n;
  manifold["params"] = Json::object();
  for (const auto& [k, v] : M.params) manifold["params"][k] = v;
  meta["manifold"] = manifold;
  meta["samples"] = cfg.samples;
  meta["seed"] = cfg.seed;
  meta["wall_time_seconds"] = Json::object();

  Json tasks = Json::array();
  Json failed = Json::array();
  Json expectations = Json::object();
  bool expectations_met = true;
  for (std::size_t ti = 0; ti < cfg.tasks.size(); ++ti) {
    const std::string& name = cfg.tasks[ti];
    const double tol = cfg.tolerance(name);
    const TaskFn fn = task_fn(name);
    std::vector<PointResult> results(points.size());
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
      auto rng = point_rng(cfg.seed + 0x9e3779b97f4a7c15ULL * (ti + 1), static_cast<std::uint64_t>(i));
      results[i] = guarded(fn, M, points[i], rng, tol);
    });
    meta["wall_time_seconds"][name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json records = Json::array();
    int passed = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& r = results[i];
      Json rec;
      rec["index"] = i;
      rec["point"] = points[i];
      rec["tolerance"] = tol;
      rec["pass"] = r.pass;
      if (r.error) {
        rec["residual"] = nullptr;
        rec["error"] = {{"kind", r.error->first}, {"message", r.error->second}};
      } else {
        rec["residual"] = r.residual;
        rec["values"] = r.values;
      }
      if (r.pass) ++passed;
      records.push_back(std::move(rec));
    }
    const bool ok = passed == static_cast<int>(points.size());
    Json task;
    task["name"] = name;
    task["tolerance"] = tol;
    task["pass"] = ok;
    task["passed"] = passed;
    task["failed"] = static_cast<int>(points.size()) - passed;
    task["records"] = std::move(records);
    tasks.push_back(std::move(task));
    if (!ok) failed.push_back(name);
    if (const auto it = cfg.expect.find(name); it != cfg.expect.end()) {
      expectations[name] = it->second ? "pass" : "fail";
      expectations_met = expectations_met && it->second == ok;
    }
  }

  Json summary;
  summary["tasks"] = tasks.size();
  summary["pass"] = failed.empty();
  summary["failed_tasks"] = failed;
  if (!expectations.empty()) {
    summary["expected"] = expectations;
    summary["expectations_met"] = expectations_met;
  }
  report["meta"] = std::move(meta);
  report["tasks"] = std::move(tasks);
  report["summary"] = std::move(summary);
  report["summary"]["determinism_hash"] = determinism_hash(report);
  return report;
}

bool all_passed(const Json& report) { return report.at("summary").at("pass").get<bool>(); }

std::string serialize(const Json& j, int indent) {
  std::string out;
  write_json(out, j, indent, 0);
  if (indent > 0) out += '\n';
  return out;
}

std::string determinism_hash(const Json& report) {
  Json body;
  body["tasks"] = report.at("tasks");
  Json summary = report.at("summary");
  summary.erase("determinism_hash");
  body["summary"] = summary;
  const std::string text = serialize(body, 0);
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

}  // namespace qcrlab
