#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qcr/catalog.hpp"
#include "qcr/errors.hpp"

namespace qcrlab {

using qcr::ConfigError;
namespace pt = boost::property_tree;

namespace {

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> v;
  for (const auto& p : split_list(text)) v.push_back(parse_double(key, p));
  return v;
}

bool is_known_task(const std::string& t) {
  const auto& k = known_tasks();
  return std::find(k.begin(), k.end(), t) != k.end();
}

void require_keys(const std::string& what, const std::map<std::string, std::string>& params,
                  const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params)
    if (!allowed.count(k)) throw ConfigError("unknown parameter '" + k + "' for " + what);
}

std::string param_or(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
  const auto it = cfg.params.find(key);
  return it == cfg.params.end() ? fallback : it->second;
}

std::vector<double> ellipsoid_list(const RunConfig& cfg, const std::string& key, const std::vector<double>& fallback) {
  const auto it = cfg.params.find(key);
  if (it == cfg.params.end()) {
    if (static_cast<int>(fallback.size()) != cfg.n + 1)
      throw ConfigError("ellipsoid parameter '" + key + "' needs n+1 values");
    return fallback;
  }
  auto v = parse_list(key, it->second);
  if (static_cast<int>(v.size()) != cfg.n + 1) throw ConfigError("ellipsoid parameter '" + key + "' needs n+1 values");
  return v;
}

// Default generic ellipsoid constants, cycled to n+1 entries.
std::vector<double> cycled(std::vector<double> base, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(base[i % base.size()]);
  return out;
}

qcr::DeformationConstants deformation(const RunConfig& cfg) {
  const int n = cfg.n;
  const std::string preset = param_or(cfg, "preset", "uniform");
  if (preset == "indefinite") {
    const double t = -n / 3.0;
    return qcr::DeformationConstants::uniform(n, n + 1.0, t, t, t);
  }
  if (preset == "non_integrable") {
    auto k = qcr::DeformationConstants::uniform(n, 2.0, 2.0, 2.0, 2.0);
    for (int al = 0; al < n; ++al) k.A[0][al] = 3.0;
    return k;
  }
  if (preset != "uniform") throw ConfigError("unknown deformed_heisenberg preset '" + preset + "'");
  auto num = [&](const char* key) { return parse_double(key, param_or(cfg, key, "2")); };
  return qcr::DeformationConstants::uniform(n, num("A"), num("B"), num("C"), num("D"));
}

}  // namespace

double default_tolerance(const std::string& task) {
  static const std::map<std::string, double> t = {
      {"integrability", 1e-8}, {"levi", 1e-8},     {"pseudoconvexity", 1e-9}, {"canonical", 1e-8},
      {"curvature", 1e-6},     {"qcontact", 1e-8}, {"gluing", 1e-7},          {"conformal", 1e-8},
  };
  const auto it = t.find(task);
  if (it == t.end()) throw ConfigError("unknown task '" + task + "'");
  return it->second;
}

double RunConfig::tolerance(const std::string& task) const {
  const auto it = tolerances.find(task);
  return it == tolerances.end() ? default_tolerance(task) : it->second;
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message() + " at line " + std::to_string(e.line()));
  }
  RunConfig cfg;
  bool have_manifold = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    if (section == "manifold") {
      for (const auto& [k, v] : body) {
        const std::string val = boost::trim_copy(v.data());
        if (k == "name") {
          cfg.manifold = val;
          have_manifold = true;
        } else if (k == "n") {
          cfg.n = static_cast<int>(parse_integer(k, val));
        } else {
          cfg.params[k] = val;
        }
      }
    } else if (section == "run") {
      for (const auto& [k, v] : body) {
        const std::string val = boost::trim_copy(v.data());
        if (k == "tasks") {
          cfg.tasks = split_list(val);
          for (const auto& t : cfg.tasks)
            if (!is_known_task(t)) throw ConfigError("unknown task '" + t + "'");
        } else if (k == "samples") {
          const long long s = parse_integer(k, val);
          if (s < 0) throw ConfigError("samples must be non-negative");
          cfg.samples = static_cast<int>(s);
        } else if (k == "seed") {
          cfg.seed = static_cast<std::uint64_t>(parse_integer(k, val));
        } else if (k == "output") {
          cfg.output = val;
        } else {
          throw ConfigError("unknown key '" + k + "' in [run]");
        }
      }
    } else if (section == "tolerances") {
      for (const auto& [k, v] : body) {
        if (!is_known_task(k)) throw ConfigError("tolerance for unknown task '" + k + "'");
        cfg.tolerances[k] = parse_double(k, boost::trim_copy(v.data()));
      }
    } else if (section == "expect") {
      for (const auto& [k, v] : body) {
        if (!is_known_task(k)) throw ConfigError("expectation for unknown task '" + k + "'");
        const std::string val = boost::trim_copy(v.data());
        if (val != "pass" && val != "fail") throw ConfigError("expectation must be pass or fail");
        cfg.expect[k] = val == "pass";
      }
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
  if (!have_manifold) throw ConfigError("missing [manifold] name");
  if (cfg.n < 1) throw ConfigError("n must be at least 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

qcr::ManifoldSpec build_manifold(const RunConfig& cfg) {
  const std::string& name = cfg.manifold;
  try {
    if (name == "sphere") {
      require_keys(name, cfg.params, {});
      return qcr::make_sphere(cfg.n);
    }
    if (name == "heisenberg") {
      require_keys(name, cfg.params, {});
      return qcr::make_heisenberg(cfg.n);
    }
    if (name == "deformed_heisenberg") {
      require_keys(name, cfg.params, {"preset", "A", "B", "C", "D"});
      return qcr::make_deformed_heisenberg(cfg.n, deformation(cfg));
    }
    if (name == "ellipsoid") {
      require_keys(name, cfg.params, {"preset", "a", "b", "c", "d"});
      const int m = cfg.n + 1;
      const std::string preset = param_or(cfg, "preset", "generic");
      qcr::EllipsoidConstants k;
      if (preset == "quaternionic") {
        if (cfg.params.count("a") || cfg.params.count("c") || cfg.params.count("d"))
          throw ConfigError("the quaternionic ellipsoid takes only b");
        k = qcr::EllipsoidConstants::quaternionic(ellipsoid_list(cfg, "b", cycled({1.0, 1.5, 2.0}, m)));
      } else if (preset == "generic") {
        k.a = ellipsoid_list(cfg, "a", cycled({0.3, 0.1, 0.2}, m));
        k.b = ellipsoid_list(cfg, "b", cycled({1.0, 1.5, 2.0}, m));
        k.c = ellipsoid_list(cfg, "c", cycled({0.25, -0.1, 0.05}, m));
        k.d = ellipsoid_list(cfg, "d", cycled({1.2, 0.8, 1.7}, m));
      } else {
        throw ConfigError("unknown ellipsoid preset '" + preset + "'");
      }
      return qcr::make_ellipsoid(cfg.n, k);
    }
    if (name == "t3_hopf") {
      require_keys(name, cfg.params, {"alpha_re", "alpha_im"});
      if (cfg.n != 1) throw ConfigError("t3_hopf has n = 1");
      const double re = parse_double("alpha_re", param_or(cfg, "alpha_re", "2"));
      const double im = parse_double("alpha_im", param_or(cfg, "alpha_im", "0.5"));
      return qcr::make_t3_hopf({re, im});
    }
  } catch (const qcr::BadParams& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown manifold '" + name + "'");
}

}  // namespace qcrlab
