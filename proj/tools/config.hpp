#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcr/manifold.hpp"

namespace qcrlab {

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t = {"integrability", "levi",    "pseudoconvexity", "canonical",
                                             "curvature",     "qcontact", "gluing",          "conformal"};
  return t;
}

double default_tolerance(const std::string& task);

struct RunConfig {
  std::string manifold;
  int n = 2;
  std::map<std::string, std::string> params;  // raw manifold parameters
  std::vector<std::string> tasks;
  int samples = 10;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;  // per task; missing entries use the default
  std::map<std::string, bool> expect;        // optional expected pass/fail per task
  std::string output;                        // empty: stdout

  double tolerance(const std::string& task) const;
};

// INI-style text:
//   [manifold] name, n, other keys are manifold parameters
//   [run]      tasks (comma separated), samples, seed, output
//   [tolerances] <task> = value
//   [expect]   <task> = pass | fail
// Throws qcr::ConfigError on unknown sections, keys, tasks or malformed values.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Builds the catalog manifold; throws qcr::ConfigError for unknown names or parameters.
qcr::ManifoldSpec build_manifold(const RunConfig& cfg);

}  // namespace qcrlab
