#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcr/expr.hpp"

namespace qcr {

using Point = std::vector<double>;
using Sampler = std::function<Point(std::mt19937_64&)>;

// A chart carrying an almost hyper CR structure and a compatible R^3-valued form.
//
// Intrinsic charts have dim = 4n+3. Hypersurface charts are ambient H^{n+1}
// coordinates (dim = 4n+4) with the defining function in `rho`.
struct ManifoldSpec {
  std::string name;
  int n = 1;
  int dim = 0;
  std::map<std::string, double> params;

  std::optional<DefiningFunction> rho;
  std::optional<FieldExpr> drho;  // gradient of rho, as covector components

  std::array<FieldExpr, 3> theta;      // covector components, out_dim = dim
  std::array<FieldExpr, 3> structure;  // dim*dim row-major; equals I_a on Q
  std::array<FieldExpr, 3> triple;     // reference admissible triple
  std::vector<FieldExpr> frame_fields; // optional global frame of Q

  DomainCheck chart;
  Sampler sampler;

  bool is_hypersurface() const { return rho.has_value(); }
  int rank() const { return 4 * n; }        // dim Q
  int tangent_dim() const { return 4 * n + 3; }

  void require_chart(const Point& p) const;
};

// Per-point random stream derived from (seed, index).
std::mt19937_64 point_rng(std::uint64_t seed, std::uint64_t index);

std::vector<Point> sample_points(const ManifoldSpec& M, int count, std::uint64_t seed);

}  // namespace qcr
