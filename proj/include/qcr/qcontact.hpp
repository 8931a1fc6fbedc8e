#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qcr/dense.hpp"
#include "qcr/manifold.hpp"

namespace qcr {

struct ContactReport {
  double compat_deviation = 0.0;              // max_a |Levi - d theta_a(., I_a .)| / |Levi|, on Q
  std::array<double, 3> per_structure{};      // the same for each a
  std::optional<std::array<Vec<double>, 3>> reeb;
  double reeb_residual = 0.0;                 // least-squares residual of the Reeb system
  std::optional<double> canonical_match;      // principal angle to the canonical three-plane field
};

// Deviation from d theta_a(X, I_a Y) = Levi(X, Y) on Q, normalized by the
// operator norm of Levi. With `solve_reeb` also attempts the Reeb fields and,
// for n >= 2, compares them with the canonical triple.
ContactReport compat_check(const ManifoldSpec& M, const Point& p, bool solve_reeb = false, double tol = 1e-8);

// R_a = sum_b T_b C_ba + Y_a with theta_a(R_b) = delta_ab, Y_a in Q, subject to
// d theta_a(R_a, X) = 0 and d theta_b(R_a, X) + d theta_a(R_b, X) = 0 for X in Q.
// Throws NoReebField when the system is inconsistent beyond tol (relative).
std::array<Vec<double>, 3> reeb_solve(const ManifoldSpec& M, const Point& p, double tol = 1e-8);

// Least-squares residual of the system above, without throwing.
double reeb_residual(const ManifoldSpec& M, const Point& p);

// Largest principal angle between span(R_a) and the canonical three-plane field.
double canonical_equals_reeb(const ManifoldSpec& M, const Point& p, double tol = 1e-8);

}  // namespace qcr
