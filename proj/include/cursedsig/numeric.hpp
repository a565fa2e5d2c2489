#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cursedsig/common.hpp"

namespace cursedsig {

/// Indices attaining the maximum of `v` within `slack` of the best value.
std::vector<int> argmax_set(const Vector& v, double slack = tol::opt);

/// Root of a continuous scalar function on [lo, hi] given a sign change,
/// by bisection to absolute tolerance `xtol`.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol = 1e-14, int max_iter = 200);

/// All sign-change roots of f on [lo, hi] found by scanning `cells` equal
/// subintervals. Exact zeros at grid nodes are kept as roots.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                               double hi, int cells, double xtol = 1e-14);

/// Damped Newton iteration with a numerical Jacobian for square systems
/// F(x) = 0, with x kept inside the box [lo, hi] componentwise.
/// Returns the solution when ||F|| <= ftol, nullopt when the iteration
/// stalls or the budget runs out.
std::optional<Vector> newton_box_solve(
    const std::function<Vector(const Vector&)>& f, Vector x, const Vector& lo,
    const Vector& hi, double ftol = tol::eq, int max_iter = 200);

/// Feasibility over the probability simplex: finds every basic point nu of
///   { nu in R^n : nu >= 0, sum nu = 1, ineq * nu >= rhs, eq * nu = eq_rhs }
/// by enumerating intersections of tight constraints. The polytope is
/// nonempty iff a basic point exists, so this decides feasibility exactly
/// for small n. Points are deduplicated and returned in a deterministic
/// order.
struct SimplexPolytope {
  Matrix ineq;    // may have zero rows
  Vector rhs;
  Matrix eq;      // may have zero rows
  Vector eq_rhs;
};
std::vector<Vector> simplex_polytope_points(int n, const SimplexPolytope& p,
                                            double slack = tol::opt);

/// Convenience: true iff the polytope above is nonempty.
bool simplex_polytope_nonempty(int n, const SimplexPolytope& p,
                               double slack = tol::opt);

}  // namespace cursedsig
