#include "cursedsig/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace cursedsig {

std::vector<int> argmax_set(const Vector& v, double slack) {
  std::vector<int> out;
  if (v.size() == 0) return out;
  const double best = v.maxCoeff();
  for (int i = 0; i < v.size(); ++i)
    if (v(i) >= best - slack) out.push_back(i);
  return out;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw InputError("bisect_root: no sign change on bracket");
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                               double hi, int cells, double xtol) {
  std::vector<double> roots;
  double xprev = lo, fprev = f(lo);
  for (int i = 1; i <= cells; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / cells;
    const double fx = f(x);
    if (fprev == 0.0) {
      roots.push_back(xprev);
    } else if (fprev * fx < 0.0) {
      roots.push_back(bisect_root(f, xprev, x, xtol));
    }
    xprev = x;
    fprev = fx;
  }
  if (fprev == 0.0) roots.push_back(xprev);
  // Merge roots closer than the scan can distinguish.
  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots)
    if (merged.empty() || r - merged.back() > 16 * xtol) merged.push_back(r);
  return merged;
}

std::optional<Vector> newton_box_solve(
    const std::function<Vector(const Vector&)>& f, Vector x, const Vector& lo,
    const Vector& hi, double ftol, int max_iter) {
  const int n = static_cast<int>(x.size());
  Vector fx = f(x);
  for (int it = 0; it < max_iter; ++it) {
    if (fx.lpNorm<Eigen::Infinity>() <= ftol) return x;
    Matrix jac(fx.size(), n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      Vector xp = x;
      xp(j) = std::min(x(j) + h, hi(j));
      Vector xm = x;
      xm(j) = std::max(x(j) - h, lo(j));
      const double dx = xp(j) - xm(j);
      if (dx <= 0.0) return std::nullopt;
      jac.col(j) = (f(xp) - f(xm)) / dx;
    }
    Vector step = jac.colPivHouseholderQr().solve(-fx);
    if (!step.allFinite()) return std::nullopt;
    // Backtracking line search with projection into the box.
    double t = 1.0;
    bool accepted = false;
    const double f0 = fx.norm();
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      Vector cand = (x + t * step).cwiseMax(lo).cwiseMin(hi);
      Vector fc = f(cand);
      if (fc.norm() < f0 * (1.0 - 1e-4 * t) || fc.lpNorm<Eigen::Infinity>() <= ftol) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return fx.lpNorm<Eigen::Infinity>() <= ftol ? std::optional<Vector>(x) : std::nullopt;
}

namespace {

// Next k-combination of indices in [0, p). Returns false when exhausted.
bool next_combination(std::vector<int>& c, int p) {
  const int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < p - (k - i)) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Vector> simplex_polytope_points(int n, const SimplexPolytope& p,
                                            double slack) {
  const int n_ineq = static_cast<int>(p.ineq.rows());
  const int n_eq = static_cast<int>(p.eq.rows());
  const int fixed = 1 + n_eq;             // sum-to-one plus user equalities
  const int free_dim = n - fixed;
  std::vector<Vector> points;

  auto admit = [&](const Vector& nu) {
    if (!nu.allFinite()) return;
    if (nu.minCoeff() < -slack) return;
    if (std::abs(nu.sum() - 1.0) > 1e-9) return;
    if (n_ineq > 0 && ((p.ineq * nu - p.rhs).minCoeff() < -slack)) return;
    if (n_eq > 0 && ((p.eq * nu - p.eq_rhs).lpNorm<Eigen::Infinity>() > 1e-9)) return;
    for (const Vector& q : points)
      if ((q - nu).lpNorm<Eigen::Infinity>() < 1e-9) return;
    points.push_back(nu);
  };

  // Constraint pool usable as tight equalities: coordinate bounds nu_i = 0
  // followed by the general inequalities at equality.
  const int pool = n + n_ineq;
  if (free_dim < 0) return points;
  if (free_dim == 0) {
    Matrix a(fixed, n);
    Vector b(fixed);
    a.row(0).setOnes();
    b(0) = 1.0;
    for (int r = 0; r < n_eq; ++r) {
      a.row(1 + r) = p.eq.row(r);
      b(1 + r) = p.eq_rhs(r);
    }
    if (fixed == n) admit(a.fullPivLu().solve(b));
    return points;
  }

  long long combos = 1;
  for (int i = 0; i < free_dim; ++i) combos = combos * (pool - i) / (i + 1);
  if (combos > 2000000)
    throw ResourceError("belief polytope enumeration budget exceeded");

  std::vector<int> sel(free_dim);
  for (int i = 0; i < free_dim; ++i) sel[i] = i;
  Matrix a(n, n);
  Vector b(n);
  do {
    a.row(0).setOnes();
    b(0) = 1.0;
    for (int r = 0; r < n_eq; ++r) {
      a.row(1 + r) = p.eq.row(r);
      b(1 + r) = p.eq_rhs(r);
    }
    for (int i = 0; i < free_dim; ++i) {
      const int c = sel[i];
      if (c < n) {
        a.row(fixed + i).setZero();
        a(fixed + i, c) = 1.0;
        b(fixed + i) = 0.0;
      } else {
        a.row(fixed + i) = p.ineq.row(c - n);
        b(fixed + i) = p.rhs(c - n);
      }
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.isInvertible()) admit(lu.solve(b));
  } while (next_combination(sel, pool));

  return points;
}

bool simplex_polytope_nonempty(int n, const SimplexPolytope& p, double slack) {
  return !simplex_polytope_points(n, p, slack).empty();
}

}  // namespace cursedsig
