#include "cursedsig/stats.hpp"

#include <cmath>

namespace cursedsig {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz method.
double beta_cf(double a, double b, double x) {
  constexpr int max_iter = 500;
  constexpr double eps = 1e-14;
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw ResourceError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw InputError("incomplete beta: needs a, b > 0");
  if (x < 0.0 || x > 1.0) throw InputError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw InputError("t-test: degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

double student_t_two_tailed_quantile(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("t quantile: alpha must lie in (0, 1)");
  double lo = 0.0, hi = 1.0;
  while (student_t_two_tailed_p(hi, df) > alpha) {
    hi *= 2.0;
    if (hi > 1e12) throw ResourceError("t quantile bracket failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_two_tailed_p(mid, df) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TTest one_sample_t(double mean, double sd, long n, double mu0) {
  if (n < 2) throw InputError("t-test: needs n >= 2");
  if (sd < 0.0) throw InputError("t-test: sd must be nonnegative");
  if (sd == 0.0) throw InputError("t-test: degenerate sample (sd = 0), p undefined");
  TTest out;
  out.t = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
  out.df = static_cast<double>(n - 1);
  out.p = student_t_two_tailed_p(out.t, out.df);
  return out;
}

}  // namespace cursedsig
