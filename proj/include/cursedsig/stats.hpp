#pragma once

#include "cursedsig/common.hpp"

namespace cursedsig {

/// Regularized incomplete beta function I_x(a, b) by Lentz's continued
/// fraction, relative error around 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

/// Upper quantile: the t > 0 with P(|T| > t) = alpha.
double student_t_two_tailed_quantile(double alpha, double df);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// One-sample t-test of `mean` against mu0. Throws InputError on n < 2 and a
/// degenerate-sample error on sd = 0 (the caller should report exact
/// equality instead).
TTest one_sample_t(double mean, double sd, long n, double mu0);

}  // namespace cursedsig
