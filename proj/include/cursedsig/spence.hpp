#pragma once

#include <functional>
#include <string>
#include <utility>

#include "cursedsig/common.hpp"

namespace cursedsig {

/// Signaling cost c(e | theta), optionally with a closed-form inverse in e.
struct CostFunction {
  std::string spec;
  std::function<double(double e, double theta)> value;
  std::function<double(double v, double theta)> inverse;  // may be empty
};

/// Builds a cost function from a spec string: "linear" (e / theta),
/// "quadratic" (e^2 / theta), "power:k" (e^k / theta), or an arithmetic
/// expression in `e` and `theta` (operators + - * / ^ and parentheses).
CostFunction make_cost(const std::string& spec);

/// Two-type job market model: worker productivities theta_l < theta_h, prior
/// probability p on the high type, and a signaling cost that is zero at e = 0,
/// strictly increasing, and cheaper for the high type.
struct SpenceModel {
  double theta_l = 1.0;
  double theta_h = 2.0;
  double p = 0.5;
  CostFunction cost;
  std::string warning;  // set when the cost looks non-convex on the checked range

  static SpenceModel create(double theta_l, double theta_h, double p, CostFunction cost);
  double delta() const { return theta_h - theta_l; }
  double theta(bool high) const { return high ? theta_h : theta_l; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;
};

struct WagePair {
  double w_l = 0.0;
  double w_h = 0.0;
};

/// Education solving c(e | theta) = value, by the closed-form inverse when
/// available, otherwise bisection with a doubling bracket. Relative cost
/// tolerance 1e-10.
double cost_inverse(const SpenceModel& model, double value, bool high_type);

/// Education levels the high type can choose in a separating equilibrium at
/// cursedness chi. Empty at chi = 1 (no separation when fully cursed).
Interval separating_region(const SpenceModel& model, double chi);

/// Education levels supportable as a pooling equilibrium; collapses to {0}
/// at chi = 1.
Interval pooling_region(const SpenceModel& model, double chi);

/// Education making the low type indifferent between pooling (with mixing
/// probability q on the high message) and revealing itself.
double hybrid_locus(const SpenceModel& model, double chi, double q);

/// The (e_h, e_l) pair selected by the refinement: the cheapest separating
/// education for chi < 1, zero education for both at chi = 1.
std::pair<double, double> riley_outcome(const SpenceModel& model, double chi);

/// On-path separating wages: w_h = theta_h - (1-p) chi (theta_h - theta_l),
/// w_l = theta_l + p chi (theta_h - theta_l).
WagePair equilibrium_wages(const SpenceModel& model, double chi);

/// Weak set order on intervals: A dominates B iff both endpoints of A are at
/// least the matching endpoints of B.
bool weak_set_dominates(const Interval& a, const Interval& b);

}  // namespace cursedsig
