#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cursedsig/common.hpp"

namespace cursedsig {

/// Continuum-type job market model with cost e^2 / theta on a compact type
/// support [theta_min, theta_max]. The mean type can be supplied directly
/// (it overrides the value implied by the named density, with a warning) or
/// computed from the density.
struct ContinuumModel {
  double theta_min = 1.0;
  double theta_max = 3.0;
  double mean_theta = 2.0;
  std::string density = "uniform";
  std::string warning;

  static ContinuumModel create(double theta_min, double theta_max,
                               std::optional<double> mean = std::nullopt,
                               const std::string& density = "uniform");
};

/// Separating education schedule e(theta) = sqrt((1-chi)(theta^2 - theta_min^2)/2);
/// identically zero when fully cursed.
double separating_education(const ContinuumModel& model, double chi, double theta);

/// Separating wage chi E[theta] + (1-chi) theta.
double separating_wage(const ContinuumModel& model, double chi, double theta);

/// Largest pooled education the lowest type tolerates:
/// sqrt((1-chi) (theta_min E[theta] - theta_min^2)).
double pooling_education_bound(const ContinuumModel& model, double chi);

struct IncentiveCheck {
  double best_mimic = 0.0;  // grid type maximizing the mimic payoff
  double advantage = 0.0;   // its payoff minus the truthful payoff
};

/// Brute-force check that reporting one's true type maximizes
/// w(e(theta_hat)) - e(theta_hat)^2 / theta over a support grid.
IncentiveCheck incentive_check(const ContinuumModel& model, double chi, double theta,
                               int grid_size);

/// Max |w(e) w'(e) - chi E[theta] w'(e) - 2 (1-chi) e| over the grid, with
/// w'(e) estimated by central differences in theta (step 1e-6 theta). Used
/// as an oracle against the closed-form schedule.
double ode_residual(const ContinuumModel& model, double chi, const std::vector<double>& grid);

/// Same residual for arbitrary schedules; lets tests feed in non-equilibrium
/// schedules as negative controls.
double schedule_ode_residual(const ContinuumModel& model, double chi,
                             const std::vector<double>& grid,
                             const std::function<double(double)>& education,
                             const std::function<double(double)>& wage);

/// Education and wage as one callable over the type support.
using Schedule = std::function<std::pair<double, double>(double theta)>;
Schedule make_schedule(const ContinuumModel& model, double chi);

/// Uniform grid of `points` types on (theta_min, theta_max]: open at the
/// bottom, where the schedule's derivative blows up.
std::vector<double> interior_grid(const ContinuumModel& model, int points);

struct CompressionRow {
  double chi = 0.0;
  double wage_slope = 0.0;   // d wage / d theta = 1 - chi
  double pivot_type = 0.0;   // E[theta]: wage there is chi-invariant
  double pivot_wage = 0.0;
};

/// Wage-compression diagnostics per cursedness level.
std::vector<CompressionRow> wage_compression_report(const ContinuumModel& model,
                                                    const std::vector<double>& chi_grid);

}  // namespace cursedsig
