#include "cursedsig/continuum.hpp"

#include <cmath>

namespace cursedsig {

ContinuumModel ContinuumModel::create(double theta_min, double theta_max,
                                      std::optional<double> mean, const std::string& density) {
  if (!(theta_min > 0.0 && theta_max > theta_min))
    throw InputError("continuum model: need theta_max > theta_min > 0");
  if (density != "uniform") throw InputError("continuum model: unknown density '" + density + "'");
  ContinuumModel m;
  m.theta_min = theta_min;
  m.theta_max = theta_max;
  m.density = density;
  const double implied = 0.5 * (theta_min + theta_max);
  if (mean) {
    m.mean_theta = *mean;
    if (std::abs(*mean - implied) > 1e-12)
      m.warning = "mean " + fmt12(*mean) + " overrides the value " + fmt12(implied) +
                  " implied by the " + density + " density";
  } else {
    m.mean_theta = implied;
  }
  if (!(m.mean_theta > theta_min && m.mean_theta < theta_max))
    throw InputError("continuum model: mean type must lie strictly inside the support");
  return m;
}

namespace {
void require_support(const ContinuumModel& m, double theta) {
  const double slack = 1e-5 * (m.theta_max - m.theta_min);
  if (theta < m.theta_min - slack || theta > m.theta_max + slack)
    throw InputError("type " + fmt12(theta) + " is outside the support [" + fmt12(m.theta_min) +
                     ", " + fmt12(m.theta_max) + "]");
}
}  // namespace

double separating_education(const ContinuumModel& model, double chi, double theta) {
  require_chi(chi);
  require_support(model, theta);
  const double inside = 0.5 * (1.0 - chi) * (theta * theta - model.theta_min * model.theta_min);
  return std::sqrt(std::max(0.0, inside));
}

double separating_wage(const ContinuumModel& model, double chi, double theta) {
  require_chi(chi);
  require_support(model, theta);
  return chi * model.mean_theta + (1.0 - chi) * theta;
}

double pooling_education_bound(const ContinuumModel& model, double chi) {
  require_chi(chi);
  const double inside =
      (1.0 - chi) * (model.theta_min * model.mean_theta - model.theta_min * model.theta_min);
  return std::sqrt(std::max(0.0, inside));
}

IncentiveCheck incentive_check(const ContinuumModel& model, double chi, double theta,
                               int grid_size) {
  require_chi(chi);
  if (chi >= 1.0) throw InputError("incentive_check: needs chi < 1");
  if (grid_size < 100) throw InputError("incentive_check: grid_size must be at least 100");
  require_support(model, theta);
  auto payoff = [&](double mimic) {
    const double e = separating_education(model, chi, mimic);
    return separating_wage(model, chi, mimic) - e * e / theta;
  };
  IncentiveCheck out;
  out.best_mimic = model.theta_min;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double mimic =
        model.theta_min + (model.theta_max - model.theta_min) * i / (grid_size - 1.0);
    const double v = payoff(mimic);
    if (v > best) {
      best = v;
      out.best_mimic = mimic;
    }
  }
  out.advantage = best - payoff(theta);
  return out;
}

double schedule_ode_residual(const ContinuumModel& model, double chi,
                             const std::vector<double>& grid,
                             const std::function<double(double)>& education,
                             const std::function<double(double)>& wage) {
  require_chi(chi);
  double worst = 0.0;
  for (double theta : grid) {
    const double h = 1e-6 * theta;
    const double de = education(theta + h) - education(theta - h);
    double residual;
    if (std::abs(de) < 1e-300) {
      residual = std::numeric_limits<double>::infinity();
    } else {
      const double w_prime = (wage(theta + h) - wage(theta - h)) / de;
      const double e = education(theta);
      const double w = wage(theta);
      residual = std::abs(w * w_prime - chi * model.mean_theta * w_prime - 2.0 * (1.0 - chi) * e);
    }
    worst = std::max(worst, residual);
  }
  return worst;
}

double ode_residual(const ContinuumModel& model, double chi, const std::vector<double>& grid) {
  if (chi >= 1.0) throw InputError("ode_residual: needs chi < 1");
  return schedule_ode_residual(
      model, chi, grid,
      [&](double th) { return separating_education(model, chi, th); },
      [&](double th) { return separating_wage(model, chi, th); });
}

Schedule make_schedule(const ContinuumModel& model, double chi) {
  require_chi(chi);
  return [model, chi](double theta) {
    return std::make_pair(separating_education(model, chi, theta),
                          separating_wage(model, chi, theta));
  };
}

std::vector<double> interior_grid(const ContinuumModel& model, int points) {
  if (points < 1) throw InputError("interior_grid: needs at least one point");
  std::vector<double> grid(points);
  for (int i = 1; i <= points; ++i)
    grid[i - 1] = model.theta_min + (model.theta_max - model.theta_min) *
                                        static_cast<double>(i) / points;
  return grid;
}

std::vector<CompressionRow> wage_compression_report(const ContinuumModel& model,
                                                    const std::vector<double>& chi_grid) {
  std::vector<CompressionRow> rows;
  for (double chi : chi_grid) {
    require_chi(chi);
    CompressionRow r;
    r.chi = chi;
    r.wage_slope = 1.0 - chi;
    r.pivot_type = model.mean_theta;
    r.pivot_wage = separating_wage(model, chi, model.mean_theta);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cursedsig
