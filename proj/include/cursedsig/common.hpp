#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <stdexcept>
#include <string>

namespace cursedsig {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad or inconsistent input (malformed files, invalid probabilities, ...).
/// The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Search budget exhausted or an iterative solve failed to converge.
/// The CLI maps this to exit code 3.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
// Normalization tolerance: distributions off by more than this are rejected,
// anything closer is renormalized.
inline constexpr double prob = 1e-12;
// Indifference / equation-solving tolerance.
inline constexpr double eq = 1e-10;
// Optimality slack when checking best responses and incentive constraints.
inline constexpr double opt = 1e-9;
}  // namespace tol

inline void require_chi(double chi) {
  if (!(chi >= 0.0 && chi <= 1.0)) throw InputError("chi must lie in [0, 1]");
}

/// Formats a double with 12 significant digits, locale independent.
inline std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

/// Rounds to 12 significant digits (used before emitting reports so that
/// identical inputs produce byte-identical output).
inline double round12(double x) { return std::strtod(fmt12(x).c_str(), nullptr); }

}  // namespace cursedsig
