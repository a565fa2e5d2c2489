// Independent reference implementations used only by tests. Everything here
// deliberately avoids the library's code paths: feasibility runs on polygon
// clipping instead of basic-solution enumeration, posteriors are computed
// by the textbook formula, and t-distribution tails come from quadrature.
#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "cursedsig/game.hpp"
#include "cursedsig/solver.hpp"

namespace oracles {

using cursedsig::Matrix;
using cursedsig::SignalingGame;
using cursedsig::Vector;

/// Standard Bayes posterior over types after `msg` (uniform-zero row stays
/// unnormalized -> empty vector for off-path).
Vector textbook_bayes(const Vector& prior, const Matrix& sender, int msg);

/// Random finite-action signaling game with small integer payoffs.
SignalingGame random_finite_game(std::mt19937& rng, int max_types = 3, int max_msgs = 3,
                                 int max_actions = 3);

/// Random two-type wage-posting game with integer productivities and costs.
SignalingGame random_wage_game(std::mt19937& rng, int max_msgs = 3);

/// Is `action` a best response at `msg` for some belief in the simplex
/// (2 or 3 types, exact interval/polygon arithmetic)?
bool br_attainable(const SignalingGame& game, int msg, int action);

/// Is there a mixed response over `actions` giving no type more than
/// eq_payoffs + tol at `msg`? Exact for up to three tied actions.
bool mix_deterrence_feasible(const SignalingGame& game, int msg,
                             const std::vector<int>& actions, const Vector& eq_payoffs);

/// Canonical key of a pure equilibrium: sender profile plus the receiver's
/// pure on-path actions.
std::string pure_eq_key(const SignalingGame& game, const std::vector<int>& profile,
                        const std::vector<int>& onpath_actions);

/// Textbook pure sequential-equilibrium style enumeration (chi = 0,
/// unrestricted off-path beliefs, pure responses everywhere). Returns the
/// canonical keys of all equilibria.
std::set<std::string> textbook_pure_equilibria(const SignalingGame& game);

/// Canonical key of a library record, for comparison with the above.
std::string record_key(const SignalingGame& game, const cursedsig::EquilibriumRecord& rec);

/// Directly coded standard intuitive criterion for two-type finite games.
bool standard_intuitive_survives(const SignalingGame& game,
                                 const cursedsig::EquilibriumRecord& rec);

/// Two-tailed Student-t p-value by adaptive Simpson quadrature of the
/// density over [0, |t|].
double t_two_tailed_p_quadrature(double t, double df);

}  // namespace oracles
