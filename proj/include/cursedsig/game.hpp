#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cursedsig/common.hpp"

namespace cursedsig {

/// Prior over sender types. Weights are indexed by the game's type order,
/// must be strictly positive, and must sum to one within tol::prob.
struct PriorDistribution {
  Vector weights;

  static PriorDistribution from(Vector w);
};

enum class ReceiverMode { FiniteActions, WageQuadratic };

/// A finite signaling game: a privately informed sender picks a message,
/// then the receiver reacts. Two receiver modes are supported:
///  - FiniteActions: the receiver picks from a finite action list and both
///    players have full payoff tables over types x messages x actions.
///  - WageQuadratic: the receiver posts a wage and pays -(w - productivity)^2,
///    so its unique best response is the posterior-mean wage. The sender
///    earns the wage minus a per-(type, message) signaling cost.
///
/// Ids are opaque strings; all computations use the declaration order, which
/// keeps reports deterministic.
struct SignalingGame {
  std::vector<std::string> types;
  PriorDistribution prior;
  std::vector<std::string> messages;
  ReceiverMode mode = ReceiverMode::FiniteActions;

  std::vector<std::string> actions;     // FiniteActions only
  std::vector<Matrix> sender_payoff;    // per type: |M| x |A|, cost already folded in
  std::vector<Matrix> receiver_payoff;  // per type: |M| x |A|

  Vector productivity;                  // WageQuadratic only, per type
  Matrix sender_cost;                   // WageQuadratic only, |Theta| x |M|

  int num_types() const { return static_cast<int>(types.size()); }
  int num_messages() const { return static_cast<int>(messages.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }

  int type_index(const std::string& id) const;
  int message_index(const std::string& id) const;
  int action_index(const std::string& id) const;

  /// Sender utility of (type, message, action) in FiniteActions mode.
  double u1(int type, int msg, int action) const { return sender_payoff[type](msg, action); }
  double u2(int type, int msg, int action) const { return receiver_payoff[type](msg, action); }
  /// Sender utility of (type, message, wage) in WageQuadratic mode.
  double u1_wage(int type, int msg, double wage) const { return wage - sender_cost(type, msg); }

  /// Checks every structural invariant and throws InputError on violation.
  void validate() const;
};

/// Behavioral sender strategy: row t is type t's distribution over messages.
using SenderStrategy = Matrix;

/// Receiver behavior: one distribution over actions per message, or one wage
/// per message in WageQuadratic mode.
struct ReceiverStrategy {
  Matrix action_probs;  // |M| x |A| (FiniteActions)
  Vector wages;         // |M|      (WageQuadratic)
};

/// One belief over types per message, on- and off-path alike.
using BeliefSystem = Matrix;  // |M| x |Theta|

struct Assessment {
  SenderStrategy sender;
  ReceiverStrategy receiver;
  BeliefSystem beliefs;
  double chi = 0.0;
};

/// Validates a row-stochastic matrix: every row in [0,1] summing to one
/// within tol::prob. Rows are renormalized in the returned copy; anything
/// further off is rejected.
Matrix validate_rows(const Matrix& rows, const std::string& what);

/// Single distribution variant of validate_rows.
Vector validate_distribution(const Vector& v, const std::string& what);

/// Type-averaged sender strategy: sum_theta F(theta) sigma1(m | theta).
Vector average_sender_strategy(const SenderStrategy& sender, const PriorDistribution& prior);

/// The strategy a chi-cursed receiver believes the sender uses: each type's
/// row is blended with the average row, chi * avg + (1 - chi) * true row.
SenderStrategy cursed_perception(const SenderStrategy& sender, const PriorDistribution& prior,
                                 double chi);

/// Posterior over types after message m under cursed Bayesian updating:
///   mu(theta | m) = chi F(theta) + (1 - chi) * standard posterior.
/// Returns nullopt when no type sends m (the message is off-path and the
/// posterior is unrestricted beyond the belief floor).
std::optional<Vector> cursed_bayes_update(const SignalingGame& game, const SenderStrategy& sender,
                                          double chi, int msg);

/// Componentwise lower bound chi * F(theta) that any consistent belief must
/// dominate, on- and off-path.
Vector belief_floor(const PriorDistribution& prior, double chi);

/// The belief that pins every type in `targets` at its floor chi * F(theta)
/// and spreads the leftover mass over the remaining types in proportion to
/// the prior. Throws InputError when targets covers all types and chi < 1
/// (the pins cannot sum to one).
Vector minimal_belief_on(const std::vector<int>& targets, const PriorDistribution& prior,
                         double chi);


}  // namespace cursedsig
