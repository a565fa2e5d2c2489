#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cursedsig/solver.hpp"

namespace cursedsig {

/// Receiver responses attainable as a best response to some belief whose
/// components dominate chi * F (the whole simplex at chi = 0).
struct ReceiverResponseSet {
  std::vector<int> actions;  // FiniteActions
  double wage_lo = 0.0;      // WageQuadratic: attainable wage interval
  double wage_hi = 0.0;
};
ReceiverResponseSet br_over_all_beliefs(const SignalingGame& game, int msg, double chi = 0.0);

/// Types whose equilibrium payoff strictly exceeds the best payoff any
/// admissible receiver response to `msg` could give them. These are the
/// types the criterion pins at their belief floor.
std::vector<int> equilibrium_dominated_types(const SignalingGame& game,
                                             const EquilibriumRecord& eq, int msg,
                                             double chi);

/// The belief region the criterion allows at an off-path message: components
/// pinned to chi * F(theta) on `dominated`, everything else free above the
/// floor. Throws InputError when all types are pinned and chi < 1.
struct ConstrainedBeliefSet {
  std::vector<int> pinned;
  Vector pinned_values;   // chi * F over the pinned types (full length, zero elsewhere)
  double free_mass = 0.0; // mass left for the unpinned types
  bool is_point = false;  // one free type, or chi = 1
  Vector point;           // the unique belief when is_point
};
ConstrainedBeliefSet constrained_belief_set(const std::vector<int>& dominated,
                                            const PriorDistribution& prior, double chi);

struct MessageCheck {
  int msg = -1;
  std::vector<int> dominated;
  bool pin_infeasible = false;  // every type dominated: the test is silent here
  bool survives = true;
  std::string note;
};

struct CriterionReport {
  bool pass = true;
  double pin_chi = 0.0;
  std::vector<MessageCheck> messages;  // one per off-path message
};

/// Belief-based refinement pass on a verified equilibrium. For every
/// off-path message the receiver's belief is pinned at the floor for
/// equilibrium-dominated types; the equilibrium survives if some admissible
/// belief still has a best response (pure or mixed over ties) under which no
/// type strictly gains by deviating. pin_chi = 0 gives the standard
/// intuitive criterion.
CriterionReport survives_cursed_intuitive(const SignalingGame& game, const EquilibriumRecord& eq,
                                          double pin_chi);

/// Annotates every record with both the standard (pin_chi = 0) and cursed
/// (pin_chi = chi) verdicts. No records are dropped.
std::vector<EquilibriumRecord> refine_equilibrium_set(const SignalingGame& game, double chi,
                                                      std::vector<EquilibriumRecord> eqs);

nlohmann::ordered_json criterion_report_to_json(const SignalingGame& game,
                                                const CriterionReport& report);

}  // namespace cursedsig
