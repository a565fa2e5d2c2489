#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cursedsig/game.hpp"

namespace cursedsig {

enum class EqKind { Separating = 0, Pooling = 1, Hybrid = 2, Other = 3 };
std::string to_string(EqKind kind);

/// One solved equilibrium: the full assessment plus derived quantities and,
/// once the refinement pass has run, per-criterion verdicts.
struct EquilibriumRecord {
  EqKind kind = EqKind::Other;
  Assessment assessment;
  Vector sender_payoffs;               // per type
  std::vector<int> onpath_messages;
  std::map<std::string, bool> refinement_verdicts;
  bool approximate = false;
  std::string diagnostics;
};

/// Which messages each type may randomize over, and which actions the
/// receiver may randomize over per message. An empty action list leaves the
/// receiver unconstrained there (pure best response on-path, free deterrence
/// search off-path).
struct SupportSpec {
  std::string name;
  std::vector<std::vector<int>> sender;    // per type, message indices
  std::vector<std::vector<int>> receiver;  // per message, action indices
};

struct ReceiverBestResponse {
  std::vector<int> actions;  // FiniteActions: every maximizer
  double wage = 0.0;         // WageQuadratic: the posterior-mean wage
};

/// Receiver's best responses to `belief` after `msg`: the argmax action set
/// in FiniteActions mode, the posterior-mean wage in WageQuadratic mode.
ReceiverBestResponse receiver_best_response(const SignalingGame& game, const Vector& belief,
                                            int msg);

/// Messages maximizing the type's expected payoff against the receiver's
/// full strategy (on- and off-path responses alike).
std::vector<int> sender_best_response(const SignalingGame& game, int type,
                                      const ReceiverStrategy& receiver);

/// Expected sender payoff of one (type, message) pair against `receiver`.
double sender_expected_payoff(const SignalingGame& game, int type, int msg,
                              const ReceiverStrategy& receiver);

/// Exhaustive search over pure sender profiles (and pure receiver responses)
/// for chi-cursed sequential equilibria. On-path beliefs follow cursed
/// Bayesian updating; off-path messages are supported by searching the
/// floor-constrained belief simplex for a response that deters every type.
/// Guard: |M|^|Theta| must stay under 10^6, otherwise ResourceError.
std::vector<EquilibriumRecord> enumerate_pure_cse(const SignalingGame& game, double chi);

/// Solves for equilibria with the given supports by imposing sender and
/// receiver indifference across supported alternatives together with cursed
/// posterior consistency. Returns only fully verified solutions whose
/// supported probabilities are interior; an empty list means no equilibrium
/// with exactly these supports.
std::vector<EquilibriumRecord> solve_support_cse(const SignalingGame& game, double chi,
                                                 const SupportSpec& spec);

struct VerifyReport {
  bool pass = false;
  std::string first_violation;  // empty when pass
  double magnitude = 0.0;
};

/// Checks an assessment against every equilibrium condition: on-path beliefs
/// equal cursed posteriors, all beliefs dominate the floor, and both players
/// are sequentially rational, each within tol::opt. The report names the
/// first violated condition and its magnitude.
VerifyReport verify_cse(const SignalingGame& game, const Assessment& assessment);

Vector equilibrium_sender_payoffs(const SignalingGame& game, const Assessment& assessment);
std::vector<int> onpath_message_set(const SignalingGame& game, const SenderStrategy& sender);
EqKind classify_kind(const SignalingGame& game, const SenderStrategy& sender);

/// Deterministic order: by kind, then lexicographically by sender profile,
/// then by receiver strategy.
void sort_records(std::vector<EquilibriumRecord>& records);

/// Drops records that duplicate an earlier one (same assessment within
/// 1e-9). Input must already be sorted.
void dedupe_records(std::vector<EquilibriumRecord>& records);

nlohmann::ordered_json record_to_json(const SignalingGame& game, const EquilibriumRecord& rec);
nlohmann::ordered_json records_to_json(const SignalingGame& game, double chi,
                                       const std::vector<EquilibriumRecord>& records);

}  // namespace cursedsig
