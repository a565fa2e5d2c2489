#include "cursedsig/game.hpp"

#include <algorithm>
#include <cmath>

namespace cursedsig {

Vector validate_distribution(const Vector& v, const std::string& what) {
  if (v.size() == 0) throw InputError(what + ": empty distribution");
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) < -tol::prob || v(i) > 1.0 + tol::prob)
      throw InputError(what + ": entry " + fmt12(v(i)) + " outside [0, 1]");
  }
  const double s = v.sum();
  if (std::abs(s - 1.0) > tol::prob)
    throw InputError(what + ": entries sum to " + fmt12(s) + ", not 1");
  return (v / s).cwiseMax(0.0);
}

Matrix validate_rows(const Matrix& rows, const std::string& what) {
  Matrix out = rows;
  for (int r = 0; r < rows.rows(); ++r)
    out.row(r) = validate_distribution(rows.row(r).transpose(),
                                       what + " row " + std::to_string(r))
                     .transpose();
  return out;
}

PriorDistribution PriorDistribution::from(Vector w) {
  PriorDistribution p;
  p.weights = validate_distribution(w, "prior");
  for (int i = 0; i < p.weights.size(); ++i)
    if (p.weights(i) <= 0.0) throw InputError("prior: every type needs positive weight");
  return p;
}

namespace {
int index_of(const std::vector<std::string>& ids, const std::string& id,
             const char* what) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw InputError(std::string("unknown ") + what + " id '" + id + "'");
  return static_cast<int>(it - ids.begin());
}
}  // namespace

int SignalingGame::type_index(const std::string& id) const { return index_of(types, id, "type"); }
int SignalingGame::message_index(const std::string& id) const {
  return index_of(messages, id, "message");
}
int SignalingGame::action_index(const std::string& id) const {
  return index_of(actions, id, "action");
}

void SignalingGame::validate() const {
  if (types.empty()) throw InputError("game: needs at least one type");
  if (messages.empty()) throw InputError("game: needs at least one message");
  if (prior.weights.size() != num_types()) throw InputError("game: prior size mismatch");
  PriorDistribution::from(prior.weights);
  auto unique_ids = [](const std::vector<std::string>& ids, const char* what) {
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j)
        if (ids[i] == ids[j])
          throw InputError(std::string("game: duplicate ") + what + " id '" + ids[i] + "'");
  };
  unique_ids(types, "type");
  unique_ids(messages, "message");
  if (mode == ReceiverMode::FiniteActions) {
    if (actions.empty()) throw InputError("game: finite mode needs actions");
    unique_ids(actions, "action");
    if (static_cast<int>(sender_payoff.size()) != num_types() ||
        static_cast<int>(receiver_payoff.size()) != num_types())
      throw InputError("game: payoff tables must cover every type");
    for (int t = 0; t < num_types(); ++t) {
      if (sender_payoff[t].rows() != num_messages() || sender_payoff[t].cols() != num_actions() ||
          receiver_payoff[t].rows() != num_messages() || receiver_payoff[t].cols() != num_actions())
        throw InputError("game: payoff table for type '" + types[t] +
                         "' must cover all messages and actions");
      if (!sender_payoff[t].allFinite() || !receiver_payoff[t].allFinite())
        throw InputError("game: non-finite payoff for type '" + types[t] + "'");
    }
  } else {
    if (productivity.size() != num_types())
      throw InputError("game: wage mode needs a productivity per type");
    if (!productivity.allFinite())
      throw InputError("game: non-finite productivity");
    if (sender_cost.rows() != num_types() || sender_cost.cols() != num_messages())
      throw InputError("game: wage mode needs a sender cost per (type, message)");
    if (!sender_cost.allFinite()) throw InputError("game: non-finite sender cost");
  }
}

Vector average_sender_strategy(const SenderStrategy& sender, const PriorDistribution& prior) {
  if (sender.rows() != prior.weights.size())
    throw InputError("average_sender_strategy: sender rows do not match prior");
  const Matrix valid = validate_rows(sender, "sender strategy");
  return valid.transpose() * prior.weights;
}

SenderStrategy cursed_perception(const SenderStrategy& sender, const PriorDistribution& prior,
                                 double chi) {
  require_chi(chi);
  const Vector avg = average_sender_strategy(sender, prior);
  return chi * Vector::Ones(sender.rows()) * avg.transpose() + (1.0 - chi) * sender;
}

std::optional<Vector> cursed_bayes_update(const SignalingGame& game, const SenderStrategy& sender,
                                          double chi, int msg) {
  require_chi(chi);
  if (msg < 0 || msg >= game.num_messages())
    throw InputError("cursed_bayes_update: message index out of range");
  const Vector& prior = game.prior.weights;
  if (sender.rows() != prior.size() || sender.cols() != game.num_messages())
    throw InputError("cursed_bayes_update: sender strategy shape mismatch");
  const int n = game.num_types();
  double denom = 0.0;
  for (int t = 0; t < n; ++t) denom += prior(t) * sender(t, msg);
  if (denom <= 0.0) return std::nullopt;
  Vector mu(n);
  for (int t = 0; t < n; ++t)
    mu(t) = chi * prior(t) + (1.0 - chi) * (prior(t) * sender(t, msg) / denom);
  return mu;
}

Vector belief_floor(const PriorDistribution& prior, double chi) {
  require_chi(chi);
  return chi * prior.weights;
}

Vector minimal_belief_on(const std::vector<int>& targets, const PriorDistribution& prior,
                         double chi) {
  require_chi(chi);
  const int n = static_cast<int>(prior.weights.size());
  std::vector<bool> is_target(n, false);
  for (int t : targets) {
    if (t < 0 || t >= n) throw InputError("minimal_belief_on: type index out of range");
    is_target[t] = true;
  }
  double pinned = 0.0, rest_prior = 0.0;
  for (int t = 0; t < n; ++t) {
    if (is_target[t])
      pinned += chi * prior.weights(t);
    else
      rest_prior += prior.weights(t);
  }
  const double residual = 1.0 - pinned;
  if (rest_prior == 0.0) {
    // Every type pinned: only consistent when the pins already sum to one.
    if (std::abs(residual) > tol::prob)
      throw InputError("minimal_belief_on: pinning all types is infeasible for chi < 1");
    return belief_floor(prior, chi);
  }
  Vector mu(n);
  for (int t = 0; t < n; ++t)
    mu(t) = is_target[t] ? chi * prior.weights(t) : residual * prior.weights(t) / rest_prior;
  return mu;
}

}  // namespace cursedsig
