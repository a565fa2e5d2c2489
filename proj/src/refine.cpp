#include "cursedsig/refine.hpp"

#include <algorithm>
#include <cmath>

#include "cursedsig/numeric.hpp"

namespace cursedsig {

namespace {

// BR condition for `action` against every other action, as inequalities over
// the nu-parameterization mu = chi F + (1 - chi) nu.
void br_rows(const SignalingGame& game, double chi, int msg, int action,
             const std::vector<int>& versus, Matrix& ineq, Vector& rhs) {
  const int n = game.num_types();
  ineq.resize(static_cast<long>(versus.size()), n);
  rhs.resize(static_cast<long>(versus.size()));
  for (std::size_t i = 0; i < versus.size(); ++i) {
    Vector diff(n);
    for (int t = 0; t < n; ++t)
      diff(t) = game.receiver_payoff[t](msg, action) - game.receiver_payoff[t](msg, versus[i]);
    ineq.row(static_cast<long>(i)) = (1.0 - chi) * diff.transpose();
    rhs(static_cast<long>(i)) = -chi * diff.dot(game.prior.weights);
  }
}

}  // namespace

ReceiverResponseSet br_over_all_beliefs(const SignalingGame& game, int msg, double chi) {
  game.validate();
  require_chi(chi);
  if (msg < 0 || msg >= game.num_messages())
    throw InputError("br_over_all_beliefs: message index out of range");
  ReceiverResponseSet out;
  if (game.mode == ReceiverMode::WageQuadratic) {
    const double mean = game.prior.weights.dot(game.productivity);
    out.wage_lo = chi * mean + (1.0 - chi) * game.productivity.minCoeff();
    out.wage_hi = chi * mean + (1.0 - chi) * game.productivity.maxCoeff();
    return out;
  }
  const int n = game.num_types();
  for (int a = 0; a < game.num_actions(); ++a) {
    std::vector<int> versus;
    for (int b = 0; b < game.num_actions(); ++b)
      if (b != a) versus.push_back(b);
    SimplexPolytope p;
    br_rows(game, chi, msg, a, versus, p.ineq, p.rhs);
    p.eq.resize(0, n);
    p.eq_rhs.resize(0);
    if (simplex_polytope_nonempty(n, p)) out.actions.push_back(a);
  }
  return out;
}

std::vector<int> equilibrium_dominated_types(const SignalingGame& game,
                                             const EquilibriumRecord& eq, int msg,
                                             double chi) {
  const ReceiverResponseSet br = br_over_all_beliefs(game, msg, chi);
  std::vector<int> dominated;
  for (int t = 0; t < game.num_types(); ++t) {
    double best_dev;
    if (game.mode == ReceiverMode::WageQuadratic) {
      best_dev = game.u1_wage(t, msg, br.wage_hi);
    } else {
      best_dev = -std::numeric_limits<double>::infinity();
      for (int a : br.actions) best_dev = std::max(best_dev, game.u1(t, msg, a));
    }
    if (eq.sender_payoffs(t) > best_dev + tol::opt) dominated.push_back(t);
  }
  return dominated;
}

ConstrainedBeliefSet constrained_belief_set(const std::vector<int>& dominated,
                                            const PriorDistribution& prior, double chi) {
  require_chi(chi);
  const int n = static_cast<int>(prior.weights.size());
  ConstrainedBeliefSet out;
  out.pinned = dominated;
  std::sort(out.pinned.begin(), out.pinned.end());
  out.pinned_values = Vector::Zero(n);
  std::vector<bool> is_pinned(n, false);
  for (int t : out.pinned) {
    if (t < 0 || t >= n) throw InputError("constrained_belief_set: type index out of range");
    is_pinned[t] = true;
    out.pinned_values(t) = chi * prior.weights(t);
  }
  out.free_mass = 1.0 - out.pinned_values.sum();
  int free_count = 0;
  for (int t = 0; t < n; ++t)
    if (!is_pinned[t]) ++free_count;
  if (free_count == 0 && out.free_mass > tol::prob)
    throw InputError("constrained_belief_set: pinning every type is infeasible for chi < 1");
  if (free_count <= 1 || chi >= 1.0) {
    out.is_point = true;
    out.point = minimal_belief_on(out.pinned, prior, chi);
  }
  return out;
}

namespace {

// Deterrence with a possibly mixed response over the action set `tied`: is
// there a mix giving no type more than its equilibrium payoff (plus slack)?
bool mix_deters(const SignalingGame& game, int msg, const std::vector<int>& tied,
                const Vector& eq_payoffs) {
  const int k = static_cast<int>(tied.size());
  SimplexPolytope p;
  p.ineq.resize(game.num_types(), k);
  p.rhs.resize(game.num_types());
  for (int t = 0; t < game.num_types(); ++t) {
    for (int i = 0; i < k; ++i) p.ineq(t, i) = -game.u1(t, msg, tied[i]);
    p.rhs(t) = -(eq_payoffs(t) + tol::opt);
  }
  p.eq.resize(0, k);
  p.eq_rhs.resize(0);
  return simplex_polytope_nonempty(k, p);
}

// Existence of an admissible belief (nu on the face nu_T = 0) and a receiver
// best response to it deterring every type. Checked exactly by enumerating,
// for each candidate set S of mutually optimal actions, a basic belief of the
// region where S is tied on top, then solving the deterrence mix over S.
bool deterrable_finite(const SignalingGame& game, double pin_chi, int msg,
                       const std::vector<int>& pinned, const Vector& eq_payoffs) {
  const int n = game.num_types();
  const int n_act = game.num_actions();
  if (n_act > 16) throw ResourceError("too many receiver actions for the refinement search");

  if (pin_chi >= 1.0) {
    // Fully cursed: the only admissible belief is the prior.
    const auto br = receiver_best_response(game, game.prior.weights, msg);
    return mix_deters(game, msg, br.actions, eq_payoffs);
  }

  Matrix face = Matrix::Zero(static_cast<long>(pinned.size()), n);
  for (std::size_t i = 0; i < pinned.size(); ++i) face(static_cast<long>(i), pinned[i]) = 1.0;
  const Vector face_rhs = Vector::Zero(static_cast<long>(pinned.size()));

  for (int mask = 1; mask < (1 << n_act); ++mask) {
    std::vector<int> tied, others;
    for (int a = 0; a < n_act; ++a)
      ((mask >> a) & 1 ? tied : others).push_back(a);
    // Beliefs where every action in `tied` is optimal and mutually
    // indifferent, restricted to the pinned face.
    SimplexPolytope p;
    Matrix ineq;
    Vector rhs;
    br_rows(game, pin_chi, msg, tied[0], others, ineq, rhs);
    p.ineq = ineq;
    p.rhs = rhs;
    Matrix eqs(static_cast<long>(tied.size()) - 1 + face.rows(), n);
    Vector eqrhs(eqs.rows());
    for (std::size_t i = 1; i < tied.size(); ++i) {
      Matrix one_ineq;
      Vector one_rhs;
      br_rows(game, pin_chi, msg, tied[0], {tied[i]}, one_ineq, one_rhs);
      eqs.row(static_cast<long>(i) - 1) = one_ineq.row(0);
      eqrhs(static_cast<long>(i) - 1) = one_rhs(0);
    }
    eqs.bottomRows(face.rows()) = face;
    eqrhs.tail(face.rows()) = face_rhs;
    p.eq = eqs;
    p.eq_rhs = eqrhs;
    if (!simplex_polytope_nonempty(n, p)) continue;
    if (mix_deters(game, msg, tied, eq_payoffs)) return true;
  }
  return false;
}

}  // namespace

CriterionReport survives_cursed_intuitive(const SignalingGame& game, const EquilibriumRecord& eq,
                                          double pin_chi) {
  game.validate();
  require_chi(pin_chi);
  CriterionReport report;
  report.pin_chi = pin_chi;

  std::vector<char> onpath(game.num_messages(), 0);
  for (int m : eq.onpath_messages) onpath[m] = 1;

  for (int m = 0; m < game.num_messages(); ++m) {
    if (onpath[m]) continue;
    MessageCheck check;
    check.msg = m;
    check.dominated = equilibrium_dominated_types(game, eq, m, pin_chi);

    if (check.dominated.empty()) {
      // No pin: the equilibrium's own supporting belief already deters.
      check.survives = true;
      check.note = "no type is equilibrium-dominated";
    } else if (static_cast<int>(check.dominated.size()) == game.num_types() && pin_chi < 1.0) {
      // Pinning every type is infeasible, so the test is silent here.
      check.pin_infeasible = true;
      check.survives = true;
      check.note = "every type is equilibrium-dominated; no admissible pin";
    } else if (game.mode == ReceiverMode::WageQuadratic) {
      // The wage is linear in the belief: the most deterring admissible wage
      // sits at the cheapest free type.
      const double mean = game.prior.weights.dot(game.productivity);
      std::vector<bool> pinned(game.num_types(), false);
      for (int t : check.dominated) pinned[t] = true;
      double min_free = std::numeric_limits<double>::infinity();
      for (int t = 0; t < game.num_types(); ++t)
        if (!pinned[t]) min_free = std::min(min_free, game.productivity(t));
      double w_lo;
      if (pin_chi >= 1.0) {
        w_lo = mean;
      } else {
        w_lo = pin_chi * mean + (1.0 - pin_chi) * min_free;
      }
      check.survives = true;
      for (int t = 0; t < game.num_types(); ++t)
        if (game.u1_wage(t, m, w_lo) > eq.sender_payoffs(t) + tol::opt) check.survives = false;
      if (!check.survives) check.note = "pinned belief attracts a deviation";
    } else {
      check.survives =
          deterrable_finite(game, pin_chi, m, check.dominated, eq.sender_payoffs);
      if (!check.survives) check.note = "no admissible belief deters all deviations";
    }
    report.pass = report.pass && check.survives;
    report.messages.push_back(std::move(check));
  }
  return report;
}

std::vector<EquilibriumRecord> refine_equilibrium_set(const SignalingGame& game, double chi,
                                                      std::vector<EquilibriumRecord> eqs) {
  for (auto& eq : eqs) {
    eq.refinement_verdicts["standard_intuitive"] =
        survives_cursed_intuitive(game, eq, 0.0).pass;
    eq.refinement_verdicts["cursed_intuitive"] =
        survives_cursed_intuitive(game, eq, chi).pass;
  }
  return eqs;
}

nlohmann::ordered_json criterion_report_to_json(const SignalingGame& game,
                                                const CriterionReport& report) {
  nlohmann::ordered_json j;
  j["pin_chi"] = round12(report.pin_chi);
  j["pass"] = report.pass;
  j["offpath_messages"] = nlohmann::ordered_json::array();
  for (const auto& check : report.messages) {
    nlohmann::ordered_json c;
    c["message"] = game.messages[check.msg];
    nlohmann::ordered_json dom = nlohmann::ordered_json::array();
    for (int t : check.dominated) dom.push_back(game.types[t]);
    c["dominated_types"] = dom;
    nlohmann::ordered_json pins;
    for (int t : check.dominated)
      pins[game.types[t]] = round12(report.pin_chi * game.prior.weights(t));
    c["pinned_beliefs"] = pins;
    c["pin_infeasible"] = check.pin_infeasible;
    c["survives"] = check.survives;
    if (!check.note.empty()) c["note"] = check.note;
    j["offpath_messages"].push_back(c);
  }
  return j;
}

}  // namespace cursedsig
