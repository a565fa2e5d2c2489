#include "cursedsig/solver.hpp"

#include <algorithm>
#include <cmath>

#include "cursedsig/numeric.hpp"

namespace cursedsig {

std::string to_string(EqKind kind) {
  switch (kind) {
    case EqKind::Separating: return "separating";
    case EqKind::Pooling: return "pooling";
    case EqKind::Hybrid: return "hybrid";
    default: return "other";
  }
}

ReceiverBestResponse receiver_best_response(const SignalingGame& game, const Vector& belief,
                                            int msg) {
  const Vector mu = validate_distribution(belief, "belief");
  ReceiverBestResponse br;
  if (game.mode == ReceiverMode::WageQuadratic) {
    br.wage = mu.dot(game.productivity);
    return br;
  }
  Vector expected = Vector::Zero(game.num_actions());
  for (int t = 0; t < game.num_types(); ++t)
    expected += mu(t) * game.receiver_payoff[t].row(msg).transpose();
  br.actions = argmax_set(expected);
  return br;
}

double sender_expected_payoff(const SignalingGame& game, int type, int msg,
                              const ReceiverStrategy& receiver) {
  if (game.mode == ReceiverMode::WageQuadratic)
    return game.u1_wage(type, msg, receiver.wages(msg));
  return game.sender_payoff[type].row(msg).dot(receiver.action_probs.row(msg));
}

std::vector<int> sender_best_response(const SignalingGame& game, int type,
                                      const ReceiverStrategy& receiver) {
  Vector payoff(game.num_messages());
  for (int m = 0; m < game.num_messages(); ++m)
    payoff(m) = sender_expected_payoff(game, type, m, receiver);
  return argmax_set(payoff);
}

std::vector<int> onpath_message_set(const SignalingGame& game, const SenderStrategy& sender) {
  std::vector<int> out;
  for (int m = 0; m < game.num_messages(); ++m) {
    double mass = 0.0;
    for (int t = 0; t < game.num_types(); ++t) mass += game.prior.weights(t) * sender(t, m);
    if (mass > 0.0) out.push_back(m);
  }
  return out;
}

EqKind classify_kind(const SignalingGame& game, const SenderStrategy& sender) {
  bool any_mixing = false;
  std::vector<int> pure(game.num_types(), -1);
  for (int t = 0; t < game.num_types(); ++t) {
    int support = 0;
    for (int m = 0; m < game.num_messages(); ++m)
      if (sender(t, m) > tol::opt) {
        ++support;
        pure[t] = m;
      }
    if (support > 1) any_mixing = true;
  }
  if (any_mixing) return EqKind::Hybrid;
  bool all_same = true, all_distinct = true;
  for (int i = 0; i < game.num_types(); ++i)
    for (int j = i + 1; j < game.num_types(); ++j) {
      if (pure[i] != pure[j]) all_same = false;
      if (pure[i] == pure[j]) all_distinct = false;
    }
  if (game.num_types() == 1) return EqKind::Separating;
  if (all_distinct) return EqKind::Separating;
  if (all_same) return EqKind::Pooling;
  return EqKind::Other;
}

Vector equilibrium_sender_payoffs(const SignalingGame& game, const Assessment& assessment) {
  Vector u = Vector::Zero(game.num_types());
  for (int t = 0; t < game.num_types(); ++t)
    for (int m = 0; m < game.num_messages(); ++m)
      if (assessment.sender(t, m) > 0.0)
        u(t) += assessment.sender(t, m) * sender_expected_payoff(game, t, m, assessment.receiver);
  return u;
}

namespace {

// ---------------------------------------------------------------------------
// Off-path support search
//
// Admissible beliefs form the floor-shifted simplex mu = chi F + (1-chi) nu
// with nu in the unit simplex, so every feasibility question reduces to a
// polytope question over nu.
// ---------------------------------------------------------------------------

Vector to_belief(const SignalingGame& game, double chi, const Vector& nu) {
  return chi * game.prior.weights + (1.0 - chi) * nu;
}

// Inequalities making `action` a best response at `msg`, expressed over nu.
SimplexPolytope br_polytope(const SignalingGame& game, double chi, int msg, int action) {
  const int n = game.num_types();
  const int n_act = game.num_actions();
  Matrix ineq(n_act - 1, n);
  Vector rhs(n_act - 1);
  int r = 0;
  for (int other = 0; other < n_act; ++other) {
    if (other == action) continue;
    Vector diff(n);
    for (int t = 0; t < n; ++t)
      diff(t) = game.receiver_payoff[t](msg, action) - game.receiver_payoff[t](msg, other);
    ineq.row(r) = (1.0 - chi) * diff.transpose();
    rhs(r) = -chi * diff.dot(game.prior.weights);
    ++r;
  }
  SimplexPolytope p;
  p.ineq = ineq;
  p.rhs = rhs;
  p.eq.resize(0, n);
  p.eq_rhs.resize(0);
  return p;
}

// Deterministic pick among candidate beliefs: lexicographically smallest,
// which leans on the floor for the first-declared types.
std::optional<Vector> pick_belief(const SignalingGame& game, double chi,
                                  const std::vector<Vector>& nus) {
  if (nus.empty()) return std::nullopt;
  const Vector* best = &nus.front();
  auto lex_less = [](const Vector& a, const Vector& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a(i) < b(i) - 1e-12) return true;
      if (a(i) > b(i) + 1e-12) return false;
    }
    return false;
  };
  for (const Vector& nu : nus)
    if (lex_less(nu, *best)) best = &nu;
  return to_belief(game, chi, *best);
}

struct OffpathSupport {
  Vector belief;
  int action = -1;   // FiniteActions
  double wage = 0.0; // WageQuadratic
};

// Searches the floor-constrained belief simplex for a response at `msg` that
// deters every type: no type's deviation payoff may exceed its equilibrium
// payoff beyond tol::opt. Returns the supporting belief and response.
std::optional<OffpathSupport> find_deterring_support(const SignalingGame& game, double chi,
                                                     int msg, const Vector& eq_payoffs,
                                                     const std::vector<int>& allowed_actions) {
  const int n = game.num_types();
  if (game.mode == ReceiverMode::WageQuadratic) {
    // The wage is linear in the belief, so the lowest admissible wage sits at
    // the vertex concentrating the free mass on the cheapest type.
    int cheapest = 0;
    for (int t = 1; t < n; ++t)
      if (game.productivity(t) < game.productivity(cheapest)) cheapest = t;
    std::vector<int> others;
    for (int t = 0; t < n; ++t)
      if (t != cheapest) others.push_back(t);
    const Vector belief = minimal_belief_on(others, game.prior, chi);
    const double wage = belief.dot(game.productivity);
    for (int t = 0; t < n; ++t)
      if (game.u1_wage(t, msg, wage) > eq_payoffs(t) + tol::opt) return std::nullopt;
    OffpathSupport s;
    s.belief = belief;
    s.wage = wage;
    return s;
  }
  std::vector<int> actions = allowed_actions;
  if (actions.empty())
    for (int a = 0; a < game.num_actions(); ++a) actions.push_back(a);
  for (int a : actions) {
    bool deters = true;
    for (int t = 0; t < n && deters; ++t)
      if (game.u1(t, msg, a) > eq_payoffs(t) + tol::opt) deters = false;
    if (!deters) continue;
    const auto nus = simplex_polytope_points(n, br_polytope(game, chi, msg, a));
    if (auto belief = pick_belief(game, chi, nus)) {
      OffpathSupport s;
      s.belief = *belief;
      s.action = a;
      return s;
    }
  }
  return std::nullopt;
}

long long pow_guard(long long base, int exp, long long cap) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > cap) return cap + 1;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pure-profile enumeration
// ---------------------------------------------------------------------------

std::vector<EquilibriumRecord> enumerate_pure_cse(const SignalingGame& game, double chi) {
  game.validate();
  require_chi(chi);
  const int n_types = game.num_types();
  const int n_msgs = game.num_messages();
  const long long cap = 1000000;
  if (pow_guard(n_msgs, n_types, cap) > cap)
    throw ResourceError("pure profile space exceeds the enumeration budget");

  std::vector<EquilibriumRecord> records;
  std::vector<int> assign(n_types, 0);

  auto emit_candidates = [&](const std::vector<int>& profile) {
    SenderStrategy sender = Matrix::Zero(n_types, n_msgs);
    for (int t = 0; t < n_types; ++t) sender(t, profile[t]) = 1.0;
    const std::vector<int> onpath = onpath_message_set(game, sender);
    std::vector<char> is_onpath(n_msgs, 0);
    for (int m : onpath) is_onpath[m] = 1;

    std::vector<Vector> posterior(n_msgs);
    for (int m : onpath) posterior[m] = *cursed_bayes_update(game, sender, chi, m);

    // Receiver behavior on-path: the posterior-mean wage, or each pure best
    // response (ties branch into separate candidate equilibria).
    std::vector<std::vector<int>> onpath_choices;
    if (game.mode == ReceiverMode::FiniteActions) {
      long long combos = 1;
      for (int m : onpath) {
        onpath_choices.push_back(receiver_best_response(game, posterior[m], m).actions);
        combos *= static_cast<long long>(onpath_choices.back().size());
        if (combos > cap) throw ResourceError("receiver tie branching exceeds the budget");
      }
    }

    std::vector<int> pick(onpath.size(), 0);
    while (true) {
      ReceiverStrategy receiver;
      BeliefSystem beliefs = Matrix::Zero(n_msgs, n_types);
      if (game.mode == ReceiverMode::WageQuadratic) {
        receiver.wages = Vector::Zero(n_msgs);
        for (int m : onpath) receiver.wages(m) = posterior[m].dot(game.productivity);
      } else {
        receiver.action_probs = Matrix::Zero(n_msgs, game.num_actions());
        for (std::size_t i = 0; i < onpath.size(); ++i)
          receiver.action_probs(onpath[i], onpath_choices[i][pick[i]]) = 1.0;
      }
      for (int m : onpath) beliefs.row(m) = posterior[m].transpose();

      Vector eq_payoffs(n_types);
      for (int t = 0; t < n_types; ++t)
        eq_payoffs(t) = sender_expected_payoff(game, t, profile[t], receiver);

      bool ok = true;
      // No type may prefer another on-path message.
      for (int t = 0; t < n_types && ok; ++t)
        for (int m : onpath)
          if (sender_expected_payoff(game, t, m, receiver) > eq_payoffs(t) + tol::opt) {
            ok = false;
            break;
          }
      // Every off-path message needs a supporting belief that deters all types.
      if (ok) {
        for (int m = 0; m < n_msgs && ok; ++m) {
          if (is_onpath[m]) continue;
          auto support = find_deterring_support(game, chi, m, eq_payoffs, {});
          if (!support) {
            ok = false;
            break;
          }
          beliefs.row(m) = support->belief.transpose();
          if (game.mode == ReceiverMode::WageQuadratic)
            receiver.wages(m) = support->wage;
          else
            receiver.action_probs(m, support->action) = 1.0;
        }
      }
      if (ok) {
        EquilibriumRecord rec;
        rec.kind = classify_kind(game, sender);
        rec.assessment = Assessment{sender, receiver, beliefs, chi};
        rec.sender_payoffs = eq_payoffs;
        rec.onpath_messages = onpath;
        records.push_back(std::move(rec));
      }

      // Advance the on-path tie choice, odometer style.
      if (game.mode == ReceiverMode::WageQuadratic) break;
      std::size_t i = 0;
      for (; i < pick.size(); ++i) {
        if (pick[i] + 1 < static_cast<int>(onpath_choices[i].size())) {
          ++pick[i];
          std::fill(pick.begin(), pick.begin() + static_cast<long>(i), 0);
          break;
        }
      }
      if (i == pick.size()) break;
    }
  };

  while (true) {
    emit_candidates(assign);
    int t = 0;
    for (; t < n_types; ++t) {
      if (assign[t] + 1 < n_msgs) {
        ++assign[t];
        std::fill(assign.begin(), assign.begin() + t, 0);
        break;
      }
    }
    if (t == n_types) break;
  }

  sort_records(records);
  return records;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

VerifyReport verify_cse(const SignalingGame& game, const Assessment& assessment) {
  game.validate();
  require_chi(assessment.chi);
  const int n_types = game.num_types();
  const int n_msgs = game.num_messages();
  if (assessment.sender.rows() != n_types || assessment.sender.cols() != n_msgs)
    throw InputError("verify_cse: sender strategy shape mismatch");
  if (assessment.beliefs.rows() != n_msgs || assessment.beliefs.cols() != n_types)
    throw InputError("verify_cse: belief system shape mismatch");
  const Matrix sender = validate_rows(assessment.sender, "sender strategy");
  const Matrix beliefs = validate_rows(assessment.beliefs, "beliefs");
  ReceiverStrategy receiver = assessment.receiver;
  if (game.mode == ReceiverMode::FiniteActions) {
    if (receiver.action_probs.rows() != n_msgs || receiver.action_probs.cols() != game.num_actions())
      throw InputError("verify_cse: receiver strategy shape mismatch");
    receiver.action_probs = validate_rows(receiver.action_probs, "receiver strategy");
  } else {
    if (receiver.wages.size() != n_msgs)
      throw InputError("verify_cse: receiver wages shape mismatch");
    for (int m = 0; m < n_msgs; ++m)
      if (receiver.wages(m) < 0.0) throw InputError("verify_cse: negative wage");
  }

  VerifyReport report;
  auto violated = [&](const std::string& what, double magnitude) {
    report.pass = false;
    report.first_violation = what;
    report.magnitude = magnitude;
    return report;
  };

  // (a) on-path beliefs must match cursed Bayesian updating
  for (int m = 0; m < n_msgs; ++m) {
    const auto mu = cursed_bayes_update(game, sender, assessment.chi, m);
    if (!mu) continue;
    const double gap = (beliefs.row(m).transpose() - *mu).lpNorm<Eigen::Infinity>();
    if (gap > tol::opt)
      return violated("on-path belief at message '" + game.messages[m] +
                      "' deviates from the cursed posterior", gap);
  }

  // (b) every belief dominates the floor
  const Vector floor = belief_floor(game.prior, assessment.chi);
  for (int m = 0; m < n_msgs; ++m) {
    const double gap = (floor - beliefs.row(m).transpose()).maxCoeff();
    if (gap > tol::opt)
      return violated("belief at message '" + game.messages[m] + "' falls below the floor", gap);
  }

  // (c) sender optimality for every played message
  for (int t = 0; t < n_types; ++t) {
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < n_msgs; ++m)
      best = std::max(best, sender_expected_payoff(game, t, m, receiver));
    for (int m = 0; m < n_msgs; ++m) {
      if (sender(t, m) <= 0.0) continue;
      const double gap = best - sender_expected_payoff(game, t, m, receiver);
      if (gap > tol::opt)
        return violated("type '" + game.types[t] + "' prefers deviating from message '" +
                        game.messages[m] + "'", gap);
    }
  }

  // (d) receiver optimality at every message under its stated belief
  for (int m = 0; m < n_msgs; ++m) {
    if (game.mode == ReceiverMode::WageQuadratic) {
      const double gap = std::abs(receiver.wages(m) -
                                  beliefs.row(m).dot(game.productivity.transpose()));
      if (gap > tol::opt)
        return violated("wage at message '" + game.messages[m] +
                        "' is not the posterior mean", gap);
    } else {
      Vector expected = Vector::Zero(game.num_actions());
      for (int t = 0; t < n_types; ++t)
        expected += beliefs(m, t) * game.receiver_payoff[t].row(m).transpose();
      const double best = expected.maxCoeff();
      for (int a = 0; a < game.num_actions(); ++a) {
        if (receiver.action_probs(m, a) <= 0.0) continue;
        const double gap = best - expected(a);
        if (gap > tol::opt)
          return violated("receiver action '" + game.actions[a] + "' at message '" +
                          game.messages[m] + "' is suboptimal", gap);
      }
    }
  }

  report.pass = true;
  return report;
}

// ---------------------------------------------------------------------------
// Support-constrained solving
// ---------------------------------------------------------------------------

namespace {

constexpr double kInteriorTol = 1e-9;
// Residual magnitude signalling a degenerate strategy point to root finders.
constexpr double kSentinel = 1e6;

struct SupportLayout {
  std::vector<std::vector<int>> sender;   // per type
  std::vector<std::vector<int>> receiver; // per message
  std::vector<char> msg_onpath;           // under the declared supports
};

// Sender strategy from stacked free probabilities; the last supported message
// of each type carries the remainder.
SenderStrategy build_sender(const SignalingGame& game, const SupportLayout& lay, const Vector& x) {
  SenderStrategy s = Matrix::Zero(game.num_types(), game.num_messages());
  int k = 0;
  for (int t = 0; t < game.num_types(); ++t) {
    const auto& supp = lay.sender[t];
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < supp.size(); ++i) {
      s(t, supp[i]) = x(k);
      rest -= x(k);
      ++k;
    }
    s(t, supp.back()) = rest;
  }
  return s;
}

bool interior(const SignalingGame& game, const SupportLayout& lay, const SenderStrategy& s) {
  for (int t = 0; t < game.num_types(); ++t)
    for (int m : lay.sender[t])
      if (s(t, m) < kInteriorTol || s(t, m) > 1.0 + tol::prob) return false;
  return true;
}

}  // namespace

std::vector<EquilibriumRecord> solve_support_cse(const SignalingGame& game, double chi,
                                                 const SupportSpec& spec) {
  game.validate();
  require_chi(chi);
  const int n_types = game.num_types();
  const int n_msgs = game.num_messages();

  SupportLayout lay;
  lay.sender = spec.sender;
  lay.receiver = spec.receiver.empty() ? std::vector<std::vector<int>>(n_msgs) : spec.receiver;
  if (static_cast<int>(lay.sender.size()) != n_types)
    throw InputError("support spec: sender support must cover every type");
  if (static_cast<int>(lay.receiver.size()) != n_msgs)
    throw InputError("support spec: receiver support must list every message (or none)");
  lay.msg_onpath.assign(n_msgs, 0);
  for (int t = 0; t < n_types; ++t) {
    if (lay.sender[t].empty()) throw InputError("support spec: empty sender support");
    std::vector<char> seen(n_msgs, 0);
    for (int m : lay.sender[t]) {
      if (m < 0 || m >= n_msgs) throw InputError("support spec: message index out of range");
      if (seen[m]) throw InputError("support spec: duplicate message in a sender support");
      seen[m] = 1;
      lay.msg_onpath[m] = 1;
    }
  }
  for (int m = 0; m < n_msgs; ++m) {
    std::vector<char> seen(game.mode == ReceiverMode::FiniteActions ? game.num_actions() : 0, 0);
    for (int a : lay.receiver[m]) {
      if (game.mode == ReceiverMode::WageQuadratic)
        throw InputError("support spec: receiver supports have no meaning in wage mode");
      if (a < 0 || a >= game.num_actions())
        throw InputError("support spec: action index out of range");
      if (seen[a]) throw InputError("support spec: duplicate action in a receiver support");
      seen[a] = 1;
    }
  }

  // Free sender probabilities.
  int n_x = 0;
  for (int t = 0; t < n_types; ++t) n_x += static_cast<int>(lay.sender[t].size()) - 1;

  // Stage 1 equations: in wage mode the sender indifference conditions close
  // over the sender unknowns directly (the wage is the posterior mean); in
  // finite mode the receiver indifference conditions at on-path mixing
  // messages do, since beliefs depend only on the sender strategy.
  // Degenerate strategy points (a supported message losing all mass) leave
  // posteriors undefined; the sentinel residual steers root finders back to
  // the interior.
  std::function<Vector(const Vector&)> stage1;
  int n_eq1 = 0;
  if (game.mode == ReceiverMode::WageQuadratic) {
    n_eq1 = n_x;
    stage1 = [&game, &lay, chi, n_eq1](const Vector& x) {
      const SenderStrategy s = build_sender(game, lay, x);
      Vector wages = Vector::Zero(game.num_messages());
      for (int m = 0; m < game.num_messages(); ++m) {
        if (!lay.msg_onpath[m]) continue;
        const auto mu = cursed_bayes_update(game, s, chi, m);
        if (!mu) return Vector::Constant(n_eq1, kSentinel).eval();
        wages(m) = mu->dot(game.productivity);
      }
      std::vector<double> res;
      for (int t = 0; t < game.num_types(); ++t) {
        const auto& supp = lay.sender[t];
        for (std::size_t i = 0; i + 1 < supp.size(); ++i)
          res.push_back(game.u1_wage(t, supp[i], wages(supp[i])) -
                        game.u1_wage(t, supp[i + 1], wages(supp[i + 1])));
      }
      Vector out(static_cast<long>(res.size()));
      for (std::size_t i = 0; i < res.size(); ++i) out(static_cast<long>(i)) = res[i];
      return out;
    };
  } else {
    for (int m = 0; m < n_msgs; ++m)
      if (lay.msg_onpath[m] && lay.receiver[m].size() > 1)
        n_eq1 += static_cast<int>(lay.receiver[m].size()) - 1;
    stage1 = [&game, &lay, chi, n_eq1](const Vector& x) {
      const SenderStrategy s = build_sender(game, lay, x);
      std::vector<double> res;
      for (int m = 0; m < game.num_messages(); ++m) {
        if (!lay.msg_onpath[m] || lay.receiver[m].size() < 2) continue;
        const auto mu = cursed_bayes_update(game, s, chi, m);
        if (!mu) return Vector::Constant(n_eq1, kSentinel).eval();
        for (std::size_t i = 0; i + 1 < lay.receiver[m].size(); ++i) {
          double diff = 0.0;
          for (int t = 0; t < game.num_types(); ++t)
            diff += (*mu)(t) * (game.receiver_payoff[t](m, lay.receiver[m][i]) -
                                game.receiver_payoff[t](m, lay.receiver[m][i + 1]));
          res.push_back(diff);
        }
      }
      Vector out(static_cast<long>(res.size()));
      for (std::size_t i = 0; i < res.size(); ++i) out(static_cast<long>(i)) = res[i];
      return out;
    };
  }

  // Solve stage 1 for the sender unknowns.
  std::vector<Vector> solutions;
  if (n_x == 0) {
    Vector empty(0);
    if (n_eq1 == 0 || stage1(empty).lpNorm<Eigen::Infinity>() <= tol::eq)
      solutions.push_back(empty);
  } else if (n_eq1 != n_x) {
    throw InputError("support spec: indifference system is not square (" +
                     std::to_string(n_eq1) + " equations, " + std::to_string(n_x) +
                     " unknowns)");
  } else if (n_x == 1) {
    auto f = [&](double v) {
      Vector x(1);
      x(0) = v;
      return stage1(x)(0);
    };
    const auto roots = scan_roots(f, kInteriorTol, 1.0 - kInteriorTol, 4096);
    if (roots.size() > 64)
      throw InputError(
          "support spec: the indifference condition is degenerate (a continuum of solutions)");
    for (double r : roots) {
      Vector x(1);
      x(0) = r;
      solutions.push_back(x);
    }
  } else {
    const Vector lo = Vector::Zero(n_x), hi = Vector::Ones(n_x);
    std::vector<Vector> starts;
    starts.push_back(Vector::Constant(n_x, 0.5));
    for (int mask = 0; mask < (1 << n_x) && n_x <= 6; ++mask) {
      Vector s(n_x);
      for (int j = 0; j < n_x; ++j) s(j) = (mask >> j & 1) ? 0.75 : 0.25;
      starts.push_back(s);
    }
    bool converged = false;
    for (const Vector& s : starts) {
      if (auto sol = newton_box_solve(stage1, s, lo, hi, tol::eq, 500)) {
        converged = true;
        bool dup = false;
        for (const Vector& q : solutions)
          if ((q - *sol).lpNorm<Eigen::Infinity>() < 1e-7) dup = true;
        if (!dup) solutions.push_back(*sol);
      }
    }
    if (!converged)
      throw ResourceError("support solve did not converge for the declared supports");
  }

  std::vector<EquilibriumRecord> records;
  for (const Vector& x : solutions) {
    // Bisection can land on a sign-flipping discontinuity rather than a
    // root; accept only genuine solutions of the indifference system.
    if (n_eq1 > 0 && stage1(x).lpNorm<Eigen::Infinity>() > 1e-8) continue;
    const SenderStrategy sender = build_sender(game, lay, x);
    if (!interior(game, lay, sender)) continue;

    BeliefSystem beliefs = Matrix::Zero(n_msgs, n_types);
    ReceiverStrategy receiver;
    if (game.mode == ReceiverMode::WageQuadratic)
      receiver.wages = Vector::Zero(n_msgs);
    else
      receiver.action_probs = Matrix::Zero(n_msgs, game.num_actions());

    bool ok = true;
    std::vector<int> onpath_mixing;  // finite mode: messages with receiver unknowns
    for (int m = 0; m < n_msgs && ok; ++m) {
      if (!lay.msg_onpath[m]) continue;
      const auto mu = cursed_bayes_update(game, sender, chi, m);
      if (!mu) {
        ok = false;
        break;
      }
      beliefs.row(m) = mu->transpose();
      if (game.mode == ReceiverMode::WageQuadratic) {
        receiver.wages(m) = mu->dot(game.productivity);
        continue;
      }
      const auto br = receiver_best_response(game, *mu, m);
      if (lay.receiver[m].size() > 1) {
        // Supported actions must all be best responses (they are indifferent
        // by stage 1, but a non-supported action could still beat them).
        for (int a : lay.receiver[m])
          if (std::find(br.actions.begin(), br.actions.end(), a) == br.actions.end()) ok = false;
        onpath_mixing.push_back(m);
      } else {
        int a;
        if (lay.receiver[m].size() == 1) {
          a = lay.receiver[m][0];
          if (std::find(br.actions.begin(), br.actions.end(), a) == br.actions.end()) ok = false;
        } else {
          if (br.actions.size() != 1) {
            ok = false;  // ambiguous pure response; the spec must declare it
          }
          a = br.actions.empty() ? 0 : br.actions[0];
        }
        if (ok) receiver.action_probs(m, a) = 1.0;
      }
    }
    if (!ok) continue;

    // Stage 2 (finite mode): sender indifference across supported messages is
    // linear in the receiver's mixing probabilities at on-path messages.
    if (game.mode == ReceiverMode::FiniteActions) {
      std::vector<std::pair<int, int>> r_map;  // (message, action slot) per unknown
      for (int m : onpath_mixing)
        for (std::size_t i = 0; i + 1 < lay.receiver[m].size(); ++i)
          r_map.emplace_back(m, static_cast<int>(i));
      const int n_r = static_cast<int>(r_map.size());

      int n_eq2 = 0;
      for (int t = 0; t < n_types; ++t) n_eq2 += static_cast<int>(lay.sender[t].size()) - 1;

      // Expected payoff of (t, m) split into a constant part plus a linear
      // function of the receiver unknowns.
      auto payoff_row = [&](int t, int m, Eigen::RowVectorXd& coef) {
        coef = Eigen::RowVectorXd::Zero(n_r);
        if (!lay.msg_onpath[m]) return 0.0;  // off-path handled later
        if (lay.receiver[m].size() > 1) {
          const int last = lay.receiver[m].back();
          double base = game.u1(t, m, last);
          for (int k = 0; k < n_r; ++k) {
            if (r_map[k].first != m) continue;
            const int a = lay.receiver[m][r_map[k].second];
            coef(k) = game.u1(t, m, a) - game.u1(t, m, last);
          }
          return base;
        }
        for (int a = 0; a < game.num_actions(); ++a)
          if (receiver.action_probs(m, a) > 0.0) return game.u1(t, m, a);
        return 0.0;
      };

      Matrix a_sys(n_eq2, std::max(n_r, 1));
      Vector b_sys(n_eq2);
      int row = 0;
      for (int t = 0; t < n_types; ++t) {
        const auto& supp = lay.sender[t];
        for (std::size_t i = 0; i + 1 < supp.size(); ++i) {
          Eigen::RowVectorXd ca, cb;
          const double ka = payoff_row(t, supp[i], ca);
          const double kb = payoff_row(t, supp[i + 1], cb);
          a_sys.row(row).setZero();
          a_sys.row(row).head(n_r) = ca - cb;
          b_sys(row) = kb - ka;
          ++row;
        }
      }

      Vector r_sol = Vector::Zero(n_r);
      if (n_r > 0) {
        if (n_eq2 == 0) {
          throw InputError("support spec: on-path receiver mixing is underdetermined");
        } else {
          const Matrix a_lin = a_sys.leftCols(n_r);
          r_sol = a_lin.colPivHouseholderQr().solve(b_sys);
          if ((a_lin * r_sol - b_sys).lpNorm<Eigen::Infinity>() > 1e-8) continue;
        }
      } else if (n_eq2 > 0) {
        if (b_sys.lpNorm<Eigen::Infinity>() > 1e-8) continue;
      }

      bool box_ok = true;
      for (int m : onpath_mixing) {
        double rest = 1.0;
        for (int k = 0; k < n_r; ++k) {
          if (r_map[k].first != m) continue;
          const int a = lay.receiver[m][r_map[k].second];
          const double p = r_sol(k);
          if (p < kInteriorTol || p > 1.0 - kInteriorTol) box_ok = false;
          receiver.action_probs(m, a) = std::clamp(p, 0.0, 1.0);
          rest -= p;
        }
        if (rest < kInteriorTol || rest > 1.0 - kInteriorTol) box_ok = false;
        receiver.action_probs(m, lay.receiver[m].back()) = std::clamp(rest, 0.0, 1.0);
      }
      if (!box_ok) continue;
    }

    // Equilibrium payoffs are now fixed by the on-path responses.
    Vector eq_payoffs(n_types);
    for (int t = 0; t < n_types; ++t)
      eq_payoffs(t) = sender_expected_payoff(game, t, lay.sender[t][0], receiver);

    // Off-path messages: either a free deterrence search, or one constrained
    // to the declared receiver support. A declared pair at an off-path
    // message yields a one-parameter family; its extreme mixes are emitted.
    struct OffpathChoice {
      int msg;
      std::vector<std::pair<Vector, Vector>> variants;  // (belief, action row)
    };
    std::vector<OffpathChoice> offpath;
    for (int m = 0; m < n_msgs && ok; ++m) {
      if (lay.msg_onpath[m]) continue;
      OffpathChoice choice;
      choice.msg = m;
      if (game.mode == ReceiverMode::WageQuadratic || lay.receiver[m].size() <= 1) {
        const std::vector<int> allowed =
            game.mode == ReceiverMode::WageQuadratic ? std::vector<int>{} : lay.receiver[m];
        auto support = find_deterring_support(game, chi, m, eq_payoffs, allowed);
        if (!support) {
          ok = false;
          break;
        }
        Vector row;
        if (game.mode == ReceiverMode::FiniteActions) {
          row = Vector::Zero(game.num_actions());
          row(support->action) = 1.0;
        }
        choice.variants.emplace_back(support->belief, row);
      } else {
        // Belief must make the declared actions mutually optimal; then any
        // mix deterring every type supports the profile.
        const int a0 = lay.receiver[m][0];
        SimplexPolytope poly = br_polytope(game, chi, m, a0);
        Matrix eqrows(static_cast<long>(lay.receiver[m].size()) - 1, n_types);
        Vector eqrhs(eqrows.rows());
        for (std::size_t i = 1; i < lay.receiver[m].size(); ++i) {
          Vector diff(n_types);
          for (int t = 0; t < n_types; ++t)
            diff(t) = game.receiver_payoff[t](m, a0) -
                      game.receiver_payoff[t](m, lay.receiver[m][i]);
          eqrows.row(static_cast<long>(i) - 1) = (1.0 - chi) * diff.transpose();
          eqrhs(static_cast<long>(i) - 1) = -chi * diff.dot(game.prior.weights);
        }
        poly.eq = eqrows;
        poly.eq_rhs = eqrhs;
        const auto nus = simplex_polytope_points(n_types, poly);
        auto belief = pick_belief(game, chi, nus);
        if (!belief) {
          ok = false;
          break;
        }
        // Deterring mixes over the tied actions form an interval when two
        // actions are declared; enumerate its endpoints.
        if (lay.receiver[m].size() != 2)
          throw InputError("support spec: off-path receiver support larger than two actions");
        const int a1 = lay.receiver[m][1];
        double q_lo = 0.0, q_hi = 1.0;
        for (int t = 0; t < n_types; ++t) {
          const double pa = game.u1(t, m, a0), pb = game.u1(t, m, a1);
          const double bound = eq_payoffs(t);
          // need q*pa + (1-q)*pb <= bound
          if (std::abs(pa - pb) < 1e-14) {
            if (pb > bound + tol::opt) q_lo = 1.0, q_hi = 0.0;
          } else if (pa > pb) {
            q_hi = std::min(q_hi, (bound - pb) / (pa - pb));
          } else {
            q_lo = std::max(q_lo, (bound - pb) / (pa - pb));
          }
        }
        if (q_lo > q_hi) {
          ok = false;
          break;
        }
        for (double q : {q_lo, q_hi}) {
          Vector row = Vector::Zero(game.num_actions());
          row(a0) = q;
          row(a1) = 1.0 - q;
          choice.variants.emplace_back(*belief, row);
          if (q_hi - q_lo < 1e-12) break;
        }
      }
      offpath.push_back(std::move(choice));
    }
    if (!ok) continue;

    // Cartesian product over off-path variants (families emit endpoints).
    std::vector<std::size_t> idx(offpath.size(), 0);
    while (true) {
      Assessment a;
      a.sender = sender;
      a.receiver = receiver;
      a.beliefs = beliefs;
      a.chi = chi;
      for (std::size_t i = 0; i < offpath.size(); ++i) {
        const auto& [belief, row] = offpath[i].variants[idx[i]];
        a.beliefs.row(offpath[i].msg) = belief.transpose();
        if (game.mode == ReceiverMode::WageQuadratic)
          a.receiver.wages(offpath[i].msg) = belief.dot(game.productivity);
        else
          a.receiver.action_probs.row(offpath[i].msg) = row.transpose();
      }
      if (verify_cse(game, a).pass) {
        EquilibriumRecord rec;
        rec.kind = classify_kind(game, a.sender);
        rec.assessment = a;
        rec.sender_payoffs = equilibrium_sender_payoffs(game, a);
        rec.onpath_messages = onpath_message_set(game, a.sender);
        rec.diagnostics = spec.name.empty() ? "" : ("support spec: " + spec.name);
        records.push_back(std::move(rec));
      }
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (idx[i] + 1 < offpath[i].variants.size()) {
          ++idx[i];
          std::fill(idx.begin(), idx.begin() + static_cast<long>(i), 0);
          break;
        }
      }
      if (i == idx.size()) break;
    }
  }

  sort_records(records);
  dedupe_records(records);
  return records;
}

// ---------------------------------------------------------------------------
// Ordering and reports
// ---------------------------------------------------------------------------

namespace {
std::vector<double> flat_key(const EquilibriumRecord& r) {
  std::vector<double> key;
  key.push_back(static_cast<double>(r.kind));
  auto push_matrix = [&key](const Matrix& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) key.push_back(std::round(m(i, j) * 1e9) / 1e9);
  };
  push_matrix(r.assessment.sender);
  if (r.assessment.receiver.action_probs.size() > 0)
    push_matrix(r.assessment.receiver.action_probs);
  if (r.assessment.receiver.wages.size() > 0)
    push_matrix(r.assessment.receiver.wages);
  push_matrix(r.assessment.beliefs);
  return key;
}
}  // namespace

void sort_records(std::vector<EquilibriumRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
                     return flat_key(a) < flat_key(b);
                   });
}

void dedupe_records(std::vector<EquilibriumRecord>& records) {
  std::vector<EquilibriumRecord> out;
  for (auto& r : records) {
    bool dup = false;
    for (const auto& q : out) {
      if (q.kind != r.kind) continue;
      if ((q.assessment.sender - r.assessment.sender).lpNorm<Eigen::Infinity>() > 1e-9) continue;
      if (q.assessment.receiver.wages.size() > 0 &&
          (q.assessment.receiver.wages - r.assessment.receiver.wages).lpNorm<Eigen::Infinity>() >
              1e-9)
        continue;
      if (q.assessment.receiver.action_probs.size() > 0 &&
          (q.assessment.receiver.action_probs - r.assessment.receiver.action_probs)
                  .lpNorm<Eigen::Infinity>() > 1e-9)
        continue;
      if ((q.assessment.beliefs - r.assessment.beliefs).lpNorm<Eigen::Infinity>() > 1e-9) continue;
      dup = true;
      break;
    }
    if (!dup) out.push_back(std::move(r));
  }
  records = std::move(out);
}

nlohmann::ordered_json record_to_json(const SignalingGame& game, const EquilibriumRecord& rec) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(rec.kind);
  j["chi"] = round12(rec.assessment.chi);
  nlohmann::ordered_json sender;
  for (int t = 0; t < game.num_types(); ++t) {
    nlohmann::ordered_json row;
    for (int m = 0; m < game.num_messages(); ++m)
      row[game.messages[m]] = round12(rec.assessment.sender(t, m));
    sender[game.types[t]] = row;
  }
  j["sender"] = sender;
  nlohmann::ordered_json receiver;
  for (int m = 0; m < game.num_messages(); ++m) {
    if (game.mode == ReceiverMode::WageQuadratic) {
      receiver[game.messages[m]] = round12(rec.assessment.receiver.wages(m));
    } else {
      nlohmann::ordered_json row;
      for (int a = 0; a < game.num_actions(); ++a)
        row[game.actions[a]] = round12(rec.assessment.receiver.action_probs(m, a));
      receiver[game.messages[m]] = row;
    }
  }
  j["receiver"] = receiver;
  nlohmann::ordered_json beliefs;
  for (int m = 0; m < game.num_messages(); ++m) {
    nlohmann::ordered_json row;
    for (int t = 0; t < game.num_types(); ++t)
      row[game.types[t]] = round12(rec.assessment.beliefs(m, t));
    beliefs[game.messages[m]] = row;
  }
  j["beliefs"] = beliefs;
  nlohmann::ordered_json payoffs;
  for (int t = 0; t < game.num_types(); ++t)
    payoffs[game.types[t]] = round12(rec.sender_payoffs(t));
  j["sender_payoffs"] = payoffs;
  nlohmann::ordered_json onpath = nlohmann::ordered_json::array();
  for (int m : rec.onpath_messages) onpath.push_back(game.messages[m]);
  j["onpath_messages"] = onpath;
  if (!rec.refinement_verdicts.empty()) {
    nlohmann::ordered_json verdicts;
    for (const auto& [name, pass] : rec.refinement_verdicts) verdicts[name] = pass;
    j["refinements"] = verdicts;
  }
  if (rec.approximate) j["approximate"] = true;
  if (!rec.diagnostics.empty()) j["diagnostics"] = rec.diagnostics;
  return j;
}

nlohmann::ordered_json records_to_json(const SignalingGame& game, double chi,
                                       const std::vector<EquilibriumRecord>& records) {
  nlohmann::ordered_json j;
  j["chi"] = round12(chi);
  j["equilibria"] = nlohmann::ordered_json::array();
  for (const auto& r : records) j["equilibria"].push_back(record_to_json(game, r));
  return j;
}

}  // namespace cursedsig
