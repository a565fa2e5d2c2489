#include <doctest.h>

#include <random>

#include "cursedsig/experiment.hpp"
#include "cursedsig/refine.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cursedsig;

namespace {

const EquilibriumRecord* find_kind(const std::vector<EquilibriumRecord>& recs, EqKind kind) {
  for (const auto& r : recs)
    if (r.kind == kind) return &r;
  return nullptr;
}

EquilibriumRecord beerquiche_pooling(double chi) {
  auto bq = fixtures::beerquiche().game;
  for (const auto& r : enumerate_pure_cse(bq, chi))
    if (r.kind == EqKind::Pooling) return r;
  throw std::runtime_error("no pooling equilibrium found");
}

}  // namespace

TEST_CASE("attainable receiver responses across all beliefs") {
  SUBCASE("wage interval spans the productivities at chi = 0") {
    auto game = kmn_game();
    const auto br = br_over_all_beliefs(game, 1, 0.0);
    CHECK(br.wage_lo == doctest::Approx(10.0));
    CHECK(br.wage_hi == doctest::Approx(50.0));
    // with a floor the interval tightens toward the prior mean
    const auto capped = br_over_all_beliefs(game, 1, 0.5);
    CHECK(capped.wage_lo == doctest::Approx(10.0 + 20.0 * 0.5));
    CHECK(capped.wage_hi == doctest::Approx(50.0 - 20.0 * 0.5));
  }
  SUBCASE("beer-quiche: both responses attainable at Beer") {
    auto bq = fixtures::beerquiche().game;
    CHECK(br_over_all_beliefs(bq, bq.message_index("Beer")).actions.size() == 2);
  }
  SUBCASE("a dominant action is the whole set") {
    SignalingGame g;
    g.types = {"a", "b"};
    g.prior = PriorDistribution::from(Vector::Constant(2, 0.5));
    g.messages = {"m"};
    g.actions = {"good", "bad"};
    g.mode = ReceiverMode::FiniteActions;
    Matrix u1(1, 2), u2a(1, 2), u2b(1, 2);
    u1 << 0, 0;
    u2a << 5, 1;
    u2b << 4, 2;
    g.sender_payoff = {u1, u1};
    g.receiver_payoff = {u2a, u2b};
    const auto br = br_over_all_beliefs(g, 0);
    REQUIRE(br.actions.size() == 1);
    CHECK(br.actions[0] == 0);
  }
}

TEST_CASE("equilibrium-dominated type sets") {
  auto bq = fixtures::beerquiche().game;
  const int beer = bq.message_index("Beer");

  SUBCASE("pooling on Quiche: only the weak type is dominated at chi = 0") {
    const auto eq = beerquiche_pooling(0.0);
    const auto T = equilibrium_dominated_types(bq, eq, beer, 0.0);
    REQUIRE(T.size() == 1);
    CHECK(bq.types[T[0]] == "weak");
  }
  SUBCASE("no domination when the deviation could beat every payoff") {
    auto eq = beerquiche_pooling(0.0);
    eq.sender_payoffs = Vector::Zero(2);  // nothing beats a zero bar
    CHECK(equilibrium_dominated_types(bq, eq, beer, 0.0).empty());
  }
  SUBCASE("the floor cap can pull extra types into the dominated set") {
    const auto eq = beerquiche_pooling(0.6);
    const auto T = equilibrium_dominated_types(bq, eq, beer, 0.6);
    CHECK(T.size() == 2);  // NotFight is unreachable above the tie point
  }
}

TEST_CASE("constrained belief regions") {
  auto prior = PriorDistribution::from((Vector(2) << 0.4, 0.6).finished());

  SUBCASE("chi = 0 with one pinned type is a point mass on the other") {
    const auto region = constrained_belief_set({0}, prior, 0.0);
    REQUIRE(region.is_point);
    CHECK(region.point(0) == doctest::Approx(0.0));
    CHECK(region.point(1) == doctest::Approx(1.0));
  }
  SUBCASE("beer-quiche pin: mu(weak) = 0.4 chi") {
    const auto region = constrained_belief_set({0}, prior, 0.5);
    REQUIRE(region.is_point);
    CHECK(region.point(0) == doctest::Approx(0.2));
  }
  SUBCASE("empty pin leaves the whole floor simplex") {
    const auto region = constrained_belief_set({}, prior, 0.5);
    CHECK_FALSE(region.is_point);
    CHECK(region.free_mass == doctest::Approx(1.0));
  }
  SUBCASE("pinning everything below chi = 1 is infeasible") {
    CHECK_THROWS_AS(constrained_belief_set({0, 1}, prior, 0.5), InputError);
  }
  SUBCASE("pinned mass is linear in chi") {
    for (double chi : {0.1, 0.35, 0.8}) {
      const auto region = constrained_belief_set({0}, prior, chi);
      CHECK(region.pinned_values.sum() == doctest::Approx(chi * 0.4));
    }
  }
}

TEST_CASE("education-menu pooling: probe just above the low-type indifference point") {
  // Two-type wage game over {0, pooled e, probe}: at the probe only the low
  // type is equilibrium-dominated, its belief is pinned at the floor, and
  // the resulting high wage attracts the high type, killing the pooling
  // profile.
  const double chi = 0.4, p = 0.5, th = 2.0, tl = 1.0;
  const double e_pool = 0.2;
  auto cost = [](double e, double theta) { return e / theta; };
  // low-type indifference: pooled wage - c(e_pool) = capped max wage - c(e')
  const double pooled_wage = p * th + (1 - p) * tl;
  const double w_cap_high = th - (1 - p) * chi * (th - tl);
  const double e_star = (w_cap_high - pooled_wage + cost(e_pool, tl)) * tl;
  const double probe = e_star + 0.05;

  SignalingGame g;
  g.types = {"H", "L"};
  g.prior = PriorDistribution::from((Vector(2) << p, 1 - p).finished());
  g.messages = {"0", "pool", "probe"};
  g.mode = ReceiverMode::WageQuadratic;
  g.productivity = (Vector(2) << th, tl).finished();
  g.sender_cost = Matrix(2, 3);
  g.sender_cost << 0, cost(e_pool, th), cost(probe, th),
                   0, cost(e_pool, tl), cost(probe, tl);

  const auto recs = enumerate_pure_cse(g, chi);
  const EquilibriumRecord* pool = nullptr;
  for (const auto& r : recs)
    if (r.kind == EqKind::Pooling && r.assessment.sender(0, 1) > 0.5) pool = &r;
  REQUIRE(pool != nullptr);
  const auto T = equilibrium_dominated_types(g, *pool, 2, chi);
  REQUIRE(T.size() == 1);
  CHECK(g.types[T[0]] == "L");
  CHECK_FALSE(survives_cursed_intuitive(g, *pool, chi).pass);
}

TEST_CASE("cursed refinement of the beer-quiche pooling equilibrium") {
  auto bq = fixtures::beerquiche().game;

  SUBCASE("fails at chi = 0 and 0.3, survives at 0.5, 0.6 and 0.9") {
    for (double chi : {0.0, 0.3}) {
      const auto eq = beerquiche_pooling(chi);
      CHECK_FALSE(survives_cursed_intuitive(bq, eq, chi).pass);
    }
    for (double chi : {0.5, 0.6, 0.9}) {
      const auto eq = beerquiche_pooling(chi);
      CHECK(survives_cursed_intuitive(bq, eq, chi).pass);
    }
  }
  SUBCASE("the mixed equilibrium has no off-path message and passes trivially") {
    auto bqf = fixtures::beerquiche();
    const auto recs = solve_support_cse(bq, 0.0, bqf.support_specs[0]);
    REQUIRE(recs.size() == 1);
    const auto report = survives_cursed_intuitive(bq, recs[0], 0.0);
    CHECK(report.pass);
    CHECK(report.messages.empty());
  }
  SUBCASE("standard criterion kills the whole pooling family at chi = 0") {
    auto bqf = fixtures::beerquiche();
    auto family = solve_support_cse(bq, 0.0, bqf.support_specs[1]);
    auto pure = enumerate_pure_cse(bq, 0.0);
    family.insert(family.end(), pure.begin(), pure.end());
    for (const auto& r : family) CHECK_FALSE(survives_cursed_intuitive(bq, r, 0.0).pass);
  }
}

TEST_CASE("refinement regimes of the binary-education game") {
  auto game = kmn_game();

  auto survivors = [&](double chi) {
    auto recs = enumerate_pure_cse(game, chi);
    const auto hybrid = solve_support_cse(game, chi, kmn_hybrid_support(game));
    recs.insert(recs.end(), hybrid.begin(), hybrid.end());
    recs = refine_equilibrium_set(game, chi, std::move(recs));
    std::vector<EquilibriumRecord> out;
    for (auto& r : recs)
      if (r.refinement_verdicts.at("cursed_intuitive")) out.push_back(r);
    return out;
  };

  SUBCASE("chi = 0.3: only separating survives") {
    const auto s = survivors(0.3);
    REQUIRE(s.size() == 1);
    CHECK(s[0].kind == EqKind::Separating);
  }
  SUBCASE("chi = 0.65: separating, pooling and hybrid all survive") {
    const auto s = survivors(0.65);
    CHECK(s.size() == 3);
    CHECK(find_kind(s, EqKind::Separating) != nullptr);
    CHECK(find_kind(s, EqKind::Pooling) != nullptr);
    CHECK(find_kind(s, EqKind::Hybrid) != nullptr);
  }
  SUBCASE("chi = 0.8: only pooling survives") {
    const auto s = survivors(0.8);
    REQUIRE(s.size() == 1);
    CHECK(s[0].kind == EqKind::Pooling);
  }
  SUBCASE("standard intuitive criterion keeps only separating at every chi") {
    for (double chi : {0.0, 0.3, 0.6, 0.7}) {
      auto recs = refine_equilibrium_set(game, chi, enumerate_pure_cse(game, chi));
      for (const auto& r : recs)
        CHECK(r.refinement_verdicts.at("standard_intuitive") ==
              (r.kind == EqKind::Separating));
    }
  }
}

TEST_CASE("fully cursed equilibria always satisfy the criterion") {
  std::mt19937 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto game = oracles::random_finite_game(rng);
    const auto recs = enumerate_pure_cse(game, 1.0);
    for (const auto& r : recs) CHECK(survives_cursed_intuitive(game, r, 1.0).pass);
  }
}

TEST_CASE("chi = 0 verdicts agree with a directly coded standard intuitive criterion") {
  std::mt19937 rng(515);
  int checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto game = oracles::random_finite_game(rng, 2, 3, 3);  // two types
    for (const auto& rec : enumerate_pure_cse(game, 0.0)) {
      const bool lib = survives_cursed_intuitive(game, rec, 0.0).pass;
      const bool ref = oracles::standard_intuitive_survives(game, rec);
      CHECK_MESSAGE(lib == ref, "replicate ", rep);
      ++checked;
    }
  }
  CHECK(checked > 200);  // the comparison actually exercised many equilibria
}
