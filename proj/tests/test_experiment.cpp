#include <doctest.h>

#include <cmath>

#include "cursedsig/experiment.hpp"
#include "cursedsig/refine.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cursedsig;

namespace {

struct ExpectedCell {
  std::string treatment;
  int block;  // 0 = all
  std::string worker_type;
  double p;        // expected table p-value, NaN for the "< 0.001" cells
  bool degenerate; // sd = 0 row
};

const std::vector<ExpectedCell> kExpected = {
    {"SIG2", 1, "high", NAN, false},   {"SIG2", 2, "high", NAN, false},
    {"SIG2", 3, "high", 0.002, false}, {"SIG2", 4, "high", NAN, false},
    {"SIG2", 5, "high", 0.002, false}, {"SIG2", 6, "high", NAN, false},
    {"SIG2", 0, "high", NAN, false},   {"SIG2", 1, "low", 0.023, false},
    {"SIG2", 2, "low", 0.002, false},  {"SIG2", 3, "low", 0.161, false},
    {"SIG2", 4, "low", 0.324, false},  {"SIG2", 5, "low", 0.044, false},
    {"SIG2", 6, "low", 0.0, true},     {"SIG2", 0, "low", NAN, false},
    {"SIG3", 1, "high", 0.001, false}, {"SIG3", 2, "high", NAN, false},
    {"SIG3", 3, "high", 0.011, false}, {"SIG3", 4, "high", 0.012, false},
    {"SIG3", 5, "high", 0.006, false}, {"SIG3", 6, "high", 0.011, false},
    {"SIG3", 7, "high", NAN, false},   {"SIG3", 8, "high", 0.023, false},
    {"SIG3", 0, "high", NAN, false},   {"SIG3", 1, "low", 0.083, false},
    {"SIG3", 2, "low", 0.162, false},  {"SIG3", 3, "low", 0.012, false},
    {"SIG3", 4, "low", 0.022, false},  {"SIG3", 5, "low", 0.162, false},
    {"SIG3", 6, "low", 0.326, false},  {"SIG3", 7, "low", 0.327, false},
    {"SIG3", 8, "low", 0.162, false},  {"SIG3", 0, "low", NAN, false},
};

std::vector<BlockStats> all_blocks() {
  auto rows = load_block_stats(fixtures::data_path("tables_sig2.csv"));
  const auto sig3 = load_block_stats(fixtures::data_path("tables_sig3.csv"));
  rows.insert(rows.end(), sig3.begin(), sig3.end());
  return rows;
}

const BlockStats& cell(const std::vector<BlockStats>& rows, const std::string& treatment,
                       int block, const std::string& type) {
  for (const auto& r : rows)
    if (r.treatment == treatment && r.block == block && r.worker_type == type) return r;
  throw std::runtime_error("missing fixture cell");
}

}  // namespace

TEST_CASE("the lab game fixture solves to the published benchmarks") {
  auto game = kmn_game();
  CHECK_NOTHROW(game.validate());
  const auto recs = enumerate_pure_cse(game, 0.0);
  bool found = false;
  for (const auto& r : recs) {
    if (r.kind != EqKind::Separating) continue;
    found = true;
    CHECK(r.assessment.receiver.wages(game.message_index("1")) == doctest::Approx(50.0));
    CHECK(r.assessment.receiver.wages(game.message_index("0")) == doctest::Approx(10.0));
  }
  CHECK(found);
}

TEST_CASE("closed-form survival regimes") {
  SUBCASE("pooling boundary is included, hybrid interval is open") {
    const auto v = regime(0.55);
    CHECK(v.pooling_survives);
    CHECK(v.separating_survives);
    CHECK_FALSE(v.hybrid_invest_prob.has_value());
  }
  SUBCASE("separating boundary is included") {
    const auto v = regime(0.775);
    CHECK(v.separating_survives);
    CHECK(v.pooling_survives);
    CHECK_FALSE(v.hybrid_invest_prob.has_value());
  }
  SUBCASE("interior hybrid probability") {
    const auto v = regime(0.6625);
    REQUIRE(v.hybrid_invest_prob.has_value());
    CHECK(*v.hybrid_invest_prob == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("extremes") {
    CHECK(regime(0.0).separating_survives);
    CHECK_FALSE(regime(0.0).pooling_survives);
    CHECK_FALSE(regime(1.0).separating_survives);
    CHECK(regime(1.0).pooling_survives);
  }
}

TEST_CASE("closed-form regimes match the generic pipeline on a coarse grid") {
  auto game = kmn_game();
  const auto spec = kmn_hybrid_support(game);
  for (int k = 0; k <= 40; ++k) {
    const double chi = k / 40.0;
    const auto want = regime(chi);
    auto recs = enumerate_pure_cse(game, chi);
    auto hybrid = solve_support_cse(game, chi, spec);
    recs.insert(recs.end(), hybrid.begin(), hybrid.end());
    recs = refine_equilibrium_set(game, chi, std::move(recs));
    bool sep = false, pool = false;
    std::optional<double> hybrid_prob;
    for (const auto& r : recs) {
      if (!r.refinement_verdicts.at("cursed_intuitive")) continue;
      if (r.kind == EqKind::Separating) sep = true;
      if (r.kind == EqKind::Pooling) pool = true;
      if (r.kind == EqKind::Hybrid) hybrid_prob = r.assessment.sender(0, 1);
    }
    CHECK(sep == want.separating_survives);
    CHECK(pool == want.pooling_survives);
    CHECK(hybrid_prob.has_value() == want.hybrid_invest_prob.has_value());
    if (hybrid_prob && want.hybrid_invest_prob)
      CHECK(*hybrid_prob == doctest::Approx(*want.hybrid_invest_prob).epsilon(1e-9));
  }
}

TEST_CASE("block statistics fixtures reproduce the published cells") {
  const auto rows = all_blocks();
  CHECK(rows.size() == 32);
  // stored at full precision; each cell prints back to the published
  // three-decimal table value
  auto r3 = [](double x) { return std::floor(x * 1000.0 + 0.5) / 1000.0; };
  const auto& sig2b1 = cell(rows, "SIG2", 1, "high");
  CHECK(sig2b1.n == 37);
  CHECK(r3(sig2b1.mean) == doctest::Approx(0.378));
  CHECK(r3(sig2b1.sd) == doctest::Approx(0.492));
  const auto& sig3b8 = cell(rows, "SIG3", 8, "high");
  CHECK(sig3b8.n == 30);
  CHECK(r3(sig3b8.mean) == doctest::Approx(0.833));
  CHECK(r3(sig3b8.sd) == doctest::Approx(0.379));
  const auto& overall = cell(rows, "SIG2", 0, "high");
  CHECK(overall.n == 223);
  CHECK(r3(overall.mean) == doctest::Approx(0.605));
}

TEST_CASE("block statistics parsing errors carry line numbers") {
  CHECK(parse_block_stats("", "mem").empty());
  CHECK(parse_block_stats("treatment,block,worker_type,n,mean,sd\n", "mem").empty());
  CHECK_THROWS_WITH_AS(
      parse_block_stats("treatment,block,worker_type,n,mean,sd\nSIG2,1,high,37,1.4,0.5\n", "mem"),
      doctest::Contains("mem:2"), InputError);
  CHECK_THROWS_WITH_AS(parse_block_stats("bad,header\n", "mem"), doctest::Contains("mem:1"),
                       InputError);
  CHECK_THROWS_WITH_AS(
      parse_block_stats("treatment,block,worker_type,n,mean,sd\nSIG9,1,high,3,0.5,0.5\n", "mem"),
      doctest::Contains("SIG2"), InputError);
}

TEST_CASE("one-sample t-test") {
  SUBCASE("first-block high types are far from full investment") {
    const auto r = one_sample_t(0.378, 0.492, 37, 1.0);
    CHECK(std::abs(r.t) == doctest::Approx(7.69).epsilon(2e-3));
    CHECK(r.df == doctest::Approx(36.0));
    CHECK(r.p < 0.001);
  }
  SUBCASE("mean equal to the benchmark gives p = 1") {
    const auto r = one_sample_t(0.5, 0.2, 20, 0.5);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
  }
  SUBCASE("a published interior cell reproduces") {
    const auto r = one_sample_t(0.091, 0.294, 22, 0.0);
    CHECK(r.p == doctest::Approx(0.162).epsilon(0.008));
  }
  SUBCASE("degenerate and undersized samples are rejected") {
    CHECK_THROWS_AS(one_sample_t(0.5, 0.0, 20, 0.0), InputError);
    CHECK_THROWS_AS(one_sample_t(0.5, 0.1, 1, 0.0), InputError);
  }
}

TEST_CASE("p-values agree with quadrature to 1e-8") {
  for (double df : {2.0, 5.0, 21.0, 36.0, 222.0}) {
    for (double t : {0.05, 0.5, 1.4518, 2.41, 3.364, 7.69}) {
      const double mine = student_t_two_tailed_p(t, df);
      const double ref = oracles::t_two_tailed_p_quadrature(t, df);
      CHECK(std::abs(mine - ref) <= 1e-8);
    }
  }
}

TEST_CASE("every published p-value cell reproduces within a thousandth") {
  const auto rows = all_blocks();
  for (const auto& e : kExpected) {
    const auto& r = cell(rows, e.treatment, e.block, e.worker_type);
    const double mu0 = e.worker_type == "high" ? 1.0 : 0.0;
    if (e.degenerate) {
      CHECK_THROWS_AS(one_sample_t(r.mean, r.sd, r.n, mu0), InputError);
      continue;
    }
    const double p = one_sample_t(r.mean, r.sd, r.n, mu0).p;
    if (std::isnan(e.p)) {
      CHECK_MESSAGE(p < 0.001, e.treatment, " block ", e.block, " ", e.worker_type);
    } else {
      CHECK_MESSAGE(std::abs(p - e.p) <= 0.001, e.treatment, " block ", e.block, " ",
                    e.worker_type, " got p = ", p);
    }
  }
}

TEST_CASE("prediction report") {
  const auto rows = all_blocks();

  SUBCASE("zero-investment cell is consistent with both criteria") {
    const auto report = prediction_report({cell(rows, "SIG2", 6, "low")}, 0.7);
    REQUIRE(report.size() == 1);
    CHECK_FALSE(report[0].test_intuitive.has_value());
    CHECK(report[0].exact_match_intuitive);
    CHECK(report[0].exact_match_cursed);
    CHECK(report[0].ci_lo == doctest::Approx(0.0));
  }
  SUBCASE("last-block high types reject full investment but not the mixed prediction") {
    const auto report = prediction_report({cell(rows, "SIG2", 6, "high")}, 0.7);
    REQUIRE(report.size() == 1);
    REQUIRE(report[0].test_intuitive.has_value());
    CHECK(report[0].test_intuitive->p < 0.001);
    REQUIRE(report[0].prediction_cursed.has_value());
    CHECK(*report[0].prediction_cursed == doctest::Approx(2.0 / 3.0));
    REQUIRE(report[0].test_cursed.has_value());
    // frozen against the quadrature oracle
    const auto& s = cell(rows, "SIG2", 6, "high");
    const double want = oracles::t_two_tailed_p_quadrature(
        (s.mean - 2.0 / 3.0) / (s.sd / std::sqrt(static_cast<double>(s.n))),
        static_cast<double>(s.n - 1));
    CHECK(report[0].test_cursed->p == doctest::Approx(want).epsilon(1e-8));
    CHECK(report[0].test_cursed->p > 0.9);
  }
  SUBCASE("confidence intervals are symmetric and cover the mean") {
    const auto report = prediction_report({cell(rows, "SIG3", 8, "high")}, std::nullopt);
    REQUIRE(report.size() == 1);
    const auto& c = report[0];
    CHECK(c.ci_lo < c.stats.mean);
    CHECK(c.ci_hi > c.stats.mean);
    CHECK(c.ci_hi - c.stats.mean == doctest::Approx(c.stats.mean - c.ci_lo).epsilon(1e-12));
    // bracketing the known 95% quantile behavior: CI half-width = q * se
    const double se = c.stats.sd / std::sqrt(static_cast<double>(c.stats.n));
    const double q = (c.ci_hi - c.stats.mean) / se;
    CHECK(q == doctest::Approx(2.045).epsilon(2e-3));  // t quantile near df = 29
  }
  SUBCASE("high-type cursed prediction switches across regimes") {
    const auto& block = cell(rows, "SIG3", 8, "high");
    auto sep = prediction_report({block}, 0.3);
    CHECK(*sep[0].prediction_cursed == doctest::Approx(1.0));
    auto pool = prediction_report({block}, 0.9);
    CHECK(*pool[0].prediction_cursed == doctest::Approx(0.0));
  }
}
