#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cursedsig/game.hpp"
#include "cursedsig/solver.hpp"
#include "cursedsig/stats.hpp"

namespace cursedsig {

/// The binary-education lab game: productivities 50 (high) and 10 (low) with
/// equal prior, investment costing 9 for the high type and 45 for the low
/// type, and a posterior-mean wage setter.
SignalingGame kmn_game();

/// Support spec for the mixed equilibrium where the high type randomizes
/// over investing and the low type stays out.
SupportSpec kmn_hybrid_support(const SignalingGame& game);

/// Closed-form survival regimes of the refined equilibria of kmn_game():
/// separating up to chi = 31/40, pooling from chi = 11/20, and in between a
/// mixed equilibrium where the high type invests with probability
/// (40 chi - 22) / 9.
struct RegimeVerdict {
  double chi = 0.0;
  bool separating_survives = false;
  bool pooling_survives = false;
  std::optional<double> hybrid_invest_prob;
};
RegimeVerdict regime(double chi);

/// One experimental cell: investment frequency of one worker type in one
/// block of one treatment.
struct BlockStats {
  std::string treatment;   // SIG2 | SIG3
  int block = 0;           // 0 means all periods pooled
  std::string worker_type; // high | low
  long n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

/// Reads block statistics from CSV with header
/// treatment,block,worker_type,n,mean,sd. Errors carry the line number.
std::vector<BlockStats> load_block_stats(const std::string& path);
std::vector<BlockStats> parse_block_stats(const std::string& text, const std::string& origin);

/// One row of the comparison table: the observed cell versus the theoretical
/// investment-rate predictions, with two-tailed t-tests.
struct PredictionCell {
  BlockStats stats;
  double prediction_intuitive = 0.0;    // 1 for high types, 0 for low types
  std::optional<TTest> test_intuitive;  // absent when sd = 0
  bool exact_match_intuitive = false;   // sd = 0 case: mean equals the prediction
  std::optional<double> prediction_cursed;  // present when chi was supplied
  std::optional<TTest> test_cursed;
  bool exact_match_cursed = false;
  double ci_lo = 0.0;  // 95% confidence interval, unclipped
  double ci_hi = 0.0;
};

std::vector<PredictionCell> prediction_report(const std::vector<BlockStats>& stats,
                                              std::optional<double> chi);

}  // namespace cursedsig
