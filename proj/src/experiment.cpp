#include "cursedsig/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cursedsig/game_io.hpp"

namespace cursedsig {

SignalingGame kmn_game() {
  SignalingGame g;
  g.types = {"H", "L"};
  g.prior.weights = Vector::Constant(2, 0.5);
  g.messages = {"0", "1"};
  g.mode = ReceiverMode::WageQuadratic;
  g.productivity = Vector(2);
  g.productivity << 50.0, 10.0;
  g.sender_cost = Matrix(2, 2);
  g.sender_cost << 0.0, 9.0,   // high type
                   0.0, 45.0;  // low type
  g.validate();
  return g;
}

SupportSpec kmn_hybrid_support(const SignalingGame& game) {
  SupportSpec spec;
  spec.name = "high-type-mixes";
  spec.sender = {{game.message_index("0"), game.message_index("1")},
                 {game.message_index("0")}};
  spec.receiver.assign(game.num_messages(), {});
  return spec;
}

RegimeVerdict regime(double chi) {
  require_chi(chi);
  RegimeVerdict v;
  v.chi = chi;
  v.separating_survives = chi <= 31.0 / 40.0 + 1e-12;
  v.pooling_survives = chi >= 11.0 / 20.0 - 1e-12;
  const double invest = (40.0 * chi - 22.0) / 9.0;
  if (invest >= 1e-9 && invest <= 1.0 - 1e-9) v.hybrid_invest_prob = invest;
  return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

[[noreturn]] void row_error(const std::string& origin, int line, const std::string& msg) {
  throw InputError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::vector<BlockStats> parse_block_stats(const std::string& text, const std::string& origin) {
  std::vector<BlockStats> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (!saw_header) {
      const std::vector<std::string> expected = {"treatment", "block", "worker_type",
                                                 "n", "mean", "sd"};
      if (fields != expected)
        row_error(origin, line_no, "expected header treatment,block,worker_type,n,mean,sd");
      saw_header = true;
      continue;
    }
    if (fields.size() != 6) row_error(origin, line_no, "expected 6 fields");
    BlockStats s;
    s.treatment = fields[0];
    if (s.treatment != "SIG2" && s.treatment != "SIG3")
      row_error(origin, line_no, "treatment must be SIG2 or SIG3");
    if (fields[1] == "all") {
      s.block = 0;
    } else {
      char* end = nullptr;
      s.block = static_cast<int>(std::strtol(fields[1].c_str(), &end, 10));
      if (end == fields[1].c_str() || *end != '\0' || s.block < 0)
        row_error(origin, line_no, "block must be a nonnegative integer or 'all'");
    }
    s.worker_type = fields[2];
    if (s.worker_type != "high" && s.worker_type != "low")
      row_error(origin, line_no, "worker_type must be high or low");
    char* end = nullptr;
    s.n = std::strtol(fields[3].c_str(), &end, 10);
    if (end == fields[3].c_str() || *end != '\0' || s.n < 1)
      row_error(origin, line_no, "n must be a positive integer");
    s.mean = std::strtod(fields[4].c_str(), &end);
    if (end == fields[4].c_str() || *end != '\0' || s.mean < 0.0 || s.mean > 1.0)
      row_error(origin, line_no, "mean must lie in [0, 1]");
    s.sd = std::strtod(fields[5].c_str(), &end);
    if (end == fields[5].c_str() || *end != '\0' || s.sd < 0.0)
      row_error(origin, line_no, "sd must be nonnegative");
    out.push_back(s);
  }
  return out;
}

std::vector<BlockStats> load_block_stats(const std::string& path) {
  return parse_block_stats(read_text_file(path), path);
}

std::vector<PredictionCell> prediction_report(const std::vector<BlockStats>& stats,
                                              std::optional<double> chi) {
  std::optional<RegimeVerdict> verdict;
  if (chi) verdict = regime(*chi);
  std::vector<PredictionCell> out;
  for (const auto& s : stats) {
    PredictionCell cell;
    cell.stats = s;
    cell.prediction_intuitive = s.worker_type == "high" ? 1.0 : 0.0;

    auto run_test = [&](double prediction, std::optional<TTest>& test, bool& exact) {
      if (s.sd == 0.0 || s.n < 2) {
        exact = std::abs(s.mean - prediction) <= 1e-12;
        return;
      }
      test = one_sample_t(s.mean, s.sd, s.n, prediction);
    };
    run_test(cell.prediction_intuitive, cell.test_intuitive, cell.exact_match_intuitive);

    if (verdict) {
      // The refined prediction for high types: invest in the separating
      // regime, mix in the hybrid regime, stay out in the pooling-only
      // regime. Low types never invest.
      double pred = 0.0;
      if (s.worker_type == "high") {
        if (verdict->hybrid_invest_prob)
          pred = *verdict->hybrid_invest_prob;
        else if (verdict->separating_survives)
          pred = 1.0;
        else
          pred = 0.0;
      }
      cell.prediction_cursed = pred;
      run_test(pred, cell.test_cursed, cell.exact_match_cursed);
    }

    if (s.sd == 0.0 || s.n < 2) {
      cell.ci_lo = cell.ci_hi = s.mean;
    } else {
      const double q = student_t_two_tailed_quantile(0.05, static_cast<double>(s.n - 1));
      const double half = q * s.sd / std::sqrt(static_cast<double>(s.n));
      cell.ci_lo = s.mean - half;
      cell.ci_hi = s.mean + half;
    }
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace cursedsig
