// cursedsig: solve, verify and refine cursed sequential equilibria of finite
// signaling games, sweep the closed-form job-market models, and re-run the
// experimental statistics harness.
#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "cursedsig/continuum.hpp"
#include "cursedsig/experiment.hpp"
#include "cursedsig/game_io.hpp"
#include "cursedsig/refine.hpp"
#include "cursedsig/solver.hpp"
#include "cursedsig/spence.hpp"

using namespace cursedsig;

namespace {

struct ChiGrid {
  double start = 0.0, stop = 1.0, step = 0.01;

  std::vector<double> points() const {
    if (step <= 0.0) throw InputError("chi grid step must be positive");
    if (stop < start) throw InputError("chi grid stop must not precede start");
    std::vector<double> out;
    const long long n = static_cast<long long>((stop - start) / step + 1e-9);
    for (long long k = 0; k <= n; ++k) out.push_back(start + k * step);
    for (double chi : out) require_chi(chi);
    return out;
  }
};

ChiGrid parse_grid(const std::string& text) {
  ChiGrid g;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw InputError("chi grid must look like start:stop:step");
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw InputError("chi grid must look like start:stop:step");
  g.start = std::stod(text.substr(0, c1));
  g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  g.step = std::stod(text.substr(c2 + 1));
  return g;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot write to " + out_path);
  f << content;
}

std::string csv_cell(double v) { return fmt12(v); }

// Runs fn over every grid index on `jobs` threads; results keep grid order
// no matter which worker finishes first.
template <typename Fn>
std::vector<std::string> parallel_rows(std::size_t count, int jobs, Fn&& fn) {
  std::vector<std::string> rows(count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) rows[i] = fn(i);
    return rows;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          rows[i] = fn(i);
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(w)] = e.what();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (!e.empty()) throw ResourceError("worker failed: " + e);
  return rows;
}

std::vector<EquilibriumRecord> solve_all(const GameFile& gf, double chi) {
  auto recs = enumerate_pure_cse(gf.game, chi);
  for (const auto& spec : gf.support_specs) {
    const auto extra = solve_support_cse(gf.game, chi, spec);
    recs.insert(recs.end(), extra.begin(), extra.end());
  }
  sort_records(recs);
  dedupe_records(recs);
  return recs;
}

int run(int argc, char** argv) {
  CLI::App app{"Cursed sequential equilibrium toolkit for finite signaling games"};
  app.require_subcommand(1);

  std::string game_path, assessment_path, out_path, cost_spec = "linear", what, data_sig2,
              data_sig3, format = "text", grid_text = "0:1:0.01";
  double chi = 0.0, theta_h = 2.0, theta_l = 1.0, p = 0.5, q = -1.0;
  double theta_min = 1.0, theta_max = 3.0, theta_query = -1.0;
  std::optional<double> mean_theta, chi_opt;
  int jobs = 1, grid_points = 0;
  bool use_kmn = false, use_spence = false, use_continuum = false, run_checks = false;

  auto* solve = app.add_subcommand("solve", "Enumerate equilibria of a game file at one chi");
  solve->add_option("--game", game_path, "game JSON file")->required();
  solve->add_option("--chi", chi, "cursedness in [0,1]")->required();
  solve->add_option("--out", out_path, "output path (default stdout)");
  solve->footer("Example: cursedsig solve --game data/kmn.json --chi 0.3");

  auto* verify = app.add_subcommand("verify", "Check an assessment against every "
                                              "equilibrium condition");
  verify->add_option("--game", game_path, "game JSON file")->required();
  verify->add_option("--assessment", assessment_path, "assessment JSON file")->required();
  verify->add_option("--out", out_path, "output path (default stdout)");
  verify->footer("Example: cursedsig verify --game data/kmn.json "
                 "--assessment data/kmn_separating_chi03.json");

  auto* refine = app.add_subcommand("refine", "Solve and run the belief-based refinement");
  refine->add_option("--game", game_path, "game JSON file")->required();
  refine->add_option("--chi", chi, "cursedness in [0,1]")->required();
  refine->add_option("--out", out_path, "output path (default stdout)");
  refine->footer("Example: cursedsig refine --game data/beerquiche.json --chi 0.6");

  auto* sweep = app.add_subcommand("sweep", "Tabulate models or games over a chi grid as CSV");
  sweep->add_option("--game", game_path, "game JSON file (with --what refine)");
  sweep->add_flag("--kmn", use_kmn, "sweep the bundled binary-education lab game");
  sweep->add_flag("--spence", use_spence, "sweep the two-type education model");
  sweep->add_flag("--continuum", use_continuum, "sweep the continuum-type model");
  sweep->add_option("--chi", grid_text, "grid start:stop:step")->required();
  sweep->add_option("--what", what, "regions | regimes | refine | schedule");
  sweep->add_option("--cost", cost_spec, "cost spec: linear, quadratic, power:k, expression");
  sweep->add_option("--theta-h", theta_h, "high productivity");
  sweep->add_option("--theta-l", theta_l, "low productivity");
  sweep->add_option("--p", p, "prior probability of the high type");
  sweep->add_option("--theta-min", theta_min, "lowest type (continuum)");
  sweep->add_option("--theta-max", theta_max, "highest type (continuum)");
  sweep->add_option(
      "--mean",
      [&mean_theta](const std::vector<std::string>& v) {
        mean_theta = std::stod(v.at(0));
        return true;
      },
      "mean type (continuum); defaults to the uniform-density mean");
  sweep->add_option("--points", grid_points, "types per chi in the schedule sweep (default 41)");
  sweep->add_option("--jobs", jobs, "worker threads over grid points")->check(CLI::Range(1, 256));
  sweep->add_option("--out", out_path, "output path (default stdout)");
  sweep->footer("Examples:\n"
                "  cursedsig sweep --spence --cost linear --theta-h 2 --theta-l 1 --p 0.5 "
                "--chi 0:1:0.01 --what regions\n"
                "  cursedsig sweep --kmn --chi 0:1:0.005 --what regimes\n"
                "  cursedsig sweep --continuum --theta-min 1 --theta-max 3 --mean 2 "
                "--chi 0:1:0.25");

  auto* spence = app.add_subcommand("spence", "Closed-form two-type model at one chi");
  spence->add_option("--chi", chi, "cursedness in [0,1]")->required();
  spence->add_option("--cost", cost_spec, "cost spec");
  spence->add_option("--theta-h", theta_h, "high productivity");
  spence->add_option("--theta-l", theta_l, "low productivity");
  spence->add_option("--p", p, "prior probability of the high type");
  spence->add_option("--q", q, "mixing probability for the hybrid locus");
  spence->add_option("--out", out_path, "output path (default stdout)");
  spence->footer("Example: cursedsig spence --chi 0.5 --cost linear --theta-h 2 --theta-l 1 "
                 "--p 0.5");

  auto* continuum = app.add_subcommand("continuum", "Continuum-type separating schedule");
  continuum->add_option("--chi", chi, "cursedness in [0,1]")->required();
  continuum->add_option("--theta-min", theta_min, "lowest type");
  continuum->add_option("--theta-max", theta_max, "highest type");
  continuum->add_option(
      "--mean",
      [&mean_theta](const std::vector<std::string>& v) {
        mean_theta = std::stod(v.at(0));
        return true;
      },
      "mean type; defaults to the uniform-density mean");
  continuum->add_option("--theta", theta_query, "evaluate the schedule at one type");
  continuum->add_flag("--check", run_checks, "run incentive and differential-equation checks");
  continuum->add_option("--out", out_path, "output path (default stdout)");
  continuum->footer("Example: cursedsig continuum --chi 0.5 --theta-min 1 --theta-max 3 "
                    "--mean 2 --theta 2 --check");

  auto* kmn_stats = app.add_subcommand("kmn-stats", "Experimental statistics harness");
  kmn_stats->add_option("--sig2", data_sig2, "CSV of SIG2 block statistics");
  kmn_stats->add_option("--sig3", data_sig3, "CSV of SIG3 block statistics");
  kmn_stats->add_option(
      "--chi",
      [&chi_opt](const std::vector<std::string>& v) {
        chi_opt = std::stod(v.at(0));
        return true;
      },
      "add the refined cursed prediction at this chi");
  kmn_stats->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
  kmn_stats->add_option("--out", out_path, "output path (default stdout)");
  kmn_stats->footer("Example: cursedsig kmn-stats --chi 0.7 --format csv");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    require_chi(chi);
    const auto gf = load_game_file(game_path);
    const auto recs = solve_all(gf, chi);
    write_output(out_path, records_to_json(gf.game, chi, recs).dump(2) + "\n");
  }

  if (verify->parsed()) {
    const auto gf = load_game_file(game_path);
    const auto a = load_assessment(assessment_path, gf.game);
    const auto verdict = verify_cse(gf.game, a);
    nlohmann::ordered_json j;
    j["pass"] = verdict.pass;
    if (!verdict.pass) {
      j["first_violation"] = verdict.first_violation;
      j["magnitude"] = round12(verdict.magnitude);
    }
    write_output(out_path, j.dump(2) + "\n");
  }

  if (refine->parsed()) {
    require_chi(chi);
    const auto gf = load_game_file(game_path);
    auto recs = refine_equilibrium_set(gf.game, chi, solve_all(gf, chi));
    nlohmann::ordered_json j;
    j["chi"] = round12(chi);
    j["equilibria"] = nlohmann::ordered_json::array();
    for (const auto& r : recs) {
      auto jr = record_to_json(gf.game, r);
      jr["criterion_detail"] = nlohmann::ordered_json::object();
      jr["criterion_detail"]["standard_intuitive"] =
          criterion_report_to_json(gf.game, survives_cursed_intuitive(gf.game, r, 0.0));
      jr["criterion_detail"]["cursed_intuitive"] =
          criterion_report_to_json(gf.game, survives_cursed_intuitive(gf.game, r, chi));
      j["equilibria"].push_back(jr);
    }
    write_output(out_path, j.dump(2) + "\n");
  }

  if (sweep->parsed()) {
    const int selected = (use_spence ? 1 : 0) + (use_kmn ? 1 : 0) + (use_continuum ? 1 : 0) +
                         (game_path.empty() ? 0 : 1);
    if (selected != 1)
      throw InputError("sweep needs exactly one of --spence, --kmn, --continuum, --game");
    const auto grid = parse_grid(grid_text).points();
    std::ostringstream csv;
    if (use_spence) {
      if (what.empty()) what = "regions";
      if (what != "regions") throw InputError("--spence sweeps support --what regions");
      auto model = SpenceModel::create(theta_l, theta_h, p, make_cost(cost_spec));
      if (!model.warning.empty()) std::cerr << "warning: " << model.warning << "\n";
      csv << "# separating and pooling education regions, refinement selection and wages by "
             "cursedness\n";
      csv << "# empty region fields mean no separating equilibrium exists\n";
      csv << "chi,sep_lo,sep_hi,pool_lo,pool_hi,riley_e,w_L,w_H\n";
      const auto rows = parallel_rows(grid.size(), jobs, [&](std::size_t i) {
        const double x = grid[i];
        const auto s = separating_region(model, x);
        const auto pl = pooling_region(model, x);
        const auto riley = riley_outcome(model, x);
        const auto w = equilibrium_wages(model, x);
        std::string row = csv_cell(x) + ",";
        row += s.empty ? "," : csv_cell(s.lo) + "," + csv_cell(s.hi);
        row += "," + csv_cell(pl.lo) + "," + csv_cell(pl.hi);
        row += "," + csv_cell(riley.first) + "," + csv_cell(w.w_l) + "," + csv_cell(w.w_h);
        return row + "\n";
      });
      for (const auto& r : rows) csv << r;
    } else if (use_kmn) {
      if (what.empty()) what = "regimes";
      if (what != "regimes") throw InputError("--kmn sweeps support --what regimes");
      csv << "# refined equilibrium survival regimes of the binary-education lab game\n";
      csv << "chi,separating_survives,pooling_survives,hybrid_invest_prob\n";
      const auto rows = parallel_rows(grid.size(), jobs, [&](std::size_t i) {
        const auto v = regime(grid[i]);
        std::string row = csv_cell(v.chi) + "," + (v.separating_survives ? "1" : "0") + "," +
                          (v.pooling_survives ? "1" : "0") + ",";
        if (v.hybrid_invest_prob) row += csv_cell(*v.hybrid_invest_prob);
        return row + "\n";
      });
      for (const auto& r : rows) csv << r;
    } else if (use_continuum) {
      if (what.empty()) what = "schedule";
      if (what != "schedule") throw InputError("--continuum sweeps support --what schedule");
      auto model = ContinuumModel::create(theta_min, theta_max, mean_theta);
      if (!model.warning.empty()) std::cerr << "warning: " << model.warning << "\n";
      const int points = grid_points > 0 ? grid_points : 41;
      csv << "# separating education and wage schedules over the type support, by cursedness\n";
      csv << "theta,chi,education,wage\n";
      const auto rows = parallel_rows(grid.size(), jobs, [&](std::size_t i) {
        const double x = grid[i];
        std::string block;
        for (int k = 0; k < points; ++k) {
          const double th =
              model.theta_min + (model.theta_max - model.theta_min) * k / (points - 1.0);
          block += csv_cell(th) + "," + csv_cell(x) + "," +
                   csv_cell(separating_education(model, x, th)) + "," +
                   csv_cell(separating_wage(model, x, th)) + "\n";
        }
        return block;
      });
      for (const auto& r : rows) csv << r;
    } else {
      if (what.empty()) what = "refine";
      if (what != "refine") throw InputError("--game sweeps support --what refine");
      const auto gf = load_game_file(game_path);
      csv << "# equilibrium kinds and refinement verdicts by cursedness\n";
      csv << "chi,kind,survives_standard,survives_cursed\n";
      const auto rows = parallel_rows(grid.size(), jobs, [&](std::size_t i) {
        const double x = grid[i];
        const auto recs = refine_equilibrium_set(gf.game, x, solve_all(gf, x));
        std::string block;
        for (const auto& r : recs) {
          block += csv_cell(x) + "," + to_string(r.kind) + "," +
                   (r.refinement_verdicts.at("standard_intuitive") ? "1" : "0") + "," +
                   (r.refinement_verdicts.at("cursed_intuitive") ? "1" : "0") + "\n";
        }
        return block;
      });
      for (const auto& r : rows) csv << r;
    }
    write_output(out_path, csv.str());
  }

  if (spence->parsed()) {
    require_chi(chi);
    auto model = SpenceModel::create(theta_l, theta_h, p, make_cost(cost_spec));
    if (!model.warning.empty()) std::cerr << "warning: " << model.warning << "\n";
    const auto s = separating_region(model, chi);
    const auto pl = pooling_region(model, chi);
    const auto riley = riley_outcome(model, chi);
    const auto w = equilibrium_wages(model, chi);
    nlohmann::ordered_json j;
    j["chi"] = round12(chi);
    if (s.empty) {
      j["separating_region"] = nullptr;
    } else {
      j["separating_region"] = {round12(s.lo), round12(s.hi)};
    }
    j["pooling_region"] = {round12(pl.lo), round12(pl.hi)};
    j["selected_education"] = {round12(riley.first), round12(riley.second)};
    j["wages"] = {{"low", round12(w.w_l)}, {"high", round12(w.w_h)}};
    if (q > 0.0 && q < 1.0) j["hybrid_education"] = round12(hybrid_locus(model, chi, q));
    write_output(out_path, j.dump(2) + "\n");
  }

  if (continuum->parsed()) {
    require_chi(chi);
    auto model = ContinuumModel::create(theta_min, theta_max, mean_theta);
    if (!model.warning.empty()) std::cerr << "warning: " << model.warning << "\n";
    nlohmann::ordered_json j;
    j["chi"] = round12(chi);
    j["pooling_education_bound"] = round12(pooling_education_bound(model, chi));
    if (theta_query > 0.0) {
      j["theta"] = round12(theta_query);
      j["education"] = round12(separating_education(model, chi, theta_query));
      j["wage"] = round12(separating_wage(model, chi, theta_query));
    }
    if (run_checks && chi < 1.0) {
      const auto grid = interior_grid(model, 1000);
      j["ode_residual"] = ode_residual(model, chi, grid);
      const double probe =
          theta_query > 0.0 ? theta_query : 0.5 * (model.theta_min + model.theta_max);
      const auto ic = incentive_check(model, chi, probe, 10000);
      j["incentive_check"] = {{"theta", round12(probe)},
                              {"best_mimic", round12(ic.best_mimic)},
                              {"advantage", ic.advantage}};
    }
    write_output(out_path, j.dump(2) + "\n");
  }

  if (kmn_stats->parsed()) {
    if (chi_opt) require_chi(*chi_opt);
    std::vector<BlockStats> rows;
    const std::string sig2 =
        data_sig2.empty() ? std::string(CURSEDSIG_DATA_DIR "/tables_sig2.csv") : data_sig2;
    const std::string sig3 =
        data_sig3.empty() ? std::string(CURSEDSIG_DATA_DIR "/tables_sig3.csv") : data_sig3;
    for (const auto& path : {sig2, sig3}) {
      const auto part = load_block_stats(path);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto report = prediction_report(rows, chi_opt);
    std::ostringstream out;
    if (format == "csv") {
      out << "# observed investment rates versus refinement predictions, two-tailed t-tests\n";
      out << "treatment,block,worker_type,n,mean,sd,ci_lo,ci_hi,pred_intuitive,p_intuitive";
      if (chi_opt) out << ",pred_cursed,p_cursed";
      out << "\n";
      for (const auto& c : report) {
        out << c.stats.treatment << ","
            << (c.stats.block == 0 ? "all" : std::to_string(c.stats.block)) << ","
            << c.stats.worker_type << "," << c.stats.n << "," << csv_cell(c.stats.mean) << ","
            << csv_cell(c.stats.sd) << "," << csv_cell(c.ci_lo) << "," << csv_cell(c.ci_hi)
            << "," << csv_cell(c.prediction_intuitive) << ",";
        out << (c.test_intuitive ? csv_cell(c.test_intuitive->p)
                                 : (c.exact_match_intuitive ? "exact" : "mismatch"));
        if (chi_opt) {
          out << "," << csv_cell(*c.prediction_cursed) << ",";
          out << (c.test_cursed ? csv_cell(c.test_cursed->p)
                                : (c.exact_match_cursed ? "exact" : "mismatch"));
        }
        out << "\n";
      }
    } else {
      out << "Investment rates vs. theoretical predictions (two-tailed t-tests)\n";
      if (chi_opt) out << "Cursed prediction at chi = " << fmt12(*chi_opt) << "\n";
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%-6s %-5s %-5s %5s %7s %7s %16s %9s %9s\n", "treat",
                    "block", "type", "n", "mean", "sd", "95% CI", "p(intui)",
                    chi_opt ? "p(cursed)" : "");
      out << buf;
      auto p_text = [](const std::optional<TTest>& test, bool exact) {
        if (test) {
          if (test->p < 0.001) return std::string("<0.001");
          char b[32];
          std::snprintf(b, sizeof(b), "%.3f", test->p);
          return std::string(b);
        }
        return std::string(exact ? "exact" : "off");
      };
      for (const auto& c : report) {
        // display interval clipped to the unit range; CSV keeps raw values
        const double lo = std::max(0.0, c.ci_lo), hi = std::min(1.0, c.ci_hi);
        const std::string block = c.stats.block == 0 ? "all" : std::to_string(c.stats.block);
        std::snprintf(buf, sizeof(buf), "%-6s %-5s %-5s %5ld %7.3f %7.3f [%5.3f, %5.3f] %9s %9s\n",
                      c.stats.treatment.c_str(), block.c_str(), c.stats.worker_type.c_str(),
                      c.stats.n, c.stats.mean, c.stats.sd, lo, hi,
                      p_text(c.test_intuitive, c.exact_match_intuitive).c_str(),
                      chi_opt ? p_text(c.test_cursed, c.exact_match_cursed).c_str() : "");
        out << buf;
      }
    }
    write_output(out_path, out.str());
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
