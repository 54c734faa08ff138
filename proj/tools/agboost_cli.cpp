// agboost: run boosting experiments, the game solver and the invariant suite.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "agboost/agboost.hpp"

namespace {

using namespace agboost;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct OnlineFlags {
  std::size_t t = 1000;
  std::size_t n_weak = 100;
  double gamma = 1.0;
  std::string adversary = "noisy-threshold:0.2";
  std::string learner;
  std::size_t grid = 32;
  std::optional<double> epsilon;
};

struct StatFlags {
  std::size_t t = 100;
  std::size_t m = 200;
  std::size_t m0 = 30;
  double gamma = 1.0;
  std::string data;
  std::size_t grid = 32;
};

struct GameFlags {
  std::string matrix;
  std::size_t t = 10000;
  double eps0 = 0.0;
  double scale = 1.0;
  std::size_t resolution = 201;
  double box_lo = -1.0;
  double box_hi = 1.0;
};

struct CommonFlags {
  std::size_t seeds = 20;
  std::uint64_t seed = 1;
  std::string out;
};

int emit(const ExperimentReport& report, const CommonFlags& common) {
  if (!common.out.empty()) write_trace(report, common.out);
  print_report(std::cout, report);
  return report.pass ? kExitPass : kExitFail;
}

int run_online_command(BoostMode mode, const OnlineFlags& f, const CommonFlags& c) {
  OnlineExperiment ex;
  ex.mode = mode;
  ex.horizon = f.t;
  ex.n_weak = f.n_weak;
  ex.gamma = f.gamma;
  ex.adversary = f.adversary;
  const std::string learner = f.learner.empty() ? "hedge" : f.learner;
  ex.learner = learner == "prescient" ? OnlineLearnerKind::prescient : OnlineLearnerKind::hedge;
  ex.grid_size = f.grid;
  ex.epsilon = f.epsilon;
  ex.data_seed = c.seed;
  ex.seeds = seed_range(c.seed, c.seeds);
  parse_adversary(ex.adversary, ex.horizon, ex.data_seed);
  return emit(run_experiment(ex), c);
}

int run_stat_command(BoostMode mode, const StatFlags& f, const CommonFlags& c) {
  StatExperiment ex;
  ex.mode = mode;
  ex.rounds = f.t;
  ex.sample_size = f.m;
  ex.weak_sample = f.m0;
  ex.gamma = f.gamma;
  ex.data = f.data.empty() ? (mode == BoostMode::realizable ? "threshold-realizable" : "noisy-threshold:0.15") : f.data;
  ex.grid_size = f.grid;
  ex.data_seed = c.seed;
  ex.seeds = seed_range(c.seed, c.seeds);
  parse_adversary(ex.data, ex.sample_size, ex.data_seed);
  return emit(run_experiment(ex), c);
}

int run_game_command(const GameFlags& f, std::uint64_t seed) {
  std::ifstream in(f.matrix);
  if (!in) throw io_error("cannot read matrix file '" + f.matrix + "'");
  Matrix a = parse_matrix(in);
  const std::size_t m = a.rows();
  MatrixGame game(std::move(a), BoxDomain::cube(m, f.box_lo, f.box_hi), f.scale);
  const OracleSpec oracle{f.eps0 > 0.0 ? OracleKind::noisy : OracleKind::exact, f.eps0, f.scale};
  const auto sol = solve_improper_game(game, oracle, f.t, seed);
  const auto cert = certify_solution(game, sol.average_q, f.t, f.eps0, f.resolution);

  std::cout << "game:           " << game.payoff.rows() << "x" << game.payoff.cols() << " rounds " << f.t
            << " seed " << seed << '\n'
            << "average_q:     ";
  for (double v : sol.average_q) std::cout << ' ' << format_number(v);
  std::cout << '\n'
            << "min_payoff:     " << format_number(cert.min_payoff) << '\n'
            << "value_estimate: " << format_number(cert.value_estimate) << '\n'
            << "grid_error:     " << format_number(cert.grid_error) << '\n'
            << "oco_term:       " << format_number(cert.oco_term) << '\n'
            << "eps0:           " << format_number(cert.eps0) << '\n'
            << "threshold:      " << format_number(cert.threshold) << '\n'
            << "margin:         " << format_number(cert.margin) << '\n'
            << "clips:          " << sol.clip_events << '\n'
            << "result:         " << (cert.pass ? "PASS" : "FAIL") << '\n';
  return cert.pass ? kExitPass : kExitFail;
}

int run_verify_command(bool skip_slow) {
  const auto results = run_verification(skip_slow, &std::cout);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitPass : kExitFail;
}

void add_common(CLI::App* cmd, CommonFlags& c) {
  cmd->add_option("--seeds", c.seeds, "number of seeds, at least 10")->capture_default_str();
  cmd->add_option("--seed", c.seed, "master seed; runs use seed .. seed + seeds - 1, data uses seed")
      ->capture_default_str();
  cmd->add_option("--out", c.out, "CSV trace path");
}

void add_online(CLI::App* cmd, OnlineFlags& f, CommonFlags& c) {
  cmd->add_option("--t", f.t, "horizon T")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--n-weak", f.n_weak, "number of weak learners N")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "weak-learner advantage in (0, 1]")->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  cmd->add_option("--adversary", f.adversary, std::string("label sequence: ") + kAdversaryHelp)->capture_default_str();
  cmd->add_option("--learner", f.learner, "weak learner: hedge or prescient (realizable only)")
      ->check(CLI::IsMember({"hedge", "prescient"}));
  cmd->add_option("--grid", f.grid, "threshold grid size; the pool has 2 * grid stumps")->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(cmd, c);
}

void add_stat(CLI::App* cmd, StatFlags& f, CommonFlags& c) {
  cmd->add_option("--t", f.t, "boosting rounds T")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--m", f.m, "sample size |S|")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--m0", f.m0, "weak-learner sample size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "weak-learner advantage in (0, 1]")->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  cmd->add_option("--data", f.data, std::string("sample labels, same syntax as --adversary: ") + kAdversaryHelp);
  cmd->add_option("--grid", f.grid, "threshold grid size")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(cmd, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online and statistical agnostic boosting experiments"};
  app.require_subcommand(1);

  OnlineFlags online;
  StatFlags stat;
  GameFlags game;
  CommonFlags common;
  std::uint64_t game_seed = 1;
  bool skip_slow = false;

  auto* oa = app.add_subcommand("online-agnostic", "online agnostic booster vs the threshold pool");
  auto* orl = app.add_subcommand("online-realizable", "online realizable booster; reports the mistake rate");
  add_online(oa, online, common);
  add_online(orl, online, common);
  orl->add_option("--epsilon", online.epsilon, "mistake-rate target (default 1 / (gamma sqrt(min(N, T))))");

  auto* sa = app.add_subcommand("stat-agnostic", "statistical agnostic booster with diluted stump ERM");
  auto* sr = app.add_subcommand("stat-realizable", "statistical realizable booster with stump ERM");
  add_stat(sa, stat, common);
  add_stat(sr, stat, common);

  auto* gm = app.add_subcommand("game", "solve a matrix game with a best-response oracle and certify it");
  gm->add_option("--matrix", game.matrix, "whitespace-separated matrix, one row per line")->required();
  gm->add_option("--t", game.t, "rounds")->check(CLI::PositiveNumber)->capture_default_str();
  gm->add_option("--seed", game_seed, "oracle noise seed")->capture_default_str();
  gm->add_option("--eps0", game.eps0, "oracle noise level; 0 means exact")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gm->add_option("--scale", game.scale, "improper scale of the response set, >= 1")->check(CLI::Range(1.0, 1e9))
      ->capture_default_str();
  gm->add_option("--resolution", game.resolution, "value grid points per simplex edge, >= 11")
      ->check(CLI::Range(11, 100000))
      ->capture_default_str();
  gm->add_option("--box-lo", game.box_lo, "lower corner of the row player's box")->capture_default_str();
  gm->add_option("--box-hi", game.box_hi, "upper corner of the row player's box")->capture_default_str();

  auto* vf = app.add_subcommand("verify", "run every invariant check");
  vf->add_flag("--skip-slow", skip_slow, "skip the full-size regret run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return kExitUsage;
  }

  try {
    if (*oa) return run_online_command(BoostMode::agnostic, online, common);
    if (*orl) {
      if (online.learner.empty()) online.learner = "prescient";
      return run_online_command(BoostMode::realizable, online, common);
    }
    if (*sa) return run_stat_command(BoostMode::agnostic, stat, common);
    if (*sr) return run_stat_command(BoostMode::realizable, stat, common);
    if (*gm) return run_game_command(game, game_seed);
    if (*vf) return run_verify_command(skip_slow);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const unsupported_size& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
