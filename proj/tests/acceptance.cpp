// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "agboost/agboost.hpp"

using namespace agboost;

namespace {

struct Line {
  std::string id;
  bool pass;
  std::string detail;
};

std::string f(double v) { return format_number(v); }

OnlineExperiment a1_config(double gamma, std::size_t horizon, std::size_t n_weak) {
  OnlineExperiment ex;
  ex.mode = BoostMode::agnostic;
  ex.horizon = horizon;
  ex.n_weak = n_weak;
  ex.gamma = gamma;
  ex.adversary = "noisy-threshold:0.2";
  ex.learner = OnlineLearnerKind::hedge;
  ex.grid_size = 32;
  ex.data_seed = 1;
  ex.seeds = seed_range(1, 20);
  return ex;
}

StatExperiment a4_config() {
  StatExperiment ex;
  ex.mode = BoostMode::realizable;
  ex.rounds = 400;
  ex.sample_size = 200;
  ex.weak_sample = 30;
  ex.gamma = 1.0;
  ex.data = "threshold-realizable";
  ex.grid_size = 32;
  ex.data_seed = 1;
  ex.seeds = seed_range(1, 10);
  return ex;
}

StatExperiment a5_config() {
  StatExperiment ex;
  ex.mode = BoostMode::agnostic;
  ex.rounds = 400;
  ex.sample_size = 400;
  ex.weak_sample = 50;
  ex.gamma = 0.4;
  ex.data = "noisy-threshold:0.15";
  ex.grid_size = 32;
  ex.data_seed = 1;
  ex.seeds = seed_range(1, 10);
  return ex;
}

OnlineExperiment a6_config() {
  const double gamma = 0.3, eps = 0.5;
  const auto n = static_cast<std::size_t>(std::ceil(1.0 / (gamma * gamma * eps * eps)));
  OnlineExperiment ex;
  ex.mode = BoostMode::realizable;
  ex.horizon = n;
  ex.n_weak = n;
  ex.gamma = gamma;
  ex.adversary = "threshold-realizable";
  ex.learner = OnlineLearnerKind::prescient;
  ex.data_seed = 1;
  ex.seeds = seed_range(1, 10);
  ex.epsilon = eps;
  return ex;
}

std::string csv(const ExperimentReport& r) {
  std::ostringstream os;
  write_trace(os, r);
  return os.str();
}

std::string stats_line(const ExperimentReport& r) {
  return "mean " + f(r.stats.mean) + " bound " + f(r.bound) + " ci " + f(r.stats.ci) + " (" +
         std::to_string(r.stats.n) + " seeds, " + f(r.wall_seconds) + " s)";
}

}  // namespace

int main() {
  std::vector<Line> lines;
  std::vector<std::function<std::string()>> reruns;
  std::vector<std::string> first_bytes;
  std::size_t booster_clips = 0;
  auto record = [&](const ExperimentReport& r, std::function<std::string()> again) {
    booster_clips += r.clip_events;
    first_bytes.push_back(csv(r));
    reruns.push_back(std::move(again));
  };
  auto emit = [&](Line l) {
    std::printf("%s %s: %s\n", l.pass ? "PASS" : "FAIL", l.id.c_str(), l.detail.c_str());
    std::fflush(stdout);
    lines.push_back(std::move(l));
  };
  auto guarded = [&](const std::string& id, const std::function<Line()>& body) {
    try {
      emit(body());
    } catch (const std::exception& e) {
      emit({id, false, std::string("exception: ") + e.what()});
    }
  };

  guarded("A1", [&] {
    bool pass = true;
    std::string detail;
    // gamma 1, T 4000, N 3600 then gamma 0.5, T 2000, N 2500
    for (const auto& ex : {a1_config(1.0, 4000, 3600), a1_config(0.5, 2000, 2500)}) {
      const auto r = run_experiment(ex);
      record(r, [ex] { return csv(run_experiment(ex)); });
      pass = pass && r.stats.mean <= r.bound + r.stats.ci;
      detail += "[gamma " + f(ex.gamma) + " T " + std::to_string(ex.horizon) + " N " + std::to_string(ex.n_weak) +
                ": " + stats_line(r) + "] ";
    }
    return Line{"A1", pass, detail};
  });

  guarded("A2", [&] {
    const std::vector<CheckResult> suite = {checks::relabel_loss_bound(), checks::projection_bound(),
                                            checks::relabel_expectation(100000), checks::vote_unbiased(100000),
                                            checks::vote_range()};
    bool pass = true;
    std::string detail;
    for (const auto& c : suite) {
      pass = pass && c.pass;
      detail += (c.pass ? "ok " : "FAILED ") + c.name + "; ";
    }
    return Line{"A2", pass, detail};
  });

  guarded("A3", [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto c = checks::game_certificates(50, 10000, 0.05);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return Line{"A3", c.pass, c.detail + " (" + f(secs) + " s)"};
  });

  guarded("A4", [&] {
    const auto ex = a4_config();
    const auto r = run_experiment(ex);
    record(r, [ex] { return csv(run_experiment(ex)); });
    const double floor = 1.0 - 3.0 / std::sqrt(400.0);
    const bool pass = std::abs(r.bound - floor) < 1e-12 && r.stats.mean >= floor - r.stats.ci;
    return Line{"A4", pass, stats_line(r)};
  });

  guarded("A5", [&] {
    const auto ex = a5_config();
    const auto r = run_experiment(ex);
    record(r, [ex] { return csv(run_experiment(ex)); });
    return Line{"A5", r.stats.mean >= r.bound - r.stats.ci, stats_line(r)};
  });

  guarded("A6", [&] {
    const auto ex = a6_config();
    const auto r = run_experiment(ex);
    record(r, [ex] { return csv(run_experiment(ex)); });
    return Line{"A6", r.stats.mean <= *ex.epsilon + r.stats.ci,
                "N = T = " + std::to_string(ex.horizon) + ", " + stats_line(r)};
  });

  guarded("A7", [&] {
    const auto c = checks::ogd_regret(100);
    return Line{"A7", c.pass && booster_clips == 0,
                c.detail + ", booster clip events " + std::to_string(booster_clips)};
  });

  guarded("A8", [&] {
    bool pass = !reruns.empty();
    for (std::size_t k = 0; k < reruns.size(); ++k) pass = pass && reruns[k]() == first_bytes[k];
    std::ostringstream g1, g2;
    for (int rep = 0; rep < 2; ++rep) {
      const auto game = checks::random_game(5000);
      const auto sol = solve_improper_game(game, OracleSpec{OracleKind::noisy, 0.05, 1.0}, 10000, 3);
      auto& os = rep == 0 ? g1 : g2;
      for (double v : sol.average_q) os << format_number(v) << '\n';
    }
    pass = pass && g1.str() == g2.str();
    return Line{"A8", pass, std::to_string(reruns.size()) + " experiment traces re-run and compared byte for byte"};
  });

  std::size_t failed = 0;
  for (const auto& l : lines) failed += !l.pass;
  std::printf("%zu/%zu criteria passed\n", lines.size() - failed, lines.size());
  return failed == 0 ? 0 : 1;
}
