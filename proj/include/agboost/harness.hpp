#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agboost/boost_online.hpp"
#include "agboost/boost_stat.hpp"
#include "agboost/core.hpp"
#include "agboost/errors.hpp"
#include "agboost/rng.hpp"
#include "agboost/weaklearn.hpp"

namespace agboost {

enum class AdversaryKind {
  constant,
  alternating,
  threshold_realizable,
  noisy_threshold,
  drifting_threshold,
  uniform_random,
};

/// Oblivious label source. Instances are uniform on [0, 1) in every kind.
///
/// param: constant -> label sign (default +1); noisy-threshold -> flip rate
/// in [0, 1/2]; drifting-threshold -> rounds between switches of the
/// threshold 0.25 <-> 0.75. Unused otherwise.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::threshold_realizable;
  double param = 0.0;
  std::size_t horizon = 1;
  std::uint64_t seed = 0;
};

inline constexpr const char* kAdversaryHelp =
    "name[:param], one of: constant[:+1|-1], alternating, threshold-realizable, "
    "noisy-threshold:RATE (0 <= RATE <= 0.5), drifting-threshold:PERIOD, uniform-random";

/// Parses the `name[:param]` micro-syntax, e.g. "noisy-threshold:0.2".
inline AdversarySpec parse_adversary(const std::string& text, std::size_t horizon, std::uint64_t seed) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::optional<double> param;
  if (colon != std::string::npos) {
    const std::string raw = text.substr(colon + 1);
    std::size_t used = 0;
    try {
      param = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (raw.empty() || used != raw.size() || !std::isfinite(*param))
      throw invalid_input("adversary '" + text + "': bad parameter");
  }
  AdversarySpec spec;
  spec.horizon = horizon;
  spec.seed = seed;
  auto no_param = [&] {
    if (param) throw invalid_input("adversary '" + name + "' takes no parameter");
  };
  if (name == "constant") {
    spec.kind = AdversaryKind::constant;
    spec.param = param.value_or(1.0);
    if (spec.param != 1.0 && spec.param != -1.0) throw invalid_input("constant adversary: sign must be +1 or -1");
  } else if (name == "alternating") {
    no_param();
    spec.kind = AdversaryKind::alternating;
  } else if (name == "threshold-realizable") {
    no_param();
    spec.kind = AdversaryKind::threshold_realizable;
  } else if (name == "noisy-threshold") {
    spec.kind = AdversaryKind::noisy_threshold;
    if (!param) throw invalid_input("noisy-threshold needs a rate, e.g. noisy-threshold:0.2");
    spec.param = *param;
    if (!(spec.param >= 0.0 && spec.param <= 0.5)) throw invalid_input("noisy-threshold: rate must lie in [0, 0.5]");
  } else if (name == "drifting-threshold") {
    spec.kind = AdversaryKind::drifting_threshold;
    if (!param) throw invalid_input("drifting-threshold needs a period, e.g. drifting-threshold:500");
    spec.param = *param;
    if (!(spec.param >= 1.0) || spec.param != std::floor(spec.param))
      throw invalid_input("drifting-threshold: period must be a positive integer");
  } else if (name == "uniform-random") {
    no_param();
    spec.kind = AdversaryKind::uniform_random;
  } else {
    throw invalid_input("unknown adversary '" + name + "'; expected " + kAdversaryHelp);
  }
  return spec;
}

/// Threshold used by the threshold-based kinds.
inline constexpr double kBaseThreshold = 0.5;

/// Fully materialized sequence, deterministic in (spec, seed). Draw order per
/// round: instance, then the label draw if the kind has one.
inline LabeledSequence generate_sequence(const AdversarySpec& spec) {
  if (spec.horizon < 1) throw invalid_input("generate_sequence: horizon must be at least 1");
  RngStream rng(spec.seed, StreamIds::data());
  LabeledSequence seq;
  seq.reserve(spec.horizon);
  const auto threshold_label = [](double x, double theta) { return x >= theta ? Label::plus() : Label::minus(); };
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    const double x = rng.uniform();
    Label y = Label::plus();
    switch (spec.kind) {
      case AdversaryKind::constant:
        y = spec.param < 0 ? Label::minus() : Label::plus();
        break;
      case AdversaryKind::alternating:
        y = t % 2 == 0 ? Label::plus() : Label::minus();
        break;
      case AdversaryKind::threshold_realizable:
        y = threshold_label(x, kBaseThreshold);
        break;
      case AdversaryKind::noisy_threshold:
        y = threshold_label(x, kBaseThreshold);
        if (rng.uniform() < spec.param) y = -y;
        break;
      case AdversaryKind::drifting_threshold: {
        const auto phase = (t / static_cast<std::size_t>(spec.param)) % 2;
        y = threshold_label(x, phase == 0 ? 0.25 : 0.75);
        break;
      }
      case AdversaryKind::uniform_random:
        y = random_sign(rng);
        break;
    }
    seq.push_back({x, y});
  }
  return seq;
}

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double ci = 0.0;   // 3 std / sqrt(n)
};

inline SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.ci = 3.0 * s.std / std::sqrt(static_cast<double>(s.n));
  return s;
}

inline constexpr std::size_t kMinSeeds = 10;

enum class BoundDirection { upper, lower };

struct OnlineTraceRow {
  std::uint64_t seed;
  std::size_t t;
  double cum_gain;
  double best_hindsight_gain;
  double cum_regret;
  double theory_bound;
};

struct StatTraceRow {
  std::uint64_t seed;
  std::size_t t;
  double cor;
};

/// Per-seed metric values, their summary and the comparison with the bound.
/// pass <=> mean <= bound + ci (upper) or mean >= bound - ci (lower).
struct ExperimentReport {
  std::string name;
  std::string metric;
  BoundDirection direction = BoundDirection::upper;
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;
  SummaryStats stats;
  double bound = 0.0;
  bool pass = false;
  double wall_seconds = 0.0;
  std::size_t clip_events = 0;
  std::vector<OnlineTraceRow> online_rows;
  std::vector<StatTraceRow> stat_rows;

  double margin() const {
    return direction == BoundDirection::upper ? bound + stats.ci - stats.mean : stats.mean - (bound - stats.ci);
  }
};

inline void finalize_report(ExperimentReport& r) {
  r.stats = summarize(r.values);
  r.pass = r.direction == BoundDirection::upper ? r.stats.mean <= r.bound + r.stats.ci
                                                : r.stats.mean >= r.bound - r.stats.ci;
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), first);
  return s;
}

enum class OnlineLearnerKind { hedge, prescient };

struct OnlineExperiment {
  BoostMode mode = BoostMode::agnostic;
  std::size_t horizon = 1;
  std::size_t n_weak = 1;
  double gamma = 1.0;
  std::string adversary = "noisy-threshold:0.2";
  OnlineLearnerKind learner = OnlineLearnerKind::hedge;
  std::size_t grid_size = 32;
  std::uint64_t data_seed = 0;  // the sequence is shared by all seeds
  std::vector<std::uint64_t> seeds;
  std::optional<double> epsilon;  // realizable: mistake-rate target
};

/// Mistake-rate target 1 / (gamma sqrt(min(N, T))), i.e. the epsilon for
/// which N = T = 1 / (gamma^2 epsilon^2).
inline double realizable_epsilon(double gamma, std::size_t n_weak, std::size_t horizon) {
  return 1.0 / (gamma * std::sqrt(static_cast<double>(std::min(n_weak, horizon))));
}

inline std::size_t count_mistakes(const RegretTrace& trace, std::span<const LabeledExample> seq) {
  // cum_gain increments by +1 on a hit and -1 on a mistake
  return static_cast<std::size_t>(std::lround((static_cast<double>(seq.size()) - trace.final_gain()) / 2.0));
}

/// One booster run per seed on a shared oblivious sequence.
///
/// Agnostic mode reports the final regret against the threshold pool and
/// checks it against the trace's theoretical bound. Realizable mode reports
/// the per-round mistake rate against epsilon.
inline ExperimentReport run_seeds(const OnlineExperiment& ex) {
  if (ex.seeds.empty()) throw invalid_input("run_seeds: no seeds");
  if (ex.learner == OnlineLearnerKind::prescient && ex.mode == BoostMode::agnostic)
    throw config_error("the prescient oracle is only valid in the realizable booster");
  const auto start = std::chrono::steady_clock::now();

  const auto seq = std::make_shared<const LabeledSequence>(
      generate_sequence(parse_adversary(ex.adversary, ex.horizon, ex.data_seed)));
  const auto grid = threshold_grid(ex.grid_size);
  const auto pool = std::make_shared<const ExpertPool<Stump>>(make_threshold_pool(grid));

  ExperimentReport report;
  report.name = std::string("online-") + to_string(ex.mode);
  report.direction = BoundDirection::upper;
  report.metric = ex.mode == BoostMode::agnostic ? "regret" : "mistake_rate";
  report.seeds = ex.seeds;

  for (const std::uint64_t seed : ex.seeds) {
    OnlineBoosterConfig cfg{ex.n_weak, ex.gamma, ex.horizon, ex.mode, seed};
    RegretTrace trace;
    try {
      if (ex.learner == OnlineLearnerKind::hedge) {
        trace = run_online<HedgeLearner<Stump>>(cfg, *seq, *pool, [&](std::size_t, RngStream rng) {
          return HedgeLearner<Stump>(pool, ex.gamma, ex.horizon, std::move(rng));
        });
      } else {
        trace = run_online<PrescientOracle>(cfg, *seq, *pool, [&](std::size_t, RngStream rng) {
          return PrescientOracle(seq, ex.gamma, std::move(rng));
        });
      }
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw experiment_error(seed, e.what());
    }
    report.clip_events += trace.clip_events;
    for (std::size_t t = 0; t < trace.size(); ++t)
      report.online_rows.push_back({seed, t + 1, trace.cum_gain[t], trace.best_hindsight_gain[t],
                                    trace.cum_regret(t), trace.theory_bound[t]});
    if (ex.mode == BoostMode::agnostic) {
      report.values.push_back(trace.final_regret());
      report.bound = trace.theory_bound.back();
    } else {
      report.values.push_back(static_cast<double>(count_mistakes(trace, *seq)) / static_cast<double>(ex.horizon));
      report.bound = ex.epsilon.value_or(realizable_epsilon(ex.gamma, ex.n_weak, ex.horizon));
    }
  }
  finalize_report(report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct StatExperiment {
  BoostMode mode = BoostMode::realizable;
  std::size_t rounds = 1;
  std::size_t sample_size = 200;  // m = |S|
  std::size_t weak_sample = 30;   // m0
  double gamma = 1.0;
  std::string data = "threshold-realizable";
  std::size_t grid_size = 32;
  std::uint64_t data_seed = 0;
  std::vector<std::uint64_t> seeds;
};

/// Largest empirical correlation of a signed stump on the grid.
inline double best_stump_correlation(std::span<const LabeledExample> sample, std::span<const double> grid) {
  return detail::stump_erm(sample, grid).correlation;
}

/// Correlation floor the statistical booster must reach on S:
/// realizable 1 - 3 / (gamma sqrt T); agnostic best - eps0 / gamma - 6 / (gamma sqrt T).
inline double stat_floor(BoostMode mode, double gamma, std::size_t rounds, double best_cor, double eps0) {
  if (mode == BoostMode::realizable) return 1.0 - stat_oco_term(mode, gamma, rounds);
  return best_cor - eps0 / gamma - stat_oco_term(mode, gamma, rounds);
}

/// One statistical-booster run per seed on a shared sample S. The metric is
/// the correlation on S of the final randomized-vote ensemble.
inline ExperimentReport run_seeds(const StatExperiment& ex) {
  if (ex.seeds.empty()) throw invalid_input("run_seeds: no seeds");
  const auto start = std::chrono::steady_clock::now();
  const auto sample = generate_sequence(parse_adversary(ex.data, ex.sample_size, ex.data_seed));
  const auto grid = threshold_grid(ex.grid_size);

  ExperimentReport report;
  report.name = std::string("stat-") + to_string(ex.mode);
  report.metric = "cor_S";
  report.direction = BoundDirection::lower;
  report.seeds = ex.seeds;
  const double eps0 = stump_declared_slack(grid.size(), ex.weak_sample);
  report.bound = stat_floor(ex.mode, ex.gamma, ex.rounds, best_stump_correlation(sample, grid), eps0);

  const StreamIds ids{1};
  for (const std::uint64_t seed : ex.seeds) {
    std::vector<double> cors;
    try {
      StumpErmLearner learner(grid, ex.gamma, ex.weak_sample, RngStream(seed, ids.weak(1)));
      const auto result = stat_boost(StatBoosterConfig{ex.rounds, ex.gamma, ex.mode, seed}, sample, learner);
      report.clip_events += result.clip_events;
      RngStream vote_rng(seed, ids.vote());
      cors = prefix_correlations(result.ensemble, sample, vote_rng);
    } catch (const std::exception& e) {
      throw experiment_error(seed, e.what());
    }
    for (std::size_t t = 0; t < cors.size(); ++t) report.stat_rows.push_back({seed, t + 1, cors[t]});
    report.values.push_back(cors.back());
  }
  finalize_report(report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline void require_min_seeds(std::size_t n) {
  if (n < kMinSeeds)
    throw invalid_input("run_experiment: need at least " + std::to_string(kMinSeeds) + " seeds, got " +
                        std::to_string(n));
}

/// run_seeds with the seed-count precondition the CI needs.
inline ExperimentReport run_experiment(const OnlineExperiment& ex) {
  require_min_seeds(ex.seeds.size());
  return run_seeds(ex);
}

inline ExperimentReport run_experiment(const StatExperiment& ex) {
  require_min_seeds(ex.seeds.size());
  return run_seeds(ex);
}

}  // namespace agboost
