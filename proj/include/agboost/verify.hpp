#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agboost/boost_online.hpp"
#include "agboost/boost_stat.hpp"
#include "agboost/core.hpp"
#include "agboost/games.hpp"
#include "agboost/harness.hpp"
#include "agboost/oco.hpp"
#include "agboost/rng.hpp"
#include "agboost/trace_io.hpp"
#include "agboost/weaklearn.hpp"

namespace agboost {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace checks {

inline std::string fmt(double v) { return format_number(v); }

/// Grid {-2, -1.75, ..., 2}.
inline std::vector<double> vote_grid() {
  std::vector<double> z;
  for (int k = -8; k <= 8; ++k) z.push_back(0.25 * k);
  return z;
}

inline CheckResult vote_range() {
  CheckResult r{"core", "vote range", true, ""};
  RngStream rng(11, 0);
  for (double z : {-1e9, -3.0, -1.0, -0.999, -0.5, 0.0, 1e-12, 0.5, 0.999, 1.0, 3.0, 1e9})
    for (int k = 0; k < 1000; ++k) {
      const int v = vote_project(z, rng).value();
      if (v != 1 && v != -1) r.pass = false;
    }
  return r;
}

/// Empirical mean of the vote over `draws` draws at each grid point, within
/// 4 sqrt(1 / (4 draws)) of clamp(z).
inline CheckResult vote_unbiased(std::size_t draws = 100000) {
  CheckResult r{"core", "vote unbiasedness", true, ""};
  const double tol = 4.0 * std::sqrt(1.0 / (4.0 * static_cast<double>(draws)));
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (double z : vote_grid()) {
    RngStream rng(2024, stream++);
    long long sum = 0;
    for (std::size_t k = 0; k < draws; ++k) sum += vote_project(z, rng).value();
    const double dev = std::abs(static_cast<double>(sum) / static_cast<double>(draws) - vote_expectation(z));
    worst = std::max(worst, dev);
  }
  r.pass = worst <= tol;
  r.detail = "max deviation " + fmt(worst) + " tol " + fmt(tol);
  return r;
}

/// p (hy - 1) >= hy - 1 for p on a 201-point grid over [-1, 1].
inline CheckResult relabel_loss_bound() {
  CheckResult r{"core", "relabel loss lower bound (201-point grid)", true, ""};
  for (int hy : {-1, 1})
    for (int k = 0; k <= 200; ++k) {
      const double p = -1.0 + 0.01 * k;
      if (p * (hy - 1) < hy - 1) r.pass = false;
    }
  return r;
}

/// Some p in {0, 1} has p (s y - 1) <= clamp(s) y - 1, s on 241 points of [-3, 3].
inline CheckResult projection_bound() {
  CheckResult r{"core", "vote projection bound (241-point grid)", true, ""};
  for (int k = 0; k <= 240; ++k) {
    const double s = -3.0 + 0.025 * k;
    for (int y : {-1, 1}) {
      const double rhs = vote_expectation(s) * y - 1.0;
      const bool ok = 0.0 * (s * y - 1.0) <= rhs + 1e-12 || 1.0 * (s * y - 1.0) <= rhs + 1e-12;
      if (!ok) {
        r.pass = false;
        r.detail = "fails at s = " + fmt(s);
      }
    }
  }
  return r;
}

inline CheckResult rng_determinism() {
  CheckResult r{"core", "seeded determinism", true, ""};
  RngStream a(77, 3), b(77, 3), c(77, 4);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a.bits();
    if (x != b.bits()) r.pass = false;
    if (x != c.bits()) differs = true;
  }
  RngStream va(5, 1), vb(5, 1);
  for (int k = 0; k < 1000; ++k)
    if (vote_project(0.3, va) != vote_project(0.3, vb)) r.pass = false;
  if (!differs) r.pass = false;
  return r;
}

/// Box-OGD regret against (3/2) G D sqrt(N) on random, sign-flipping and
/// corner-chasing sequences; also checks feasibility and the clip counter.
inline CheckResult ogd_regret(std::size_t sequences = 100) {
  CheckResult r{"oco", "OGD regret bound on adversarial sequences", true, ""};
  double worst_ratio = 0.0;
  for (std::size_t s = 0; s < sequences; ++s) {
    RngStream rng(900 + s, 0);
    const std::size_t dim = 1 + rng.index(4);
    const std::size_t steps = 50 + rng.index(400);
    const double g = 0.5 + 4.0 * rng.uniform();
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = -1.0 - rng.uniform();
      hi[i] = lo[i] + 0.1 + 2.0 * rng.uniform();
    }
    BoxDomain box(lo, hi);
    Ogd ogd(box, steps, g, box.center());
    const int kind = static_cast<int>(s % 3);
    std::vector<double> c(dim);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto p = ogd.next();
      if (!box.contains(p)) r.pass = false;
      double n2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        if (kind == 0) c[i] = 2.0 * rng.uniform() - 1.0;
        else if (kind == 1) c[i] = (t / (1 + s % 7)) % 2 == 0 ? 1.0 : -1.0;
        // push the iterate toward the corner it is farthest from
        else c[i] = p[i] - 0.5 * (lo[i] + hi[i]) >= 0.0 ? 1.0 : -1.0;
        n2 += c[i] * c[i];
      }
      const double scale = g / std::sqrt(n2) * (0.2 + 0.8 * rng.uniform());
      for (auto& v : c) v *= scale;
      ogd.update(c);
    }
    if (ogd.clip_count() != 0) r.pass = false;
    const double ratio = ogd.regret() / ogd.regret_bound();
    worst_ratio = std::max(worst_ratio, ratio);
    if (ogd.regret() > ogd.regret_bound()) r.pass = false;
  }
  r.detail = "max regret/bound " + fmt(worst_ratio);
  return r;
}

inline CheckResult ogd_clipping() {
  CheckResult r{"oco", "oversized gradients are clipped and counted", true, ""};
  Ogd ogd(BoxDomain::cube(2, -1.0, 1.0), 3, 1.0, {0.0, 0.0});
  ogd.update(std::vector<double>{3.0, 4.0});
  ogd.update(std::vector<double>{0.6, 0.8});
  r.pass = ogd.clip_count() == 1 && ogd.domain().contains(ogd.iterate());
  return r;
}

/// Diluted Hedge on five oblivious sequences: mean gain over seeds, plus 4
/// standard errors, reaches gamma * best - gamma sqrt(2 T ln K).
inline CheckResult hedge_compliance(std::size_t seeds = 20, std::size_t horizon = 2000) {
  CheckResult r{"weaklearn", "diluted Hedge meets its declared regret", true, ""};
  const double gamma = 0.5;
  const auto grid = threshold_grid(32);
  const auto pool = std::make_shared<const ExpertPool<Stump>>(make_threshold_pool(grid));
  for (const char* adv : {"constant", "alternating", "drifting-threshold:400", "noisy-threshold:0.2", "uniform-random"}) {
    const auto seq = generate_sequence(parse_adversary(adv, horizon, 31));
    const double best = best_in_hindsight(*pool, seq).gain;
    std::vector<double> gains;
    for (std::size_t s = 0; s < seeds; ++s) {
      HedgeLearner<Stump> w(pool, gamma, horizon, RngStream(100 + s, 1));
      double g = 0.0;
      for (const auto& ex : seq) {
        g += w.predict(ex.x) * ex.y;
        w.update(ex.x, ex.y);
      }
      gains.push_back(g);
    }
    const auto st = summarize(gains);
    const double floor = gamma * best - hedge_declared_regret(gamma, pool->size(), horizon);
    const double slack = 4.0 * st.std / std::sqrt(static_cast<double>(st.n));
    if (st.mean + slack < floor) {
      r.pass = false;
      r.detail += std::string(adv) + " mean " + fmt(st.mean) + " < floor " + fmt(floor) + "; ";
    }
  }
  return r;
}

inline CheckResult prescient_rejected_in_agnostic_mode() {
  CheckResult r{"weaklearn", "prescient oracle rejected by the agnostic booster", false, ""};
  auto seq = std::make_shared<const LabeledSequence>(LabeledSequence{{0.1, Label::plus()}});
  std::vector<PrescientOracle> ws{PrescientOracle(seq, 0.5, RngStream(1, 1))};
  try {
    OnlineBooster<PrescientOracle> b({1, 0.5, 1, BoostMode::agnostic, 1}, std::move(ws));
  } catch (const config_error&) {
    r.pass = true;
  }
  return r;
}

/// Weak learner that counts its prediction queries.
struct CountingLearner {
  std::shared_ptr<std::size_t> queries = std::make_shared<std::size_t>(0);
  RngStream rng{0, 0};
  Label predict(Instance) {
    ++*queries;
    return random_sign(rng);
  }
  void update(Instance, Label) {}
  double advantage() const { return 1.0; }
  double declared_regret() const { return 0.0; }
  bool realizable_only() const { return false; }
};

inline CheckResult single_query_and_coefficients() {
  CheckResult r{"boost_online", "single query per round and coefficient range", true, ""};
  for (auto mode : {BoostMode::agnostic, BoostMode::realizable}) {
    const std::size_t n = 7;
    const double gamma = 0.4;
    std::vector<CountingLearner> ws;
    auto counter = std::make_shared<std::size_t>(0);
    for (std::size_t i = 0; i < n; ++i) ws.push_back({counter, RngStream(3, i + 1)});
    OnlineBooster<CountingLearner> b({n, gamma, 50, mode, 3}, std::move(ws));
    const auto geo = OnlineOcoGeometry::for_mode(mode);
    RngStream data(4, 0);
    for (std::size_t t = 0; t < 50; ++t) {
      const double x = data.uniform();
      const Label y = random_sign(data);
      b.predict(x);
      const auto rec = b.update(x, y);
      if (*counter != n * (t + 1)) r.pass = false;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = (1.0 / gamma) * (rec.predictions[i] * y) - 1.0;
        if (std::abs(rec.losses[i] - rec.plays[i] * c) > 1e-12 || std::abs(c) > 2.0 / gamma) r.pass = false;
        if (rec.plays[i] < geo.lower || rec.plays[i] > geo.upper) r.pass = false;
      }
      if (rec.clip_events != 0) r.pass = false;
    }
  }
  return r;
}

/// E[W y'] = E[W p y] when the relabel coin is independent of W given (p, y).
inline CheckResult relabel_expectation(std::size_t rounds = 100000) {
  CheckResult r{"boost_online", "relabeled gain expectation", true, ""};
  RngStream rng(8, 0), coin(8, 1), learner(8, 2);
  double sum_diff = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < rounds; ++k) {
    const double p = 2.0 * rng.uniform() - 1.0;
    const Label y = random_sign(rng);
    const Label w = learner.uniform() < 0.7 ? y : -y;
    const Label fed = coin.uniform() < 0.5 * (1.0 + p) ? y : -y;
    const double d = static_cast<double>(w * fed) - static_cast<double>(w * y) * p;
    sum_diff += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(rounds);
  const double mean = sum_diff / n;
  const double sd = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
  r.pass = std::abs(mean) <= 4.0 * sd / std::sqrt(n);
  r.detail = "mean difference " + fmt(mean) + " tol " + fmt(4.0 * sd / std::sqrt(n));
  return r;
}

inline OnlineExperiment small_agnostic(std::size_t n_weak, std::size_t horizon) {
  OnlineExperiment ex;
  ex.mode = BoostMode::agnostic;
  ex.horizon = horizon;
  ex.n_weak = n_weak;
  ex.gamma = 1.0;
  ex.adversary = "noisy-threshold:0.2";
  ex.data_seed = 17;
  ex.seeds = seed_range(17, 10);
  return ex;
}

inline CheckResult online_bound(bool full) {
  CheckResult r{"boost_online", full ? "regret bound, gamma 1, T 4000, N 3600" : "regret bound, gamma 1, T 1000, N 400",
                true, ""};
  auto ex = full ? small_agnostic(3600, 4000) : small_agnostic(400, 1000);
  if (full) ex.seeds = seed_range(17, 20);
  const auto rep = run_experiment(ex);
  r.pass = rep.pass && rep.clip_events == 0;
  r.detail = "mean " + fmt(rep.stats.mean) + " bound " + fmt(rep.bound) + " ci " + fmt(rep.stats.ci);
  return r;
}

inline CheckResult online_monotone_in_n() {
  CheckResult r{"boost_online", "mean regret non-increasing over N = 25, 100, 400", true, ""};
  std::vector<SummaryStats> st;
  for (std::size_t n : {25, 100, 400}) st.push_back(run_experiment(small_agnostic(n, 1000)).stats);
  for (std::size_t k = 1; k < st.size(); ++k)
    if (st[k].mean > st[k - 1].mean + std::max(st[k].ci, st[k - 1].ci)) r.pass = false;
  r.detail = "means " + fmt(st[0].mean) + " " + fmt(st[1].mean) + " " + fmt(st[2].mean);
  return r;
}

inline std::string csv_bytes(const ExperimentReport& rep) {
  std::ostringstream os;
  write_trace(os, rep);
  return os.str();
}

inline CheckResult online_determinism() {
  CheckResult r{"boost_online", "fixed seed gives identical traces", true, ""};
  const auto ex = small_agnostic(50, 300);
  r.pass = csv_bytes(run_experiment(ex)) == csv_bytes(run_experiment(ex));
  return r;
}

inline StatExperiment stat_config(BoostMode mode, std::size_t rounds) {
  StatExperiment ex;
  ex.mode = mode;
  ex.rounds = rounds;
  ex.data_seed = 23;
  ex.seeds = seed_range(23, 10);
  if (mode == BoostMode::realizable) {
    ex.sample_size = 200;
    ex.weak_sample = 30;
    ex.gamma = 1.0;
    ex.data = "threshold-realizable";
  } else {
    ex.sample_size = 400;
    ex.weak_sample = 50;
    ex.gamma = 0.4;
    ex.data = "noisy-threshold:0.15";
  }
  return ex;
}

inline CheckResult stat_floor_check(BoostMode mode, std::size_t rounds) {
  CheckResult r{"boost_stat", std::string(to_string(mode)) + " correlation floor, T " + std::to_string(rounds), true,
                ""};
  const auto rep = run_experiment(stat_config(mode, rounds));
  r.pass = rep.pass && rep.clip_events == 0;
  r.detail = "mean " + fmt(rep.stats.mean) + " floor " + fmt(rep.bound) + " ci " + fmt(rep.stats.ci);
  return r;
}

/// Plays stay in the box, coefficients are +-1/gamma - 1, and the OCO takes T steps.
inline CheckResult stat_feasibility() {
  CheckResult r{"boost_stat", "plays feasible, coefficient norm, step count", true, ""};
  for (auto mode : {BoostMode::realizable, BoostMode::agnostic}) {
    auto ex = stat_config(mode, 60);
    const auto sample = generate_sequence(parse_adversary(ex.data, ex.sample_size, ex.data_seed));
    StumpErmLearner learner(threshold_grid(32), ex.gamma, ex.weak_sample, RngStream(1, 1));
    const auto res = stat_boost(StatBoosterConfig{ex.rounds, ex.gamma, mode, 1}, sample, learner);
    if (!res.plays_in_domain || res.clip_events != 0 || res.oco_steps != ex.rounds ||
        res.ensemble.members.size() != ex.rounds)
      r.pass = false;
  }
  return r;
}

/// With gamma 0.5 a learner that is always right drives the realizable
/// weights to zero; the run must still take T steps.
inline CheckResult stat_sentinel() {
  CheckResult r{"boost_stat", "zero-mass rounds reuse the previous hypothesis", true, ""};
  const auto sample = generate_sequence(parse_adversary("threshold-realizable", 20, 3));
  StumpErmLearner learner(std::vector<double>{0.5}, 1.0, 5, RngStream(2, 1));
  const auto res = stat_boost(StatBoosterConfig{40, 0.5, BoostMode::realizable, 2}, sample, learner);
  if (res.sentinel_rounds == 0 || res.oco_steps != 40 || res.ensemble.members.size() != 40) r.pass = false;
  r.detail = "sentinel rounds " + std::to_string(res.sentinel_rounds);
  return r;
}

inline MatrixGame random_game(std::uint64_t seed, double scale = 1.0) {
  RngStream rng(seed, 0);
  std::vector<double> a(9);
  for (auto& v : a) v = 2.0 * rng.uniform() - 1.0;
  return MatrixGame(Matrix(3, 3, a), BoxDomain::cube(3, -1.0, 1.0), scale);
}

/// Certificate on 50 random 3x3 games, exact and eps0-noisy, plus the exact
/// eps0 shift of the threshold and the averaging closure.
inline CheckResult game_certificates(std::size_t games = 50, std::size_t rounds = 10000, double eps0 = 0.05) {
  CheckResult r{"games", "certificate on random 3x3 games (exact and noisy)", true, ""};
  double min_margin = 1e300;
  for (std::size_t g = 0; g < games; ++g) {
    const auto game = random_game(5000 + g);
    const auto exact = solve_improper_game(game, {OracleKind::exact, 0.0, 1.0}, rounds, g);
    const auto noisy = solve_improper_game(game, {OracleKind::noisy, eps0, 1.0}, rounds, g);
    const auto c0 = certify_solution(game, exact.average_q, rounds, 0.0);
    const auto c1 = certify_solution(game, noisy.average_q, rounds, eps0);
    if (!c0.pass || !c1.pass) r.pass = false;
    if (std::abs((c0.threshold - c1.threshold) - eps0) > 1e-12) r.pass = false;
    if (!game.in_improper_set(exact.average_q) || !game.in_improper_set(noisy.average_q)) r.pass = false;
    min_margin = std::min({min_margin, c0.margin, c1.margin});
  }
  r.detail = "min margin " + fmt(min_margin);
  return r;
}

inline CheckResult oracle_contract() {
  CheckResult r{"games", "best response attains the column maximum", true, ""};
  RngStream rng(71, 0);
  for (int k = 0; k < 500; ++k) {
    const auto game = random_game(7000 + k);
    std::vector<double> p(3);
    for (auto& v : p) v = 2.0 * rng.uniform() - 1.0;
    const auto q = exact_best_response(game.payoff, p);
    const auto v = game.payoff.transpose_times(p);
    const double got = std::inner_product(q.begin(), q.end(), v.begin(), 0.0);
    if (got < *std::max_element(v.begin(), v.end())) r.pass = false;
  }
  return r;
}

inline CheckResult improper_scale_no_op() {
  CheckResult r{"games", "improper scale keeps the certificate", true, ""};
  for (std::size_t g = 0; g < 10; ++g) {
    const auto game = random_game(6000 + g, 2.5);
    const auto sol = solve_improper_game(game, {OracleKind::exact, 0.0, 2.5}, 4000, g);
    if (!game.in_improper_set(sol.average_q) || !certify_solution(game, sol.average_q, 4000, 0.0).pass)
      r.pass = false;
  }
  return r;
}

inline CheckResult report_reproducible_and_ci() {
  CheckResult r{"harness", "report reproducible and CI honest", true, ""};
  const auto ex = stat_config(BoostMode::realizable, 30);
  const auto a = run_experiment(ex);
  const auto b = run_experiment(ex);
  std::ostringstream ra, rb;
  print_report(ra, a, false);
  print_report(rb, b, false);
  if (ra.str() != rb.str() || csv_bytes(a) != csv_bytes(b)) r.pass = false;
  double mean = 0.0;
  for (double v : a.values) mean += v;
  mean /= static_cast<double>(a.values.size());
  double ss = 0.0;
  for (double v : a.values) ss += (v - mean) * (v - mean);
  const double ci = 3.0 * std::sqrt(ss / static_cast<double>(a.values.size() - 1)) /
                    std::sqrt(static_cast<double>(a.values.size()));
  if (std::abs(ci - a.stats.ci) > 1e-12) r.pass = false;
  return r;
}

inline CheckResult csv_round_trip() {
  CheckResult r{"cli", "CSV header and parse-back", true, ""};
  auto ex = small_agnostic(20, 50);
  const auto rep = run_experiment(ex);
  std::istringstream in(csv_bytes(rep));
  const auto rows = read_online_trace(in);
  if (rows.size() != rep.online_rows.size()) r.pass = false;
  for (std::size_t k = 0; k < rows.size() && r.pass; ++k) {
    const auto& a = rows[k];
    const auto& b = rep.online_rows[k];
    if (a.seed != b.seed || a.t != b.t || format_number(a.cum_gain) != format_number(b.cum_gain) ||
        format_number(a.cum_regret) != format_number(b.cum_regret) ||
        format_number(a.theory_bound) != format_number(b.theory_bound))
      r.pass = false;
  }
  if (csv_bytes(rep).rfind(std::string(kOnlineTraceHeader) + "\n", 0) != 0) r.pass = false;
  return r;
}

}  // namespace checks

/// Every module invariant. skip_slow drops the full-size regret run.
inline std::vector<CheckResult> run_verification(bool skip_slow, std::ostream* progress = nullptr) {
  std::vector<std::function<CheckResult()>> suite = {
      checks::vote_range,
      [] { return checks::vote_unbiased(); },
      checks::relabel_loss_bound,
      checks::projection_bound,
      checks::rng_determinism,
      [] { return checks::ogd_regret(); },
      checks::ogd_clipping,
      [] { return checks::hedge_compliance(); },
      checks::prescient_rejected_in_agnostic_mode,
      checks::single_query_and_coefficients,
      [] { return checks::relabel_expectation(); },
      [] { return checks::online_bound(false); },
      checks::online_monotone_in_n,
      checks::online_determinism,
      checks::stat_feasibility,
      checks::stat_sentinel,
      [] { return checks::stat_floor_check(BoostMode::realizable, 100); },
      [] { return checks::stat_floor_check(BoostMode::realizable, 400); },
      [] { return checks::stat_floor_check(BoostMode::agnostic, 400); },
      [] { return checks::game_certificates(); },
      checks::oracle_contract,
      checks::improper_scale_no_op,
      checks::report_reproducible_and_ci,
      checks::csv_round_trip,
  };
  if (!skip_slow) suite.push_back([] { return checks::online_bound(true); });

  std::vector<CheckResult> out;
  for (auto& check : suite) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.name = "check #" + std::to_string(out.size() + 1);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (progress)
      *progress << (r.pass ? "PASS " : "FAIL ") << r.module << ": " << r.name
                << (r.detail.empty() ? "" : " [" + r.detail + "]") << '\n';
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace agboost
