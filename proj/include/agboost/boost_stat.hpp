#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agboost/boost_online.hpp"
#include "agboost/core.hpp"
#include "agboost/errors.hpp"
#include "agboost/oco.hpp"
#include "agboost/rng.hpp"
#include "agboost/weaklearn.hpp"

namespace agboost {

struct StatBoosterConfig {
  std::size_t rounds = 1;
  double gamma = 1.0;
  BoostMode mode = BoostMode::agnostic;
  std::uint64_t master_seed = 0;
};

/// Randomized majority vote over h_1..h_T scaled by 1 / (gamma T).
template <hypothesis H>
struct Ensemble {
  std::vector<H> members;
  double gamma = 1.0;

  double score(Instance x) const {
    long long sum = 0;
    for (const auto& h : members) sum += h.predict(x).value();
    return static_cast<double>(sum) / (gamma * static_cast<double>(members.size()));
  }

  Label predict(Instance x, RngStream& rng) const { return vote_project(score(x), rng); }
};

template <hypothesis H>
Label ensemble_predict(const Ensemble<H>& e, Instance x, RngStream& rng) {
  return e.predict(x, rng);
}

/// Absolute tolerance under which a realizable weight vector counts as zero.
inline constexpr double kZeroMassTolerance = 1e-12;

namespace detail {

inline void require_box(std::span<const double> p, double lo, double hi, const char* who) {
  for (double v : p)
    if (!(v >= lo && v <= hi)) throw invalid_input(std::string(who) + ": weight outside its box");
}

}  // namespace detail

/// m0 i.i.d. draws with Pr[i] = p(i) / sum p, or nullopt when sum p is zero
/// (the caller then reuses the previous hypothesis).
inline std::optional<std::vector<LabeledExample>> realizable_resample(std::span<const double> p,
                                                                      std::span<const LabeledExample> sample,
                                                                      std::size_t m0, RngStream& rng) {
  if (p.size() != sample.size()) throw invalid_input("realizable_resample: weight/sample size mismatch");
  detail::require_box(p, 0.0, 1.0, "realizable_resample");
  std::vector<double> cumulative(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cumulative[i] = (acc += p[i]);
  if (acc <= kZeroMassTolerance) return std::nullopt;

  std::vector<LabeledExample> out;
  out.reserve(m0);
  for (std::size_t k = 0; k < m0; ++k) {
    const double target = rng.uniform() * acc;
    auto i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), target) -
                                      cumulative.begin());
    if (i == p.size())
      while (p[--i] == 0.0) {
      }
    out.push_back(sample[i]);
  }
  return out;
}

/// m0 uniform draws; each drawn label is kept with probability (1 + p(i)) / 2
/// and flipped otherwise. Two draws per example.
inline std::vector<LabeledExample> agnostic_resample(std::span<const double> p,
                                                     std::span<const LabeledExample> sample, std::size_t m0,
                                                     RngStream& rng) {
  if (p.size() != sample.size()) throw invalid_input("agnostic_resample: weight/sample size mismatch");
  if (sample.empty()) throw invalid_input("agnostic_resample: empty sample");
  detail::require_box(p, -1.0, 1.0, "agnostic_resample");
  std::vector<LabeledExample> out;
  out.reserve(m0);
  for (std::size_t k = 0; k < m0; ++k) {
    const std::size_t i = rng.index(sample.size());
    const Label y = rng.uniform() < 0.5 * (1.0 + p[i]) ? sample[i].y : -sample[i].y;
    out.push_back({sample[i].x, y});
  }
  return out;
}

/// Box and starting point of the statistical booster's OCO player.
inline BoxDomain stat_domain(BoostMode mode, std::size_t m) {
  return mode == BoostMode::agnostic ? BoxDomain::cube(m, -1.0, 1.0) : BoxDomain::cube(m, 0.0, 1.0);
}

inline std::vector<double> stat_initial_play(BoostMode mode, std::size_t m) {
  return std::vector<double>(m, mode == BoostMode::agnostic ? 0.0 : 1.0);
}

/// The explicit O(1 / (gamma sqrt T)) term: R_A(T) / (T m) with G = 2 sqrt(m) / gamma.
/// Evaluates to 3 / (gamma sqrt T) realizable and 6 / (gamma sqrt T) agnostic.
inline double stat_oco_term(BoostMode mode, double gamma, std::size_t rounds) {
  const double d_unit = mode == BoostMode::agnostic ? 2.0 : 1.0;
  return 1.5 * (2.0 / gamma) * d_unit / std::sqrt(static_cast<double>(rounds));
}

template <hypothesis H>
struct StatBoostResult {
  Ensemble<H> ensemble;
  std::size_t sentinel_rounds = 0;
  std::size_t clip_events = 0;
  std::size_t oco_steps = 0;
  double oco_regret = 0.0;
  bool plays_in_domain = true;
};

/// Boosting over a fixed sample with an OCO player on per-example weights.
///
/// Each round resamples per mode from the current play, trains the weak
/// learner (or reuses h_{t-1} when the realizable mass vanishes, h_0 being the
/// constant +1), and feeds the OCO c_t(i) = h_t(x_i) y_i / gamma - 1.
template <stat_weak_learner W, online_convex_optimizer Oco = Ogd>
auto stat_boost(const StatBoosterConfig& config, std::span<const LabeledExample> sample, W& learner)
    -> StatBoostResult<decltype(learner.train(sample))> {
  using H = decltype(learner.train(sample));
  if (sample.empty()) throw invalid_input("stat_boost: empty sample");
  if (config.rounds == 0) throw invalid_input("stat_boost: need at least one round");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0)) throw invalid_input("stat_boost: gamma must lie in (0, 1]");

  const std::size_t m = sample.size();
  const double grad_bound = 2.0 * std::sqrt(static_cast<double>(m)) / config.gamma;
  const BoxDomain domain = stat_domain(config.mode, m);
  Oco oco(domain, config.rounds, grad_bound, stat_initial_play(config.mode, m));
  RngStream resample_rng(config.master_seed, StreamIds{1}.relabel());

  StatBoostResult<H> result;
  result.ensemble.gamma = config.gamma;
  result.ensemble.members.reserve(config.rounds);
  std::optional<H> previous;
  std::vector<double> coeff(m);

  for (std::size_t t = 1; t <= config.rounds; ++t) {
    const std::span<const double> play = oco.next();
    if (!domain.contains(play)) result.plays_in_domain = false;

    std::optional<H> h;
    try {
      if (config.mode == BoostMode::realizable) {
        auto drawn = realizable_resample(play, sample, learner.sample_size(), resample_rng);
        if (drawn) {
          h.emplace(learner.train(*drawn));
        } else {
          ++result.sentinel_rounds;
          if (previous) h.emplace(*previous);
        }
      } else {
        auto drawn = agnostic_resample(play, sample, learner.sample_size(), resample_rng);
        h.emplace(learner.train(drawn));
      }
    } catch (const round_error&) {
      throw;
    } catch (const std::exception& e) {
      throw round_error(t, e.what());
    }
    if (!h) {
      if constexpr (requires { H::constant(Label::plus(), kConstantPlusId); }) {
        h.emplace(H::constant(Label::plus(), kConstantPlusId));
      } else {
        throw round_error(t, "zero resampling mass before any hypothesis was trained");
      }
    }

    const double inv_gamma = 1.0 / config.gamma;
    for (std::size_t i = 0; i < m; ++i)
      coeff[i] = inv_gamma * static_cast<double>(h->predict(sample[i].x) * sample[i].y) - 1.0;
    oco.update(coeff);
    result.ensemble.members.push_back(*h);
    previous = h;
  }
  result.clip_events = oco.clip_count();
  result.oco_steps = oco.step_index();
  if constexpr (requires { oco.regret(); }) result.oco_regret = oco.regret();
  return result;
}

/// Prefix correlations cor_S of the ensembles h_1..h_t for t = 1..T, each
/// evaluated with one randomized vote per sample point.
template <hypothesis H>
std::vector<double> prefix_correlations(const Ensemble<H>& e, std::span<const LabeledExample> sample,
                                        RngStream& rng) {
  std::vector<long long> sums(sample.size(), 0);
  std::vector<double> out;
  out.reserve(e.members.size());
  for (std::size_t t = 0; t < e.members.size(); ++t) {
    long long agree = 0;
    const double scale = 1.0 / (e.gamma * static_cast<double>(t + 1));
    for (std::size_t i = 0; i < sample.size(); ++i) {
      sums[i] += e.members[t].predict(sample[i].x).value();
      agree += vote_project(static_cast<double>(sums[i]) * scale, rng) * sample[i].y;
    }
    out.push_back(static_cast<double>(agree) / static_cast<double>(sample.size()));
  }
  return out;
}

}  // namespace agboost
