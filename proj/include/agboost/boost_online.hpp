#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "agboost/core.hpp"
#include "agboost/errors.hpp"
#include "agboost/oco.hpp"
#include "agboost/rng.hpp"
#include "agboost/weaklearn.hpp"

namespace agboost {

enum class BoostMode { agnostic, realizable };

inline const char* to_string(BoostMode m) noexcept {
  return m == BoostMode::agnostic ? "agnostic" : "realizable";
}

struct OnlineBoosterConfig {
  std::size_t n_weak = 1;
  double gamma = 1.0;
  std::size_t horizon = 1;
  BoostMode mode = BoostMode::agnostic;
  std::uint64_t master_seed = 0;
};

/// Everything one booster round touched.
struct RoundRecord {
  std::size_t t = 0;
  std::vector<Label> predictions;   // cached W_i(x_t)
  std::vector<double> plays;        // p^i_t
  std::vector<double> losses;       // l^i_t(p^i_t)
  Label prediction = Label::plus();
  Label label = Label::plus();
  double vote_score = 0.0;
  std::size_t clip_events = 0;
  double oco_regret = 0.0;
};

/// Per-mode OCO geometry for the booster's per-round optimizer.
struct OnlineOcoGeometry {
  double lower;
  double upper;
  double initial;

  static OnlineOcoGeometry for_mode(BoostMode m) noexcept {
    return m == BoostMode::agnostic ? OnlineOcoGeometry{-1.0, 1.0, 0.0} : OnlineOcoGeometry{0.0, 1.0, 0.5};
  }
  double diameter() const noexcept { return upper - lower; }
};

/// R_A(N) / N for the booster's per-round OGD: G = 2 / gamma, D from the mode.
inline double online_oco_term(BoostMode mode, double gamma, std::size_t n_weak) {
  const double g = 2.0 / gamma;
  return ogd_regret_bound(g, OnlineOcoGeometry::for_mode(mode).diameter(), n_weak) /
         static_cast<double>(n_weak);
}

/// Online boosting with a fresh N-step OCO instance per example.
///
/// Round protocol: predict(x) queries every weak learner exactly once and
/// caches the answers; update(x, y) reuses the cache for the losses. Inside
/// update, for i = 1..N: read the OCO play, feed the loss, draw the relabel
/// (agnostic) or pass coin (realizable), then update W_i.
template <online_weak_learner L, online_convex_optimizer Oco = Ogd>
class OnlineBooster {
 public:
  OnlineBooster(OnlineBoosterConfig config, std::vector<L> learners)
      : config_(config),
        learners_(std::move(learners)),
        relabel_rng_(config.master_seed, StreamIds{config.n_weak}.relabel()),
        vote_rng_(config.master_seed, StreamIds{config.n_weak}.vote()),
        geometry_(OnlineOcoGeometry::for_mode(config.mode)) {
    if (config_.n_weak == 0) throw invalid_input("booster: need at least one weak learner");
    if (learners_.size() != config_.n_weak)
      throw invalid_input("booster: expected " + std::to_string(config_.n_weak) + " weak learners");
    if (!(config_.gamma > 0.0 && config_.gamma <= 1.0)) throw invalid_input("booster: gamma must lie in (0, 1]");
    if (config_.mode == BoostMode::agnostic)
      for (const auto& w : learners_)
        if (w.realizable_only())
          throw config_error("booster: a realizable-only weak learner cannot receive relabeled examples");
    cache_.resize(config_.n_weak, Label::plus());
  }

  Label predict(Instance x) {
    if (predicted_) throw protocol_error("booster: predict called twice in one round");
    long long sum = 0;
    for (std::size_t i = 0; i < learners_.size(); ++i) {
      cache_[i] = learners_[i].predict(x);
      sum += cache_[i].value();
    }
    vote_score_ = static_cast<double>(sum) / (config_.gamma * static_cast<double>(config_.n_weak));
    prediction_ = vote_project(vote_score_, vote_rng_);
    predicted_ = true;
    return prediction_;
  }

  RoundRecord update(Instance x, Label y) {
    if (!predicted_) throw protocol_error("booster: update called before predict");
    const std::size_t n = config_.n_weak;
    RoundRecord rec;
    rec.t = ++round_;
    rec.predictions = cache_;
    rec.plays.reserve(n);
    rec.losses.reserve(n);
    rec.prediction = prediction_;
    rec.label = y;
    rec.vote_score = vote_score_;

    Oco oco(BoxDomain({geometry_.lower}, {geometry_.upper}), n, 2.0 / config_.gamma,
            std::vector<double>{geometry_.initial});
    const double inv_gamma = 1.0 / config_.gamma;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = oco.next()[0];
      const double c = inv_gamma * static_cast<double>(cache_[i] * y) - 1.0;
      rec.plays.push_back(p);
      rec.losses.push_back(p * c);
      oco.update(std::span<const double>(&c, 1));
      if (config_.mode == BoostMode::agnostic) {
        const Label fed = relabel_rng_.uniform() < 0.5 * (1.0 + p) ? y : -y;
        learners_[i].update(x, fed);
      } else if (relabel_rng_.uniform() < p) {
        learners_[i].update(x, y);
      }
    }
    rec.clip_events = oco.clip_count();
    if constexpr (requires { oco.regret(); }) rec.oco_regret = oco.regret();
    predicted_ = false;
    return rec;
  }

  const OnlineBoosterConfig& config() const noexcept { return config_; }
  std::span<const L> learners() const noexcept { return learners_; }
  std::size_t rounds_completed() const noexcept { return round_; }

 private:
  OnlineBoosterConfig config_;
  std::vector<L> learners_;
  RngStream relabel_rng_;
  RngStream vote_rng_;
  OnlineOcoGeometry geometry_;
  std::vector<Label> cache_;
  Label prediction_ = Label::plus();
  double vote_score_ = 0.0;
  bool predicted_ = false;
  std::size_t round_ = 0;
};

/// Per-round cumulative quantities of one booster run.
struct RegretTrace {
  std::vector<double> cum_gain;             // sum_{s<=t} yhat_s y_s
  std::vector<double> best_hindsight_gain;  // max_h sum_{s<=t} h(x_s) y_s
  std::vector<double> theory_bound;         // R_W(T)/gamma + t R_A(N)/N
  double weak_regret = 0.0;                 // R_W(T) declared by the weak learners
  double oco_term = 0.0;                    // R_A(N)/N
  std::size_t clip_events = 0;

  std::size_t size() const noexcept { return cum_gain.size(); }
  double cum_regret(std::size_t t) const { return best_hindsight_gain[t] - cum_gain[t]; }
  double final_regret() const { return cum_regret(size() - 1); }
  double final_gain() const { return cum_gain.back(); }
};

/// Builds weak learner i (1-based) from its own stream.
template <class F, class L>
concept weak_learner_factory = requires(F f, std::size_t i, RngStream rng) {
  { f(i, rng) } -> std::same_as<L>;
};

/// Runs the booster over a fully materialized sequence and records the trace.
template <online_weak_learner L, online_convex_optimizer Oco = Ogd, hypothesis H, class Factory>
  requires weak_learner_factory<Factory, L>
RegretTrace run_online(const OnlineBoosterConfig& config, std::span<const LabeledExample> seq,
                       const ExpertPool<H>& pool, Factory&& make_learner) {
  if (seq.size() != config.horizon)
    throw invalid_input("run_online: sequence length " + std::to_string(seq.size()) +
                        " differs from horizon " + std::to_string(config.horizon));
  const StreamIds ids{config.n_weak};
  std::vector<L> learners;
  learners.reserve(config.n_weak);
  for (std::size_t i = 1; i <= config.n_weak; ++i)
    learners.push_back(make_learner(i, RngStream(config.master_seed, ids.weak(i))));

  RegretTrace trace;
  trace.weak_regret = learners.front().declared_regret();
  trace.oco_term = online_oco_term(config.mode, config.gamma, config.n_weak);

  OnlineBooster<L, Oco> booster(config, std::move(learners));
  trace.cum_gain.reserve(seq.size());
  trace.theory_bound.reserve(seq.size());
  double gain = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Label yhat = booster.predict(seq[t].x);
    const RoundRecord rec = booster.update(seq[t].x, seq[t].y);
    gain += static_cast<double>(yhat * seq[t].y);
    trace.clip_events += rec.clip_events;
    trace.cum_gain.push_back(gain);
    trace.theory_bound.push_back(trace.weak_regret / config.gamma +
                                 static_cast<double>(t + 1) * trace.oco_term);
  }
  trace.best_hindsight_gain = best_in_hindsight_prefix(pool, seq);
  return trace;
}

}  // namespace agboost
