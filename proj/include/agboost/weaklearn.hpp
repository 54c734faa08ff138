#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "agboost/core.hpp"
#include "agboost/errors.hpp"
#include "agboost/rng.hpp"

namespace agboost {

/// Online weak learner: one prediction per round, then optionally an update.
///
/// declared_regret() is the additive regret the learner certifies for its
/// horizon. realizable_only() marks learners whose guarantee needs the fed
/// labels to equal the base sequence, so they cannot sit behind relabeling.
template <class L>
concept online_weak_learner = requires(L& l, const L& cl, Instance x, Label y) {
  { l.predict(x) } -> std::same_as<Label>;
  l.update(x, y);
  { cl.advantage() } -> std::convertible_to<double>;
  { cl.declared_regret() } -> std::convertible_to<double>;
  { cl.realizable_only() } -> std::convertible_to<bool>;
};

/// Statistical weak learner: trains on exactly sample_size() examples.
template <class W>
concept stat_weak_learner = requires(W& w, const W& cw, std::span<const LabeledExample> s) {
  { w.train(s) } -> hypothesis;
  { cw.sample_size() } -> std::convertible_to<std::size_t>;
  { cw.advantage() } -> std::convertible_to<double>;
  { cw.declared_slack() } -> std::convertible_to<double>;
};

/// Hedge learning rate for gains in [-1, 1] over K experts and horizon T.
inline double hedge_learning_rate(std::size_t pool_size, std::size_t horizon) {
  if (pool_size <= 1 || horizon == 0) return 0.0;
  return std::sqrt(2.0 * std::log(static_cast<double>(pool_size)) / static_cast<double>(horizon));
}

/// gamma * sqrt(2 T ln K): the regret certified by gamma-diluted Hedge.
inline double hedge_declared_regret(double gamma, std::size_t pool_size, std::size_t horizon) {
  if (pool_size < 1 || horizon < 1) throw invalid_input("hedge regret: need K >= 1 and T >= 1");
  if (pool_size == 1) return 0.0;
  return gamma * std::sqrt(2.0 * static_cast<double>(horizon) * std::log(static_cast<double>(pool_size)));
}

/// Multiplicative-weights learner over a finite pool, diluted by a coin.
///
/// With probability gamma it predicts with an expert drawn from the weights,
/// otherwise with a fair coin. The weights never depend on the learner's own
/// predictions, only on the fed labels.
template <hypothesis H = Stump>
class HedgeLearner {
 public:
  HedgeLearner(std::shared_ptr<const ExpertPool<H>> pool, double gamma, std::size_t horizon,
               RngStream rng)
      : HedgeLearner(pool, gamma, hedge_learning_rate(pool ? pool->size() : 0, horizon), horizon,
                     std::move(rng)) {}

  HedgeLearner(std::shared_ptr<const ExpertPool<H>> pool, double gamma, double eta,
               std::size_t horizon, RngStream rng)
      : pool_(std::move(pool)), gamma_(gamma), eta_(eta), horizon_(horizon), rng_(std::move(rng)) {
    if (!pool_) throw invalid_input("hedge: null pool");
    if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw invalid_input("hedge: gamma must lie in [0, 1]");
    if (!(eta_ >= 0.0) || !std::isfinite(eta_)) throw invalid_input("hedge: eta must be >= 0");
    weights_.assign(pool_->size(), 1.0 / static_cast<double>(pool_->size()));
    up_ = std::exp(eta_);
    down_ = std::exp(-eta_);
  }

  Label predict(Instance x) {
    if (rng_.uniform() < gamma_) return (*pool_)[sample_expert(rng_.uniform())].predict(x);
    return random_sign(rng_);
  }

  void update(Instance x, Label y) {
    const auto& pool = *pool_;
    double total = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      weights_[k] *= pool[k].predict(x) == y ? up_ : down_;
      total += weights_[k];
    }
    const double inv = 1.0 / total;
    for (auto& w : weights_) {
      w *= inv;
      // Below this the weight is unobservable and would drift into subnormals.
      if (w < 1e-250) w = 0.0;
    }
  }

  /// E[predict(x)] under the current weights: gamma * sum_k w_k h_k(x).
  double expected_prediction(Instance x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * (*pool_)[k].predict(x).value();
    return gamma_ * s;
  }

  std::span<const double> weights() const noexcept { return weights_; }
  double learning_rate() const noexcept { return eta_; }
  double advantage() const noexcept { return gamma_; }
  double declared_regret() const { return hedge_declared_regret(gamma_, pool_->size(), std::max<std::size_t>(horizon_, 1)); }
  bool realizable_only() const noexcept { return false; }
  const RngStream& rng() const noexcept { return rng_; }

 private:
  std::size_t sample_expert(double u) const {
    // Weights are kept normalized, so u itself is the target mass.
    double acc = 0.0;
    const double target = u;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      acc += weights_[k];
      if (target < acc) return k;
    }
    // Rounding can leave target == acc at the end; take the last positive weight.
    for (std::size_t k = weights_.size(); k-- > 0;)
      if (weights_[k] > 0.0) return k;
    return weights_.size() - 1;
  }

  std::shared_ptr<const ExpertPool<H>> pool_;
  double gamma_;
  double eta_;
  std::size_t horizon_;
  RngStream rng_;
  std::vector<double> weights_;
  double up_ = 1.0;
  double down_ = 1.0;
};

/// One prescient prediction: y_t with probability (1 + gamma) / 2.
inline Label prescient_oracle_predict(std::span<const LabeledExample> seq, std::size_t t, double gamma,
                                      RngStream& rng) {
  if (t >= seq.size()) throw protocol_error("prescient oracle: round beyond the sequence");
  const Label y = seq[t].y;
  return rng.uniform() < 0.5 * (1.0 + gamma) ? y : -y;
}

/// Weak online learner that peeks at the oblivious base sequence.
///
/// Valid only when the labels it is judged against are the base labels, i.e.
/// in the realizable booster. Rounds are counted by predict() calls.
class PrescientOracle {
 public:
  PrescientOracle(std::shared_ptr<const LabeledSequence> seq, double gamma, RngStream rng)
      : seq_(std::move(seq)), gamma_(gamma), rng_(std::move(rng)) {
    if (!seq_) throw invalid_input("prescient oracle: null sequence");
    if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw invalid_input("prescient oracle: gamma must lie in [0, 1]");
  }

  Label predict(Instance) { return prescient_oracle_predict(*seq_, t_++, gamma_, rng_); }
  void update(Instance, Label) {}

  double advantage() const noexcept { return gamma_; }
  double declared_regret() const noexcept { return 0.0; }
  bool realizable_only() const noexcept { return true; }

 private:
  std::shared_ptr<const LabeledSequence> seq_;
  double gamma_;
  RngStream rng_;
  std::size_t t_ = 0;
};

static_assert(online_weak_learner<HedgeLearner<Stump>>);
static_assert(online_weak_learner<PrescientOracle>);

namespace detail {

struct StumpChoice {
  std::size_t grid_index;
  Label orientation;
  double correlation;
};

/// ERM over signed stumps on the grid by a sorted sweep. Ties go to the
/// smallest threshold, then to the positive orientation.
inline StumpChoice stump_erm(std::span<const LabeledExample> sample, std::span<const double> grid) {
  std::vector<LabeledExample> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });

  long long total = 0;
  for (const auto& ex : sorted) total += ex.y.value();

  // below = sum of y over x < theta; the +1 stump scores total - 2 * below.
  long long below = 0;
  std::size_t i = 0;
  StumpChoice best{order[0], Label::plus(), 0.0};
  long long best_score = std::numeric_limits<long long>::min();
  for (std::size_t j : order) {
    while (i < sorted.size() && sorted[i].x < grid[j]) below += sorted[i++].y.value();
    const long long score = total - 2 * below;
    if (score > best_score) {
      best_score = score;
      best = {j, Label::plus(), 0.0};
    }
    if (-score > best_score) {
      best_score = -score;
      best = {j, Label::minus(), 0.0};
    }
  }
  best.correlation = static_cast<double>(best_score) / static_cast<double>(sample.size());
  return best;
}

}  // namespace detail

/// Id given to the constant stumps the diluted ERM learner falls back to.
inline constexpr std::uint64_t kConstantPlusId = 1'000'000'000;
inline constexpr std::uint64_t kConstantMinusId = 1'000'000'001;

/// With probability gamma, the empirical-correlation maximizer among signed
/// stumps on the grid; otherwise a constant stump of uniform random sign.
/// Consumes one dilution draw, plus one sign draw on the diluted path.
inline Stump stump_erm_train(std::span<const LabeledExample> sample, std::span<const double> grid,
                             double gamma, RngStream& rng) {
  if (sample.empty()) throw invalid_input("stump ERM: empty sample");
  if (grid.empty()) throw invalid_input("stump ERM: empty grid");
  if (rng.uniform() < gamma) {
    const auto c = detail::stump_erm(sample, grid);
    return Stump(grid[c.grid_index], c.orientation, 2 * c.grid_index + (c.orientation == Label::minus() ? 1 : 0));
  }
  const Label s = random_sign(rng);
  return Stump::constant(s, s == Label::plus() ? kConstantPlusId : kConstantMinusId);
}

/// Declared AWL slack for the diluted stump learner: sqrt(2 ln(2 |grid|) / m0).
inline double stump_declared_slack(std::size_t grid_size, std::size_t sample_size) {
  return std::sqrt(2.0 * std::log(2.0 * static_cast<double>(grid_size)) / static_cast<double>(sample_size));
}

class StumpErmLearner {
 public:
  StumpErmLearner(std::vector<double> grid, double gamma, std::size_t sample_size, RngStream rng)
      : grid_(std::move(grid)), gamma_(gamma), m0_(sample_size), rng_(std::move(rng)) {
    if (grid_.empty()) throw invalid_input("stump learner: empty grid");
    if (m0_ == 0) throw invalid_input("stump learner: sample size must be positive");
    if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw invalid_input("stump learner: gamma must lie in [0, 1]");
  }

  Stump train(std::span<const LabeledExample> sample) {
    if (sample.size() != m0_)
      throw invalid_input("stump learner: expected " + std::to_string(m0_) + " examples, got " +
                          std::to_string(sample.size()));
    return stump_erm_train(sample, grid_, gamma_, rng_);
  }

  std::size_t sample_size() const noexcept { return m0_; }
  double advantage() const noexcept { return gamma_; }
  double declared_slack() const { return stump_declared_slack(grid_.size(), m0_); }
  std::span<const double> grid() const noexcept { return grid_; }

 private:
  std::vector<double> grid_;
  double gamma_;
  std::size_t m0_;
  RngStream rng_;
};

static_assert(stat_weak_learner<StumpErmLearner>);

}  // namespace agboost
