#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "agboost/errors.hpp"
#include "agboost/rng.hpp"

namespace agboost {

/// A binary label in {-1, +1}. There is no third state.
class Label {
 public:
  static constexpr Label plus() noexcept { return Label(1); }
  static constexpr Label minus() noexcept { return Label(-1); }

  static Label from_int(int v) {
    if (v != 1 && v != -1) throw invalid_input("label must be -1 or +1, got " + std::to_string(v));
    return Label(static_cast<std::int8_t>(v));
  }

  constexpr int value() const noexcept { return v_; }
  constexpr Label operator-() const noexcept { return Label(static_cast<std::int8_t>(-v_)); }

  friend constexpr int operator*(Label a, Label b) noexcept { return a.v_ * b.v_; }
  friend constexpr bool operator==(Label, Label) noexcept = default;

 private:
  constexpr explicit Label(std::int8_t v) noexcept : v_(v) {}
  std::int8_t v_;
};

/// sign with sign(0) := +1.
constexpr Label sign_of(double z) noexcept { return z >= 0.0 ? Label::plus() : Label::minus(); }

inline Label random_sign(RngStream& rng) { return rng.uniform() < 0.5 ? Label::plus() : Label::minus(); }

using Instance = double;

struct LabeledExample {
  Instance x;
  Label y;
};

using LabeledSequence = std::vector<LabeledExample>;

template <class H>
concept hypothesis = requires(const H& h, Instance x) {
  { h.predict(x) } -> std::same_as<Label>;
  { h.id() } -> std::convertible_to<std::uint64_t>;
};

/// Signed threshold stump x -> s * sign(x - threshold).
///
/// A threshold of -infinity makes the stump constant.
class Stump {
 public:
  constexpr Stump(double threshold, Label s, std::uint64_t id) noexcept
      : threshold_(threshold), sign_(s), id_(id) {}

  static constexpr Stump constant(Label s, std::uint64_t id) noexcept {
    return Stump(-std::numeric_limits<double>::infinity(), s, id);
  }

  constexpr Label predict(Instance x) const noexcept { return x >= threshold_ ? sign_ : -sign_; }
  constexpr std::uint64_t id() const noexcept { return id_; }
  constexpr double threshold() const noexcept { return threshold_; }
  constexpr Label orientation() const noexcept { return sign_; }
  constexpr bool is_constant() const noexcept { return std::isinf(threshold_) && threshold_ < 0; }

 private:
  double threshold_;
  Label sign_;
  std::uint64_t id_;
};

/// Finite, non-empty reference class with unique ids.
template <hypothesis H = Stump>
class ExpertPool {
 public:
  explicit ExpertPool(std::vector<H> members) : members_(std::move(members)) {
    if (members_.empty()) throw invalid_input("expert pool must be non-empty");
    std::unordered_set<std::uint64_t> seen;
    for (const auto& h : members_)
      if (!seen.insert(static_cast<std::uint64_t>(h.id())).second)
        throw invalid_input("duplicate expert id " + std::to_string(h.id()));
  }

  std::size_t size() const noexcept { return members_.size(); }
  const H& operator[](std::size_t k) const noexcept { return members_[k]; }
  std::span<const H> members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

 private:
  std::vector<H> members_;
};

/// Both signs of a stump at every grid threshold; ids 2j (positive) and 2j+1.
inline ExpertPool<Stump> make_threshold_pool(std::span<const double> grid) {
  std::vector<Stump> members;
  members.reserve(2 * grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    members.emplace_back(grid[j], Label::plus(), 2 * j);
    members.emplace_back(grid[j], Label::minus(), 2 * j + 1);
  }
  return ExpertPool<Stump>(std::move(members));
}

/// The thresholds j / n for j = 0..n-1.
inline std::vector<double> threshold_grid(std::size_t n) {
  if (n == 0) throw invalid_input("threshold grid needs at least one point");
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) grid[j] = static_cast<double>(j) / static_cast<double>(n);
  return grid;
}

inline void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) throw invalid_input(std::string(what) + " must be finite");
}

/// Randomized majority vote. Deterministic sign(z) when |z| >= 1 (no draw);
/// otherwise +1 with probability (1 + z) / 2 using exactly one draw.
inline Label vote_project(double z, RngStream& rng) {
  require_finite(z, "vote score");
  if (std::abs(z) >= 1.0) return sign_of(z);
  return rng.uniform() < 0.5 * (1.0 + z) ? Label::plus() : Label::minus();
}

/// E[vote_project(z)] = clamp(z, -1, 1).
inline double vote_expectation(double z) {
  require_finite(z, "vote score");
  return std::clamp(z, -1.0, 1.0);
}

/// Empirical correlation (1/m) sum prediction_i * label_i.
inline double correlation(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) throw invalid_input("correlation: length mismatch");
  if (predictions.empty()) throw invalid_input("correlation: empty input");
  long long sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += predictions[i] * labels[i];
  return static_cast<double>(sum) / static_cast<double>(labels.size());
}

template <hypothesis H>
double gain_of(const H& h, std::span<const LabeledExample> seq) {
  long long sum = 0;
  for (const auto& ex : seq) sum += h.predict(ex.x) * ex.y;
  return static_cast<double>(sum);
}

template <hypothesis H>
struct HindsightBest {
  H expert;
  std::size_t index;
  double gain;
};

/// Exhaustive argmax of sum_t h(x_t) y_t over the pool; ties go to the smallest id.
template <hypothesis H>
HindsightBest<H> best_in_hindsight(const ExpertPool<H>& pool, std::span<const LabeledExample> seq) {
  if (seq.empty()) throw invalid_input("best_in_hindsight: empty sequence");
  std::size_t best = 0;
  double best_gain = gain_of(pool[0], seq);
  for (std::size_t k = 1; k < pool.size(); ++k) {
    const double g = gain_of(pool[k], seq);
    if (g > best_gain || (g == best_gain && pool[k].id() < pool[best].id())) {
      best = k;
      best_gain = g;
    }
  }
  return {pool[best], best, best_gain};
}

/// Prefix version: entry t-1 is max_h sum_{s<=t} h(x_s) y_s.
template <hypothesis H>
std::vector<double> best_in_hindsight_prefix(const ExpertPool<H>& pool,
                                             std::span<const LabeledExample> seq) {
  std::vector<long long> gains(pool.size(), 0);
  std::vector<double> out;
  out.reserve(seq.size());
  for (const auto& ex : seq) {
    long long best = std::numeric_limits<long long>::min();
    for (std::size_t k = 0; k < pool.size(); ++k) {
      gains[k] += pool[k].predict(ex.x) * ex.y;
      best = std::max(best, gains[k]);
    }
    out.push_back(static_cast<double>(best));
  }
  return out;
}

}  // namespace agboost
