#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "agboost/errors.hpp"

namespace agboost {

/// Axis-aligned box {p : lower <= p <= upper} with positive diameter.
class BoxDomain {
 public:
  BoxDomain(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
      throw invalid_input("box domain: bounds must be non-empty and of equal dimension");
    double d2 = 0.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || lower_[i] > upper_[i])
        throw invalid_input("box domain: need finite lower <= upper");
      d2 += (upper_[i] - lower_[i]) * (upper_[i] - lower_[i]);
    }
    diameter_ = std::sqrt(d2);
    if (!(diameter_ > 0.0)) throw invalid_input("box domain: diameter must be positive");
  }

  static BoxDomain cube(std::size_t dim, double lo, double hi) {
    return BoxDomain(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
  }

  std::size_t dim() const noexcept { return lower_.size(); }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> upper() const noexcept { return upper_; }
  double diameter() const noexcept { return diameter_; }

  bool contains(std::span<const double> p) const noexcept {
    if (p.size() != dim()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] >= lower_[i] && p[i] <= upper_[i])) return false;
    return true;
  }

  /// Euclidean projection onto a box is the componentwise clamp.
  void project(std::span<double> p) const noexcept {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lower_[i], upper_[i]);
  }

  std::vector<double> center() const {
    std::vector<double> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
    return c;
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  double diameter_ = 0.0;
};

/// l(p) = <coeff, p>.
struct LinearLoss {
  std::vector<double> coeff;

  double operator()(std::span<const double> p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i) s += coeff[i] * p[i];
    return s;
  }
};

/// min over the box of <coeff_sum, p>: each coordinate sits at the bound
/// opposing the sign of its coefficient.
inline double best_fixed_loss(const BoxDomain& domain, std::span<const double> coeff_sum) {
  double s = 0.0;
  for (std::size_t i = 0; i < coeff_sum.size(); ++i)
    s += std::min(coeff_sum[i] * domain.lower()[i], coeff_sum[i] * domain.upper()[i]);
  return s;
}

/// Worst-case regret of OGD with eta_t = D / (G sqrt(t)): (3/2) G D sqrt(N).
inline double ogd_regret_bound(double grad_bound, double diameter, std::size_t steps) {
  return 1.5 * grad_bound * diameter * std::sqrt(static_cast<double>(steps));
}

/// Contract for a pluggable online convex optimizer over a box with linear losses.
template <class A>
concept online_convex_optimizer =
    std::constructible_from<A, BoxDomain, std::size_t, double, std::vector<double>> &&
    requires(A& a, const A& ca, std::span<const double> coeff) {
      { ca.next() } -> std::convertible_to<std::span<const double>>;
      a.update(coeff);
      { ca.step_index() } -> std::convertible_to<std::size_t>;
      { ca.clip_count() } -> std::convertible_to<std::size_t>;
    };

/// Online gradient descent with box projection and eta_t = D / (G sqrt(t)).
///
/// Coefficient vectors longer than G are clipped to norm G for the step and
/// counted in clip_count(); the loss is still accounted with the original
/// coefficients.
class Ogd {
 public:
  Ogd(BoxDomain domain, std::size_t horizon, double grad_bound, std::vector<double> initial)
      : domain_(std::move(domain)),
        horizon_(horizon),
        grad_bound_(grad_bound),
        iterate_(std::move(initial)),
        coeff_sum_(domain_.dim(), 0.0) {
    if (horizon_ < 1) throw invalid_input("ogd: horizon must be at least 1");
    if (!(grad_bound_ > 0.0) || !std::isfinite(grad_bound_))
      throw invalid_input("ogd: gradient bound must be positive");
    if (!domain_.contains(iterate_)) throw invalid_input("ogd: initial point outside the domain");
    step_scale_ = domain_.diameter() / grad_bound_;
  }

  std::span<const double> next() const {
    if (step_ >= horizon_) throw protocol_error("ogd: horizon exhausted");
    return iterate_;
  }

  void update(std::span<const double> coeff) {
    if (step_ >= horizon_) throw protocol_error("ogd: horizon exhausted");
    if (coeff.size() != iterate_.size()) throw invalid_input("ogd: loss dimension mismatch");

    double norm2 = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      if (!std::isfinite(coeff[i])) throw invalid_input("ogd: non-finite loss coefficient");
      cumulative_loss_ += coeff[i] * iterate_[i];
      coeff_sum_[i] += coeff[i];
      norm2 += coeff[i] * coeff[i];
    }
    double scale = 1.0;
    const double norm = std::sqrt(norm2);
    if (norm > grad_bound_ * (1.0 + 1e-12)) {
      scale = grad_bound_ / norm;
      ++clips_;
    }

    ++step_;
    const double eta = step_scale_ / std::sqrt(static_cast<double>(step_)) * scale;
    for (std::size_t i = 0; i < coeff.size(); ++i) iterate_[i] -= eta * coeff[i];
    domain_.project(iterate_);
  }

  void update(const LinearLoss& loss) { update(std::span<const double>(loss.coeff)); }

  const BoxDomain& domain() const noexcept { return domain_; }
  std::size_t horizon() const noexcept { return horizon_; }
  double grad_bound() const noexcept { return grad_bound_; }
  std::size_t step_index() const noexcept { return step_; }
  std::size_t clip_count() const noexcept { return clips_; }
  double cumulative_loss() const noexcept { return cumulative_loss_; }
  std::span<const double> coefficient_sum() const noexcept { return coeff_sum_; }
  std::span<const double> iterate() const noexcept { return iterate_; }

  /// Regret against the best fixed point for the losses fed so far.
  double regret() const { return cumulative_loss_ - best_fixed_loss(domain_, coeff_sum_); }

  double regret_bound() const { return ogd_regret_bound(grad_bound_, domain_.diameter(), horizon_); }

 private:
  BoxDomain domain_;
  std::size_t horizon_;
  double grad_bound_;
  double step_scale_ = 0.0;
  std::vector<double> iterate_;
  std::vector<double> coeff_sum_;
  std::size_t step_ = 0;
  std::size_t clips_ = 0;
  double cumulative_loss_ = 0.0;
};

static_assert(online_convex_optimizer<Ogd>);

/// Regret of a run given the exact sequence of losses that was fed to it.
inline double realized_regret(const Ogd& state, std::span<const LinearLoss> losses) {
  std::vector<double> total(state.domain().dim(), 0.0);
  for (const auto& l : losses) {
    if (l.coeff.size() != total.size()) throw invalid_input("realized_regret: dimension mismatch");
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += l.coeff[i];
  }
  return state.cumulative_loss() - best_fixed_loss(state.domain(), total);
}

}  // namespace agboost
