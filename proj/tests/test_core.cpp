#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "agboost/core.hpp"
#include "agboost/harness.hpp"
#include "agboost/rng.hpp"

using namespace agboost;

namespace {

std::vector<Label> labels(std::initializer_list<int> v) {
  std::vector<Label> out;
  for (int x : v) out.push_back(Label::from_int(x));
  return out;
}

ExpertPool<Stump> constant_pool() {
  return ExpertPool<Stump>({Stump::constant(Label::plus(), 0), Stump::constant(Label::minus(), 1)});
}

}  // namespace

TEST(Label, OnlyPlusMinusOne) {
  EXPECT_EQ(Label::from_int(1).value(), 1);
  EXPECT_EQ(Label::from_int(-1).value(), -1);
  EXPECT_THROW(Label::from_int(0), invalid_input);
  EXPECT_THROW(Label::from_int(2), invalid_input);
  EXPECT_EQ((-Label::plus()).value(), -1);
  EXPECT_EQ(Label::minus() * Label::minus(), 1);
}

TEST(Label, SignOfZeroIsPlus) {
  EXPECT_EQ(sign_of(0.0), Label::plus());
  EXPECT_EQ(sign_of(-0.0), Label::plus());
  EXPECT_EQ(sign_of(-1e-300), Label::minus());
}

TEST(Vote, OutsideUnitIntervalIsDeterministicAndDrawless) {
  RngStream rng(1, 0);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(vote_project(1.5, rng), Label::plus());
  EXPECT_EQ(vote_project(-1.0, rng), Label::minus());
  EXPECT_EQ(vote_project(1.0, rng), Label::plus());
  EXPECT_EQ(rng.draws(), 0u);
  vote_project(0.2, rng);
  EXPECT_EQ(rng.draws(), 1u);
}

TEST(Vote, ZeroIsAFairCoin) {
  RngStream rng(2, 0);
  const int n = 100000;
  long long plus = 0;
  for (int k = 0; k < n; ++k) plus += vote_project(0.0, rng) == Label::plus();
  EXPECT_NEAR(static_cast<double>(plus) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(Vote, HalfHasMeanHalf) {
  RngStream rng(3, 0);
  const int n = 100000;
  long long sum = 0;
  for (int k = 0; k < n; ++k) sum += vote_project(0.5, rng).value();
  EXPECT_NEAR(static_cast<double>(sum) / n, 0.5, 0.0064);
}

TEST(Vote, NonFiniteRejected) {
  RngStream rng(1, 0);
  EXPECT_THROW(vote_project(std::nan(""), rng), invalid_input);
  EXPECT_THROW(vote_project(std::numeric_limits<double>::infinity(), rng), invalid_input);
  EXPECT_THROW(vote_expectation(std::nan("")), invalid_input);
}

TEST(Vote, ExpectationIsClamp) {
  EXPECT_DOUBLE_EQ(vote_expectation(0.3), 0.3);
  EXPECT_DOUBLE_EQ(vote_expectation(-7.0), -1.0);
  EXPECT_DOUBLE_EQ(vote_expectation(1.0), 1.0);
}

TEST(VoteProperty, RangeIsPlusMinusOne) {
  RngStream zs(4, 0), rng(4, 1);
  for (int k = 0; k < 20000; ++k) {
    const double z = (zs.uniform() - 0.5) * 10.0;
    const int v = vote_project(z, rng).value();
    ASSERT_TRUE(v == 1 || v == -1);
  }
}

TEST(VoteProperty, UnbiasedOnGrid) {
  const int n = 100000;
  const double tol = 4.0 * std::sqrt(1.0 / (4.0 * n));
  std::uint64_t stream = 0;
  for (int k = -8; k <= 8; ++k) {
    const double z = 0.25 * k;
    RngStream rng(99, stream++);
    long long sum = 0;
    for (int i = 0; i < n; ++i) sum += vote_project(z, rng).value();
    EXPECT_NEAR(static_cast<double>(sum) / n, std::clamp(z, -1.0, 1.0), tol) << "z = " << z;
  }
}

// p (hy - 1) >= hy - 1 on [-1, 1].
TEST(LossBounds, RelabelLowerBoundExhaustive) {
  for (int hy : {-1, 1})
    for (int k = 0; k <= 200; ++k) {
      const double p = -1.0 + 2.0 * k / 200.0;
      EXPECT_GE(p * (hy - 1), hy - 1) << "p = " << p << " hy = " << hy;
    }
}

// Some p in {0, 1} has p (s y - 1) <= clamp(s) y - 1.
TEST(LossBounds, ProjectionGrid) {
  for (int k = 0; k <= 240; ++k) {
    const double s = -3.0 + 6.0 * k / 240.0;
    for (int y : {-1, 1}) {
      const double rhs = vote_expectation(s) * y - 1.0;
      const bool zero_works = 0.0 <= rhs + 1e-12;
      const bool one_works = s * y - 1.0 <= rhs + 1e-12;
      EXPECT_TRUE(zero_works || one_works) << "s = " << s << " y = " << y;
    }
  }
}

TEST(Correlation, Examples) {
  EXPECT_DOUBLE_EQ(correlation(labels({1, 1}), labels({1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(correlation(labels({1, -1}), labels({1, 1})), 0.0);
  EXPECT_DOUBLE_EQ(correlation(labels({-1, -1, -1, 1}), labels({1, 1, 1, 1})), -0.5);
  EXPECT_THROW(correlation(labels({1}), labels({1, 1})), invalid_input);
  EXPECT_THROW(correlation(labels({}), labels({})), invalid_input);
}

TEST(Stump, PredictsByThreshold) {
  const Stump s(0.5, Label::plus(), 7);
  EXPECT_EQ(s.predict(0.5), Label::plus());
  EXPECT_EQ(s.predict(0.49), Label::minus());
  const Stump n(0.5, Label::minus(), 8);
  EXPECT_EQ(n.predict(0.7), Label::minus());
  const auto c = Stump::constant(Label::minus(), 3);
  EXPECT_EQ(c.predict(-1e300), Label::minus());
  EXPECT_TRUE(c.is_constant());
}

TEST(ExpertPool, RejectsEmptyAndDuplicateIds) {
  EXPECT_THROW(ExpertPool<Stump>(std::vector<Stump>{}), invalid_input);
  EXPECT_THROW(ExpertPool<Stump>({Stump(0.1, Label::plus(), 1), Stump(0.2, Label::plus(), 1)}), invalid_input);
}

TEST(ThresholdPool, SixtyFourSignedStumps) {
  const auto grid = threshold_grid(32);
  ASSERT_EQ(grid.size(), 32u);
  EXPECT_DOUBLE_EQ(grid[16], 0.5);
  const auto pool = make_threshold_pool(grid);
  EXPECT_EQ(pool.size(), 64u);
  std::set<std::uint64_t> ids;
  for (const auto& h : pool) ids.insert(h.id());
  EXPECT_EQ(ids.size(), 64u);
}

TEST(BestInHindsight, ConstantLabels) {
  LabeledSequence seq(10, {0.3, Label::plus()});
  const auto best = best_in_hindsight(constant_pool(), seq);
  EXPECT_EQ(best.expert.id(), 0u);
  EXPECT_DOUBLE_EQ(best.gain, 10.0);
}

TEST(BestInHindsight, AlternatingTieGoesToSmallestId) {
  LabeledSequence seq;
  for (int t = 0; t < 10; ++t) seq.push_back({0.3, t % 2 == 0 ? Label::plus() : Label::minus()});
  const auto best = best_in_hindsight(constant_pool(), seq);
  EXPECT_EQ(best.expert.id(), 0u);
  EXPECT_DOUBLE_EQ(best.gain, 0.0);
  // reversed member order must not change the winner
  const ExpertPool<Stump> reversed({Stump::constant(Label::minus(), 1), Stump::constant(Label::plus(), 0)});
  EXPECT_EQ(best_in_hindsight(reversed, seq).expert.id(), 0u);
}

// Second scan written from scratch: thresholds j/32, both signs.
TEST(BestInHindsight, MatchesIndependentScanOnNoisyThreshold) {
  const auto seq = generate_sequence(parse_adversary("noisy-threshold:0.2", 3000, 5));
  double best = -1e18;
  for (int j = 0; j < 32; ++j)
    for (int s : {1, -1}) {
      double g = 0.0;
      for (const auto& ex : seq) g += (ex.x >= j / 32.0 ? s : -s) * ex.y.value();
      best = std::max(best, g);
    }
  const auto pool = make_threshold_pool(threshold_grid(32));
  EXPECT_DOUBLE_EQ(best_in_hindsight(pool, seq).gain, best);
}

TEST(BestInHindsight, PrefixMatchesPerPrefixScan) {
  const auto seq = generate_sequence(parse_adversary("drifting-threshold:37", 200, 8));
  const auto pool = make_threshold_pool(threshold_grid(8));
  const auto prefix = best_in_hindsight_prefix(pool, seq);
  ASSERT_EQ(prefix.size(), seq.size());
  for (std::size_t t = 0; t < seq.size(); t += 13)
    EXPECT_DOUBLE_EQ(prefix[t], best_in_hindsight(pool, std::span(seq).first(t + 1)).gain);
}

TEST(Rng, SameSeedAndStreamGiveSameOutput) {
  RngStream a(42, 7), b(42, 7);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.bits(), b.bits());
  EXPECT_EQ(a.draws(), 1000u);
}

TEST(Rng, StreamsAndSeedsDiffer) {
  RngStream a(42, 7), b(42, 8), c(43, 7);
  int same_b = 0, same_c = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a.bits();
    same_b += x == b.bits();
    same_c += x == c.bits();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(Rng, UniformAndIndexRanges) {
  RngStream rng(5, 5);
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    ASSERT_LT(rng.index(7), 7u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Rng, StreamIdLayout) {
  const StreamIds ids{10};
  EXPECT_EQ(ids.weak(1), 1u);
  EXPECT_EQ(ids.weak(10), 10u);
  EXPECT_EQ(ids.relabel(), 11u);
  EXPECT_EQ(ids.vote(), 12u);
  EXPECT_GT(StreamIds::data(), 1'000'000'000u);
}
