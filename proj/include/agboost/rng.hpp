#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace agboost {

/// Seeded random stream identified by (seed, stream id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// the standard specifies bit-exactly, and every variate is derived from raw
/// engine output by hand instead of through the implementation-defined
/// <random> distributions. Output is therefore identical across toolchains.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  /// Number of variates drawn so far. Every public draw counts as one.
  std::uint64_t draws() const noexcept { return draws_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(k, n - 1);
  }

  std::uint64_t bits() {
    ++draws_;
    return engine_();
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
};

/// Stream-id assignment for one experiment with n weak learners.
///
/// Weak learner i (1-based) owns stream i, relabeling/pass coins own n + 1,
/// the randomized vote owns n + 2. Data generation uses a fixed id so that the
/// generated sequence does not depend on n.
struct StreamIds {
  std::uint64_t n_weak;

  std::uint64_t weak(std::uint64_t i) const noexcept { return i; }
  std::uint64_t relabel() const noexcept { return n_weak + 1; }
  std::uint64_t vote() const noexcept { return n_weak + 2; }
  static constexpr std::uint64_t data() noexcept { return std::numeric_limits<std::uint64_t>::max(); }
};

}  // namespace agboost
