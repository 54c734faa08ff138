#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace agboost {

// Bad arguments: non-finite values, empty inputs, mismatched lengths.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An API was driven out of order (update before predict, exhausted horizon).
struct protocol_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Components wired together in a way the guarantees do not cover.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct unsupported_size : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A pluggable component returned something outside its declared contract.
struct contract_violation : std::logic_error {
  using std::logic_error::logic_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure inside a boosting round; carries the 1-based round index.
class round_error : public std::runtime_error {
 public:
  round_error(std::size_t round, const std::string& what)
      : std::runtime_error("round " + std::to_string(round) + ": " + what), round_(round) {}

  std::size_t round() const noexcept { return round_; }

 private:
  std::size_t round_;
};

// A run inside a multi-seed experiment failed; carries the seed.
class experiment_error : public std::runtime_error {
 public:
  experiment_error(std::uint64_t seed, const std::string& what)
      : std::runtime_error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace agboost
