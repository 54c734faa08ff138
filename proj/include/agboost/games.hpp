#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "agboost/errors.hpp"
#include "agboost/oco.hpp"
#include "agboost/rng.hpp"

namespace agboost {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ == 0 || cols_ == 0) throw invalid_input("matrix: empty dimension");
    if (data_.size() != rows_ * cols_) throw invalid_input("matrix: data size does not match shape");
    for (double v : data_)
      if (!std::isfinite(v)) throw invalid_input("matrix: non-finite entry");
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw invalid_input("matrix: no rows");
    std::vector<double> data;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw invalid_input("matrix: ragged rows");
      data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), rows.front().size(), std::move(data));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  /// A q
  std::vector<double> times(std::span<const double> q) const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * q[j];
    return out;
  }

  /// A^T p
  std::vector<double> transpose_times(std::span<const double> p) const {
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[j] += (*this)(i, j) * p[i];
    return out;
  }

  double max_column_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j) * (*this)(i, j);
      best = std::max(best, std::sqrt(s));
    }
    return best;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Whitespace-separated numbers, one matrix row per line. Blank lines and
/// lines starting with '#' are skipped.
inline Matrix parse_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw invalid_input("matrix line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

/// Bilinear zero-sum game g(p, q) = p^T A q. Player A minimizes over a box;
/// player B maximizes over the simplex, and may play improperly in
/// K_B' = {q >= 0 : 1 <= sum q <= improper_scale}.
struct MatrixGame {
  Matrix payoff;
  BoxDomain player_a;
  double improper_scale = 1.0;

  MatrixGame(Matrix a, BoxDomain box, double scale = 1.0)
      : payoff(std::move(a)), player_a(std::move(box)), improper_scale(scale) {
    if (player_a.dim() != payoff.rows()) throw invalid_input("game: box dimension must equal row count");
    if (!(improper_scale >= 1.0)) throw invalid_input("game: improper scale must be >= 1");
  }

  double value(std::span<const double> p, std::span<const double> q) const {
    const auto aq = payoff.times(q);
    double s = 0.0;
    for (std::size_t i = 0; i < aq.size(); ++i) s += p[i] * aq[i];
    return s;
  }

  /// min over the box of p^T A q; a linear function on a box is minimized at a vertex.
  double min_over_a(std::span<const double> q) const {
    const auto aq = payoff.times(q);
    double s = 0.0;
    for (std::size_t i = 0; i < aq.size(); ++i)
      s += std::min(player_a.lower()[i] * aq[i], player_a.upper()[i] * aq[i]);
    return s;
  }

  bool in_improper_set(std::span<const double> q, double tol = 1e-9) const {
    if (q.size() != payoff.cols()) return false;
    double mass = 0.0;
    for (double v : q) {
      if (v < -tol) return false;
      mass += v;
    }
    return mass >= 1.0 - tol && mass <= improper_scale + tol;
  }

  /// Gradient bound for player A's linear losses A q over K_B'.
  double grad_bound() const { return improper_scale * std::max(payoff.max_column_norm(), 1e-300); }
};

/// Vertex e_j maximizing (A^T p)_j; ties go to the smallest j.
inline std::vector<double> exact_best_response(const Matrix& a, std::span<const double> p) {
  const auto v = a.transpose_times(p);
  std::size_t best = 0;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (v[j] > v[best]) best = j;
  std::vector<double> e(v.size(), 0.0);
  e[best] = 1.0;
  return e;
}

enum class OracleKind { exact, noisy };

/// Best-response oracle for player B.
///
/// exact: the best vertex, scaled up to improper_scale when its payoff is
/// non-negative (an improper response never worse than the proper one).
/// noisy: with probability eps0 / gap returns the worst vertex instead, where
/// gap is the best-minus-worst payoff, so the expected shortfall is at most eps0.
struct OracleSpec {
  OracleKind kind = OracleKind::exact;
  double eps0 = 0.0;
  double improper_scale = 1.0;
};

inline std::vector<double> oracle_response(const Matrix& a, const OracleSpec& spec, std::span<const double> p,
                                           RngStream& rng) {
  const auto v = a.transpose_times(p);
  std::size_t best = 0;
  std::size_t worst = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] > v[best]) best = j;
    if (v[j] < v[worst]) worst = j;
  }
  std::size_t pick = best;
  if (spec.kind == OracleKind::noisy && spec.eps0 > 0.0) {
    const double gap = v[best] - v[worst];
    const double prob = gap <= spec.eps0 ? 1.0 : spec.eps0 / gap;
    if (rng.uniform() < prob) pick = worst;
  }
  std::vector<double> q(v.size(), 0.0);
  q[pick] = v[pick] >= 0.0 ? spec.improper_scale : 1.0;
  return q;
}

struct GameSolution {
  std::vector<double> average_q;
  std::vector<std::vector<double>> plays_a;
  std::vector<std::vector<double>> plays_b;
  double oco_regret_bound = 0.0;
  double oco_regret = 0.0;
  std::size_t clip_events = 0;
};

/// Callable oracle: q = oracle(p, rng).
template <class F>
concept response_oracle = requires(F f, std::span<const double> p, RngStream& rng) {
  { f(p, rng) } -> std::convertible_to<std::vector<double>>;
};

/// T rounds: A plays its OCO iterate, B answers with the oracle, A is fed
/// the linear loss p -> <A q_t, p>. Returns B's average strategy.
template <online_convex_optimizer Oco = Ogd, response_oracle Oracle>
GameSolution solve_improper_game(const MatrixGame& game, Oracle&& oracle, std::size_t rounds, std::uint64_t seed) {
  if (rounds < 1) throw invalid_input("solve_improper_game: need at least one round");
  Oco oco(game.player_a, rounds, game.grad_bound(), game.player_a.center());
  RngStream rng(seed, 0);

  GameSolution sol;
  sol.average_q.assign(game.payoff.cols(), 0.0);
  sol.plays_a.reserve(rounds);
  sol.plays_b.reserve(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    const auto p_span = oco.next();
    std::vector<double> p(p_span.begin(), p_span.end());
    std::vector<double> q = oracle(std::span<const double>(p), rng);
    if (!game.in_improper_set(q))
      throw contract_violation("round " + std::to_string(t + 1) + ": oracle output outside the improper strategy set");
    oco.update(game.payoff.times(q));
    for (std::size_t j = 0; j < q.size(); ++j) sol.average_q[j] += q[j];
    sol.plays_a.push_back(std::move(p));
    sol.plays_b.push_back(std::move(q));
  }
  for (double& v : sol.average_q) v /= static_cast<double>(rounds);
  sol.oco_regret_bound = ogd_regret_bound(game.grad_bound(), game.player_a.diameter(), rounds);
  sol.clip_events = oco.clip_count();
  if constexpr (requires { oco.regret(); }) sol.oco_regret = oco.regret();
  return sol;
}

template <online_convex_optimizer Oco = Ogd>
GameSolution solve_improper_game(const MatrixGame& game, const OracleSpec& spec, std::size_t rounds,
                                 std::uint64_t seed) {
  return solve_improper_game<Oco>(
      game, [&](std::span<const double> p, RngStream& rng) { return oracle_response(game.payoff, spec, p, rng); },
      rounds, seed);
}

struct GridValue {
  double value;        // lower estimate of the game value
  double error_bound;  // value <= true value <= value + error_bound
};

namespace detail {

template <class F>
void for_each_simplex_point(std::size_t dim, std::size_t units, F&& f) {
  std::vector<std::size_t> counts(dim, 0);
  std::vector<double> q(dim, 0.0);
  const double h = 1.0 / static_cast<double>(units);
  auto rec = [&](auto& self, std::size_t j, std::size_t left) -> void {
    if (j + 1 == dim) {
      counts[j] = left;
      for (std::size_t k = 0; k < dim; ++k) q[k] = static_cast<double>(counts[k]) * h;
      f(std::span<const double>(q));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[j] = c;
      self(self, j + 1, left - c);
    }
  };
  rec(rec, 0, units);
}

}  // namespace detail

/// Max over a simplex grid of q of the min over player A's box.
///
/// resolution is the number of grid points per simplex edge (spacing
/// h = 1 / (resolution - 1)). Every simplex point lies within h of a grid
/// point in the max norm, so the true value exceeds the grid value by at most
/// h * sum_ij |A_ij| max(|lo_i|, |hi_i|).
inline GridValue game_value_grid(const MatrixGame& game, std::size_t resolution) {
  const auto& a = game.payoff;
  if (a.rows() > 4 || a.cols() > 4) throw unsupported_size("game_value_grid: at most 4x4 games");
  if (resolution < 11) throw invalid_input("game_value_grid: resolution must be at least 11");
  const std::size_t units = resolution - 1;
  double best = -std::numeric_limits<double>::infinity();
  detail::for_each_simplex_point(a.cols(), units, [&](std::span<const double> q) {
    best = std::max(best, game.min_over_a(q));
  });
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double pmax = std::max(std::abs(game.player_a.lower()[i]), std::abs(game.player_a.upper()[i]));
    for (std::size_t j = 0; j < a.cols(); ++j) lipschitz += std::abs(a(i, j)) * pmax;
  }
  return {best, lipschitz / static_cast<double>(units)};
}

struct Certificate {
  double min_payoff = 0.0;   // min over A's box of g(p, q_bar)
  double value_estimate = 0.0;
  double grid_error = 0.0;
  double oco_term = 0.0;     // R_A(T) / T
  double eps0 = 0.0;
  double threshold = 0.0;    // value_estimate - oco_term - eps0 - grid_error
  double margin = 0.0;       // min_payoff - threshold
  bool pass = false;
};

/// Checks min_p g(p, q_bar) >= value - R_A(T)/T - eps0 - grid error.
inline Certificate certify_solution(const MatrixGame& game, std::span<const double> q_bar, std::size_t rounds,
                                    double eps0, std::size_t resolution = 201) {
  Certificate c;
  const GridValue gv = game_value_grid(game, resolution);
  c.min_payoff = game.min_over_a(q_bar);
  c.value_estimate = gv.value;
  c.grid_error = gv.error_bound;
  c.oco_term = ogd_regret_bound(game.grad_bound(), game.player_a.diameter(), rounds) / static_cast<double>(rounds);
  c.eps0 = eps0;
  c.threshold = c.value_estimate - c.oco_term - c.eps0 - c.grid_error;
  c.margin = c.min_payoff - c.threshold;
  c.pass = c.margin >= 0.0;
  return c;
}

}  // namespace agboost
