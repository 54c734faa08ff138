#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "agboost/games.hpp"

using namespace agboost;

namespace {

MatrixGame pennies(double scale = 1.0) {
  return MatrixGame(Matrix::from_rows({{1.0, -1.0}}), BoxDomain({-1.0}, {1.0}), scale);
}

MatrixGame random_game(std::uint64_t seed, std::size_t m, std::size_t n, double lo = -1.0, double hi = 1.0) {
  RngStream rng(seed, 0);
  std::vector<double> a(m * n);
  for (auto& v : a) v = 2.0 * rng.uniform() - 1.0;
  return MatrixGame(Matrix(m, n, a), BoxDomain::cube(m, lo, hi));
}

// Value of a 2-column box game: maximize the concave piecewise-linear
// f(s) = sum_i min(lo_i a_i(s), hi_i a_i(s)), a_i(s) = A_i0 s + A_i1 (1 - s),
// over its breakpoints in [0, 1].
double two_column_value(const MatrixGame& g) {
  std::vector<double> cand{0.0, 1.0};
  for (std::size_t i = 0; i < g.payoff.rows(); ++i) {
    const double a = g.payoff(i, 0), b = g.payoff(i, 1);
    if (a != b) {
      const double s = b / (b - a);
      if (s > 0.0 && s < 1.0) cand.push_back(s);
    }
  }
  double best = -1e300;
  for (double s : cand) {
    double f = 0.0;
    for (std::size_t i = 0; i < g.payoff.rows(); ++i) {
      const double v = g.payoff(i, 0) * s + g.payoff(i, 1) * (1.0 - s);
      f += std::min(g.player_a.lower()[i] * v, g.player_a.upper()[i] * v);
    }
    best = std::max(best, f);
  }
  return best;
}

// Literal grid search: simplex grid for q, full box grid for p.
double literal_grid_value(const MatrixGame& g, std::size_t res) {
  const std::size_t m = g.payoff.rows(), n = g.payoff.cols(), u = res - 1;
  std::vector<std::vector<double>> ps{{}};
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::vector<double>> next;
    for (const auto& p : ps)
      for (std::size_t k = 0; k <= u; ++k) {
        auto q = p;
        q.push_back(g.player_a.lower()[i] + (g.player_a.upper()[i] - g.player_a.lower()[i]) * k / u);
        next.push_back(q);
      }
    ps = next;
  }
  double best = -1e300;
  std::vector<std::size_t> c(n, 0);
  auto rec = [&](auto& self, std::size_t j, std::size_t left) -> void {
    if (j + 1 == n) {
      c[j] = left;
      std::vector<double> q(n);
      for (std::size_t k = 0; k < n; ++k) q[k] = static_cast<double>(c[k]) / u;
      double inner = 1e300;
      for (const auto& p : ps) inner = std::min(inner, g.value(p, q));
      best = std::max(best, inner);
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      c[j] = k;
      self(self, j + 1, left - k);
    }
  };
  rec(rec, 0, u);
  return best;
}

}  // namespace

TEST(BestResponse, Examples) {
  const auto id = Matrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_EQ(exact_best_response(id, std::vector<double>{1.0, 0.0}), (std::vector<double>{1.0, 0.0}));
  const auto mp = Matrix::from_rows({{1, -1}, {-1, 1}});
  EXPECT_EQ(exact_best_response(mp, std::vector<double>{1.0, 1.0}), (std::vector<double>{1.0, 0.0}));
}

TEST(BestResponse, MatchesColumnScan) {
  RngStream rng(3, 1);
  for (int k = 0; k < 500; ++k) {
    const auto g = random_game(100 + k, 3, 3);
    std::vector<double> p(3);
    for (auto& v : p) v = 2.0 * rng.uniform() - 1.0;
    const auto q = exact_best_response(g.payoff, p);
    double best = -1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < 3; ++i) v += p[i] * g.payoff(i, j);
      if (v > best) best = v, arg = j;
    }
    ASSERT_DOUBLE_EQ(q[arg], 1.0);
  }
}

TEST(Solve, OneRoundIsBestResponseToCenter) {
  const auto g = random_game(5, 3, 3);
  const auto sol = solve_improper_game(g, OracleSpec{}, 1, 1);
  EXPECT_EQ(sol.average_q, exact_best_response(g.payoff, g.player_a.center()));
}

TEST(Solve, PenniesCertificate) {
  const auto g = pennies();
  const std::size_t T = 10000;
  const auto sol = solve_improper_game(g, OracleSpec{}, T, 7);
  const double oco_term = ogd_regret_bound(1.0, 2.0, T) / T;
  EXPECT_GE(g.min_over_a(sol.average_q), 0.0 - oco_term);
  const auto cert = certify_solution(g, sol.average_q, T, 0.0);
  EXPECT_TRUE(cert.pass);
  EXPECT_GT(cert.margin, 0.0);
  EXPECT_NEAR(cert.value_estimate, 0.0, cert.grid_error);
}

TEST(Solve, NoiseShiftsThresholdByEps0) {
  const auto g = pennies();
  const std::size_t T = 10000;
  const auto exact = certify_solution(g, solve_improper_game(g, OracleSpec{}, T, 7).average_q, T, 0.0);
  const auto sol = solve_improper_game(g, OracleSpec{OracleKind::noisy, 0.05, 1.0}, T, 7);
  const auto noisy = certify_solution(g, sol.average_q, T, 0.05);
  EXPECT_NEAR(exact.threshold - noisy.threshold, 0.05, 1e-15);
  EXPECT_TRUE(noisy.pass);
}

TEST(Solve, NoisyOracleShortfallIsEps0) {
  // expected shortfall of the noisy oracle equals eps0 whenever the gap exceeds it
  const auto g = random_game(9, 3, 3);
  const OracleSpec spec{OracleKind::noisy, 0.05, 1.0};
  const std::vector<double> p{0.3, -0.8, 0.5};
  const auto v = g.payoff.transpose_times(p);
  const double best = *std::max_element(v.begin(), v.end());
  ASSERT_GT(best - *std::min_element(v.begin(), v.end()), 0.05);
  RngStream rng(9, 0);
  const int n = 200000;
  double shortfall = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto q = oracle_response(g.payoff, spec, p, rng);
    shortfall += best - std::inner_product(q.begin(), q.end(), v.begin(), 0.0);
  }
  EXPECT_NEAR(shortfall / n, 0.05, 4.0 * (best - *std::min_element(v.begin(), v.end())) * std::sqrt(0.05 / n));
}

TEST(Solve, OracleOutsideImproperSetIsRejected) {
  const auto g = pennies();
  auto bad = [](std::span<const double>, RngStream&) { return std::vector<double>{2.0, 0.0}; };
  EXPECT_THROW(solve_improper_game(g, bad, 5, 1), contract_violation);
  EXPECT_THROW(solve_improper_game(g, OracleSpec{OracleKind::exact, 0.0, 3.0}, 5, 1), contract_violation);
}

TEST(Solve, AverageIsConvexCombination) {
  const auto g = random_game(12, 3, 3);
  MatrixGame improper(g.payoff, g.player_a, 2.0);
  const auto sol = solve_improper_game(improper, OracleSpec{OracleKind::exact, 0.0, 2.0}, 500, 2);
  std::vector<double> avg(3, 0.0);
  for (const auto& q : sol.plays_b)
    for (std::size_t j = 0; j < 3; ++j) avg[j] += q[j] / 500.0;
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(avg[j], sol.average_q[j], 1e-12);
  EXPECT_TRUE(improper.in_improper_set(sol.average_q));
  for (const auto& p : sol.plays_a) EXPECT_TRUE(g.player_a.contains(p));
  EXPECT_EQ(sol.clip_events, 0u);
}

TEST(ValueGrid, Limits) {
  EXPECT_THROW(game_value_grid(random_game(1, 5, 2), 21), unsupported_size);
  EXPECT_THROW(game_value_grid(random_game(1, 2, 5), 21), unsupported_size);
  EXPECT_THROW(game_value_grid(random_game(1, 2, 2), 10), invalid_input);
}

TEST(ValueGrid, PenniesValueZero) {
  const auto gv = game_value_grid(pennies(), 201);
  EXPECT_NEAR(gv.value, 0.0, gv.error_bound);
}

TEST(ValueGrid, DominantColumn) {
  // column 2 strictly largest in every row, K_A = [0, 1]^3
  const MatrixGame g(Matrix::from_rows({{0.2, -0.5, 0.9}, {-0.4, -0.9, -0.1}, {0.0, 0.3, 0.6}}),
                     BoxDomain::cube(3, 0.0, 1.0));
  double scan = 1e300;
  for (int mask = 0; mask < 8; ++mask) {
    const std::vector<double> p{double(mask & 1), double((mask >> 1) & 1), double((mask >> 2) & 1)};
    scan = std::min(scan, g.value(p, std::vector<double>{0, 0, 1}));
  }
  const auto gv = game_value_grid(g, 101);
  EXPECT_NEAR(gv.value, scan, gv.error_bound);
}

TEST(ValueGrid, TwoByTwoClosedForm) {
  const MatrixGame g(Matrix::from_rows({{3, 1}, {1, 2}}), BoxDomain::cube(2, -1.0, 1.0));
  EXPECT_DOUBLE_EQ(two_column_value(g), -3.0);
  const auto gv = game_value_grid(g, 201);
  EXPECT_LE(gv.value, -3.0 + 1e-12);
  EXPECT_GE(gv.value + gv.error_bound, -3.0);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = random_game(300 + s, 1 + s % 4, 2, s % 2 ? 0.0 : -1.0, 1.0);
    const auto v = game_value_grid(r, 201);
    const double exact = two_column_value(r);
    EXPECT_LE(v.value, exact + 1e-12);
    EXPECT_GE(v.value + v.error_bound, exact);
  }
}

TEST(ValueGrid, VertexShortcutEqualsFullBoxGrid) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto g = random_game(400 + s, 2 + s % 2, 2 + (s / 2) % 2, s % 2 ? 0.0 : -1.0, 1.0);
    EXPECT_NEAR(game_value_grid(g, 11).value, literal_grid_value(g, 11), 1e-12);
  }
}

TEST(Certificate, LooseAtOneRound) {
  const auto g = random_game(77, 3, 3);
  const auto sol = solve_improper_game(g, OracleSpec{}, 1, 1);
  EXPECT_TRUE(certify_solution(g, sol.average_q, 1, 0.0).pass);
}

TEST(Certificate, CorruptedAverageFails) {
  const auto g = pennies();
  const auto cert = certify_solution(g, std::vector<double>{1.0, 0.0}, 10000, 0.0);
  EXPECT_DOUBLE_EQ(cert.min_payoff, -1.0);
  EXPECT_FALSE(cert.pass);
}

TEST(CertificateProperty, FiftyRandomGames) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto g = random_game(8000 + k, 3, 3);
    const auto exact = solve_improper_game(g, OracleSpec{}, 10000, k);
    const auto noisy = solve_improper_game(g, OracleSpec{OracleKind::noisy, 0.05, 1.0}, 10000, k);
    const auto c0 = certify_solution(g, exact.average_q, 10000, 0.0);
    const auto c1 = certify_solution(g, noisy.average_q, 10000, 0.05);
    EXPECT_TRUE(c0.pass) << "game " << k << " margin " << c0.margin;
    EXPECT_TRUE(c1.pass) << "game " << k << " margin " << c1.margin;
    EXPECT_NEAR(c0.threshold - c1.threshold, 0.05, 1e-12);
  }
}

TEST(CertificateProperty, ImproperScaleIsANoOp) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto base = random_game(8100 + k, 3, 3);
    const MatrixGame g(base.payoff, base.player_a, 3.0);
    const auto sol = solve_improper_game(g, OracleSpec{OracleKind::exact, 0.0, 3.0}, 5000, k);
    EXPECT_TRUE(g.in_improper_set(sol.average_q));
    EXPECT_TRUE(certify_solution(g, sol.average_q, 5000, 0.0).pass);
  }
}

TEST(ParseMatrix, Formats) {
  std::istringstream ok("# pennies\n1 -1\n\n-1   1\n");
  const auto m = parse_matrix(ok);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m(1, 0), -1.0);
  std::istringstream ragged("1 2\n3\n");
  EXPECT_THROW(parse_matrix(ragged), invalid_input);
  std::istringstream junk("1 x\n");
  EXPECT_THROW(parse_matrix(junk), invalid_input);
  std::istringstream empty("");
  EXPECT_THROW(parse_matrix(empty), invalid_input);
  std::istringstream inf("1 inf\n");
  EXPECT_THROW(parse_matrix(inf), invalid_input);
}

TEST(MatrixGame, Validation) {
  EXPECT_THROW(MatrixGame(Matrix::from_rows({{1, 2}}), BoxDomain::cube(2, 0, 1)), invalid_input);
  EXPECT_THROW(MatrixGame(Matrix::from_rows({{1, 2}}), BoxDomain::cube(1, 0, 1), 0.5), invalid_input);
}
