#include <gtest/gtest.h>

#include <cmath>

#include <gmpxx.h>

#include "linesum/asymptotic.hpp"
#include "linesum/cli.hpp"
#include "linesum/error.hpp"
#include "linesum/exact.hpp"
#include "linesum/numeric.hpp"

using namespace linesum;

namespace {

double exact_log_binom(unsigned long n, unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return log_of(b);
}

}  // namespace

TEST(Estimate, FourByFourHalf) {
  const auto est = estimate_log_count(MarginPair::make({2, 2, 2, 2}, {2, 2, 2, 2}));
  EXPECT_NEAR(est.log_value, 8 * std::log(6.0) - std::log(12870.0) - 0.5, 1e-12);
  EXPECT_NEAR(std::exp(est.log_value), 79.156, 1e-3);
  EXPECT_DOUBLE_EQ(est.log_E, -0.5);
}

TEST(Estimate, DecompositionIdentity) {
  const auto mp = MarginPair::make({4, 3, 3, 2, 1}, {3, 3, 2, 2, 2, 1});
  const auto est = estimate_log_count(mp);
  EXPECT_NEAR(est.log_value, est.log_N + est.log_P1 + est.log_P2 + est.log_E, 1e-12);
  EXPECT_DOUBLE_EQ(est.log_E, est.E_exponent);
}

TEST(Estimate, TranspositionAndPermutationInvariant) {
  const auto mp = MarginPair::make({4, 3, 3, 2, 1}, {3, 3, 2, 2, 2, 1});
  const double v = estimate_log_count(mp).log_value;
  EXPECT_NEAR(estimate_log_count(mp.transposed()).log_value, v, 1e-12);
  EXPECT_NEAR(estimate_log_count(MarginPair::make({1, 2, 3, 3, 4}, {1, 2, 3, 2, 3, 2})).log_value,
              v, 1e-12);
}

TEST(Estimate, EVanishesWhenRMatchesTwoAmn) {
  // m = 2, n = 4, s = (3,1): lambda = 1/2, A = 1/8, R = 2 = 2 A m n.
  const auto est = estimate_log_count(MarginPair::make({3, 1}, {1, 1, 1, 1}));
  EXPECT_NEAR(est.log_E, 0.0, 1e-15);
}

TEST(Estimate, DegenerateDensityThrows) {
  try {
    estimate_log_count(MarginPair::make({2, 2}, {2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateDensity);
  }
}

TEST(Estimate, TrendAndUpperBound) {
  double prev = 1e9;
  for (int n : {6, 8, 10, 12}) {
    const std::vector<int> v(n, n / 2);
    const auto mp = MarginPair::make(v, v);
    const double log_exact = log_of(exact_count(mp).value);
    const auto est = estimate_log_count(mp);
    const double err = std::abs(est.log_value - log_exact);
    EXPECT_LT(err, prev) << "n=" << n;
    prev = err;
    EXPECT_LE(log_exact, est.log_N + est.log_P1 + est.log_P2);
  }
}

TEST(LogBinomial, MatchesExact) {
  EXPECT_NEAR(log_binomial(100, 50), exact_log_binom(100, 50), 1e-11);
  EXPECT_NEAR(log_binomial(10000, 3000), exact_log_binom(10000, 3000), 1e-8);
  EXPECT_EQ(log_binomial(7, 0), 0.0);
}

TEST(Stirling, MatchesExactLogBinomial) {
  EXPECT_NEAR(stirling_binom(100, 0.5, 0.0), exact_log_binom(100, 50), 1e-5);
  EXPECT_NEAR(stirling_binom(10000, 0.3, 0.0), exact_log_binom(10000, 3000), 1e-9);
  EXPECT_NEAR(stirling_binom(1000000, 0.3, 1e-4), exact_log_binom(1000000, 300100), 1e-6);
}

TEST(Stirling, SymmetricInXAtZeroShift) {
  EXPECT_NEAR(stirling_binom(500, 0.3, 0.0), stirling_binom(500, 0.7, 0.0), 1e-12);
}

TEST(Stirling, DomainErrors) {
  for (auto bad : {std::tuple<std::int64_t, double, double>{100, 0.0, 0.1},
                   {100, 0.5, 0.6}, {0, 0.5, 0.0}}) {
    try {
      stirling_binom(std::get<0>(bad), std::get<1>(bad), std::get<2>(bad));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DomainError);
    }
  }
}
