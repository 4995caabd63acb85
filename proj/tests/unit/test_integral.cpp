#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "linesum/error.hpp"
#include "linesum/exact.hpp"
#include "linesum/integral.hpp"
#include "linesum/numeric.hpp"
#include "linesum/saddle.hpp"

using namespace linesum;

namespace {

double identity_product(const MarginPair& mp, const IntegrationOptions& opts, double* err = nullptr) {
  const auto sol = solve_saddle(mp);
  const double P = std::exp(log_prefactor(sol, mp).value());
  const auto I = integrate_I(mp, sol, opts);
  if (err) *err = P * I.error_estimate;
  return P * I.value.real();
}

IntegrationOptions trapezoid(std::uint64_t nodes) {
  IntegrationOptions o;
  o.method = IntegrationMethod::Trapezoid;
  o.resolution = nodes;
  return o;
}

IntegrationOptions monte_carlo(std::uint64_t samples, std::uint64_t seed, int threads = 1) {
  IntegrationOptions o;
  o.method = IntegrationMethod::MonteCarlo;
  o.resolution = samples;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST(Integrand, OriginIsOne) {
  const auto mp = MarginPair::make({2, 1}, {1, 1, 1});
  const auto sol = solve_saddle(mp);
  const std::vector<double> th(2, 0.0), ph(3, 0.0);
  const auto F = integrand_F(th, ph, sol, mp);
  EXPECT_NEAR(F.real(), 1.0, 1e-15);
  EXPECT_NEAR(F.imag(), 0.0, 1e-15);
}

TEST(Integrand, ModulusConjugationAndDirectProduct) {
  const auto mp = MarginPair::make({3, 2, 2}, {2, 2, 2, 1});
  const auto sol = solve_saddle(mp);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> th(3), ph(4), nth(3), nph(4);
    for (int j = 0; j < 3; ++j) nth[j] = -(th[j] = ang(rng));
    for (int k = 0; k < 4; ++k) nph[k] = -(ph[k] = ang(rng));
    const auto F = integrand_F(th, ph, sol, mp);
    EXPECT_LE(std::abs(F), 1.0 + 1e-14);
    const auto G = integrand_F(nth, nph, sol, mp);
    EXPECT_NEAR(G.real(), F.real(), 1e-13);
    EXPECT_NEAR(G.imag(), -F.imag(), 1e-13);

    std::complex<double> direct = 1.0;
    double phase = 0.0;
    for (int j = 0; j < 3; ++j) {
      phase += mp.s()[j] * th[j];
      for (int k = 0; k < 4; ++k) {
        direct *= 1.0 + sol.lambda_jk(j, k) * (std::polar(1.0, th[j] + ph[k]) - 1.0);
      }
    }
    for (int k = 0; k < 4; ++k) phase += mp.t()[k] * ph[k];
    direct *= std::polar(1.0, -phase);
    EXPECT_NEAR(std::abs(F - direct), 0.0, 1e-13);
  }
}

TEST(Trapezoid, FactorizedMatchesNaive) {
  for (const auto& mp : {MarginPair::make({1, 1}, {1, 1}), MarginPair::make({2, 1}, {1, 1, 1}),
                         MarginPair::make({1, 2, 1}, {2, 1, 1})}) {
    const auto sol = solve_saddle(mp);
    const int nodes = 12;
    const auto fast = integrate_I(mp, sol, trapezoid(nodes)).value;
    const auto naive = trapezoid_naive(mp, sol, nodes);
    EXPECT_NEAR(std::abs(fast - naive), 0.0, 1e-9 * std::abs(naive));
  }
}

TEST(Trapezoid, ExactIdentityTwoByTwo) {
  EXPECT_NEAR(identity_product(MarginPair::make({1, 1}, {1, 1}), trapezoid(64)), 2.0, 2e-8);
}

TEST(Trapezoid, ExactIdentityTwoByThree) {
  for (const auto& mp :
       {MarginPair::make({2, 1}, {1, 1, 1}), MarginPair::make({1, 2}, {1, 1, 1})}) {
    EXPECT_NEAR(identity_product(mp, trapezoid(48)), 3.0, 3e-6);
  }
}

TEST(Trapezoid, ExactIdentityThreeByThree) {
  for (const auto& mp : {MarginPair::make({1, 1, 1}, {1, 1, 1}),
                         MarginPair::make({2, 1, 1}, {1, 2, 1}),
                         MarginPair::make({2, 2, 1}, {2, 1, 2})}) {
    const double exact = exact_count(mp).value.get_d();
    double err = 0.0;
    EXPECT_NEAR(identity_product(mp, IntegrationOptions{}, &err), exact, 1e-8 * exact);
    EXPECT_LT(err, 1e-6 * exact);
  }
}

TEST(Trapezoid, RefinementWithinErrorEstimate) {
  const auto mp = MarginPair::make({2, 1}, {1, 1, 1});
  const auto sol = solve_saddle(mp);
  const auto coarse = integrate_I(mp, sol, trapezoid(24));
  const auto fine = integrate_I(mp, sol, trapezoid(48));
  EXPECT_LE(std::abs(fine.value - coarse.value), coarse.error_estimate + 1e-12);
  EXPECT_LT(std::abs(fine.value.imag()), fine.error_estimate + 1e-12);
  EXPECT_EQ(fine.points_or_samples, 48u * 48u * 48u * 48u * 48u);
}

TEST(Trapezoid, ResourceLimit) {
  const auto mp = MarginPair::make({1, 1, 1, 1}, {2, 2});
  const auto sol = solve_saddle(mp);
  try {
    integrate_I(MarginPair::make({1, 1, 1, 1}, {1, 1, 1, 1}),
                solve_saddle(MarginPair::make({1, 1, 1, 1}, {1, 1, 1, 1})), trapezoid(16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
  try {
    integrate_I(mp, sol, trapezoid(2000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
}

TEST(MonteCarlo, IdentityWithinThreeSigma) {
  const auto mp = MarginPair::make({1, 1, 1}, {1, 1, 1});
  double err = 0.0;
  const double v = identity_product(mp, monte_carlo(1 << 20, 11), &err);
  EXPECT_NEAR(v, 6.0, err);
  EXPECT_LT(err / 3.0 / 6.0, 1e-2);
}

TEST(MonteCarlo, DisjointSeedsAgree) {
  const auto mp = MarginPair::make({2, 1, 1}, {1, 2, 1});
  const auto sol = solve_saddle(mp);
  const auto a = integrate_I(mp, sol, monte_carlo(1 << 19, 1));
  const auto b = integrate_I(mp, sol, monte_carlo(1 << 19, 2));
  EXPECT_NE(a.value, b.value);
  const double combined = std::hypot(a.error_estimate, b.error_estimate);
  EXPECT_LE(std::abs(a.value.real() - b.value.real()), combined);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto mp = MarginPair::make({2, 1, 1}, {1, 2, 1});
  const auto sol = solve_saddle(mp);
  const auto one = integrate_I(mp, sol, monte_carlo(300000, 9, 1));
  const auto eight = integrate_I(mp, sol, monte_carlo(300000, 9, 8));
  EXPECT_EQ(one.value, eight.value);
  EXPECT_EQ(one.error_estimate, eight.error_estimate);
}

TEST(Fbnd, Endpoints) {
  EXPECT_DOUBLE_EQ(f_factor(0.125, 0.0), 1.0);
  EXPECT_NEAR(f_factor(0.125, kPi), 0.0, 1e-7);
  EXPECT_LE(f_factor(0.125, kPi), std::exp(-kPi * kPi / 8.0 + std::pow(kPi, 4) / 96.0));
}

TEST(Fbnd, SixBySixSweep) {
  const auto mp = MarginPair::make({4, 4, 3, 3, 2, 2}, {4, 4, 3, 3, 2, 2});
  const auto sol = solve_saddle(mp);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::vector<double> z(10000);
  for (auto& x : z) x = ang(rng);
  EXPECT_TRUE(fbnd_check(sol, mp, z));
}

TEST(Ibnd, HoldsOnRange) {
  const std::vector<double> cs{0.1, 1.0, 10.0, 100.0, 1e4};
  EXPECT_TRUE(ibnd_check(cs));
  const auto r100 = ibnd_evaluate(100.0);
  // Gaussian dominance: sqrt(pi/c) (1 + 7/(4c) + O(c^-2)).
  EXPECT_NEAR(r100.lhs / std::sqrt(kPi / 100.0), 1.0 + 7.0 / 400.0, 3e-3);
  const auto r1e4 = ibnd_evaluate(1e4);
  EXPECT_NEAR(r1e4.lhs / std::sqrt(kPi / 1e4), 1.0 + 7.0 / 4e4, 1e-6);
  double prev = 0.0;
  for (double c : {10.0, 100.0, 1e3, 1e4}) {
    const auto r = ibnd_evaluate(c);
    EXPECT_TRUE(r.holds);
    EXPECT_GT(r.lhs / r.rhs, prev);
    EXPECT_LT(r.lhs / r.rhs, 1.0);
    prev = r.lhs / r.rhs;
  }
}

TEST(Ibnd, RejectsNonPositive) {
  try {
    ibnd_evaluate(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}
