#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "linesum/core.hpp"
#include "linesum/saddle.hpp"

namespace linesum {

enum class IntegrationMethod { Trapezoid, MonteCarlo };

const char* to_string(IntegrationMethod method);

struct IntegralEstimate {
  std::complex<double> value;
  IntegrationMethod method = IntegrationMethod::Trapezoid;
  std::uint64_t points_or_samples = 0;
  /// Trapezoid: |I_M - I_{M/2}| floored at the rounding level. MC: 3 sigma.
  double error_estimate = 0.0;
};

struct IntegrationOptions {
  IntegrationMethod method = IntegrationMethod::Trapezoid;
  /// Nodes per angle (trapezoid) or number of samples (MC); 0 picks the default.
  std::uint64_t resolution = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// F(theta, phi) = prod_jk (1 + lambda_jk (e^{i(theta_j+phi_k)} - 1))
///                 / exp(i sum s_j theta_j + i sum t_k phi_k),
/// accumulated as a complex logarithm.
std::complex<double> integrand_F(std::span<const double> theta, std::span<const double> phi,
                                 const SaddleSolution& sol, const MarginPair& mp);

/// Default trapezoid nodes per angle: 64 for m+n <= 4, 48 for 5, 32 for 6.
std::uint64_t default_trapezoid_nodes(int dims);

/// I(s,t) over the torus [-pi,pi)^(m+n). Trapezoid needs m+n <= 6, MC m+n <= 12.
IntegralEstimate integrate_I(const MarginPair& mp, const SaddleSolution& sol,
                             const IntegrationOptions& opts);

/// Node-by-node product-rule sum with `nodes` per angle. Reference path for
/// tests; cost is nodes^(m+n) integrand evaluations.
std::complex<double> trapezoid_naive(const MarginPair& mp, const SaddleSolution& sol,
                                     int nodes);

/// f_jk(z) = sqrt(1 - 4 A_jk (1 - cos z)).
double f_factor(double A_jk, double z);

/// Checks f_jk(z) <= exp(-A_jk z^2 + A_jk z^4 / 12) for all samples and all
/// (j,k), and |F| = prod f_jk(theta_j + phi_k) on `angle_checks` random tuples.
bool fbnd_check(const SaddleSolution& sol, const MarginPair& mp,
                std::span<const double> z_samples, int angle_checks = 256,
                std::uint64_t seed = 1);

struct IbndResult {
  double c = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// integral_{-8pi/75}^{8pi/75} exp(c(-x^2 + 7x^4/3)) dx <= sqrt(pi/c) exp(3/c).
IbndResult ibnd_evaluate(double c);
bool ibnd_check(std::span<const double> c_values);

}  // namespace linesum
