#pragma once

#include <cstdint>

#include "linesum/core.hpp"

namespace linesum {

/// log B(s,t) ~ log N + log P1 + log P2 + log E, with the O(n^-b) error dropped.
///   N  = binom(mn, lambda mn)
///   P1 = N^-1 prod_j binom(n, s_j),  P2 = N^-1 prod_k binom(m, t_k)
///   E  = exp(-1/2 (1 - R/(2Amn)) (1 - C/(2Amn)))
struct LogEstimate {
  double log_value = 0.0;
  double log_N = 0.0;
  double log_P1 = 0.0;
  double log_P2 = 0.0;
  double log_E = 0.0;
  double E_exponent = 0.0;
};

/// Throws DegenerateDensity when lambda is 0 or 1. Binomials use exact
/// log-gamma, not the Stirling series.
LogEstimate estimate_log_count(const MarginPair& mp);

/// Log of the Stirling-type expansion of binom(N, (x+d)N) with all displayed
/// correction terms and the remainder dropped. X = x(1-x)/2.
double stirling_binom(std::int64_t N, double x, double d);

}  // namespace linesum
