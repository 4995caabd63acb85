#pragma once

#include <cstdint>

namespace linesum {

/// log binom(n, k) through long-double log-gamma; 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

/// log(2 pi).
inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace linesum
