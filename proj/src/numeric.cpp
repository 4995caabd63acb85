#include "linesum/numeric.hpp"

#include <cmath>

#include "linesum/error.hpp"

namespace linesum {

double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) {
    throw Error(ErrorKind::DomainError, "log_binomial requires 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  const long double nn = static_cast<long double>(n);
  const long double kk = static_cast<long double>(k);
  return static_cast<double>(std::lgamma(nn + 1.0L) - std::lgamma(kk + 1.0L) -
                             std::lgamma(nn - kk + 1.0L));
}

}  // namespace linesum
