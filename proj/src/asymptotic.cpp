#include "linesum/asymptotic.hpp"

#include <cmath>

#include "linesum/error.hpp"
#include "linesum/numeric.hpp"

namespace linesum {

LogEstimate estimate_log_count(const MarginPair& mp) {
  const MarginStats st = compute_stats(mp);
  if (st.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  const std::int64_t cells = static_cast<std::int64_t>(st.m) * st.n;
  LogEstimate est;
  est.log_N = log_binomial(cells, mp.total());
  double rows = 0.0;
  for (int sj : mp.s()) rows += log_binomial(st.n, sj);
  double cols = 0.0;
  for (int tk : mp.t()) cols += log_binomial(st.m, tk);
  est.log_P1 = rows - est.log_N;
  est.log_P2 = cols - est.log_N;

  // 1 - R/(2Amn) and 1 - C/(2Amn) exactly before rounding.
  const mpq_class two_amn = 2 * st.A * st.m * st.n;
  const mpq_class row_factor = 1 - st.R() / two_amn;
  const mpq_class col_factor = 1 - st.C() / two_amn;
  const mpq_class exponent = -row_factor * col_factor / 2;
  est.E_exponent = exponent.get_d();
  est.log_E = est.E_exponent;
  est.log_value = est.log_N + est.log_P1 + est.log_P2 + est.log_E;
  return est;
}

double stirling_binom(std::int64_t N, double x, double d) {
  if (N <= 0 || !(x > 0.0 && x < 1.0) || !(x + d > 0.0 && x + d < 1.0)) {
    throw Error(ErrorKind::DomainError, "stirling_binom needs N > 0, 0 < x < 1, 0 < x+d < 1");
  }
  const double Nd = static_cast<double>(N);
  const double X = 0.5 * x * (1.0 - x);
  const double w = 1.0 - 2.0 * x;
  // -N [ (x+d) log x + (1-x-d) log(1-x) ] - log(2 sqrt(pi X N))
  double acc = -Nd * ((x + d) * std::log(x) + (1.0 - x - d) * std::log1p(-x)) -
               std::log(2.0) - 0.5 * std::log(kPi * X * Nd);
  acc += -(1.0 - 2.0 * X) / (24.0 * X * Nd);
  acc += -d * d * Nd / (4.0 * X);
  acc += -w * d / (4.0 * X);
  acc += (1.0 - 4.0 * X) * d * d / (16.0 * X * X);
  acc += w * d * d * d * Nd / (24.0 * X * X);
  acc += -(1.0 - 6.0 * X) * d * d * d * d * Nd / (96.0 * X * X * X);
  return acc;
}

}  // namespace linesum
