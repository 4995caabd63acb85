#include "linesum/integral.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "linesum/error.hpp"
#include "linesum/numeric.hpp"
#include "linesum/parallel.hpp"
#include "linesum/philox.hpp"

namespace linesum {

using cplx = std::complex<double>;

const char* to_string(IntegrationMethod method) {
  return method == IntegrationMethod::Trapezoid ? "trapezoid" : "monte_carlo";
}

cplx integrand_F(std::span<const double> theta, std::span<const double> phi,
                 const SaddleSolution& sol, const MarginPair& mp) {
  const int m = mp.m();
  const int n = mp.n();
  if (static_cast<int>(theta.size()) != m || static_cast<int>(phi.size()) != n) {
    throw Error(ErrorKind::InvalidInput, "angle vectors must have lengths m and n");
  }
  double log_mod = 0.0;
  double arg = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      const double z = theta[j] + phi[k];
      const double l = sol.lambda_jk(j, k);
      const cplx factor(1.0 + l * (std::cos(z) - 1.0), l * std::sin(z));
      const double mod = std::abs(factor);
      if (mod < 1e-15) return {0.0, 0.0};
      log_mod += std::log(mod);
      arg += std::arg(factor);
    }
  }
  for (int j = 0; j < m; ++j) arg -= mp.s()[j] * theta[j];
  for (int k = 0; k < n; ++k) arg -= mp.t()[k] * phi[k];
  return std::polar(std::exp(log_mod), arg);
}

std::uint64_t default_trapezoid_nodes(int dims) {
  if (dims <= 4) return 64;
  if (dims == 5) return 48;
  return 32;
}

namespace {

constexpr double kMaxEvaluations = 2e9;

// Trapezoid sum over the M-point grid per angle, evaluated by fixing the
// angles of the smaller side and summing each of the other side's angles
// independently (the integrand factorizes once the outer angles are fixed).
// Returns the raw sum of F over all nodes and the sum of |terms| for the
// rounding floor.
struct GridSum {
  cplx sum;
  double abs_sum = 0.0;
};

GridSum trapezoid_grid_sum(const MarginPair& mp, const SaddleSolution& sol, int M,
                           int threads) {
  const bool rows_outer = mp.m() <= mp.n();
  const int outer = rows_outer ? mp.m() : mp.n();
  const int inner = rows_outer ? mp.n() : mp.m();
  const auto& outer_sums = rows_outer ? mp.s() : mp.t();
  const auto& inner_sums = rows_outer ? mp.t() : mp.s();
  auto lam = [&](int o, int i) {
    return rows_outer ? sol.lambda_jk(o, i) : sol.lambda_jk(i, o);
  };

  // Angle of node u is -pi + 2 pi u / M; a sum of two node angles is
  // 2 pi (u + v) / M modulo 2 pi.
  std::vector<cplx> unit(M);
  for (int u = 0; u < M; ++u) unit[u] = std::polar(1.0, 2.0 * kPi * u / M);
  // factor[o][i][w] = 1 + lambda (e^{2 pi i w / M} - 1)
  std::vector<std::vector<std::vector<cplx>>> factor(
      outer, std::vector<std::vector<cplx>>(inner, std::vector<cplx>(M)));
  for (int o = 0; o < outer; ++o) {
    for (int i = 0; i < inner; ++i) {
      for (int w = 0; w < M; ++w) factor[o][i][w] = 1.0 + lam(o, i) * (unit[w] - 1.0);
    }
  }
  auto phase_table = [&](int sum) {
    std::vector<cplx> p(M);
    for (int u = 0; u < M; ++u) p[u] = std::polar(1.0, -sum * (-kPi + 2.0 * kPi * u / M));
    return p;
  };
  std::vector<std::vector<cplx>> outer_phase(outer);
  std::vector<std::vector<cplx>> inner_phase(inner);
  for (int o = 0; o < outer; ++o) outer_phase[o] = phase_table(outer_sums[o]);
  for (int i = 0; i < inner; ++i) inner_phase[i] = phase_table(inner_sums[i]);

  // Blocks are slices of the first outer index.
  std::vector<GridSum> partial(M);
  parallel_blocks(static_cast<std::size_t>(M), threads, [&](std::size_t block) {
    std::vector<int> idx(outer, 0);
    idx[0] = static_cast<int>(block);
    GridSum local;
    std::vector<cplx> inner_terms(M);
    while (true) {
      cplx head = 1.0;
      for (int o = 0; o < outer; ++o) head *= outer_phase[o][idx[o]];
      cplx prod = head;
      double abs_prod = 1.0;
      for (int i = 0; i < inner; ++i) {
        cplx acc = 0.0;
        double abs_acc = 0.0;
        for (int v = 0; v < M; ++v) {
          cplx term = inner_phase[i][v];
          for (int o = 0; o < outer; ++o) term *= factor[o][i][(idx[o] + v) % M];
          acc += term;
          abs_acc += std::abs(term);
        }
        prod *= acc;
        abs_prod *= abs_acc;
      }
      local.sum += prod;
      local.abs_sum += abs_prod;
      // Odometer over outer indices 1..outer-1.
      int pos = outer - 1;
      while (pos >= 1 && ++idx[pos] == M) idx[pos--] = 0;
      if (pos < 1) break;
    }
    partial[block] = local;
  });
  GridSum total;
  std::vector<cplx> sums(M);
  std::vector<double> abs_sums(M);
  for (int b = 0; b < M; ++b) {
    sums[b] = partial[b].sum;
    abs_sums[b] = partial[b].abs_sum;
  }
  total.sum = tree_sum(std::move(sums));
  total.abs_sum = tree_sum(std::move(abs_sums));
  return total;
}

IntegralEstimate integrate_trapezoid(const MarginPair& mp, const SaddleSolution& sol,
                                     std::uint64_t nodes, int threads) {
  const int dims = mp.m() + mp.n();
  if (dims > 6) throw Error(ErrorKind::ResourceLimit, "trapezoid quadrature limited to m+n <= 6");
  if (nodes < 2) throw Error(ErrorKind::DomainError, "need at least 2 nodes per angle");
  if (std::pow(static_cast<double>(nodes), dims) > kMaxEvaluations) {
    throw Error(ErrorKind::ResourceLimit, "trapezoid node count exceeds 2e9 evaluations");
  }
  const int M = static_cast<int>(nodes);
  const double cell = std::pow(2.0 * kPi / M, dims);
  const GridSum fine = trapezoid_grid_sum(mp, sol, M, threads);
  const GridSum coarse = trapezoid_grid_sum(mp, sol, std::max(M / 2, 1), threads);
  const cplx coarse_value = coarse.sum * std::pow(2.0 * kPi / std::max(M / 2, 1), dims);

  IntegralEstimate est;
  est.method = IntegrationMethod::Trapezoid;
  est.value = fine.sum * cell;
  est.points_or_samples = static_cast<std::uint64_t>(std::pow(static_cast<double>(M), dims));
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * fine.abs_sum * cell;
  est.error_estimate = std::max(std::abs(est.value - coarse_value), rounding);
  return est;
}

struct McPartial {
  cplx sum;
  double sq = 0.0;
};

IntegralEstimate integrate_monte_carlo(const MarginPair& mp, const SaddleSolution& sol,
                                       std::uint64_t samples, std::uint64_t seed,
                                       int threads) {
  const int m = mp.m();
  const int n = mp.n();
  const int dims = m + n;
  if (dims > 12) throw Error(ErrorKind::ResourceLimit, "Monte Carlo limited to m+n <= 12");
  if (samples < 2) throw Error(ErrorKind::DomainError, "need at least 2 samples");
  if (static_cast<double>(samples) * m * n > 4e11) {
    throw Error(ErrorKind::ResourceLimit, "Monte Carlo sample budget too large");
  }
  constexpr std::uint64_t kBlock = std::uint64_t{1} << 16;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  const auto key = Philox4x32::key_from_seed(seed);
  const int draws = (dims + 1) / 2;

  std::vector<McPartial> partial(blocks);
  parallel_blocks(static_cast<std::size_t>(blocks), threads, [&](std::size_t block) {
    const std::uint64_t lo = block * kBlock;
    const std::uint64_t hi = std::min(samples, lo + kBlock);
    std::vector<double> angles(2 * draws);
    std::vector<cplx> row_unit(m);
    std::vector<cplx> col_unit(n);
    McPartial local;
    for (std::uint64_t i = lo; i < hi; ++i) {
      for (int d = 0; d < draws; ++d) {
        const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(i),
                                         static_cast<std::uint32_t>(i >> 32),
                                         static_cast<std::uint32_t>(d), 0u};
        const auto u = Philox4x32::uniforms(ctr, key);
        angles[2 * d] = -kPi + 2.0 * kPi * u[0];
        angles[2 * d + 1] = -kPi + 2.0 * kPi * u[1];
      }
      double phase = 0.0;
      for (int j = 0; j < m; ++j) {
        row_unit[j] = std::polar(1.0, angles[j]);
        phase -= mp.s()[j] * angles[j];
      }
      for (int k = 0; k < n; ++k) {
        col_unit[k] = std::polar(1.0, angles[m + k]);
        phase -= mp.t()[k] * angles[m + k];
      }
      cplx f = std::polar(1.0, phase);
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < n; ++k) {
          const double l = sol.lambda_jk(j, k);
          f *= 1.0 + l * (row_unit[j] * col_unit[k] - 1.0);
        }
      }
      local.sum += f;
      local.sq += std::norm(f);
    }
    partial[block] = local;
  });
  std::vector<cplx> sums(blocks);
  std::vector<double> squares(blocks);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    sums[b] = partial[b].sum;
    squares[b] = partial[b].sq;
  }
  const double count = static_cast<double>(samples);
  const cplx mean = tree_sum(std::move(sums)) / count;
  const double mean_sq = tree_sum(std::move(squares)) / count;
  const double var = std::max(mean_sq - std::norm(mean), 0.0) * count / (count - 1.0);
  const double volume = std::pow(2.0 * kPi, dims);

  IntegralEstimate est;
  est.method = IntegrationMethod::MonteCarlo;
  est.value = mean * volume;
  est.points_or_samples = samples;
  est.error_estimate = 3.0 * std::sqrt(var / count) * volume;
  return est;
}

}  // namespace

IntegralEstimate integrate_I(const MarginPair& mp, const SaddleSolution& sol,
                             const IntegrationOptions& opts) {
  if (sol.lambda_jk.rows() != mp.m() || sol.lambda_jk.cols() != mp.n()) {
    throw Error(ErrorKind::InvalidInput, "saddle solution does not match the instance");
  }
  if (opts.method == IntegrationMethod::Trapezoid) {
    const std::uint64_t nodes =
        opts.resolution ? opts.resolution : default_trapezoid_nodes(mp.m() + mp.n());
    return integrate_trapezoid(mp, sol, nodes, opts.threads);
  }
  const std::uint64_t samples = opts.resolution ? opts.resolution : 10'000'000;
  return integrate_monte_carlo(mp, sol, samples, opts.seed, opts.threads);
}

cplx trapezoid_naive(const MarginPair& mp, const SaddleSolution& sol, int nodes) {
  const int m = mp.m();
  const int n = mp.n();
  const int dims = m + n;
  if (std::pow(static_cast<double>(nodes), dims) > 1e8) {
    throw Error(ErrorKind::ResourceLimit, "naive trapezoid limited to 1e8 nodes");
  }
  std::vector<int> idx(dims, 0);
  std::vector<double> theta(m);
  std::vector<double> phi(n);
  cplx sum = 0.0;
  while (true) {
    for (int j = 0; j < m; ++j) theta[j] = -kPi + 2.0 * kPi * idx[j] / nodes;
    for (int k = 0; k < n; ++k) phi[k] = -kPi + 2.0 * kPi * idx[m + k] / nodes;
    sum += integrand_F(theta, phi, sol, mp);
    int pos = dims - 1;
    while (pos >= 0 && ++idx[pos] == nodes) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return sum * std::pow(2.0 * kPi / nodes, dims);
}

double f_factor(double A_jk, double z) {
  return std::sqrt(std::max(0.0, 1.0 - 4.0 * A_jk * (1.0 - std::cos(z))));
}

bool fbnd_check(const SaddleSolution& sol, const MarginPair& mp,
                std::span<const double> z_samples, int angle_checks, std::uint64_t seed) {
  const int m = mp.m();
  const int n = mp.n();
  for (double z : z_samples) {
    const double z2 = z * z;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < n; ++k) {
        const double A = sol.A_jk(j, k);
        if (f_factor(A, z) > std::exp(-A * z2 + A * z2 * z2 / 12.0) + 1e-12) return false;
      }
    }
  }
  const auto key = Philox4x32::key_from_seed(seed);
  std::vector<double> theta(m);
  std::vector<double> phi(n);
  for (int c = 0; c < angle_checks; ++c) {
    for (int d = 0; d < m + n; d += 2) {
      const auto u = Philox4x32::uniforms(
          {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(d), 0xfb0du, 0u}, key);
      for (int e = 0; e < 2 && d + e < m + n; ++e) {
        const double angle = -kPi + 2.0 * kPi * u[e];
        if (d + e < m) {
          theta[d + e] = angle;
        } else {
          phi[d + e - m] = angle;
        }
      }
    }
    double prod = 1.0;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < n; ++k) prod *= f_factor(sol.A_jk(j, k), theta[j] + phi[k]);
    }
    const double mod = std::abs(integrand_F(theta, phi, sol, mp));
    if (std::abs(mod - prod) > 1e-12 * std::max(1.0, prod)) return false;
  }
  return true;
}

IbndResult ibnd_evaluate(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::DomainError, "ibnd requires c > 0");
  const double edge = 8.0 * kPi / 75.0;
  auto integrand = [c](double x) {
    const double x2 = x * x;
    return std::exp(c * (-x2 + 7.0 / 3.0 * x2 * x2));
  };
  using boost::math::quadrature::gauss_kronrod;
  // Symmetric integrand: integrate [0, edge] and double; splitting at the
  // peak keeps the adaptive rule from missing a narrow Gaussian.
  double err = 0.0;
  const double half = gauss_kronrod<double, 61>::integrate(integrand, 0.0, edge, 30, 1e-13, &err);
  IbndResult res;
  res.c = c;
  res.lhs = 2.0 * half;
  res.rhs = std::sqrt(kPi / c) * std::exp(3.0 / c);
  res.holds = res.lhs <= res.rhs;
  return res;
}

bool ibnd_check(std::span<const double> c_values) {
  return std::all_of(c_values.begin(), c_values.end(),
                     [](double c) { return ibnd_evaluate(c).holds; });
}

}  // namespace linesum
