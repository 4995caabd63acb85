#include "linesum/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linesum/error.hpp"
#include "linesum/numeric.hpp"

namespace linesum {

double z_entry(double aj, double bk, double r2) {
  const double denom = 1.0 + r2 * aj * bk;
  if (std::abs(denom) < 1e-9) {
    throw Error(ErrorKind::NumericalBlowup, "1 + r^2 a_j b_k vanished during iteration");
  }
  return aj * bk * (1.0 - r2 - r2 * aj - r2 * bk) / denom;
}

void fixed_point_map(const MarginPair& mp, double lambda, const std::vector<double>& a,
                     const std::vector<double>& b, std::vector<double>& a_out,
                     std::vector<double>& b_out) {
  const int m = mp.m();
  const int n = mp.n();
  const double r2 = lambda / (1.0 - lambda);
  const double sbar = static_cast<double>(mp.total()) / m;
  const double tbar = static_cast<double>(mp.total()) / n;
  std::vector<double> zrow(m, 0.0);
  std::vector<double> zcol(n, 0.0);
  double zall = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      const double z = z_entry(a[j], b[k], r2);
      zrow[j] += z;
      zcol[k] += z;
    }
    zall += zrow[j];
  }
  const double shift = zall / (2.0 * m * n);
  a_out.resize(m);
  b_out.resize(n);
  for (int j = 0; j < m; ++j) {
    a_out[j] = (mp.s()[j] - sbar) / (lambda * n) - zrow[j] / n + shift;
  }
  for (int k = 0; k < n; ++k) {
    b_out[k] = (mp.t()[k] - tbar) / (lambda * m) - zcol[k] / m + shift;
  }
}

namespace {

struct IterationOutcome {
  bool converged = false;
  int iterations = 0;
  double last_delta = std::numeric_limits<double>::infinity();
};

IterationOutcome iterate(const MarginPair& mp, double lambda, double step,
                         const SaddleOptions& opts, std::vector<double>& a,
                         std::vector<double>& b) {
  IterationOutcome out;
  std::vector<double> a_next;
  std::vector<double> b_next;
  for (int it = 1; it <= opts.max_iter; ++it) {
    fixed_point_map(mp, lambda, a, b, a_next, b_next);
    double delta = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double v = a[j] + step * (a_next[j] - a[j]);
      delta = std::max(delta, std::abs(v - a[j]));
      a[j] = v;
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double v = b[k] + step * (b_next[k] - b[k]);
      delta = std::max(delta, std::abs(v - b[k]));
      b[k] = v;
    }
    out.iterations = it;
    out.last_delta = delta;
    if (!std::isfinite(delta) || delta > 1e6) return out;
    if (delta < opts.tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

double radius(double r, double x) { return r * (1.0 + x) / (1.0 - r * r * x); }

}  // namespace

SaddleSolution solve_saddle(const MarginPair& mp, const SaddleOptions& opts) {
  if (!mp.strictly_interior_lines()) {
    throw Error(ErrorKind::OutOfRange,
                "saddle point needs 0 < s_j < n and 0 < t_k < m for every line");
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw Error(ErrorKind::DomainError, "solver tolerance and iteration cap must be positive");
  }
  const int m = mp.m();
  const int n = mp.n();
  SaddleSolution sol;
  sol.lambda = static_cast<double>(mp.total()) / (static_cast<double>(m) * n);
  const double lambda = sol.lambda;
  sol.r = std::sqrt(lambda / (1.0 - lambda));
  sol.A = 0.5 * lambda * (1.0 - lambda);
  sol.A3 = lambda * (1.0 - lambda) * (1.0 - 2.0 * lambda) / 6.0;
  sol.A4 = lambda * (1.0 - lambda) * (1.0 - 6.0 * lambda + 6.0 * lambda * lambda) / 24.0;

  sol.a.assign(m, 0.0);
  sol.b.assign(n, 0.0);
  IterationOutcome res = iterate(mp, lambda, 1.0, opts, sol.a, sol.b);
  int spent = res.iterations;
  if (!res.converged) {
    sol.a.assign(m, 0.0);
    sol.b.assign(n, 0.0);
    sol.damping = 0.5;
    res = iterate(mp, lambda, 0.5, opts, sol.a, sol.b);
    spent += res.iterations;
  }
  if (!res.converged) {
    throw Error(ErrorKind::NonConvergence,
                "fixed-point iteration did not converge in " + std::to_string(opts.max_iter) +
                    " steps (last change " + std::to_string(res.last_delta) + ")");
  }
  sol.iterations = spent;

  const double r = sol.r;
  sol.q.resize(m);
  sol.rr.resize(n);
  for (int j = 0; j < m; ++j) sol.q[j] = radius(r, sol.a[j]);
  for (int k = 0; k < n; ++k) sol.rr[k] = radius(r, sol.b[k]);

  sol.lambda_jk = Grid(m, n);
  sol.A_jk = Grid(m, n);
  sol.alpha_jk = Grid(m, n);
  sol.beta_jk = Grid(m, n);
  sol.gamma_jk = Grid(m, n);
  std::vector<double> rows(m, 0.0);
  std::vector<double> cols(n, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      const double x = sol.q[j] * sol.rr[k];
      const double l = x / (1.0 + x);
      if (!(l > 0.0 && l < 1.0) || !std::isfinite(x)) {
        throw Error(ErrorKind::NumericalBlowup, "lambda_jk left (0,1)");
      }
      sol.lambda_jk(j, k) = l;
      const double v = l * (1.0 - l);
      sol.A_jk(j, k) = 0.5 * v;
      sol.alpha_jk(j, k) = 0.5 * v - sol.A;
      sol.beta_jk(j, k) = v * (1.0 - 2.0 * l) / 6.0 - sol.A3;
      sol.gamma_jk(j, k) = v * (1.0 - 6.0 * l + 6.0 * l * l) / 24.0 - sol.A4;
      rows[j] += l;
      cols[k] += l;
    }
  }
  double residual = 0.0;
  for (int j = 0; j < m; ++j) residual = std::max(residual, std::abs(rows[j] - mp.s()[j]));
  for (int k = 0; k < n; ++k) residual = std::max(residual, std::abs(cols[k] - mp.t()[k]));
  sol.residual = residual;
  double suma = 0.0;
  double sumb = 0.0;
  for (double v : sol.a) suma += v;
  for (double v : sol.b) sumb += v;
  sol.gauge_defect = std::abs(n * suma - m * sumb);
  return sol;
}

ThirdIterate third_iterate_approx(const MarginStats& stats, const MarginPair& mp) {
  if (stats.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  const double m = stats.m;
  const double n = stats.n;
  const double l = stats.lambda.get_d();
  const double R = stats.R().get_d();
  const double C = stats.C().get_d();
  const double sbar = stats.sbar.get_d();
  const double tbar = stats.tbar.get_d();
  const double w = 1.0 - 2.0 * l;
  const double d2 = l * l * (1.0 - l);
  const double d3 = l * l * l * (1.0 - l) * (1.0 - l);
  const double shared = w * R * C / (2.0 * d3 * m * m * m * n * n * n);

  ThirdIterate out;
  out.a3.reserve(mp.m());
  out.b3.reserve(mp.n());
  for (int sj : mp.s()) {
    const double ds = sj - sbar;
    out.a3.push_back(ds / (l * n) + ds * C / (d2 * m * m * n * n) +
                     w * ds * ds * C / (d3 * m * m * n * n * n) - shared);
  }
  for (int tk : mp.t()) {
    const double dt = tk - tbar;
    out.b3.push_back(dt / (l * m) + dt * R / (d2 * m * m * n * n) +
                     w * dt * dt * R / (d3 * m * m * m * n * n) - shared);
  }
  return out;
}

Grid z_approx(const MarginStats& stats, const MarginPair& mp) {
  if (stats.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  const double m = stats.m;
  const double n = stats.n;
  const double l = stats.lambda.get_d();
  const double R = stats.R().get_d();
  const double C = stats.C().get_d();
  const double w = 1.0 - 2.0 * l;
  const double d2 = l * l * (1.0 - l);
  const double d3 = l * l * l * (1.0 - l) * (1.0 - l);
  Grid z(mp.m(), mp.n());
  for (int j = 0; j < mp.m(); ++j) {
    const double ds = mp.s()[j] - stats.sbar.get_d();
    for (int k = 0; k < mp.n(); ++k) {
      const double dt = mp.t()[k] - stats.tbar.get_d();
      z(j, k) = w * ds * dt / (d2 * m * n) - ds * dt * dt / (d2 * m * m * n) -
                ds * ds * dt / (d2 * m * n * n) - w * ds * ds * dt * dt / (d3 * m * m * n * n) +
                w * ds * dt * R / (d3 * m * m * n * n * n) +
                w * ds * dt * C / (d3 * m * m * m * n * n);
    }
  }
  return z;
}

LambdaMoments lambda_moment_expansions(const MarginStats& stats, const MarginPair& mp) {
  if (stats.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  const double m = stats.m;
  const double n = stats.n;
  const double l = stats.lambda.get_d();
  const double v = l * (1.0 - l);
  const double w = 1.0 - 2.0 * l;
  const double u = 1.0 - 6.0 * l + 6.0 * l * l;
  LambdaMoments out{Grid(mp.m(), mp.n()), Grid(mp.m(), mp.n()), Grid(mp.m(), mp.n())};
  for (int j = 0; j < mp.m(); ++j) {
    const double ds = mp.s()[j] - stats.sbar.get_d();
    for (int k = 0; k < mp.n(); ++k) {
      const double dt = mp.t()[k] - stats.tbar.get_d();
      out.variance(j, k) = v + w * ds / n + w * dt / m - ds * ds / (n * n) -
                           dt * dt / (m * m) + u * ds * dt / (v * m * n);
      out.skew(j, k) = v * w + u * ds / n + u * dt / m;
      out.kurt(j, k) = v * u;
    }
  }
  return out;
}

LambdaMoments lambda_moments(const SaddleSolution& sol) {
  const int m = sol.lambda_jk.rows();
  const int n = sol.lambda_jk.cols();
  LambdaMoments out{Grid(m, n), Grid(m, n), Grid(m, n)};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      const double l = sol.lambda_jk(j, k);
      const double v = l * (1.0 - l);
      out.variance(j, k) = v;
      out.skew(j, k) = v * (1.0 - 2.0 * l);
      out.kurt(j, k) = v * (1.0 - 6.0 * l + 6.0 * l * l);
    }
  }
  return out;
}

double log_prefactor_product(const std::vector<double>& q, const std::vector<double>& rr,
                             const MarginPair& mp) {
  const int m = mp.m();
  const int n = mp.n();
  double acc = -(m + n) * kLog2Pi;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) acc += std::log1p(q[j] * rr[k]);
  }
  for (int j = 0; j < m; ++j) acc -= mp.s()[j] * std::log(q[j]);
  for (int k = 0; k < n; ++k) acc -= mp.t()[k] * std::log(rr[k]);
  return acc;
}

LogPrefactor log_prefactor(const SaddleSolution& sol, const MarginPair& mp) {
  const int m = mp.m();
  const int n = mp.n();
  LogPrefactor out;
  double entropy = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      const double l = sol.lambda_jk(j, k);
      entropy += l * std::log(l) + (1.0 - l) * std::log1p(-l);
    }
  }
  out.entropy_form = -(m + n) * kLog2Pi - entropy;
  out.product_form = log_prefactor_product(sol.q, sol.rr, mp);
  const double scale =
      std::max({std::abs(out.entropy_form), std::abs(out.product_form), 1.0});
  if (std::abs(out.entropy_form - out.product_form) > 1e-8 * scale) {
    throw Error(ErrorKind::IdentityViolation,
                "entropy and product forms of log P disagree; the saddle solution is off");
  }
  return out;
}

double log_prefactor_approx(const MarginStats& stats, const MarginPair& mp) {
  if (stats.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  const double m = stats.m;
  const double n = stats.n;
  const double A = stats.A.get_d();
  const double R = stats.R().get_d();
  const double C = stats.C().get_d();
  const std::int64_t cells = static_cast<std::int64_t>(stats.m) * stats.n;

  double acc = 0.5 * (m + n - 1.0) * std::log(A) + 0.5 * (n - 1.0) * std::log(m) +
               0.5 * (m - 1.0) * std::log(n) - std::log(2.0) -
               0.5 * (m + n + 1.0) * std::log(kPi);
  acc -= log_binomial(cells, mp.total());
  for (int sj : mp.s()) acc += log_binomial(stats.n, sj);
  for (int tk : mp.t()) acc += log_binomial(stats.m, tk);
  acc += (1.0 - 2.0 * A) / (24.0 * A) * (m / n + n / m);
  acc -= R * C / (8.0 * A * A * m * m * n * n);
  acc -= (1.0 - 4.0 * A) / (16.0 * A * A) * (R / (n * n) + C / (m * m));
  return acc;
}

}  // namespace linesum
