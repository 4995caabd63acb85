#pragma once

#include <cstddef>
#include <vector>

#include "linesum/core.hpp"

namespace linesum {

/// Dense row-major m x n matrix of doubles.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  double& operator()(int j, int k) { return data_[static_cast<std::size_t>(j) * cols_ + k]; }
  double operator()(int j, int k) const {
    return data_[static_cast<std::size_t>(j) * cols_ + k];
  }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct SaddleSolution {
  std::vector<double> a;
  std::vector<double> b;
  double r = 0.0;            // sqrt(lambda / (1 - lambda))
  std::vector<double> q;     // row radii
  std::vector<double> rr;    // column radii
  Grid lambda_jk;            // q_j r_k / (1 + q_j r_k)
  Grid A_jk;                 // lambda_jk (1 - lambda_jk) / 2 = A + alpha_jk
  Grid alpha_jk;
  Grid beta_jk;              // lambda_jk(1-lambda_jk)(1-2 lambda_jk)/6 - A3
  Grid gamma_jk;             // lambda_jk(1-lambda_jk)(1-6 lambda_jk+6 lambda_jk^2)/24 - A4
  int iterations = 0;
  double residual = 0.0;     // max line-sum defect of lambda_jk
  double gauge_defect = 0.0; // |n sum a - m sum b|
  double damping = 1.0;      // step factor that converged
  double lambda = 0.0;
  double A = 0.0;
  double A3 = 0.0;
  double A4 = 0.0;
};

struct SaddleOptions {
  double tol = 1e-13;
  int max_iter = 200;
};

/// Fixed-point iteration a <- AA(a,b), b <- BB(a,b) from a = b = 0 using the
/// exact Z_jk. Falls back once to a half-step damped iteration when the plain
/// iteration does not converge within max_iter.
SaddleSolution solve_saddle(const MarginPair& mp, const SaddleOptions& opts = {});

/// Z_jk = a_j b_k (1 - r^2 - r^2 a_j - r^2 b_k) / (1 + r^2 a_j b_k).
double z_entry(double aj, double bk, double r2);

/// One application of the map (AA, BB); `a_out`/`b_out` receive the images.
void fixed_point_map(const MarginPair& mp, double lambda, const std::vector<double>& a,
                     const std::vector<double>& b, std::vector<double>& a_out,
                     std::vector<double>& b_out);

struct ThirdIterate {
  std::vector<double> a3;
  std::vector<double> b3;
};

/// Closed-form third iterate of the fixed-point map (remainder dropped).
ThirdIterate third_iterate_approx(const MarginStats& stats, const MarginPair& mp);

/// Closed-form approximation of Z_jk to the same order as the third iterate.
Grid z_approx(const MarginStats& stats, const MarginPair& mp);

/// Leading expansions of lambda_jk(1-lambda_jk), times (1-2 lambda_jk) and
/// times (1-6 lambda_jk+6 lambda_jk^2), in the line-sum deviations.
struct LambdaMoments {
  Grid variance;   // lambda_jk (1 - lambda_jk)
  Grid skew;       // lambda_jk (1 - lambda_jk)(1 - 2 lambda_jk)
  Grid kurt;       // lambda_jk (1 - lambda_jk)(1 - 6 lambda_jk + 6 lambda_jk^2)
};
LambdaMoments lambda_moment_expansions(const MarginStats& stats, const MarginPair& mp);
LambdaMoments lambda_moments(const SaddleSolution& sol);

struct LogPrefactor {
  double entropy_form = 0.0;  // -(m+n) log 2pi - sum [l log l + (1-l) log(1-l)]
  double product_form = 0.0;  // -(m+n) log 2pi + sum log(1+q r) - sum s log q - sum t log r
  double value() const { return entropy_form; }
};

/// log P(s,t) by both routes; throws IdentityViolation when they differ by
/// more than 1e-8 relative.
LogPrefactor log_prefactor(const SaddleSolution& sol, const MarginPair& mp);

/// The product route alone, for arbitrary radii (used for gauge checks).
double log_prefactor_product(const std::vector<double>& q, const std::vector<double>& rr,
                             const MarginPair& mp);

/// Closed-form approximation of log P in terms of binomials and R, C.
double log_prefactor_approx(const MarginStats& stats, const MarginPair& mp);

}  // namespace linesum
