#pragma once

#include <complex>
#include <string>
#include <vector>

#include "linesum/core.hpp"
#include "linesum/saddle.hpp"

namespace linesum {

using cplx = std::complex<double>;

/// Square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(int size, cplx fill = {}) : n_(size), data_(static_cast<std::size_t>(size) * size, fill) {}
  cplx& operator()(int j, int k) { return data_[static_cast<std::size_t>(j) * n_ + k]; }
  cplx operator()(int j, int k) const { return data_[static_cast<std::size_t>(j) * n_ + k]; }
  int size() const noexcept { return n_; }

 private:
  int n_ = 0;
  std::vector<cplx> data_;
};

/// Inputs of the box-integral estimate for
///   f(z) = exp(-Ahat N sum z_j^2 + sum a_j z_j^2 + N sum B_j z_j^3
///              + sum_jk C_jk z_j z_k^2 + N sum E_j z_j^4
///              + sum_jk F_jk z_j^2 z_k^2 + sum J_j z_j)
/// on the box |z_j| <= N^(-1/2 + eps_hat).
struct MomentCoefficients {
  int N = 0;
  double Ahat = 1.0;
  double eps_hat = 0.25;
  std::vector<cplx> a;
  std::vector<cplx> B;
  CMatrix C;
  std::vector<cplx> E;
  CMatrix F;
  std::vector<cplx> J;

  /// All-zero coefficients of dimension N.
  static MomentCoefficients zeros(int N, double Ahat, double eps_hat);
  /// Multiplies every coefficient array (not Ahat) by `factor`.
  MomentCoefficients scaled(double factor) const;
  void validate() const;
  double box_half_width() const;
};

cplx theta1(const MomentCoefficients& mc);
cplx theta2(const MomentCoefficients& mc);
/// Zhat >= 1; exponent is a positive semi-definite form in the imaginary parts.
double bigZ(const MomentCoefficients& mc);
/// (N/2) log(pi/(Ahat N)) + Theta1 + Theta2, as a complex logarithm.
cplx mw3_estimate(const MomentCoefficients& mc);

/// Exponent of f at z.
cplx mw3_exponent(const MomentCoefficients& mc, const std::vector<double>& z);

/// Tensor-product composite Simpson rule over the box; N <= 4. An even
/// node count is bumped to the next odd one.
cplx integrate_f_direct(const MomentCoefficients& mc, int nodes_per_dim, int threads = 1);

/// prod_j sqrt(pi/(Ahat N)) erf(h sqrt(Ahat N)): the zero-coefficient integral
/// over the box.
double gaussian_box_integral(int N, double Ahat, double eps_hat);

/// Coefficient set for the integral over the row angles (N = m-1), evaluated
/// at tau = 0 with the diagonalization corrections omitted.
MomentCoefficients mw3_row_block(const SaddleSolution& sol, int m, int n, double eps_hat);
/// Same for the column angles (N = n-1).
MomentCoefficients mw3_column_block(const SaddleSolution& sol, int m, int n, double eps_hat);

MomentCoefficients parse_coefficients_json(const std::string& text);
std::string coefficients_to_json(const MomentCoefficients& mc);

}  // namespace linesum
