#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace linesum {

/// Row sums `s` (length m) and column sums `t` (length n) of a 0-1 matrix.
///
/// Construction through `make` enforces m, n >= 1, equal totals and
/// 0 <= s_j <= n, 0 <= t_k <= m. Zero and full lines are allowed here;
/// modules that need 0 < lambda_jk < 1 reject them on their own.
class MarginPair {
 public:
  static MarginPair make(std::vector<int> s, std::vector<int> t);

  const std::vector<int>& s() const noexcept { return s_; }
  const std::vector<int>& t() const noexcept { return t_; }
  int m() const noexcept { return static_cast<int>(s_.size()); }
  int n() const noexcept { return static_cast<int>(t_.size()); }
  std::int64_t total() const noexcept { return total_; }

  MarginPair transposed() const;

  /// True when every line sum is strictly between 0 and the opposite dimension.
  bool strictly_interior_lines() const noexcept;

  bool operator==(const MarginPair&) const = default;

 private:
  MarginPair(std::vector<int> s, std::vector<int> t, std::int64_t total)
      : s_(std::move(s)), t_(std::move(t)), total_(total) {}

  std::vector<int> s_;
  std::vector<int> t_;
  std::int64_t total_ = 0;
};

/// Derived scalars of an instance, all exact.
struct MarginStats {
  int m = 0;
  int n = 0;
  mpq_class sbar;
  mpq_class tbar;
  mpq_class lambda;
  mpq_class A;
  mpq_class A3;
  mpq_class A4;
  // Index l-2 holds R_l = sum_j (s_j - sbar)^l for l = 2, 3, 4.
  mpq_class R_ell[3];
  // C_l = sum_k (tbar - t_k)^l, sign flipped against R_l for odd l.
  mpq_class C_ell[3];

  const mpq_class& R() const { return R_ell[0]; }
  const mpq_class& C() const { return C_ell[0]; }
  const mpq_class& R_of(int ell) const;
  const mpq_class& C_of(int ell) const;
  /// sum_k (t_k - tbar)^l, the convention mirroring R_l.
  mpq_class C_centered(int ell) const;

  bool semiregular() const { return R_ell[0] == 0 && C_ell[0] == 0; }
  bool degenerate_density() const { return lambda == 0 || lambda == 1; }
};

MarginStats compute_stats(const MarginPair& mp);

struct ApplicabilityReport {
  double density_lhs = 0.0;   // (1-2l)^2/(8A) * (1 + 5m/6n + 5n/6m)
  double density_rhs = 0.0;   // a * log n
  bool density_pass = false;
  double row_spread_ratio = 0.0;  // max_j |s_j - sbar| / n^(1/2+eps)
  double col_spread_ratio = 0.0;  // max_k |t_k - tbar| / m^(1/2+eps)
  double aspect_mn = 0.0;
  double aspect_nm = 0.0;
};

ApplicabilityReport check_applicability(const MarginStats& stats,
                                        const MarginPair& mp, double a,
                                        double eps);

/// Parses `{"s": [...], "t": [...]}`; any other key is rejected.
MarginPair parse_instance_json(const std::string& text);
std::string instance_to_json(const MarginPair& mp);

}  // namespace linesum
