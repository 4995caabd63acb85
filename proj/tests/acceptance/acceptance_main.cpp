// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion; exits
// non-zero if any criterion fails. argv[1] is the path of the CLI binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "linesum/asymptotic.hpp"
#include "linesum/cli.hpp"
#include "linesum/error.hpp"
#include "linesum/exact.hpp"
#include "linesum/integral.hpp"
#include "linesum/moments.hpp"
#include "linesum/numeric.hpp"
#include "linesum/parallel.hpp"
#include "linesum/philox.hpp"
#include "linesum/saddle.hpp"

using namespace linesum;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Deterministic uniform stream over a Philox key.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint32_t lane = 0)
      : key_(Philox4x32::key_from_seed(seed)), lane_(lane) {}
  double uniform() {
    if (idx_ == 2) {
      buf_ = Philox4x32::uniforms({counter_++, lane_, 0xacce97u, 0}, key_);
      idx_ = 0;
    }
    return buf_[idx_++];
  }
  int below(int k) { return static_cast<int>(uniform() * k); }

 private:
  Philox4x32::Key key_;
  std::uint32_t lane_;
  std::uint32_t counter_ = 0;
  std::array<double, 2> buf_{};
  int idx_ = 2;
};

// Row/column sums of a random 0-1 matrix. With `perturb`, both margins are
// redrawn with the same total, so feasibility is no longer guaranteed.
MarginPair random_margins(Stream& rng, int max_m, int max_n, int min_dim, double p, bool perturb) {
  const int m = min_dim + rng.below(max_m - min_dim + 1);
  const int n = min_dim + rng.below(max_n - min_dim + 1);
  std::vector<int> s(m, 0), t(n, 0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < n; ++k)
      if (rng.uniform() < p) ++s[j], ++t[k];
  if (perturb) {
    // Redistribute both totals unit by unit over lines with spare capacity.
    auto scatter = [&](std::vector<int>& lines, int cap) {
      int total = 0;
      for (int& v : lines) total += std::exchange(v, 0);
      while (total > 0) {
        const int i = rng.below(static_cast<int>(lines.size()));
        if (lines[i] < cap) ++lines[i], --total;
      }
    };
    scatter(s, n);
    scatter(t, m);
  }
  return MarginPair::make(std::move(s), std::move(t));
}

std::string str(const mpz_class& x) { return x.get_str(); }

Outcome criterion1() {
  const auto start = Clock::now();
  Stream rng(1);
  int feasible = 0, infeasible = 0, mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const double p = 0.15 + 0.7 * rng.uniform();
    const auto mp = random_margins(rng, 5, 5, 1, p, i % 2 == 1);
    const auto dp = exact_count(mp).value;
    const auto bf = exact_count_bruteforce(mp).value;
    if (dp != bf) ++mismatches;
    (dp > 0 ? feasible : infeasible) += 1;
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = mismatches == 0 && feasible > 0 && infeasible > 0 && secs < 60.0;
  o.detail = "500 instances (" + std::to_string(feasible) + " feasible, " +
             std::to_string(infeasible) + " infeasible), " + std::to_string(mismatches) +
             " mismatches, " + std::to_string(secs) + " s";
  return o;
}

Outcome criterion2() {
  const auto start = Clock::now();
  const auto four = MarginPair::make({2, 2, 2, 2}, {2, 2, 2, 2});
  const auto five = MarginPair::make({2, 2, 2, 2, 2}, {2, 2, 2, 2, 2});
  const mpz_class c4 = exact_count(four).value;
  const mpz_class oracle5 = exact_count_bruteforce(five).value;
  const mpz_class c5 = exact_count(five).value;
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = c4 == 90 && c5 == oracle5 && secs < 120.0;
  o.detail = "4x4 -> " + str(c4) + ", 5x5 -> " + str(c5) + " (brute force " + str(oracle5) +
             "), " + std::to_string(secs) + " s";
  return o;
}

// All margin pairs of the given shape with every line strictly interior and
// a strictly feasible realization.
std::vector<MarginPair> strict_margins(int m, int n) {
  std::vector<MarginPair> out;
  std::vector<int> s(m, 1);
  std::function<void(int, std::vector<int>&, int, std::vector<int>&)> cols;
  std::vector<int> t(n, 1);
  std::function<void(int)> rows = [&](int j) {
    if (j == m) {
      std::function<void(int)> rec = [&](int k) {
        if (k == n) {
          int ss = 0, tt = 0;
          for (int v : s) ss += v;
          for (int v : t) tt += v;
          if (ss != tt) return;
          auto mp = MarginPair::make(s, t);
          if (gale_ryser_strict(mp)) out.push_back(mp);
          return;
        }
        for (int v = 1; v < m; ++v) {
          t[k] = v;
          rec(k + 1);
        }
      };
      rec(0);
      return;
    }
    for (int v = 1; v < n; ++v) {
      s[j] = v;
      rows(j + 1);
    }
  };
  rows(0);
  return out;
}

Outcome criterion3() {
  const auto start = Clock::now();
  Outcome o;
  std::ostringstream detail;
  for (auto [m, n] : {std::pair{2, 2}, std::pair{2, 3}}) {
    const auto margins = strict_margins(m, n);
    double worst = 0.0;
    for (const auto& mp : margins) {
      const auto sol = solve_saddle(mp);
      const double P = std::exp(log_prefactor(sol, mp).value());
      IntegrationOptions opts;
      opts.resolution = 64;
      const auto I = integrate_I(mp, sol, opts);
      const double exact = exact_count(mp).value.get_d();
      worst = std::max(worst, std::abs(P * I.value.real() - exact) / exact);
    }
    const bool enough = margins.size() >= 3;
    o.pass = o.pass && enough && worst < 1e-6;
    detail << "(" << m << "," << n << "): " << margins.size()
           << " strict margin choice(s) exist" << (enough ? "" : " [need >= 3]")
           << ", worst rel. error " << worst << "; ";
  }
  {
    const auto mp = MarginPair::make({1, 1, 1}, {1, 1, 1});
    const auto sol = solve_saddle(mp);
    const double P = std::exp(log_prefactor(sol, mp).value());
    IntegrationOptions opts;
    opts.method = IntegrationMethod::MonteCarlo;
    opts.resolution = 100'000'000;
    opts.seed = 2024;
    opts.threads = default_threads();
    const auto I = integrate_I(mp, sol, opts);
    const double value = P * I.value.real();
    const double three_sigma = P * I.error_estimate;
    const double sigma_rel = three_sigma / 3.0 / 6.0;
    const bool ok = std::abs(value - 6.0) <= three_sigma && sigma_rel < 1e-2;
    o.pass = o.pass && ok;
    detail << "(3,3) MC 1e8: P*I = " << value << " +/- " << three_sigma << " (3 sigma), sigma/value "
           << sigma_rel << "; ";
  }
  const double secs = seconds_since(start);
  o.pass = o.pass && secs < 900.0;
  detail << secs << " s";
  o.detail = detail.str();
  return o;
}

struct StrictSet {
  std::vector<MarginPair> margins;
  std::vector<SaddleSolution> solutions;
};

StrictSet& strict_set() {
  static StrictSet set;
  return set;
}

Outcome criterion4() {
  const auto start = Clock::now();
  Stream rng(4);
  auto& set = strict_set();
  int failures = 0;
  double worst_residual = 0.0, worst_digits = 0.0;
  int damped = 0;
  while (set.margins.size() < 100) {
    const double p = 0.2 + 0.6 * rng.uniform();
    const auto mp = random_margins(rng, 10, 10, 2, p, false);
    if (!gale_ryser_strict(mp)) continue;
    try {
      const auto sol = solve_saddle(mp);
      const auto lp = log_prefactor(sol, mp);
      const double scale = std::max(std::abs(lp.entropy_form), std::abs(lp.product_form));
      const double relgap = std::abs(lp.entropy_form - lp.product_form) / scale;
      worst_residual = std::max(worst_residual, sol.residual);
      worst_digits = std::max(worst_digits, relgap);
      if (sol.residual >= 1e-12 || relgap >= 1e-10) ++failures;
      if (sol.damping != 1.0) ++damped;
      set.margins.push_back(mp);
      set.solutions.push_back(sol);
    } catch (const Error& e) {
      ++failures;
      set.margins.push_back(mp);
      set.solutions.emplace_back();
      std::cerr << "criterion 4: " << to_string(e.kind()) << ": " << e.what() << "\n";
    }
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "100 strict instances, " << failures << " failures, max residual " << worst_residual
    << ", max relative gap between prefactor forms " << worst_digits << ", " << damped
    << " needed damping, " << secs << " s";
  return {failures == 0 && secs < 30.0, d.str()};
}

Outcome criterion5() {
  const auto start = Clock::now();
  std::ostringstream d;
  bool ok = true;
  double prev = 1e300;
  for (int n : {6, 8, 10, 12}) {
    const std::vector<int> v(n, n / 2);
    const auto mp = MarginPair::make(v, v);
    const double log_exact = log_of(exact_count(mp).value);
    const auto est = estimate_log_count(mp);
    const double err = std::abs(est.log_value - log_exact);
    const bool below = log_exact <= est.log_N + est.log_P1 + est.log_P2;
    ok = ok && err < prev && below;
    prev = err;
    d << "n=" << n << ": log error " << err << (below ? "" : " [exact > N*P1*P2]") << "; ";
  }
  const double secs = seconds_since(start);
  d << secs << " s";
  return {ok && secs < 60.0, d.str()};
}

Outcome criterion6() {
  constexpr double kThreshold = 4e-3;
  const auto mp = MarginPair::make({4, 4, 3, 3, 2, 2}, {4, 4, 3, 3, 2, 2});
  const auto sol = solve_saddle(mp);
  const auto th = third_iterate_approx(compute_stats(mp), mp);
  double gap = 0.0;
  for (int j = 0; j < 6; ++j) {
    gap = std::max({gap, std::abs(th.a3[j] - sol.a[j]), std::abs(th.b3[j] - sol.b[j])});
  }
  std::ostringstream d;
  d << "max gap " << gap << " (frozen threshold " << kThreshold << ")";
  return {gap < kThreshold, d.str()};
}

MomentCoefficients random_coefficients(int N, double Ahat, std::uint64_t seed) {
  Stream rng(seed);
  auto rc = [&] {
    return cplx(2 * rng.uniform() - 1, 2 * rng.uniform() - 1) / std::sqrt(2.0);
  };
  auto mc = MomentCoefficients::zeros(N, Ahat, 0.25);
  for (int j = 0; j < N; ++j) {
    mc.a[j] = rc();
    mc.B[j] = rc();
    mc.E[j] = rc();
    mc.J[j] = rc();
    for (int k = 0; k < N; ++k) {
      mc.C(j, k) = rc();
      mc.F(j, k) = rc();
    }
  }
  return mc;
}

Outcome criterion7() {
  const auto start = Clock::now();
  std::ostringstream d;
  bool ok = true;
  const int threads = default_threads();
  for (int N : {1, 2, 3}) {
    const auto zero = MomentCoefficients::zeros(N, 1.0, 0.25);
    const double tail = std::pow(std::erf(zero.box_half_width() * std::sqrt(static_cast<double>(N))), N);
    const double corrected = std::exp(mw3_estimate(zero)).real() * tail;
    const cplx direct = integrate_f_direct(zero, N == 3 ? 201 : 401, threads);
    const double defect = std::abs(direct - corrected) / corrected;
    ok = ok && defect < 1e-6;
    d << "zero N=" << N << ": " << defect << "; ";
  }
  for (int N : {1, 2, 3}) {
    const auto base = random_coefficients(N, 40.0, 700 + N);
    double prev = 1e300;
    d << "N=" << N << " defects";
    for (double f : {1e-1, 1e-2, 1e-3}) {
      const auto mc = base.scaled(f);
      const cplx est = std::exp(mw3_estimate(mc));
      const cplx direct = integrate_f_direct(mc, N == 3 ? 201 : 401, threads);
      const double defect = std::abs(direct - est) / std::abs(est);
      ok = ok && defect < prev && (f > 1e-2 || defect < 1e-3);
      prev = defect;
      d << " " << defect;
    }
    d << "; ";
  }
  const double secs = seconds_since(start);
  d << secs << " s";
  return {ok && secs < 600.0, d.str()};
}

Outcome criterion8() {
  std::vector<double> z(10000);
  Stream rng(8);
  for (auto& x : z) x = kPi * (2 * rng.uniform() - 1);
  auto& set = strict_set();
  std::vector<std::pair<MarginPair, SaddleSolution>> cases;
  for (std::size_t i = 0; i < set.margins.size(); ++i) {
    if (!set.solutions[i].a.empty()) cases.emplace_back(set.margins[i], set.solutions[i]);
  }
  for (const auto& mp : {MarginPair::make({4, 4, 3, 3, 2, 2}, {4, 4, 3, 3, 2, 2}),
                         MarginPair::make({1, 1}, {1, 1}), MarginPair::make({2, 1}, {1, 1, 1}),
                         MarginPair::make({1, 1, 1}, {1, 1, 1})}) {
    cases.emplace_back(mp, solve_saddle(mp));
  }
  int failed = 0;
  for (const auto& [mp, sol] : cases) {
    if (!fbnd_check(sol, mp, z)) ++failed;
  }
  const std::vector<double> cs{0.1, 1.0, 10.0, 100.0, 1e4};
  const bool ibnd = ibnd_check(cs);
  std::ostringstream d;
  d << "fbnd on " << cases.size() << " solutions x 1e4 samples: " << failed << " failures; ibnd "
    << (ibnd ? "holds" : "fails") << " for c in {0.1, 1, 10, 100, 1e4}";
  return {failed == 0 && ibnd, d.str()};
}

Outcome criterion9() {
  struct Case {
    std::int64_t N;
    double x, d;
    unsigned long k;
    double tol;
  };
  const Case cases[] = {{100, 0.5, 0.0, 50, 1e-5},
                        {10000, 0.3, 0.0, 3000, 1e-9},
                        {1000000, 0.3, 1e-4, 300100, 1e-6}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(c.N), c.k);
    const double err = std::abs(stirling_binom(c.N, c.x, c.d) - log_of(b));
    ok = ok && err < c.tol;
    d << "N=" << c.N << ": " << err << " (tol " << c.tol << "); ";
  }
  return {ok, d.str()};
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  status = pclose(pipe);
  return out;
}

Outcome criterion10(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "linesum_acceptance";
  fs::create_directories(dir);
  const std::string coeffs = (dir / "coeffs.json").string();
  std::ofstream(coeffs) << coefficients_to_json(random_coefficients(2, 40.0, 10).scaled(1e-2));
  const std::string instance = (dir / "instance.json").string();
  std::ofstream(instance) << R"({"s": [3, 2, 2, 1], "t": [2, 2, 2, 2]})";

  const std::vector<std::string> commands{
      "feasible --s 2,2,0 --t 3,1",
      "count-exact --s 4,4,3,3,2,2,1 --t 3,3,3,3,3,2,2",
      "count-exact --input " + instance + " --format csv",
      "estimate --s 6,5,5,4,4,3 --t 5,5,4,4,4,3,2",
      "saddle --s 4,4,3,3,2,2 --t 4,4,3,3,2,2",
      "verify-integral --s 2,1,1 --t 1,2,1",
      "verify-integral --s 1,1,1 --t 1,1,1 --method mc --samples 2000000",
      "mw3-check --coefficients " + coeffs,
      "compare --s 2,2,2,2 --t 2,2,2,2",
      "sweep --family semiregular --lambda 0.5 --n 6,8,10 --format csv",
      "sweep --family random --lambda 0.35 --n 5,6 --per-size 4"};
  int mismatches = 0;
  std::ostringstream d;
  for (const auto& c : commands) {
    const std::string base = "\"" + cli + "\" " + c + " --seed 42";
    int s1 = 0, s2 = 0, s3 = 0;
    const std::string a = capture(base + " --threads 1", s1);
    const std::string b = capture(base + " --threads 1", s2);
    const std::string e = capture(base + " --threads 8", s3);
    if (a.empty() || a != b || a != e || s1 != s2 || s1 != s3) {
      ++mismatches;
      d << "[differs: " << c << "] ";
    }
  }
  fs::remove_all(dir);
  d << commands.size() << " commands x (2 runs at 1 thread + 1 run at 8 threads), " << mismatches
    << " mismatches";
  return {mismatches == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-linesum-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::vector<std::function<Outcome()>> checks{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, [&] { return criterion10(cli); }};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << o.detail
              << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
