#include "linesum/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "linesum/asymptotic.hpp"
#include "linesum/error.hpp"
#include "linesum/exact.hpp"
#include "linesum/integral.hpp"
#include "linesum/moments.hpp"
#include "linesum/parallel.hpp"
#include "linesum/philox.hpp"
#include "linesum/saddle.hpp"

namespace linesum {

using nlohmann::json;

json RunRecord::to_json() const {
  json j;
  j["command"] = command;
  j["instance"] = instance ? json{{"s", instance->s()}, {"t", instance->t()}} : json(nullptr);
  j["outputs"] = outputs;
  j["timing_ms"] = timing_ms;
  j["version"] = version;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.command = j.at("command").get<std::string>();
  if (!j.at("instance").is_null()) {
    r.instance = MarginPair::make(j["instance"].at("s").get<std::vector<int>>(),
                                  j["instance"].at("t").get<std::vector<int>>());
  }
  r.outputs = j.at("outputs");
  r.timing_ms = j.at("timing_ms").get<std::int64_t>();
  r.version = j.at("version").get<std::string>();
  return r;
}

std::string format_double(double x) { return json(x).dump(); }

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.m << ',' << r.n << ',' << r.command << ',' << r.value << ',' << r.log_value << ','
       << r.error_estimate << ',' << r.runtime_ms << '\n';
  }
  return os.str();
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw Error(ErrorKind::InvalidInput, "CSV header mismatch");
  }
  std::vector<CsvRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 7) throw Error(ErrorKind::InvalidInput, "CSV row needs 7 cells");
    CsvRow r;
    r.m = std::stoi(cells[0]);
    r.n = std::stoi(cells[1]);
    r.command = cells[2];
    r.value = cells[3];
    r.log_value = cells[4];
    r.error_estimate = cells[5];
    r.runtime_ms = std::stoll(cells[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

double log_of(const mpz_class& x) {
  if (x <= 0) throw Error(ErrorKind::DomainError, "log of a non-positive integer");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence:
    case ErrorKind::ResourceLimit:
    case ErrorKind::NumericalBlowup:
    case ErrorKind::IdentityViolation:
      return kExitNumerical;
    default:
      return kExitInvalid;
  }
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, std::string("bad integer in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, std::string(what) + " is empty");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Exponential of a log-value as a decimal string when it fits a double.
json decimal_or_null(double log_value) {
  if (log_value > 709.0) return nullptr;
  std::ostringstream os;
  os.precision(17);
  os << std::exp(log_value);
  return os.str();
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

struct Common {
  std::string input;
  std::string s_list;
  std::string t_list;
  std::uint64_t seed = 0;
  double tol = 1e-13;
  std::string format = "json";
  std::string out;
  int threads = 0;
  bool timing = false;

  int worker_count() const { return threads > 0 ? threads : default_threads(); }

  MarginPair instance() const {
    if (!input.empty()) {
      if (!s_list.empty() || !t_list.empty()) {
        throw Error(ErrorKind::InvalidInput, "use either --input or --s/--t, not both");
      }
      return parse_instance_json(read_file(input));
    }
    if (s_list.empty() || t_list.empty()) {
      throw Error(ErrorKind::InvalidInput, "an instance needs --input FILE or both --s and --t");
    }
    return MarginPair::make(parse_int_list(s_list, "--s"), parse_int_list(t_list, "--t"));
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_instance) {
  if (with_instance) {
    cmd->add_option("--input", c.input, "JSON instance file {\"s\": [...], \"t\": [...]}");
    cmd->add_option("--s", c.s_list, "Row sums, comma separated");
    cmd->add_option("--t", c.t_list, "Column sums, comma separated");
  }
  cmd->add_option("--seed", c.seed, "Seed for counter-based random streams");
  cmd->add_option("--tol", c.tol, "Saddle-point iteration tolerance");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", c.out, "Write output to FILE instead of stdout");
  cmd->add_option("--threads", c.threads, "Worker cap (falls back to LINESUM_THREADS)");
  cmd->add_flag("--timing", c.timing, "Record wall-clock timings (output no longer reproducible)");
}

struct Result {
  RunRecord record;
  std::vector<CsvRow> rows;
  int exit_code = kExitOk;
};

CsvRow base_row(const MarginPair& mp, const std::string& command) {
  CsvRow r;
  r.m = mp.m();
  r.n = mp.n();
  r.command = command;
  return r;
}

Result cmd_feasible(const Common& c) {
  const MarginPair mp = c.instance();
  Result res;
  const bool ok = gale_ryser_feasible(mp);
  res.record.instance = mp;
  res.record.outputs["feasible"] = ok;
  CsvRow row = base_row(mp, "feasible");
  row.value = ok ? "true" : "false";
  res.rows.push_back(row);
  res.exit_code = ok ? kExitOk : kExitInfeasible;
  return res;
}

Result cmd_count(const Common& c, const std::string& order, const std::string& method,
                 std::uint64_t cap) {
  const MarginPair mp = c.instance();
  Result res;
  res.record.instance = mp;
  ExactCount count;
  if (method == "bruteforce") {
    count = exact_count_bruteforce(mp, c.worker_count());
  } else {
    ExactOptions opts;
    opts.state_cap = cap;
    opts.threads = c.worker_count();
    opts.order = order == "given" ? ColumnOrder::Given
                 : order == "asc" ? ColumnOrder::Ascending
                                  : ColumnOrder::Descending;
    count = exact_count(mp, opts);
  }
  const bool feasible = count.value > 0;
  res.record.outputs["count"] = count.value.get_str();
  res.record.outputs["feasible"] = feasible;
  res.record.outputs["states_visited"] = count.states_visited;
  res.record.outputs["method"] = method;
  CsvRow row = base_row(mp, "count-exact");
  row.value = count.value.get_str();
  if (feasible) {
    res.record.outputs["log_count"] = log_of(count.value);
    row.log_value = format_double(log_of(count.value));
  }
  row.error_estimate = format_double(0.0);
  res.rows.push_back(row);
  res.exit_code = feasible ? kExitOk : kExitInfeasible;
  return res;
}

Result cmd_estimate(const Common& c, double a, double eps) {
  const MarginPair mp = c.instance();
  Result res;
  res.record.instance = mp;
  const LogEstimate est = estimate_log_count(mp);
  const MarginStats stats = compute_stats(mp);
  const ApplicabilityReport rep = check_applicability(stats, mp, a, eps);
  auto& o = res.record.outputs;
  o["log_value"] = est.log_value;
  o["log_N"] = est.log_N;
  o["log_P1"] = est.log_P1;
  o["log_P2"] = est.log_P2;
  o["log_E"] = est.log_E;
  o["E_exponent"] = est.E_exponent;
  o["estimate"] = decimal_or_null(est.log_value);
  o["lambda"] = stats.lambda.get_str();
  o["R"] = stats.R().get_str();
  o["C"] = stats.C().get_str();
  o["applicability"] = {{"density_lhs", rep.density_lhs},
                        {"density_rhs", rep.density_rhs},
                        {"density_pass", rep.density_pass},
                        {"row_spread_ratio", rep.row_spread_ratio},
                        {"col_spread_ratio", rep.col_spread_ratio},
                        {"aspect_mn", rep.aspect_mn},
                        {"aspect_nm", rep.aspect_nm}};
  o["warning"] = rep.density_pass
                     ? json(nullptr)
                     : json("density condition fails; estimate is outside the proven range");
  CsvRow row = base_row(mp, "estimate");
  row.value = o["estimate"].is_null() ? "" : o["estimate"].get<std::string>();
  row.log_value = format_double(est.log_value);
  res.rows.push_back(row);
  return res;
}

Result cmd_saddle(const Common& c, int max_iter) {
  const MarginPair mp = c.instance();
  Result res;
  res.record.instance = mp;
  SaddleOptions opts;
  opts.tol = c.tol;
  opts.max_iter = max_iter;
  const SaddleSolution sol = solve_saddle(mp, opts);
  const LogPrefactor lp = log_prefactor(sol, mp);
  auto& o = res.record.outputs;
  o["a"] = sol.a;
  o["b"] = sol.b;
  o["residual"] = sol.residual;
  o["iterations"] = sol.iterations;
  o["damping"] = sol.damping;
  o["gauge_defect"] = sol.gauge_defect;
  o["logP"] = lp.entropy_form;
  o["logP_product"] = lp.product_form;
  o["logP_approx"] = log_prefactor_approx(compute_stats(mp), mp);
  CsvRow row = base_row(mp, "saddle");
  row.value = format_double(lp.entropy_form);
  row.log_value = format_double(lp.entropy_form);
  row.error_estimate = format_double(sol.residual);
  res.rows.push_back(row);
  return res;
}

Result cmd_verify_integral(const Common& c, const std::string& method, std::uint64_t nodes,
                           std::uint64_t samples) {
  const MarginPair mp = c.instance();
  Result res;
  res.record.instance = mp;
  const ExactCount exact = exact_count(mp, ExactOptions{.threads = c.worker_count()});
  if (exact.value == 0) {
    res.record.outputs["exact"] = "0";
    res.record.outputs["feasible"] = false;
    CsvRow row = base_row(mp, "verify-integral");
    row.value = "0";
    res.rows.push_back(row);
    res.exit_code = kExitInfeasible;
    return res;
  }
  SaddleOptions sopts;
  sopts.tol = c.tol;
  const SaddleSolution sol = solve_saddle(mp, sopts);
  const LogPrefactor lp = log_prefactor(sol, mp);
  IntegrationOptions iopts;
  iopts.method = method == "mc" ? IntegrationMethod::MonteCarlo : IntegrationMethod::Trapezoid;
  iopts.resolution = iopts.method == IntegrationMethod::MonteCarlo ? samples : nodes;
  iopts.seed = c.seed;
  iopts.threads = c.worker_count();
  const IntegralEstimate I = integrate_I(mp, sol, iopts);
  const double P = std::exp(lp.value());
  const double product = P * I.value.real();
  const double exact_d = exact.value.get_d();
  const double defect = std::abs(product - exact_d) / exact_d;
  auto& o = res.record.outputs;
  o["exact"] = exact.value.get_str();
  o["logP"] = lp.value();
  o["P"] = P;
  o["I"] = complex_json(I.value);
  o["PI"] = product;
  o["relative_defect"] = defect;
  o["method"] = to_string(I.method);
  o["points_or_samples"] = I.points_or_samples;
  o["error_estimate"] = I.error_estimate;
  o["PI_error_estimate"] = P * I.error_estimate;
  CsvRow row = base_row(mp, "verify-integral");
  row.value = format_double(product);
  row.log_value = product > 0 ? format_double(std::log(product)) : "";
  row.error_estimate = format_double(P * I.error_estimate);
  res.rows.push_back(row);
  return res;
}

Result cmd_mw3(const Common& c, const std::string& path, int nodes) {
  if (path.empty()) throw Error(ErrorKind::InvalidInput, "mw3-check needs --coefficients FILE");
  const MomentCoefficients mc = parse_coefficients_json(read_file(path));
  Result res;
  const cplx log_est = mw3_estimate(mc);
  const cplx est = std::exp(log_est);
  const cplx direct = integrate_f_direct(mc, nodes, c.worker_count());
  const double defect = std::abs(direct - est) / std::abs(est);
  auto& o = res.record.outputs;
  o["N"] = mc.N;
  o["theta1"] = complex_json(theta1(mc));
  o["theta2"] = complex_json(theta2(mc));
  o["Z"] = bigZ(mc);
  o["log_estimate"] = complex_json(log_est);
  o["estimate"] = complex_json(est);
  o["direct"] = complex_json(direct);
  o["relative_defect"] = defect;
  o["nodes_per_dim"] = nodes;
  CsvRow row;
  row.m = mc.N;
  row.n = mc.N;
  row.command = "mw3-check";
  row.value = format_double(direct.real());
  row.log_value = format_double(log_est.real());
  row.error_estimate = format_double(defect);
  res.rows.push_back(row);
  return res;
}

Result cmd_compare(const Common& c) {
  const MarginPair mp = c.instance();
  Result res;
  res.record.instance = mp;
  const ExactCount exact = exact_count(mp, ExactOptions{.threads = c.worker_count()});
  const LogEstimate est = estimate_log_count(mp);
  auto& o = res.record.outputs;
  o["exact"] = exact.value.get_str();
  o["log_estimate"] = est.log_value;
  o["estimate"] = decimal_or_null(est.log_value);
  CsvRow row = base_row(mp, "compare");
  row.value = exact.value.get_str();
  row.log_value = format_double(est.log_value);
  if (exact.value > 0) {
    const double log_exact = log_of(exact.value);
    o["log_exact"] = log_exact;
    o["ratio"] = std::exp(est.log_value - log_exact);
    o["log_error"] = std::abs(est.log_value - log_exact);
    row.error_estimate = format_double(std::abs(est.log_value - log_exact));
  } else {
    res.exit_code = kExitInfeasible;
  }
  res.rows.push_back(row);
  return res;
}

// Random m x n 0-1 matrix at the given density, keyed by (seed, instance).
MarginPair random_margins(int m, int n, double density, std::uint64_t seed, std::uint32_t id) {
  const auto key = Philox4x32::key_from_seed(seed);
  std::vector<int> s(m, 0);
  std::vector<int> t(n, 0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; k += 2) {
      const auto u = Philox4x32::uniforms(
          {id, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k), 0x5eedu}, key);
      for (int e = 0; e < 2 && k + e < n; ++e) {
        if (u[e] < density) {
          ++s[j];
          ++t[k + e];
        }
      }
    }
  }
  return MarginPair::make(std::move(s), std::move(t));
}

Result cmd_sweep(const Common& c, const std::string& family, double lambda,
                 const std::string& n_list, int per_size) {
  Result res;
  const std::vector<int> sizes = parse_int_list(n_list, "--n");
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "--lambda must lie in (0,1)");
  }
  json rows = json::array();
  for (int n : sizes) {
    if (n < 1 || n > 64) throw Error(ErrorKind::InvalidInput, "sweep sizes must lie in [1, 64]");
    std::vector<MarginPair> instances;
    if (family == "semiregular") {
      const double line = lambda * n;
      const int rounded = static_cast<int>(std::lround(line));
      if (std::abs(line - rounded) > 1e-9) {
        throw Error(ErrorKind::InvalidInput,
                    "semiregular sweep needs lambda*n integral (n = " + std::to_string(n) + ")");
      }
      instances.push_back(MarginPair::make(std::vector<int>(n, rounded), std::vector<int>(n, rounded)));
    } else {
      for (int i = 0; i < per_size; ++i) {
        instances.push_back(random_margins(n, n, lambda, c.seed,
                                           static_cast<std::uint32_t>(n * 1000 + i)));
      }
    }
    for (const auto& mp : instances) {
      const auto start = std::chrono::steady_clock::now();
      json row{{"m", mp.m()}, {"n", mp.n()}, {"s", mp.s()}, {"t", mp.t()}};
      CsvRow csv = base_row(mp, "sweep");
      const ExactCount exact = exact_count(mp, ExactOptions{.threads = c.worker_count()});
      row["exact"] = exact.value.get_str();
      csv.value = exact.value.get_str();
      const MarginStats st = compute_stats(mp);
      if (!st.degenerate_density()) {
        const double log_est = estimate_log_count(mp).log_value;
        row["log_estimate"] = log_est;
        csv.log_value = format_double(log_est);
        if (exact.value > 0) {
          const double err = std::abs(log_est - log_of(exact.value));
          row["log_error"] = err;
          csv.error_estimate = format_double(err);
        }
      }
      if (c.timing) {
        csv.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        row["runtime_ms"] = csv.runtime_ms;
      }
      rows.push_back(row);
      res.rows.push_back(csv);
    }
  }
  res.record.outputs["family"] = family;
  res.record.outputs["lambda"] = lambda;
  res.record.outputs["rows"] = rows;
  return res;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and asymptotic counts of 0-1 matrices with given line sums", "linesum"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  std::string order = "desc";
  std::string count_method = "dp";
  std::uint64_t cap = 100'000'000;
  double applic_a = 0.25;
  double applic_eps = 0.1;
  int max_iter = 200;
  std::string integ_method = "trapezoid";
  std::uint64_t nodes = 0;
  std::uint64_t samples = 10'000'000;
  std::string coeff_path;
  int mw3_nodes = 121;
  std::string family = "semiregular";
  double sweep_lambda = 0.5;
  std::string sweep_n;
  int per_size = 1;

  auto* feasible = app.add_subcommand("feasible", "Gale-Ryser feasibility");
  add_common(feasible, common, true);

  auto* count = app.add_subcommand("count-exact", "Exact count B(s,t)");
  add_common(count, common, true);
  count->add_option("--order", order, "Column order")->check(CLI::IsMember({"given", "asc", "desc"}));
  count->add_option("--method", count_method, "dp or bruteforce")
      ->check(CLI::IsMember({"dp", "bruteforce"}));
  count->add_option("--cap", cap, "DP state cap");

  auto* estimate = app.add_subcommand("estimate", "Asymptotic estimate of B(s,t)");
  add_common(estimate, common, true);
  estimate->add_option("--a", applic_a, "Constant a in the density condition");
  estimate->add_option("--eps", applic_eps, "Exponent eps in the spread diagnostics");

  auto* saddle = app.add_subcommand("saddle", "Saddle point and log prefactor");
  add_common(saddle, common, true);
  saddle->add_option("--max-iter", max_iter, "Iteration cap per attempt");

  auto* verify = app.add_subcommand("verify-integral", "Check B = P * I numerically");
  add_common(verify, common, true);
  verify->add_option("--method", integ_method, "trapezoid or mc")
      ->check(CLI::IsMember({"trapezoid", "mc"}));
  verify->add_option("--nodes", nodes, "Trapezoid nodes per angle (0 = default)");
  verify->add_option("--samples", samples, "Monte Carlo samples");

  auto* mw3 = app.add_subcommand("mw3-check", "Box-integral estimate against direct quadrature");
  add_common(mw3, common, false);
  mw3->add_option("--coefficients", coeff_path, "Coefficients JSON file")->required();
  mw3->add_option("--nodes", mw3_nodes, "Simpson nodes per dimension");

  auto* compare = app.add_subcommand("compare", "Exact count against the estimate");
  add_common(compare, common, true);

  auto* sweep = app.add_subcommand("sweep", "Exact vs estimate over a family of instances");
  add_common(sweep, common, false);
  sweep->add_option("--family", family, "semiregular or random")
      ->check(CLI::IsMember({"semiregular", "random"}));
  sweep->add_option("--lambda", sweep_lambda, "Density");
  sweep->add_option("--n", sweep_n, "Comma-separated sizes (square instances)")->required();
  sweep->add_option("--per-size", per_size, "Random instances per size");

  std::vector<const char*> argv{"linesum"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  Result res;
  std::string name;
  try {
    if (*feasible) {
      name = "feasible";
      res = cmd_feasible(common);
    } else if (*count) {
      name = "count-exact";
      res = cmd_count(common, order, count_method, cap);
    } else if (*estimate) {
      name = "estimate";
      res = cmd_estimate(common, applic_a, applic_eps);
    } else if (*saddle) {
      name = "saddle";
      res = cmd_saddle(common, max_iter);
    } else if (*verify) {
      name = "verify-integral";
      res = cmd_verify_integral(common, integ_method, nodes, samples);
    } else if (*mw3) {
      name = "mw3-check";
      res = cmd_mw3(common, coeff_path, mw3_nodes);
    } else if (*compare) {
      name = "compare";
      res = cmd_compare(common);
    } else {
      name = "sweep";
      res = cmd_sweep(common, family, sweep_lambda, sweep_n, per_size);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  res.record.command = name;
  if (common.timing) {
    res.record.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    if (name != "sweep") {
      for (auto& row : res.rows) row.runtime_ms = res.record.timing_ms;
    }
  }
  const std::string text =
      common.format == "csv" ? to_csv(res.rows) : res.record.to_json().dump(2) + "\n";
  if (common.out.empty()) {
    out << text;
  } else {
    std::ofstream file(common.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << common.out << '\n';
      return kExitInvalid;
    }
    file << text;
  }
  return res.exit_code;
}

}  // namespace linesum
