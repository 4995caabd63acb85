#include "linesum/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "linesum/error.hpp"

namespace linesum {

MarginPair MarginPair::make(std::vector<int> s, std::vector<int> t) {
  if (s.empty() || t.empty()) {
    throw Error(ErrorKind::InvalidInput, "margin vectors must be non-empty");
  }
  const int m = static_cast<int>(s.size());
  const int n = static_cast<int>(t.size());
  std::int64_t ssum = 0;
  std::int64_t tsum = 0;
  for (int v : s) {
    if (v < 0 || v > n) {
      throw Error(ErrorKind::OutOfRange,
                  "row sum " + std::to_string(v) + " outside [0, " +
                      std::to_string(n) + "]");
    }
    ssum += v;
  }
  for (int v : t) {
    if (v < 0 || v > m) {
      throw Error(ErrorKind::OutOfRange,
                  "column sum " + std::to_string(v) + " outside [0, " +
                      std::to_string(m) + "]");
    }
    tsum += v;
  }
  if (ssum != tsum) {
    throw Error(ErrorKind::MarginMismatch,
                "row total " + std::to_string(ssum) +
                    " differs from column total " + std::to_string(tsum));
  }
  return MarginPair(std::move(s), std::move(t), ssum);
}

MarginPair MarginPair::transposed() const { return MarginPair(t_, s_, total_); }

bool MarginPair::strictly_interior_lines() const noexcept {
  const int m = this->m();
  const int n = this->n();
  return std::all_of(s_.begin(), s_.end(), [n](int v) { return v > 0 && v < n; }) &&
         std::all_of(t_.begin(), t_.end(), [m](int v) { return v > 0 && v < m; });
}

const mpq_class& MarginStats::R_of(int ell) const {
  if (ell < 2 || ell > 4) throw Error(ErrorKind::DomainError, "R_l defined for l = 2..4");
  return R_ell[ell - 2];
}

const mpq_class& MarginStats::C_of(int ell) const {
  if (ell < 2 || ell > 4) throw Error(ErrorKind::DomainError, "C_l defined for l = 2..4");
  return C_ell[ell - 2];
}

mpq_class MarginStats::C_centered(int ell) const {
  const mpq_class& c = C_of(ell);
  return ell % 2 == 0 ? c : mpq_class(-c);
}

MarginStats compute_stats(const MarginPair& mp) {
  MarginStats st;
  st.m = mp.m();
  st.n = mp.n();
  const mpq_class total(static_cast<long>(mp.total()));
  st.sbar = total / st.m;
  st.tbar = total / st.n;
  st.lambda = st.sbar / st.n;
  st.lambda.canonicalize();
  const mpq_class& l = st.lambda;
  const mpq_class one(1);
  st.A = l * (one - l) / 2;
  st.A3 = l * (one - l) * (one - 2 * l) / 6;
  st.A4 = l * (one - l) * (one - 6 * l + 6 * l * l) / 24;
  for (int v : mp.s()) {
    const mpq_class d = mpq_class(v) - st.sbar;
    const mpq_class d2 = d * d;
    st.R_ell[0] += d2;
    st.R_ell[1] += d2 * d;
    st.R_ell[2] += d2 * d2;
  }
  for (int v : mp.t()) {
    const mpq_class d = st.tbar - mpq_class(v);
    const mpq_class d2 = d * d;
    st.C_ell[0] += d2;
    st.C_ell[1] += d2 * d;
    st.C_ell[2] += d2 * d2;
  }
  for (auto* q : {&st.sbar, &st.tbar, &st.A, &st.A3, &st.A4}) q->canonicalize();
  for (int i = 0; i < 3; ++i) {
    st.R_ell[i].canonicalize();
    st.C_ell[i].canonicalize();
  }
  return st;
}

ApplicabilityReport check_applicability(const MarginStats& stats,
                                        const MarginPair& mp, double a,
                                        double eps) {
  if (stats.degenerate_density()) {
    throw Error(ErrorKind::DegenerateDensity, "density must lie strictly in (0,1)");
  }
  if (!(a > 0.0) || !(eps > 0.0)) {
    throw Error(ErrorKind::DomainError, "applicability constants a, eps must be positive");
  }
  const double m = stats.m;
  const double n = stats.n;
  const mpq_class one(1);
  const mpq_class shape = (one - 2 * stats.lambda) * (one - 2 * stats.lambda) / (8 * stats.A);
  ApplicabilityReport rep;
  rep.density_lhs = shape.get_d() * (1.0 + 5.0 * m / (6.0 * n) + 5.0 * n / (6.0 * m));
  rep.density_rhs = a * std::log(n);
  rep.density_pass = rep.density_lhs <= rep.density_rhs;

  const double sbar = stats.sbar.get_d();
  const double tbar = stats.tbar.get_d();
  double row_dev = 0.0;
  for (int v : mp.s()) row_dev = std::max(row_dev, std::abs(v - sbar));
  double col_dev = 0.0;
  for (int v : mp.t()) col_dev = std::max(col_dev, std::abs(v - tbar));
  rep.row_spread_ratio = row_dev / std::pow(n, 0.5 + eps);
  rep.col_spread_ratio = col_dev / std::pow(m, 0.5 + eps);
  rep.aspect_mn = m / n;
  rep.aspect_nm = n / m;
  return rep;
}

namespace {

std::vector<int> read_int_array(const nlohmann::json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) {
    throw Error(ErrorKind::InvalidInput, std::string("\"") + key + "\" must be an array");
  }
  std::vector<int> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer()) {
      throw Error(ErrorKind::InvalidInput,
                  std::string("\"") + key + "\" entries must be integers");
    }
    const auto x = v.get<std::int64_t>();
    if (x < 0 || x > 1'000'000) {
      throw Error(ErrorKind::OutOfRange, std::string("\"") + key + "\" entry out of range");
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

}  // namespace

MarginPair parse_instance_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed instance JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "instance must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() != "s" && item.key() != "t") {
      throw Error(ErrorKind::InvalidInput, "unexpected key \"" + item.key() + "\" in instance");
    }
  }
  if (!j.contains("s") || !j.contains("t")) {
    throw Error(ErrorKind::InvalidInput, "instance requires both \"s\" and \"t\"");
  }
  return MarginPair::make(read_int_array(j, "s"), read_int_array(j, "t"));
}

std::string instance_to_json(const MarginPair& mp) {
  nlohmann::json j;
  j["s"] = mp.s();
  j["t"] = mp.t();
  return j.dump();
}

}  // namespace linesum
