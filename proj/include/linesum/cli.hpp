#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linesum/core.hpp"

namespace linesum {

inline constexpr const char* kVersion = "0.1.0";

/// One CLI invocation's result. `outputs` holds decimal strings for big
/// integers and doubles for logarithms.
struct RunRecord {
  std::optional<MarginPair> instance;
  std::string command;
  nlohmann::json outputs = nlohmann::json::object();
  std::int64_t timing_ms = 0;
  std::string version = kVersion;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

/// One CSV line under the fixed header.
struct CsvRow {
  int m = 0;
  int n = 0;
  std::string command;
  std::string value;
  std::string log_value;
  std::string error_estimate;
  std::int64_t runtime_ms = 0;
};

inline constexpr const char* kCsvHeader = "m,n,command,value,log_value,error_estimate,runtime_ms";

std::string format_double(double x);
std::string to_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(const std::string& text);

/// Natural log of a positive big integer, exact to double rounding.
double log_of(const mpz_class& x);

/// Exit codes: 0 success, 1 infeasible instance, 2 invalid input,
/// 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linesum
