#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

#include "linesum/core.hpp"

namespace linesum {

struct ExactCount {
  mpz_class value;
  std::uint64_t states_visited = 0;
};

/// Gale-Ryser: with columns sorted descending, sum_{k<=l} t_k <= sum_j min(s_j, l)
/// for every l, plus equal totals.
bool gale_ryser_feasible(const MarginPair& mp);

/// The strict form of the above for 1 <= l < n with every line strictly
/// inside (0, opposite dimension). Holds iff the fractional margin polytope
/// has a point with all entries in (0,1), i.e. the saddle equations are solvable.
bool gale_ryser_strict(const MarginPair& mp);

enum class ColumnOrder { Given, Ascending, Descending };

/// Memo table keyed by canonical state. Safe for concurrent insert/lookup;
/// entries are value-deterministic so a racing overwrite is harmless.
class MemoTable {
 public:
  bool find(const std::string& key, mpz_class& out) const;
  /// Returns true when the key was new.
  bool insert(const std::string& key, const mpz_class& value);
  std::size_t size() const;
  void clear();

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, mpz_class> map_;
};

struct ExactOptions {
  std::uint64_t state_cap = 100'000'000;
  ColumnOrder order = ColumnOrder::Descending;
  int threads = 1;
  /// Reused across calls when set; a fresh per-call table otherwise.
  std::shared_ptr<MemoTable> shared_memo;
};

/// B(s,t) by dynamic programming over columns with the residual row sums as
/// state. Throws ResourceLimit past `state_cap` distinct states.
ExactCount exact_count(const MarginPair& mp, const ExactOptions& opts = {});

/// Enumerates all 2^(mn) matrices; mn <= 25. Test oracle for exact_count.
ExactCount exact_count_bruteforce(const MarginPair& mp, int threads = 1);

}  // namespace linesum
