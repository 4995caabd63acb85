#include "linesum/exact.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <functional>
#include <mutex>
#include <numeric>

#include "linesum/error.hpp"
#include "linesum/parallel.hpp"

namespace linesum {

namespace {

// Checks the majorization inequalities for residual rows against a column
// multiset sorted descending. `strict` demands strict inequality for
// 1 <= l < cols.size().
bool majorized(const std::vector<int>& rows, const std::vector<int>& cols_desc,
               bool strict) {
  std::int64_t col_prefix = 0;
  const std::size_t ncols = cols_desc.size();
  for (std::size_t ell = 1; ell <= ncols; ++ell) {
    col_prefix += cols_desc[ell - 1];
    std::int64_t cap = 0;
    for (int r : rows) cap += std::min<std::int64_t>(r, static_cast<std::int64_t>(ell));
    if (col_prefix > cap) return false;
    if (strict && ell < ncols && col_prefix == cap) return false;
  }
  return true;
}

std::vector<int> sorted_desc(std::vector<int> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

bool gale_ryser_feasible(const MarginPair& mp) {
  return majorized(mp.s(), sorted_desc(mp.t()), false);
}

bool gale_ryser_strict(const MarginPair& mp) {
  if (!mp.strictly_interior_lines()) return false;
  return majorized(mp.s(), sorted_desc(mp.t()), true);
}

bool MemoTable::find(const std::string& key, mpz_class& out) const {
  std::shared_lock lock(mu_);
  auto it = map_.find(key);
  if (it == map_.end()) return false;
  out = it->second;
  return true;
}

bool MemoTable::insert(const std::string& key, const mpz_class& value) {
  std::unique_lock lock(mu_);
  auto [it, fresh] = map_.insert_or_assign(key, value);
  return fresh;
}

std::size_t MemoTable::size() const {
  std::shared_lock lock(mu_);
  return map_.size();
}

void MemoTable::clear() {
  std::unique_lock lock(mu_);
  map_.clear();
}

namespace {

class ColumnDp {
 public:
  ColumnDp(std::vector<int> columns, MemoTable& memo, std::uint64_t cap)
      : cols_(std::move(columns)), memo_(memo), cap_(cap) {
    const std::size_t n = cols_.size();
    suffix_desc_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      suffix_desc_[k] = sorted_desc(std::vector<int>(cols_.begin() + k, cols_.end()));
    }
  }

  // Completion count from residual rows (sorted descending) at column k.
  mpz_class count(std::size_t k, const std::vector<int>& residual) {
    if (k == cols_.size()) {
      return std::all_of(residual.begin(), residual.end(), [](int r) { return r == 0; })
                 ? mpz_class(1)
                 : mpz_class(0);
    }
    const std::string key = make_key(k, residual);
    mpz_class cached;
    if (memo_.find(key, cached)) return cached;

    mpz_class total = 0;
    if (majorized(residual, suffix_desc_[k], false)) {
      for_each_transition(k, residual, [&](const std::vector<int>& next, const mpz_class& weight) {
        total += weight * count(k + 1, next);
      });
    }
    record(k, residual, total);
    return total;
  }

  void record(std::size_t k, const std::vector<int>& residual, const mpz_class& total) {
    if (memo_.insert(make_key(k, residual), total)) {
      if (visited_.fetch_add(1, std::memory_order_relaxed) + 1 > cap_) {
        throw Error(ErrorKind::ResourceLimit,
                    "exact_count exceeded the state cap of " + std::to_string(cap_));
      }
    }
  }

  // Visits every way to place column k's ones, grouped by residual-value
  // class: choosing c_v of the n_v rows with residual v has weight binom(n_v, c_v).
  template <class Visit>
  void for_each_transition(std::size_t k, const std::vector<int>& residual, Visit&& visit) {
    // Distinct positive residual values with multiplicities, descending.
    std::vector<std::pair<int, int>> classes;
    for (int r : residual) {
      if (r <= 0) break;
      if (!classes.empty() && classes.back().first == r) {
        ++classes.back().second;
      } else {
        classes.emplace_back(r, 1);
      }
    }
    const int need = cols_[k];
    std::vector<int> take(classes.size(), 0);
    std::vector<int> avail_after(classes.size() + 1, 0);
    for (std::size_t i = classes.size(); i-- > 0;) {
      avail_after[i] = avail_after[i + 1] + classes[i].second;
    }
    std::function<void(std::size_t, int, mpz_class)> rec = [&](std::size_t ci, int left,
                                                               mpz_class weight) {
      if (ci == classes.size()) {
        if (left != 0) return;
        visit(apply(residual, classes, take), weight);
        return;
      }
      if (left > avail_after[ci]) return;
      const int nv = classes[ci].second;
      for (int c = std::min(nv, left); c >= 0; --c) {
        if (left - c > avail_after[ci + 1]) break;
        take[ci] = c;
        rec(ci + 1, left - c, weight * binomial(nv, c));
      }
      take[ci] = 0;
    };
    rec(0, need, mpz_class(1));
  }

  std::uint64_t visited() const { return visited_.load(); }
  std::size_t columns() const { return cols_.size(); }

 private:
  static std::vector<int> apply(const std::vector<int>& residual,
                                const std::vector<std::pair<int, int>>& classes,
                                const std::vector<int>& take) {
    std::vector<int> next = residual;
    std::size_t pos = 0;
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
      // Decrement the last `take` rows of the class; the vector stays sorted.
      const std::size_t end = pos + classes[ci].second;
      for (int c = 0; c < take[ci]; ++c) --next[end - 1 - c];
      pos = end;
    }
    return next;
  }

  static mpz_class binomial(int n, int k) {
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
  }

  std::string make_key(std::size_t k, const std::vector<int>& residual) const {
    std::string key;
    const auto& rest = suffix_desc_[k];
    key.reserve(2 * (residual.size() + rest.size()) + 1);
    auto push = [&key](int v) {
      key.push_back(static_cast<char>(v & 0xff));
      key.push_back(static_cast<char>((v >> 8) & 0xff));
    };
    for (int r : residual) push(r);
    key.push_back('|');
    for (int c : rest) push(c);
    return key;
  }

  std::vector<int> cols_;
  std::vector<std::vector<int>> suffix_desc_;
  MemoTable& memo_;
  std::uint64_t cap_;
  std::atomic<std::uint64_t> visited_{0};
};

}  // namespace

ExactCount exact_count(const MarginPair& mp, const ExactOptions& opts) {
  ExactCount result;
  if (!gale_ryser_feasible(mp)) {
    result.value = 0;
    return result;
  }
  std::vector<int> cols = mp.t();
  switch (opts.order) {
    case ColumnOrder::Given: break;
    case ColumnOrder::Ascending: std::sort(cols.begin(), cols.end()); break;
    case ColumnOrder::Descending: std::sort(cols.begin(), cols.end(), std::greater<>()); break;
  }
  std::shared_ptr<MemoTable> memo = opts.shared_memo ? opts.shared_memo
                                                     : std::make_shared<MemoTable>();
  ColumnDp dp(cols, *memo, opts.state_cap);
  const std::vector<int> root = sorted_desc(mp.s());

  if (opts.threads <= 1) {
    result.value = dp.count(0, root);
  } else {
    // Top-level branches in parallel; partial sums combined in branch order.
    std::vector<std::pair<std::vector<int>, mpz_class>> branches;
    dp.for_each_transition(0, root, [&](const std::vector<int>& next, const mpz_class& w) {
      branches.emplace_back(sorted_desc(next), w);
    });
    std::vector<mpz_class> partial(branches.size());
    std::vector<std::exception_ptr> errors(branches.size());
    parallel_blocks(branches.size(), opts.threads, [&](std::size_t b) {
      try {
        partial[b] = branches[b].second * dp.count(1, branches[b].first);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    mpz_class total = 0;
    for (auto& p : partial) total += p;
    dp.record(0, root, total);
    result.value = total;
  }
  result.states_visited = dp.visited();
  return result;
}

ExactCount exact_count_bruteforce(const MarginPair& mp, int threads) {
  const int m = mp.m();
  const int n = mp.n();
  if (m * n > 25) {
    throw Error(ErrorKind::ResourceLimit, "brute force limited to m*n <= 25");
  }
  const std::uint64_t total = std::uint64_t{1} << (m * n);
  const std::uint32_t row_mask = (1u << n) - 1u;
  // Column k's bits across all rows, for column-sum popcounts.
  std::vector<std::uint32_t> col_masks(n, 0);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < m; ++j) col_masks[k] |= 1u << (j * n + k);
  }
  const auto& s = mp.s();
  const auto& t = mp.t();

  constexpr std::uint64_t kBlock = std::uint64_t{1} << 20;
  const std::size_t blocks = static_cast<std::size_t>((total + kBlock - 1) / kBlock);
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(total, lo + kBlock);
    std::uint64_t local = 0;
    for (std::uint64_t x = lo; x < hi; ++x) {
      const auto bits = static_cast<std::uint32_t>(x);
      bool ok = true;
      for (int j = 0; j < m && ok; ++j) {
        ok = std::popcount((bits >> (j * n)) & row_mask) == s[j];
      }
      for (int k = 0; k < n && ok; ++k) {
        ok = std::popcount(bits & col_masks[k]) == t[k];
      }
      local += ok ? 1 : 0;
    }
    hits[b] = local;
  });
  ExactCount out;
  std::uint64_t count = 0;
  for (auto h : hits) count += h;
  out.value = mpz_class(static_cast<unsigned long>(count));
  out.states_visited = total;
  return out;
}

}  // namespace linesum
