#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtlab/error.hpp"

// Moment-method combinatorics: Catalan numbers C_m, modified Catalan numbers
// D_m = binom(2m+2, m-1), their generating-function identity, and brute-force
// enumeration of admissible closed walks on trees. All arithmetic is exact.

namespace rmtlab::walks {

using Count = std::uint64_t;

namespace detail {

inline Count checked_mul(Count a, Count b, const char* what) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw RangeError(std::string(what) + ": 64-bit overflow");
  return r;
}

inline Count checked_add(Count a, Count b, const char* what) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw RangeError(std::string(what) + ": 64-bit overflow");
  return r;
}

/// binom(n, k) with an exact 128-bit running product.
inline Count binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<Count>::max()) throw RangeError("binomial: 64-bit overflow");
  }
  return static_cast<Count>(r);
}

}  // namespace detail

inline constexpr int max_catalan_order = 30;
inline constexpr int max_modified_catalan_order = 28;

/// C_m = (2m)! / (m! (m+1)!), with C_0 = 1.
inline Count catalan(int m) {
  if (m < 0) throw InvalidArgument("catalan: m must be nonnegative");
  if (m > max_catalan_order) throw RangeError("catalan: m > 30 overflows the exact range");
  return detail::binomial(2 * static_cast<unsigned>(m), static_cast<unsigned>(m)) /
         (static_cast<Count>(m) + 1);
}

/// D_m = binom(2m+2, m−1) for m ≥ 1, and 0 otherwise.
inline Count modified_catalan(int m) {
  if (m > max_modified_catalan_order)
    throw RangeError("modified_catalan: m > 28 overflows the exact range");
  if (m < 1) return 0;
  return detail::binomial(2 * static_cast<unsigned>(m) + 2, static_cast<unsigned>(m) - 1);
}

/// Truncated product of two integer power series (coefficients 0..order).
inline std::vector<Count> series_product(const std::vector<Count>& a, const std::vector<Count>& b,
                                         std::size_t order) {
  std::vector<Count> out(order + 1, 0);
  for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) {
      out[i + j] = detail::checked_add(out[i + j], detail::checked_mul(a[i], b[j], "series"),
                                       "series");
    }
  }
  return out;
}

/// D_m computed only from the first-edge decomposition
/// D_m = 2 Σ_{i+j=m−1} C_i D_j + Σ_{i+j+k+l=m−1} C_i C_j C_k C_l,
/// memoising earlier D_j.
inline Count modified_catalan_recurrence(int m) {
  if (m < 1) throw InvalidArgument("modified_catalan_recurrence: m must be positive");
  if (m > max_modified_catalan_order)
    throw RangeError("modified_catalan_recurrence: m > 28 overflows the exact range");
  const auto top = static_cast<std::size_t>(m);
  std::vector<Count> c(top);
  for (std::size_t i = 0; i < top; ++i) c[i] = catalan(static_cast<int>(i));
  const auto c2 = series_product(c, c, top - 1);
  const auto c4 = series_product(c2, c2, top - 1);

  std::vector<Count> d(top + 1, 0);  // d[0] = D_0 = 0
  for (std::size_t k = 1; k <= top; ++k) {
    Count split = 0;
    for (std::size_t i = 0; i <= k - 1; ++i)
      split = detail::checked_add(split, detail::checked_mul(c[i], d[k - 1 - i], "recurrence"),
                                  "recurrence");
    d[k] = detail::checked_add(detail::checked_mul(2, split, "recurrence"), c4[k - 1],
                               "recurrence");
  }
  return d[top];
}

/// Checks d(x) = 2x c(x) d(x) + x c(x)⁴ coefficient by coefficient through
/// x^order, with c and d taken from the closed forms.
inline bool series_identity_check(int order) {
  if (order < 1 || order > 25) throw InvalidArgument("series_identity_check: order in 1..25");
  const auto top = static_cast<std::size_t>(order);
  std::vector<Count> c(top + 1), d(top + 1);
  for (std::size_t i = 0; i <= top; ++i) {
    c[i] = catalan(static_cast<int>(i));
    d[i] = modified_catalan(static_cast<int>(i));
  }
  const std::vector<Count> x{0, 1};
  const auto xc = series_product(x, c, top);
  const auto xcd = series_product(xc, d, top);
  const auto c2 = series_product(c, c, top);
  const auto xc4 = series_product(x, series_product(c2, c2, top), top);
  for (std::size_t k = 0; k <= top; ++k) {
    const Count rhs = detail::checked_add(detail::checked_mul(2, xcd[k], "identity"), xc4[k],
                                          "identity");
    if (rhs != d[k]) return false;
  }
  return true;
}

enum class WalkProfile { two, four };

/// Closed walk as the vertex sequence j_1, j_2, …, j_L, j_1 (vertices 1-based).
using Walk = std::vector<int>;

/// Edge multiplicities of a closed walk, keyed by (min, max) endpoint.
inline std::map<std::pair<int, int>, int> edge_multiplicities(const Walk& w) {
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t t = 0; t + 1 < w.size(); ++t) {
    const int a = w[t];
    const int b = w[t + 1];
    ++counts[{std::min(a, b), std::max(a, b)}];
  }
  return counts;
}

/// True iff the edge set of `w` is a spanning tree of {1, …, vertices}.
inline bool spans_tree(const Walk& w, int vertices) {
  const auto edges = edge_multiplicities(w);
  if (static_cast<int>(edges.size()) != vertices - 1) return false;
  std::vector<int> parent(static_cast<std::size_t>(vertices) + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& [e, mult] : edges) {
    if (e.first == e.second || e.first < 1 || e.second > vertices) return false;
    const int ra = find(e.first);
    const int rb = find(e.second);
    if (ra == rb) return false;  // cycle
    parent[ra] = rb;
  }
  return true;
}

namespace detail {

class AdmissibleWalkSearch {
 public:
  AdmissibleWalkSearch(int m, WalkProfile profile)
      : m_(m),
        vertices_(m + 1),
        length_(profile == WalkProfile::two ? 2 * m : 2 * m + 2),
        profile_(profile),
        counts_(static_cast<std::size_t>((m + 2) * (m + 2)), 0) {}

  std::vector<Walk> run() {
    walk_.assign(1, 1);
    extend(1);
    return std::move(found_);
  }

 private:
  int& count(int a, int b) {
    if (a > b) std::swap(a, b);
    return counts_[static_cast<std::size_t>(a * (m_ + 2) + b)];
  }

  void extend(int max_seen) {
    const int step = static_cast<int>(walk_.size()) - 1;  // edges laid so far
    const int here = walk_.back();
    if (step == length_) {
      if (here == 1 && max_seen == vertices_ && distinct_ == m_ && profile_matches()) {
        if (!spans_tree(walk_, vertices_))
          throw std::logic_error("admissible walk search produced a non-tree walk");
        found_.push_back(walk_);
      }
      return;
    }
    const int cap = profile_ == WalkProfile::two ? 2 : 4;
    for (int next = 1; next <= std::min(max_seen + 1, vertices_); ++next) {
      if (next == here) continue;
      int& c = count(here, next);
      if (c == cap) continue;
      if (c == 2 && heavy_ > 0) continue;  // only one edge may exceed two
      const int seen = std::max(max_seen, next);
      const int left = length_ - step - 1;
      if (2 * (vertices_ - seen) > left) continue;
      if (c == 0 && distinct_ == m_) continue;

      if (c == 0) ++distinct_;
      if (c == 2) ++heavy_;
      ++c;
      walk_.push_back(next);
      extend(seen);
      walk_.pop_back();
      --c;
      if (c == 2) --heavy_;
      if (c == 0) --distinct_;
    }
  }

  bool profile_matches() const {
    int fours = 0;
    for (int a = 1; a <= vertices_; ++a) {
      for (int b = a + 1; b <= vertices_; ++b) {
        const int c = counts_[static_cast<std::size_t>(a * (m_ + 2) + b)];
        if (c == 0 || c == 2) continue;
        if (c == 4) {
          ++fours;
        } else {
          return false;
        }
      }
    }
    return profile_ == WalkProfile::two ? fours == 0 : fours == 1;
  }

  int m_;
  int vertices_;
  int length_;
  WalkProfile profile_;
  std::vector<int> counts_;
  Walk walk_;
  int distinct_ = 0;
  int heavy_ = 0;
  std::vector<Walk> found_;
};

}  // namespace detail

inline constexpr int max_two_walk_edges = 5;
inline constexpr int max_four_walk_edges = 4;

/// Every admissible closed walk on trees with m edges: vertices labelled in
/// order of first appearance, start and end at vertex 1, each tree edge
/// traversed twice (or, for the four profile, one edge four times).
inline std::vector<Walk> enumerate_admissible_walks(int m, WalkProfile profile) {
  if (m < 1) throw InvalidArgument("enumerate_admissible_walks: m must be positive");
  const int budget = profile == WalkProfile::two ? max_two_walk_edges : max_four_walk_edges;
  if (m > budget)
    throw RangeError("enumerate_admissible_walks: m = " + std::to_string(m) +
                     " exceeds the exhaustive-search budget " + std::to_string(budget));
  return detail::AdmissibleWalkSearch(m, profile).run();
}

inline Count count_admissible_walks(int m, WalkProfile profile) {
  return enumerate_admissible_walks(m, profile).size();
}

}  // namespace rmtlab::walks
