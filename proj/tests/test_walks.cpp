#include "catch_amalgamated.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "rmtlab/walks.hpp"

using namespace rmtlab::walks;

namespace {

// Brute force over every vertex sequence of the right length; no pruning.
std::vector<Walk> naive_walks(int m, WalkProfile profile) {
  const int v = m + 1;
  const int len = profile == WalkProfile::two ? 2 * m : 2 * m + 2;
  std::vector<Walk> out;
  Walk w(static_cast<std::size_t>(len) + 1, 1);
  std::vector<int> digits(static_cast<std::size_t>(len) - 1, 1);
  for (;;) {
    for (int t = 1; t < len; ++t) w[static_cast<std::size_t>(t)] = digits[static_cast<std::size_t>(t) - 1];
    bool ok = true;
    int seen = 1;
    for (int t = 1; t < len && ok; ++t) {
      const int x = w[static_cast<std::size_t>(t)];
      if (x == w[static_cast<std::size_t>(t) - 1]) ok = false;
      if (x > seen + 1) ok = false;
      seen = std::max(seen, x);
    }
    ok = ok && w[static_cast<std::size_t>(len) - 1] != 1 && seen == v;
    if (ok && rmtlab::walks::spans_tree(w, v)) {
      int fours = 0;
      bool mult_ok = true;
      for (const auto& [e, c] : edge_multiplicities(w)) {
        if (c == 4) {
          ++fours;
        } else if (c != 2) {
          mult_ok = false;
        }
      }
      if (mult_ok && fours == (profile == WalkProfile::four ? 1 : 0)) out.push_back(w);
    }
    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] > v) digits[pos++] = 1;
    if (pos == digits.size()) break;
  }
  return out;
}

Count catalan_by_convolution(int m) {
  std::vector<Count> c(static_cast<std::size_t>(m) + 1, 0);
  c[0] = 1;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i <= k; ++i) c[static_cast<std::size_t>(k) + 1] += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(k - i)];
  return c[static_cast<std::size_t>(m)];
}

}  // namespace

TEST_CASE("Catalan numbers", "[walks]") {
  CHECK(catalan(0) == 1);
  CHECK(catalan(1) == 1);
  CHECK(catalan(2) == 2);
  CHECK(catalan(3) == 5);
  CHECK(catalan(4) == 14);
  CHECK(catalan(10) == 16796);
  for (int m = 0; m <= 30; ++m) CHECK(catalan(m) == catalan_by_convolution(m));
  CHECK(catalan(30) == 3814986502092304ull);
  CHECK_THROWS_AS(catalan(31), rmtlab::RangeError);
  CHECK_THROWS_AS(catalan(-1), rmtlab::InvalidArgument);
}

TEST_CASE("modified Catalan numbers", "[walks]") {
  CHECK(modified_catalan(1) == 1);
  CHECK(modified_catalan(2) == 6);
  CHECK(modified_catalan(3) == 28);
  CHECK(modified_catalan(4) == 120);
  CHECK(modified_catalan(5) == 495);
  CHECK(modified_catalan(0) == 0);
  CHECK(modified_catalan(-1) == 0);
  CHECK_THROWS_AS(modified_catalan(29), rmtlab::RangeError);
}

TEST_CASE("modified Catalan recurrence equals the closed form", "[walks]") {
  CHECK(modified_catalan_recurrence(1) == 1);
  CHECK(modified_catalan_recurrence(2) == 6);
  CHECK(modified_catalan_recurrence(4) == 120);
  for (int m = 1; m <= 28; ++m) {
    INFO("m=" << m);
    CHECK(modified_catalan_recurrence(m) == modified_catalan(m));
  }
  CHECK_THROWS_AS(modified_catalan_recurrence(29), rmtlab::RangeError);
  CHECK_THROWS_AS(modified_catalan_recurrence(0), rmtlab::InvalidArgument);
}

TEST_CASE("generating-function identity holds coefficientwise", "[walks]") {
  CHECK(series_identity_check(1));
  CHECK(series_identity_check(10));
  CHECK(series_identity_check(25));
  CHECK_THROWS_AS(series_identity_check(26), rmtlab::InvalidArgument);

  // Independent check with 128-bit coefficients.
  const int top = 25;
  std::vector<unsigned __int128> c(top + 1), d(top + 1);
  for (int i = 0; i <= top; ++i) {
    c[static_cast<std::size_t>(i)] = catalan(i);
    d[static_cast<std::size_t>(i)] = modified_catalan(i);
  }
  for (int k = 1; k <= top; ++k) {
    unsigned __int128 rhs = 0;
    for (int i = 0; i + 1 <= k; ++i) rhs += 2 * c[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(k - 1 - i)];
    for (int a = 0; a <= k - 1; ++a)
      for (int b = 0; a + b <= k - 1; ++b)
        for (int e = 0; a + b + e <= k - 1; ++e)
          rhs += c[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(b)] * c[static_cast<std::size_t>(e)] *
                 c[static_cast<std::size_t>(k - 1 - a - b - e)];
    INFO("k=" << k);
    CHECK(rhs == d[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("series product truncates and detects overflow", "[walks]") {
  CHECK(series_product({1, 1}, {1, 1}, 5) == std::vector<Count>{1, 2, 1, 0, 0, 0});
  CHECK(series_product({1, 1}, {1, 1}, 1) == std::vector<Count>{1, 2});
  CHECK_THROWS_AS(series_product({1ull << 40}, {1ull << 40}, 0), rmtlab::RangeError);
}

TEST_CASE("admissible walk counts", "[walks]") {
  CHECK(count_admissible_walks(3, WalkProfile::two) == 5);
  CHECK(count_admissible_walks(1, WalkProfile::four) == 1);
  CHECK(count_admissible_walks(3, WalkProfile::four) == 28);
  for (int m = 1; m <= 5; ++m) CHECK(count_admissible_walks(m, WalkProfile::two) == catalan(m));
  for (int m = 1; m <= 4; ++m) CHECK(count_admissible_walks(m, WalkProfile::four) == modified_catalan(m));
  CHECK_THROWS_AS(count_admissible_walks(6, WalkProfile::two), rmtlab::RangeError);
  CHECK_THROWS_AS(count_admissible_walks(5, WalkProfile::four), rmtlab::RangeError);
  CHECK_THROWS_AS(count_admissible_walks(0, WalkProfile::two), rmtlab::InvalidArgument);
}

TEST_CASE("enumerated walks equal an unpruned brute-force search", "[walks]") {
  for (int m = 1; m <= 4; ++m) {
    for (auto profile : {WalkProfile::two, WalkProfile::four}) {
      auto fast = enumerate_admissible_walks(m, profile);
      auto slow = naive_walks(m, profile);
      std::sort(fast.begin(), fast.end());
      std::sort(slow.begin(), slow.end());
      INFO("m=" << m << " profile=" << (profile == WalkProfile::two ? "two" : "four"));
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("every enumerated walk is a closed tree walk with first-appearance labels", "[walks]") {
  for (int m = 1; m <= 4; ++m) {
    const auto walks = enumerate_admissible_walks(m, WalkProfile::four);
    std::set<Walk> distinct(walks.begin(), walks.end());
    CHECK(distinct.size() == walks.size());
    for (const auto& w : walks) {
      REQUIRE(w.front() == 1);
      REQUIRE(w.back() == 1);
      REQUIRE(w.size() == static_cast<std::size_t>(2 * m + 3));
      REQUIRE(spans_tree(w, m + 1));
      int seen = 0;
      for (int x : w) {
        REQUIRE(x <= seen + 1);
        seen = std::max(seen, x);
      }
      int fours = 0;
      for (const auto& [e, c] : edge_multiplicities(w)) {
        REQUIRE((c == 2 || c == 4));
        fours += c == 4;
      }
      REQUIRE(fours == 1);
    }
  }
}

TEST_CASE("spans_tree rejects cycles and disconnected edge sets", "[walks]") {
  CHECK(spans_tree({1, 2, 1}, 2));
  CHECK(spans_tree({1, 2, 3, 2, 1}, 3));
  CHECK_FALSE(spans_tree({1, 2, 3, 1}, 3));
  CHECK_FALSE(spans_tree({1, 2, 1}, 3));
}
