#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace rmtlab {

/// Neumaier-compensated running sum. Deterministic for a fixed add order.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Mean and unbiased variance of a sample, accumulated in index order.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;

  double std_error() const {
    return count > 1 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
  }
};

template <class Range>
SampleMoments sample_moments(const Range& xs) {
  SampleMoments m;
  CompensatedSum s;
  for (double x : xs) {
    s.add(x);
    ++m.count;
  }
  if (m.count == 0) return m;
  m.mean = s.value() / static_cast<double>(m.count);
  CompensatedSum ss;
  for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
  m.variance = m.count > 1 ? ss.value() / static_cast<double>(m.count - 1) : 0.0;
  return m;
}

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns
/// the results indexed by i. Output never depends on the worker count as long
/// as fn(i) is a pure function of i.
template <class Fn>
auto map_trials(std::size_t count, unsigned threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> out(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace rmtlab
