#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/error.hpp"
#include "rmtlab/montecarlo.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/summary.hpp"
#include "rmtlab/tolerances.hpp"
#include "rmtlab/walks.hpp"

// Exact and Monte Carlo checks of the trace-moment gap
// Σ_i E λ_i^k − E λ'_i^k between two Wigner ensembles.

namespace rmtlab {

inline constexpr std::size_t max_exact_dimension = 3;
inline constexpr unsigned max_exact_power = 6;

namespace detail {

// One scalar random variable of the matrix entries, for enumeration.
struct EntryVariable {
  std::vector<AtomPoint> support;
};

template <class Matrix>
double trace_of_power(const Matrix& m, unsigned k) {
  if (k == 0) return static_cast<double>(m.rows());
  Matrix p = m;
  for (unsigned j = 1; j < k; ++j) p = p * m;
  return std::real(p.trace());
}

}  // namespace detail

/// E tr M^k by exhaustive enumeration over every configuration of the
/// (discrete) entries. Probabilities are exact rationals; each configuration
/// weight is formed as an integer ratio before conversion.
inline double exact_trace_moment(const EnsembleSpec& spec, unsigned k) {
  spec.validate();
  if (spec.n > max_exact_dimension || k > max_exact_power)
    throw UnsupportedInput("exact_trace_moment: enumeration budget is n <= 3, k <= 6");
  if (!spec.off_diagonal.is_discrete() || !spec.diagonal.is_discrete())
    throw UnsupportedInput("exact_trace_moment: atoms must be discrete (bernoulli, three_point)");

  const bool complex = spec.symmetry == SymmetryClass::complex_hermitian;
  const auto n = static_cast<Eigen::Index>(spec.n);
  std::vector<detail::EntryVariable> vars;
  for (Eigen::Index i = 0; i < n; ++i) {
    vars.push_back({spec.diagonal.support()});
    for (Eigen::Index j = i + 1; j < n; ++j) {
      vars.push_back({spec.off_diagonal.support()});
      if (complex) vars.push_back({spec.off_diagonal.support()});
    }
  }

  std::vector<std::size_t> digit(vars.size(), 0);
  CompensatedSum total;
  Eigen::MatrixXcd m(n, n);
  for (;;) {
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    std::size_t v = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& d = vars[v].support[digit[v]];
      num *= d.numerator;
      den *= d.denominator;
      m(i, i) = d.value;
      ++v;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const auto& re = vars[v].support[digit[v]];
        num *= re.numerator;
        den *= re.denominator;
        ++v;
        double im = 0.0;
        if (complex) {
          const auto& ip = vars[v].support[digit[v]];
          num *= ip.numerator;
          den *= ip.denominator;
          im = ip.value;
          ++v;
        }
        m(i, j) = {re.value, im};
        m(j, i) = {re.value, -im};
      }
    }
    const double weight = static_cast<double>(num) / static_cast<double>(den);
    total.add(weight * detail::trace_of_power(m, k));

    std::size_t pos = 0;
    while (pos < digit.size() && ++digit[pos] == vars[pos].support.size()) digit[pos++] = 0;
    if (pos == digit.size()) break;
  }
  return total.value();
}

/// E tr M^k − E tr M'^k by exhaustive enumeration (n ≤ 3, k ≤ 6, discrete atoms).
inline double exact_trace_moment_diff(const EnsembleSpec& a, const EnsembleSpec& b, unsigned k) {
  check_compatible(a, b);
  return exact_trace_moment(a, k) - exact_trace_moment(b, k);
}

/// Leading-order trace gap D_{(k−2)/2}·(E|ζ|⁴ − E|ζ'|⁴)·n^{k/2}. For the
/// complex class this is 2 D_{(k−2)/2} κ₀ n^{k/2}.
inline double leading_trace_gap(const EnsembleSpec& a, const EnsembleSpec& b, unsigned k) {
  if (k % 2 != 0) return 0.0;
  const double d = static_cast<double>(walks::modified_catalan((static_cast<int>(k) - 2) / 2));
  return d * entry_fourth_gap(a, b) * std::pow(static_cast<double>(a.n), k / 2.0);
}

/// Reference value for the k-th trace gap: 0 for odd k and k = 2, the exact
/// fourth-moment gap for k = 4, the leading term beyond.
inline double trace_gap_target(const EnsembleSpec& a, const EnsembleSpec& b, unsigned k) {
  check_compatible(a, b);
  if (k % 2 == 1 || k == 2) return 0.0;
  if (k == 4) return trace4_gap(a, b);
  return leading_trace_gap(a, b, k);
}

/// Monte Carlo E tr M^k − E tr M'^k from independent streams for the two
/// ensembles. The standard error is that of a difference of independent means.
inline MomentEstimate mc_trace_moment_diff(const EnsembleSpec& a, const EnsembleSpec& b,
                                           unsigned k, std::size_t trials, Seed seed,
                                           unsigned threads = 1) {
  check_compatible(a, b);
  if (k < 1 || k > 10) throw InvalidArgument("mc_trace_moment_diff: k must lie in 1..10");
  if (trials < 100) throw InvalidArgument("mc_trace_moment_diff: need at least 100 trials");
  struct Pair {
    double a = 0.0;
    double b = 0.0;
  };
  const auto per_trial = map_trials(trials, threads, [&](std::size_t t) {
    Pair p;
    p.a = trace_power(eigenvalues(sample_wigner(a, seed, trial_stream(a.n, EnsembleRole::a, t))), k);
    p.b = trace_power(eigenvalues(sample_wigner(b, seed, trial_stream(b.n, EnsembleRole::b, t))), k);
    return p;
  });
  std::vector<double> xs(trials), ys(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    xs[t] = per_trial[t].a;
    ys[t] = per_trial[t].b;
  }
  const auto ma = sample_moments(xs);
  const auto mb = sample_moments(ys);
  const double se = std::sqrt(ma.variance / static_cast<double>(trials) +
                              mb.variance / static_cast<double>(trials));
  return {ma.mean - mb.mean, se, trials, false};
}

/// |estimate − target| in standard errors.
inline double z_score(const MomentEstimate& e, double target) {
  const double diff = std::abs(e.value - target);
  if (e.std_error == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / e.std_error;
}

/// Distance from the estimate to the band [lo, hi], in standard errors.
inline double band_z_score(const MomentEstimate& e, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  if (e.value >= lo && e.value <= hi) return 0.0;
  return z_score(e, e.value < lo ? lo : hi);
}

/// (1/n²) Σ_i E λ_i⁴ − (√n γ_i)⁴ − 4(√n γ_i)³(E λ_i − √n γ_i), evaluated from
/// the per-index means. The standard error comes from the per-trial spread of
/// the same sum.
inline MomentEstimate fourth_moment_taylor_residual(const EnsembleSummary& summary) {
  if (summary.trials < 500)
    throw InvalidArgument("fourth_moment_taylor_residual: need a summary of at least 500 trials");
  const double root_n = std::sqrt(static_cast<double>(summary.n));
  CompensatedSum sum;
  for (std::size_t i = 0; i < summary.n; ++i) {
    const double c = root_n * summary.gamma[i];
    sum.add(summary.fourth_moment[i] - c * c * c * c - 4.0 * c * c * c * (summary.mean[i] - c));
  }
  const double n2 = static_cast<double>(summary.n) * static_cast<double>(summary.n);
  return {sum.value() / n2, summary.taylor_residual.std_error, summary.trials, false};
}

}  // namespace rmtlab
