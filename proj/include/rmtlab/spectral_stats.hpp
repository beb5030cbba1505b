#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/error.hpp"
#include "rmtlab/montecarlo.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/summary.hpp"
#include "rmtlab/tolerances.hpp"

namespace rmtlab {

/// N_I: number of normalised eigenvalues λ_i/√n in the closed interval [a, b].
inline std::size_t counting_function(const Spectrum& s, double a, double b) {
  if (a > b) throw InvalidArgument("counting_function: need a <= b");
  const double root_n = std::sqrt(static_cast<double>(s.size()));
  const auto first = std::partition_point(s.values.begin(), s.values.end(),
                                          [&](double v) { return v / root_n < a; });
  const auto last = std::partition_point(first, s.values.end(),
                                         [&](double v) { return v / root_n <= b; });
  return static_cast<std::size_t>(last - first);
}

// ---------------------------------------------------------------------------
// Δ = sup_x |F_n(x) − cdf_sc(x)| with F_n(x) = (1/n) E N_[−2, x].

struct DeltaResult {
  double delta = 0.0;
  double std_error = 0.0;  // Monte Carlo error of F̂_n at the maximising point
  double argmax = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
};

/// Uniform grid on [−2.5, 2.5] with spacing 1/(2n).
inline std::vector<double> delta_grid(std::size_t n) {
  const std::size_t points = 10 * n + 1;
  std::vector<double> grid(points);
  for (std::size_t j = 0; j < points; ++j)
    grid[j] = -2.5 + 5.0 * static_cast<double>(j) / static_cast<double>(points - 1);
  return grid;
}

inline DeltaResult delta_statistic(const SpectrumSet& spectra, const std::vector<double>& grid) {
  if (spectra.empty()) throw InvalidArgument("delta_statistic: no trials");
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
    throw InvalidArgument("delta_statistic: grid must be sorted and non-empty");
  const std::size_t n = spectra.front().size();
  const double dn = static_cast<double>(n);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (grid[j] - grid[j - 1] > 1.0 / dn + 1e-15)
      throw InvalidArgument("delta_statistic: grid spacing must not exceed 1/n");
  }
  if (grid.front() > -2.5 || grid.back() < 2.5)
    throw InvalidArgument("delta_statistic: grid must span [-2.5, 2.5]");

  std::vector<double> sum(grid.size(), 0.0);
  std::vector<double> sum_sq(grid.size(), 0.0);
  for (const auto& sp : spectra) {
    if (sp.size() != n) throw InvalidArgument("delta_statistic: spectra of different sizes");
    const double root_n = std::sqrt(dn);
    const auto below = static_cast<std::size_t>(
        std::partition_point(sp.values.begin(), sp.values.end(),
                             [&](double v) { return v / root_n < -2.0; }) -
        sp.values.begin());
    std::size_t upto = 0;  // eigenvalues with λ/√n <= x
    for (std::size_t j = 0; j < grid.size(); ++j) {
      while (upto < n && sp.values[upto] / root_n <= grid[j]) ++upto;
      const double count = grid[j] < -2.0 ? 0.0 : static_cast<double>(upto - std::min(upto, below));
      const double f = count / dn;
      sum[j] += f;
      sum_sq[j] += f * f;
    }
  }
  const double trials = static_cast<double>(spectra.size());
  DeltaResult r;
  r.n = n;
  r.trials = spectra.size();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double mean = sum[j] / trials;
    const double dev = std::abs(mean - cdf_sc(grid[j]));
    if (dev > r.delta || j == 0) {
      r.delta = dev;
      r.argmax = grid[j];
      const double var =
          trials > 1 ? std::max(0.0, (sum_sq[j] - trials * mean * mean) / (trials - 1)) : 0.0;
      r.std_error = std::sqrt(var / trials);
    }
  }
  return r;
}

inline DeltaResult delta_statistic(const EnsembleSpec& spec, std::size_t trials,
                                   const std::vector<double>& grid, Seed seed,
                                   unsigned threads = 1) {
  return delta_statistic(sample_spectra(spec, trials, seed, EnsembleRole::a, threads), grid);
}

// ---------------------------------------------------------------------------
// Localisation profile E|λ_i − √n γ_i|².

struct LocalizationProfile {
  std::size_t n = 0;
  std::vector<double> gamma;
  std::vector<double> second_moment;
  std::vector<double> std_error;
  std::vector<std::size_t> flagged;  // bulk indices (1-based) above the ceiling
  MomentEstimate bulk_mean;          // average over the bulk window
};

inline LocalizationProfile localization_profile(const EnsembleSummary& summary,
                                                double bulk_ceiling = 1.0) {
  if (summary.trials < 500)
    throw InvalidArgument("localization_profile: need a summary of at least 500 trials");
  LocalizationProfile p;
  p.n = summary.n;
  p.gamma = summary.gamma;
  p.second_moment = summary.second_moment_about_gamma;
  p.std_error = summary.std_error_second_moment;
  const auto [first, last] =
      index_window(summary.n, Tolerances::profile_bulk_lo, Tolerances::profile_bulk_hi);
  for (std::size_t i = first; i <= last; ++i) {
    if (p.second_moment[i - 1] > bulk_ceiling) p.flagged.push_back(i);
  }
  p.bulk_mean = summary.bulk_localization;
  return p;
}

// ---------------------------------------------------------------------------
// Fourth-moment shift experiment.

struct ShiftCurve {
  std::size_t n = 0;
  std::size_t trials = 0;
  double kappa0 = 0.0;
  std::vector<std::size_t> indices;  // 1-based
  std::vector<double> gamma;
  std::vector<double> f1;  // 4√n (Ê λ_i − Ê λ'_i) / κ₀
  std::vector<double> f1_std_error;
  std::vector<double> f2;  // γ_i³ − 2γ_i
  EnsembleSummary a;
  EnsembleSummary b;

  double aggregate = 0.0;        // S = Σ_i |Ê λ_i − Ê λ'_i|
  double aggregate_noise = 0.0;  // Σ_i SE(Ê λ_i − Ê λ'_i)
  std::size_t witness_index = 0;  // argmax_i |Ê λ_i − Ê λ'_i| / spacing_scale(i, n)
};

namespace detail {

inline void check_shift_pair(const EnsembleSpec& a, const EnsembleSpec& b) {
  check_compatible(a, b);
  for (const auto* atom : {&a.off_diagonal, &b.off_diagonal}) {
    if (atom_moment(*atom, 3) != 0.0)
      throw InvalidArgument("shift_experiment: atoms must have vanishing third moment");
  }
  if (fourth_gap(a.off_diagonal, b.off_diagonal) == 0.0)
    throw DegenerateExperiment("shift_experiment: κ₀ = 0, the two ensembles share E η⁴");
}

}  // namespace detail

/// Builds the curve from already-sampled spectra of the two ensembles.
inline ShiftCurve shift_curve(const EnsembleSpec& spec_a, const EnsembleSpec& spec_b,
                              const SpectrumSet& spectra_a, const SpectrumSet& spectra_b) {
  detail::check_shift_pair(spec_a, spec_b);
  ShiftCurve c;
  c.a = summarize(spectra_a, {.covariance = true});
  c.b = summarize(spectra_b, {.covariance = true});
  if (c.a.n != spec_a.n || c.b.n != spec_b.n)
    throw InvalidArgument("shift_curve: spectra do not match the ensemble dimension");
  c.n = spec_a.n;
  c.trials = std::min(c.a.trials, c.b.trials);
  c.kappa0 = fourth_gap(spec_a.off_diagonal, spec_b.off_diagonal);
  c.gamma = c.a.gamma;
  const double scale = 4.0 * std::sqrt(static_cast<double>(c.n)) / c.kappa0;
  CompensatedSum aggregate;
  CompensatedSum noise;
  double best = -1.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double diff = c.a.mean[i] - c.b.mean[i];
    const double se = std::hypot(c.a.std_error_mean[i], c.b.std_error_mean[i]);
    const double g = c.gamma[i];
    c.indices.push_back(i + 1);
    c.f1.push_back(scale * diff);
    c.f1_std_error.push_back(std::abs(scale) * se);
    c.f2.push_back(g * g * g - 2.0 * g);
    aggregate.add(std::abs(diff));
    noise.add(se);
    if (i + 1 < c.n) {
      const double w = std::abs(diff) / spacing_scale(i + 1, c.n);
      if (w > best) {
        best = w;
        c.witness_index = i + 1;
      }
    }
  }
  c.aggregate = aggregate.value();
  c.aggregate_noise = noise.value();
  return c;
}

inline ShiftCurve shift_experiment(const EnsembleSpec& a, const EnsembleSpec& b,
                                   std::size_t trials, Seed seed, unsigned threads = 1) {
  detail::check_shift_pair(a, b);
  return shift_curve(a, b, sample_spectra(a, trials, seed, EnsembleRole::a, threads),
                     sample_spectra(b, trials, seed, EnsembleRole::b, threads));
}

/// Pearson correlation of f1 and f2 over indices i ∈ [lo·n, hi·n].
inline double bulk_correlation(const ShiftCurve& c,
                               double lo = Tolerances::correlation_bulk_lo,
                               double hi = Tolerances::correlation_bulk_hi) {
  const auto [first, last] = index_window(c.n, lo, hi);
  const auto count = static_cast<double>(last - first + 1);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    mx += c.f1[i - 1];
    my += c.f2[i - 1];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dx = c.f1[i - 1] - mx;
    const double dy = c.f2[i - 1] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Lower confidence value for S/√n: (S − z·Σ_i SE_i)/√n. The summed standard
/// errors bound the noise of S whatever the correlation between indices.
inline double aggregate_lower_bound(const ShiftCurve& c, double z = Tolerances::z_gate) {
  return (c.aggregate - z * c.aggregate_noise) / std::sqrt(static_cast<double>(c.n));
}

struct NormalizedShiftSum {
  int k = 0;
  double value = 0.0;
  double std_error = 0.0;
};

/// (1/n) Σ_i k γ_i^{k−1} ŝ_i with ŝ_i = √n(Ê λ_i − Ê λ'_i) − ¼(γ_i³ − 2γ_i)κ₀.
/// The error propagates the full trial covariance of both ensembles.
inline std::vector<NormalizedShiftSum> normalized_shift_check(const ShiftCurve& c,
                                                              const std::vector<int>& k_values) {
  const auto n = static_cast<Eigen::Index>(c.n);
  if (c.a.covariance.rows() != n || c.b.covariance.rows() != n)
    throw InvalidArgument("normalized_shift_check: curve lacks trial covariances");
  const double root_n = std::sqrt(static_cast<double>(c.n));
  std::vector<NormalizedShiftSum> out;
  for (int k : k_values) {
    if (k < 1) throw InvalidArgument("normalized_shift_check: k must be positive");
    Eigen::VectorXd w(n);
    CompensatedSum sum;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double g = c.gamma[u];
      const double weight = k * std::pow(g, k - 1) / static_cast<double>(c.n);
      const double s =
          root_n * (c.a.mean[u] - c.b.mean[u]) - 0.25 * (g * g * g - 2.0 * g) * c.kappa0;
      sum.add(weight * s);
      w(i) = weight * root_n;
    }
    const double var = w.dot(c.a.covariance * w) / static_cast<double>(c.a.trials) +
                       w.dot(c.b.covariance * w) / static_cast<double>(c.b.trials);
    out.push_back({k, sum.value(), std::sqrt(std::max(var, 0.0))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counting-function fluctuations.

struct CountingStatistics {
  std::size_t n = 0;
  std::size_t trials = 0;
  double lo = 0.0;
  double hi = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double expected = 0.0;  // n ∫_I ρ_sc
  double variance_over_log_n = 0.0;
  double concentrated_fraction = 0.0;  // share of trials with |N_I − expected| ≤ n^0.6
};

inline CountingStatistics counting_statistics(const SpectrumSet& spectra, double lo, double hi) {
  if (spectra.empty()) throw InvalidArgument("counting_statistics: no trials");
  if (lo > hi) throw InvalidArgument("counting_statistics: need lo <= hi");
  CountingStatistics r;
  r.n = spectra.front().size();
  r.trials = spectra.size();
  r.lo = lo;
  r.hi = hi;
  const double dn = static_cast<double>(r.n);
  r.expected = dn * (cdf_sc(hi) - cdf_sc(lo));
  const double tolerance = std::pow(dn, 0.6);
  std::vector<double> counts(spectra.size());
  std::size_t inside = 0;
  for (std::size_t t = 0; t < spectra.size(); ++t) {
    counts[t] = static_cast<double>(counting_function(spectra[t], lo, hi));
    if (std::abs(counts[t] - r.expected) <= tolerance) ++inside;
  }
  const auto m = sample_moments(counts);
  r.mean = m.mean;
  r.variance = m.variance;
  r.variance_over_log_n = r.n > 1 ? m.variance / std::log(dn) : 0.0;
  r.concentrated_fraction = static_cast<double>(inside) / static_cast<double>(spectra.size());
  return r;
}

/// Var N_I for GUE at each n.
inline std::vector<CountingStatistics> gue_counting_variance(const std::vector<std::size_t>& n_values,
                                                             double lo, double hi,
                                                             std::size_t trials, Seed seed,
                                                             unsigned threads = 1) {
  if (!(lo > -2.0 && hi < 2.0))
    throw InvalidArgument("gue_counting_variance: interval must lie strictly inside (-2, 2)");
  std::vector<CountingStatistics> out;
  for (std::size_t n : n_values) {
    out.push_back(counting_statistics(
        sample_spectra(EnsembleSpec::gue(n), trials, seed, EnsembleRole::a, threads), lo, hi));
  }
  return out;
}

/// Number of samples with spectral norm at least factor·√n.
inline std::size_t norm_exceedances(const SpectrumSet& spectra, double factor = 3.0) {
  std::size_t count = 0;
  for (const auto& s : spectra) {
    if (spectral_norm(s) >= factor * std::sqrt(static_cast<double>(s.size()))) ++count;
  }
  return count;
}

}  // namespace rmtlab
