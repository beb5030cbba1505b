#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rmtlab/error.hpp"
#include "rmtlab/montecarlo.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/tolerances.hpp"

namespace rmtlab {

/// A Monte Carlo (or exact) estimate with its standard error.
struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  bool exact = false;
};

/// Per-index aggregates of λ_i over trials (all unnormalised).
struct EnsembleSummary {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<double> gamma;  // classical locations γ_i
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> second_moment_about_gamma;  // E|λ_i − √n γ_i|²
  std::vector<double> std_error_mean;
  std::vector<double> std_error_second_moment;
  std::vector<double> fourth_moment;  // E λ_i⁴

  // Per-trial scalars whose trial-to-trial spread gives honest errors for
  // quantities that sum over correlated indices.
  MomentEstimate taylor_residual;    // (1/n²) Σ λ_i⁴ − (√nγ_i)⁴ − 4(√nγ_i)³(λ_i − √nγ_i)
  MomentEstimate bulk_localization;  // mean over the bulk window of |λ_i − √nγ_i|²

  // Trial covariance of (λ_1 … λ_n); empty unless requested.
  Eigen::MatrixXd covariance;
};

struct SummaryOptions {
  bool covariance = false;
};

/// First and last 1-based index of the window [lo·n, hi·n].
inline std::pair<std::size_t, std::size_t> index_window(std::size_t n, double lo, double hi) {
  const double dn = static_cast<double>(n);
  auto first = static_cast<std::size_t>(std::ceil(lo * dn));
  auto last = static_cast<std::size_t>(std::floor(hi * dn));
  first = std::clamp<std::size_t>(first, 1, n);
  last = std::clamp<std::size_t>(last, first, n);
  return {first, last};
}

/// Median of a sample; the mean of the two central order statistics for
/// even counts.
inline double sample_median(std::vector<double> xs) {
  if (xs.empty()) throw InvalidArgument("sample_median: empty sample");
  const auto mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Reduces a spectrum set in trial order, so the result is bit-identical no
/// matter how the spectra were produced.
inline EnsembleSummary summarize(const SpectrumSet& spectra, SummaryOptions options = {}) {
  if (spectra.empty()) throw InvalidArgument("summarize: no trials");
  EnsembleSummary s;
  s.n = spectra.front().size();
  s.trials = spectra.size();
  for (const auto& sp : spectra) {
    if (sp.size() != s.n) throw InvalidArgument("summarize: spectra of different sizes");
  }
  const std::size_t n = s.n;
  const std::size_t trials = s.trials;
  const double root_n = std::sqrt(static_cast<double>(n));
  s.gamma = ClassicalLocationTable(n).gamma;

  s.mean.resize(n);
  s.median.resize(n);
  s.second_moment_about_gamma.resize(n);
  s.std_error_mean.resize(n);
  s.std_error_second_moment.resize(n);
  s.fourth_moment.resize(n);

  std::vector<double> column(trials);
  std::vector<double> squares(trials);
  std::vector<double> quartic(trials);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = root_n * s.gamma[i];
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = spectra[t][i];
      column[t] = v;
      squares[t] = (v - centre) * (v - centre);
      quartic[t] = v * v * v * v;
    }
    const auto m = sample_moments(column);
    const auto sq = sample_moments(squares);
    s.mean[i] = m.mean;
    s.std_error_mean[i] = m.std_error();
    s.second_moment_about_gamma[i] = sq.mean;
    s.std_error_second_moment[i] = sq.std_error();
    s.fourth_moment[i] = sample_moments(quartic).mean;
    s.median[i] = sample_median(column);
  }

  const auto [bulk_first, bulk_last] =
      index_window(n, Tolerances::profile_bulk_lo, Tolerances::profile_bulk_hi);
  std::vector<double> residual(trials);
  std::vector<double> bulk(trials);
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t t = 0; t < trials; ++t) {
    CompensatedSum r;
    CompensatedSum b;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = root_n * s.gamma[i];
      const double v = spectra[t][i];
      r.add(v * v * v * v - c * c * c * c - 4.0 * c * c * c * (v - c));
      if (i + 1 >= bulk_first && i + 1 <= bulk_last) b.add((v - c) * (v - c));
    }
    residual[t] = r.value() / n2;
    bulk[t] = b.value() / static_cast<double>(bulk_last - bulk_first + 1);
  }
  const auto rm = sample_moments(residual);
  s.taylor_residual = {rm.mean, rm.std_error(), trials, false};
  const auto bm = sample_moments(bulk);
  s.bulk_localization = {bm.mean, bm.std_error(), trials, false};

  if (options.covariance) {
    Eigen::MatrixXd centred(static_cast<Eigen::Index>(trials), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < trials; ++t)
      for (std::size_t i = 0; i < n; ++i)
        centred(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
            spectra[t][i] - s.mean[i];
    const double denom = trials > 1 ? static_cast<double>(trials - 1) : 1.0;
    s.covariance = (centred.transpose() * centred) / denom;
  }
  return s;
}

}  // namespace rmtlab
