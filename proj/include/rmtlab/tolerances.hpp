#pragma once

namespace rmtlab {

// Every numeric tolerance and gate used by the library and its checks.
struct Tolerances {
  // Variance convention of an atom slot, relative.
  static constexpr double variance_match = 1e-12;

  // Classical-location solver.
  static constexpr double quantile_bracket = 1e-13;
  static constexpr int quantile_newton_steps = 2;

  // Exact enumeration oracles.
  static constexpr double exact_oracle = 1e-12;

  // Moment-formula quadrature against D_m.
  static constexpr double moment_formula = 1e-7;

  // Monte Carlo gates (z-scores).
  static constexpr double z_gate = 3.0;

  // Finite-size slack of the leading-order trace gap, in units of 1/n.
  static constexpr double finite_size_band = 5.0;

  // Eigen-solver sweeps per eigenvalue before declaring failure.
  static constexpr int eigen_sweeps_per_value = 30;

  // Bulk windows.
  static constexpr double correlation_bulk_lo = 0.1;
  static constexpr double correlation_bulk_hi = 0.9;
  static constexpr double profile_bulk_lo = 0.25;
  static constexpr double profile_bulk_hi = 0.75;
};

}  // namespace rmtlab
