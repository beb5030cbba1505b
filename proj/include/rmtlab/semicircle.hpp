#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "rmtlab/error.hpp"
#include "rmtlab/tolerances.hpp"

namespace rmtlab {

// Semicircle law analytics. Throughout, ρ_sc is the probability density
// (1/2π)·√(4 − x²) on [−2, 2].

inline constexpr double inv_two_pi = 0.5 * std::numbers::inv_pi;

inline double rho_sc(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return inv_two_pi * std::sqrt(4.0 - x * x);
}

inline double cdf_sc(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) * (0.25 * std::numbers::inv_pi) +
         std::asin(0.5 * x) * std::numbers::inv_pi;
}

/// γ_i: the root of cdf_sc(γ) = i/n, 1 ≤ i ≤ n. Bisection down to a 1e-13
/// bracket, then Newton polish kept inside the bracket.
inline double classical_location(std::size_t i, std::size_t n) {
  if (n == 0 || i < 1 || i > n)
    throw InvalidArgument("classical_location: need 1 <= i <= n (i=" + std::to_string(i) +
                          ", n=" + std::to_string(n) + ")");
  if (i == n) return 2.0;
  const double p = static_cast<double>(i) / static_cast<double>(n);
  double lo = -2.0;
  double hi = 2.0;
  double x = 0.0;
  while (hi - lo > Tolerances::quantile_bracket) {
    x = 0.5 * (lo + hi);
    const double f = cdf_sc(x);
    if (f == p) return x;
    (f < p ? lo : hi) = x;
  }
  x = 0.5 * (lo + hi);
  for (int step = 0; step < Tolerances::quantile_newton_steps; ++step) {
    const double d = rho_sc(x);
    if (d <= 0.0) break;
    const double next = x - (cdf_sc(x) - p) / d;
    if (!(next > lo && next < hi)) break;
    x = next;
  }
  return x;
}

/// γ_1 … γ_n for one dimension.
struct ClassicalLocationTable {
  std::size_t n = 0;
  std::vector<double> gamma;

  explicit ClassicalLocationTable(std::size_t dim) : n(dim), gamma(dim) {
    for (std::size_t i = 1; i <= dim; ++i) gamma[i - 1] = classical_location(i, dim);
  }

  /// γ_i with 1-based i.
  double operator()(std::size_t i) const { return gamma.at(i - 1); }
};

/// Response density of the fourth moment,
/// g(x) = (1/2π)(x⁴ − 4x² + 2)/√(4 − x²) on (−2, 2), zero outside.
inline double g_density(double x) {
  const double ax = std::abs(x);
  if (ax == 2.0) throw SingularPoint("g_density: singular at |x| = 2");
  if (ax > 2.0) return 0.0;
  const double x2 = x * x;
  return inv_two_pi * (x2 * x2 - 4.0 * x2 + 2.0) / std::sqrt(4.0 - x2);
}

/// −(1/8π)(x³ − 2x)√(4 − x²); an antiderivative of g vanishing at ±2.
inline double g_antiderivative(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return -(0.125 * std::numbers::inv_pi) * (x * x * x - 2.0 * x) * std::sqrt(4.0 - x * x);
}

namespace detail {

/// N-point Gauss–Legendre rule on [−1, 1] by Newton iteration on P_N.
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }
};

}  // namespace detail

/// Composite Gauss–Legendre (8 panels × 32 nodes) of f over [a, b].
template <class F>
double integrate_gauss(F&& f, double a, double b) {
  constexpr int panels = 8;
  const auto& rule = detail::GaussLegendre<32>::instance();
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (int j = 0; j < 32; ++j) s += rule.weights[j] * f(mid + 0.5 * h * rule.nodes[j]);
    total += 0.5 * h * s;
  }
  return total;
}

/// ∫ g(x) f(x) dx over [−2, 2]. With x = 2 sin θ the weight becomes
/// (1/2π)(x⁴ − 4x² + 2) dθ, which is smooth.
template <class F>
double integrate_against_g(F&& f) {
  return integrate_gauss(
      [&](double theta) {
        const double x = 2.0 * std::sin(theta);
        const double x2 = x * x;
        return inv_two_pi * (x2 * x2 - 4.0 * x2 + 2.0) * f(x);
      },
      -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
}

/// ∫ ρ_sc(x) f(x) dx; under x = 2 sin θ, ρ_sc dx = (2/π) cos²θ dθ.
template <class F>
double integrate_against_semicircle(F&& f) {
  return integrate_gauss(
      [&](double theta) {
        const double c = std::cos(theta);
        return 2.0 * std::numbers::inv_pi * c * c * f(2.0 * std::sin(theta));
      },
      -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
}

/// ∫ g(x) x^k dx for even 0 ≤ k ≤ 16; equals D_{(k−2)/2}.
inline double d_moment_integral(int k) {
  if (k < 0 || k > 16) throw UnsupportedOrder("d_moment_integral: k must lie in 0..16");
  if (k % 2 != 0)
    throw UnsupportedOrder("d_moment_integral: odd k (integrand is odd, integral is 0)");
  return integrate_against_g([k](double x) { return std::pow(x, k); });
}

/// Quantile-sum discretisation (1/n) Σ_i (1/4)(γ_i³ − 2γ_i)·k·γ_i^{k−1}, which
/// tends to D_{(k−2)/2} as n grows.
inline double quantile_shift_moment_sum(int k, std::size_t n) {
  if (k < 1) throw InvalidArgument("quantile_shift_moment_sum: k must be positive");
  const ClassicalLocationTable table(n);
  double sum = 0.0;
  for (double g : table.gamma) sum += 0.25 * (g * g * g - 2.0 * g) * k * std::pow(g, k - 1);
  return sum / static_cast<double>(n);
}

/// Predicted fourth-moment response of E λ_i:
/// (1/(4√n))·(γ_i³ − 2γ_i)·eta4.
inline double predicted_shift(std::size_t i, std::size_t n, double eta4) {
  const double g = classical_location(i, n);
  return (g * g * g - 2.0 * g) * eta4 / (4.0 * std::sqrt(static_cast<double>(n)));
}

/// Heuristic eigenvalue spacing min(i, n−i)^{−1/3} n^{−1/6} (unnormalised scale).
inline double spacing_scale(std::size_t i, std::size_t n) {
  if (i < 1 || i >= n) throw InvalidArgument("spacing_scale: need 1 <= i < n");
  const double m = static_cast<double>(std::min(i, n - i));
  return std::pow(m, -1.0 / 3.0) * std::pow(static_cast<double>(n), -1.0 / 6.0);
}

/// Σ_i |E λ_i − E λ'_i| predicted by the fourth-moment response:
/// (√n |κ₀| / 4) ∫ |x³ − 2x| ρ_sc(x) dx. The kink at 0, ±√2 is handled by
/// splitting the θ-range at the corresponding angles.
inline double predicted_aggregate_shift(std::size_t n, double kappa0) {
  const double cut = std::asin(std::sqrt(2.0) / 2.0);  // x = √2  <=> θ = π/4
  auto weight = [](double theta) {
    const double x = 2.0 * std::sin(theta);
    const double c = std::cos(theta);
    return 2.0 * std::numbers::inv_pi * c * c * std::abs(x * x * x - 2.0 * x);
  };
  const double half = integrate_gauss(weight, 0.0, cut) +
                      integrate_gauss(weight, cut, 0.5 * std::numbers::pi);
  return std::sqrt(static_cast<double>(n)) * std::abs(kappa0) / 4.0 * (2.0 * half);
}

}  // namespace rmtlab
