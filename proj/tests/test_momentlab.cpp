#include "catch_amalgamated.hpp"

#include <cmath>

#include "rmtlab/momentlab.hpp"
#include "rmtlab/summary.hpp"

using namespace rmtlab;

namespace {

const double half = std::sqrt(0.5);

EnsembleSpec complex_spec(std::size_t n, AtomDistribution off, AtomDistribution diag) {
  return {n, SymmetryClass::complex_hermitian, off, diag};
}

EnsembleSpec complex_gauss_vs_laplace(std::size_t n, bool laplace) {
  return complex_spec(n, laplace ? AtomDistribution::laplace(0.5) : AtomDistribution::gaussian(half),
                      AtomDistribution::gaussian(1.0));
}

}  // namespace

TEST_CASE("exact trace gap at n = 2, k = 4", "[momentlab]") {
  const auto tp = AtomDistribution::three_point(half);
  const auto b = AtomDistribution::bernoulli(half);
  const auto db = AtomDistribution::bernoulli(1.0);
  const auto dt = AtomDistribution::three_point(1.0);

  const double v = exact_trace_moment_diff(complex_spec(2, tp, db), complex_spec(2, b, db), 4);
  CHECK(std::abs(v - 2.0) <= 1e-12);

  const auto same = complex_spec(2, tp, dt);
  CHECK(std::abs(exact_trace_moment_diff(same, same, 4)) <= 1e-12);
  CHECK(std::abs(exact_trace_moment_diff(complex_spec(2, tp, dt), complex_spec(2, b, dt), 2)) <= 1e-12);
}

TEST_CASE("exact k = 4 gap equals 2κ₀(n²−n) for discrete pairs", "[momentlab]") {
  const auto tp = AtomDistribution::three_point(half);
  const auto b = AtomDistribution::bernoulli(half);
  struct Pair {
    EnsembleSpec a, b;
  };
  const std::vector<Pair> pairs{
      {complex_spec(2, tp, AtomDistribution::bernoulli(1)), complex_spec(2, b, AtomDistribution::bernoulli(1))},
      {complex_spec(2, b, AtomDistribution::three_point(1)), complex_spec(2, tp, AtomDistribution::three_point(1))},
      {complex_spec(2, tp, AtomDistribution::three_point(1)), complex_spec(2, b, AtomDistribution::three_point(1))}};
  for (const auto& p : pairs) {
    const double kappa0 = fourth_gap(p.a.off_diagonal, p.b.off_diagonal);
    CHECK(std::abs(exact_trace_moment_diff(p.a, p.b, 4) - 2 * kappa0 * 2) <= 1e-12);
  }
}

TEST_CASE("exact k = 4 gap with differing diagonals and in the real class", "[momentlab]") {
  const auto b1 = AtomDistribution::bernoulli(1.0);
  const auto t1 = AtomDistribution::three_point(1.0);
  // Real class, n = 2: tr M⁴ = a⁴ + d⁴ + 2c⁴ + 4c²(a² + ad + d²).
  // Only E c⁴, E a⁴, E d⁴ differ: gap = 2(1 − 3) + 2(1 − 3) = −8.
  const auto ra = EnsembleSpec::real_iid(2, b1);
  const auto rb = EnsembleSpec::real_iid(2, t1);
  CHECK(std::abs(exact_trace_moment_diff(ra, rb, 4) - (-8.0)) <= 1e-12);
  CHECK(std::abs(exact_trace_moment_diff(ra, rb, 4) - trace4_gap(ra, rb)) <= 1e-12);

  const auto ca = complex_spec(3, AtomDistribution::three_point(half), b1);
  const auto cb = complex_spec(3, AtomDistribution::bernoulli(half), t1);
  CHECK(std::abs(exact_trace_moment_diff(ca, cb, 4) - trace4_gap(ca, cb)) <= 1e-11);
}

TEST_CASE("exact enumeration of single configurations", "[momentlab]") {
  // Bernoulli(1) real n = 1: tr M^k = (±1)^k.
  const auto one = EnsembleSpec::real_iid(1, AtomDistribution::bernoulli(1.0));
  CHECK(exact_trace_moment(one, 4) == 1.0);
  CHECK(exact_trace_moment(one, 3) == 0.0);
  // E tr M² = Σ E|ζ_ij|² = n² under the variance convention.
  const auto c3 = complex_spec(3, AtomDistribution::bernoulli(half), AtomDistribution::bernoulli(1.0));
  CHECK(std::abs(exact_trace_moment(c3, 2) - 9.0) <= 1e-12);
}

TEST_CASE("exact enumeration budget and atom restrictions", "[momentlab]") {
  const auto b = AtomDistribution::bernoulli(half);
  CHECK_THROWS_AS(exact_trace_moment(complex_spec(4, b, AtomDistribution::bernoulli(1)), 4), UnsupportedInput);
  CHECK_THROWS_AS(exact_trace_moment(complex_spec(2, b, AtomDistribution::bernoulli(1)), 7), UnsupportedInput);
  CHECK_THROWS_AS(exact_trace_moment(EnsembleSpec::gue(2), 4), UnsupportedInput);
}

TEST_CASE("leading trace gap and targets", "[momentlab]") {
  const auto a = complex_gauss_vs_laplace(60, false);
  const auto b = complex_gauss_vs_laplace(60, true);
  const double kappa0 = fourth_gap(a.off_diagonal, b.off_diagonal);
  CHECK(kappa0 == Catch::Approx(-0.75).margin(1e-14));
  CHECK(leading_trace_gap(a, b, 6) == Catch::Approx(12 * kappa0 * 60.0 * 60 * 60).epsilon(1e-14));
  CHECK(leading_trace_gap(a, b, 4) == Catch::Approx(2 * kappa0 * 3600).epsilon(1e-14));
  CHECK(trace_gap_target(a, b, 4) == Catch::Approx(2 * kappa0 * (3600 - 60)).epsilon(1e-14));
  CHECK(trace_gap_target(a, b, 5) == 0.0);
  CHECK(trace_gap_target(a, b, 2) == 0.0);
}

TEST_CASE("Monte Carlo trace gaps: identical ensembles and odd powers", "[momentlab][montecarlo]") {
  const auto a = complex_gauss_vs_laplace(20, false);
  const auto b = complex_gauss_vs_laplace(20, true);
  const auto same = mc_trace_moment_diff(a, a, 4, 1000, Seed{1}, 4);
  CHECK(z_score(same, 0.0) <= 3.0);
  CHECK_FALSE(same.exact);
  for (unsigned k : {1u, 3u, 5u}) {
    const auto odd = mc_trace_moment_diff(a, b, k, 1000, Seed{2}, 4);
    INFO("k=" << k << " estimate=" << odd.value << " se=" << odd.std_error);
    CHECK(z_score(odd, 0.0) <= 3.0);
  }
}

TEST_CASE("Monte Carlo k = 4 gap at n = 20 hits the exact value", "[momentlab][montecarlo]") {
  const auto a = complex_gauss_vs_laplace(20, false);
  const auto b = complex_gauss_vs_laplace(20, true);
  const auto est = mc_trace_moment_diff(a, b, 4, 4000, Seed{3}, 4);
  INFO("estimate=" << est.value << " se=" << est.std_error << " target=" << trace4_gap(a, b));
  CHECK(z_score(est, trace4_gap(a, b)) <= 3.0);

  const auto ra = EnsembleSpec::real_iid(20, AtomDistribution::gaussian(1.0));
  const auto rb = EnsembleSpec::real_iid(20, AtomDistribution::laplace(half));
  const auto rest = mc_trace_moment_diff(ra, rb, 4, 4000, Seed{4}, 4);
  INFO("real estimate=" << rest.value << " se=" << rest.std_error << " target=" << trace4_gap(ra, rb));
  CHECK(z_score(rest, trace4_gap(ra, rb)) <= 3.0);
}

TEST_CASE("standard error halves when trials quadruple", "[momentlab][montecarlo]") {
  const auto a = complex_gauss_vs_laplace(10, false);
  const auto b = complex_gauss_vs_laplace(10, true);
  const auto small = mc_trace_moment_diff(a, b, 4, 2000, Seed{5}, 4);
  const auto large = mc_trace_moment_diff(a, b, 4, 8000, Seed{6}, 4);
  CHECK(large.std_error / small.std_error == Catch::Approx(0.5).epsilon(0.2));
}

TEST_CASE("Monte Carlo argument checks", "[momentlab]") {
  const auto a = EnsembleSpec::gue(4);
  CHECK_THROWS_AS(mc_trace_moment_diff(a, a, 4, 99, Seed{1}), InvalidArgument);
  CHECK_THROWS_AS(mc_trace_moment_diff(a, a, 11, 100, Seed{1}), InvalidArgument);
  CHECK_THROWS_AS(mc_trace_moment_diff(a, EnsembleSpec::gue(5), 4, 100, Seed{1}), IncompatibleEnsembles);
}

TEST_CASE("z scores", "[momentlab]") {
  const MomentEstimate e{10.0, 2.0, 100, false};
  CHECK(z_score(e, 4.0) == 3.0);
  CHECK(band_z_score(e, 8.0, 12.0) == 0.0);
  CHECK(band_z_score(e, 12.0, 16.0) == 1.0);
  CHECK(band_z_score(e, 16.0, 12.0) == 1.0);
  CHECK(z_score(MomentEstimate{1.0, 0.0, 0, true}, 1.0) == 0.0);
  CHECK(std::isinf(z_score(MomentEstimate{1.0, 0.0, 0, true}, 2.0)));
}

TEST_CASE("Taylor residual vanishes on spectra at the classical locations", "[momentlab]") {
  const std::size_t n = 50;
  const ClassicalLocationTable t(n);
  Spectrum s;
  for (double g : t.gamma) s.values.push_back(std::sqrt(50.0) * g);
  const SpectrumSet set(500, s);
  const auto r = fourth_moment_taylor_residual(summarize(set));
  CHECK(std::abs(r.value) <= 1e-12);
  CHECK_THROWS_AS(fourth_moment_taylor_residual(summarize(SpectrumSet(499, s))), InvalidArgument);
}

TEST_CASE("Taylor residual for GUE is bounded and shrinks with n", "[momentlab][montecarlo]") {
  const auto r100 = fourth_moment_taylor_residual(
      summarize(sample_spectra(EnsembleSpec::gue(100), 1000, Seed{7}, EnsembleRole::a, 4)));
  const auto r200 = fourth_moment_taylor_residual(
      summarize(sample_spectra(EnsembleSpec::gue(200), 1000, Seed{7}, EnsembleRole::a, 4)));
  INFO("n=100: " << r100.value << " ± " << r100.std_error << "; n=200: " << r200.value << " ± "
                 << r200.std_error);
  CHECK(std::abs(r100.value) < 2.0);
  CHECK(std::abs(r200.value) < std::abs(r100.value) - 3 * std::hypot(r100.std_error, r200.std_error));
}
