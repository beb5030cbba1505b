// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rmtlab/experiment.hpp"
#include "rmtlab/momentlab.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/spectral_stats.hpp"
#include "rmtlab/walks.hpp"

using namespace rmtlab;
namespace fs = std::filesystem;

namespace {

// Pinned gates.
constexpr double exact_tol = 1e-12;
constexpr double moment_tol = 1e-7;
constexpr double antiderivative_tol = 1e-6;
constexpr double cdf_tol = 1e-10;
constexpr double symmetry_tol = 1e-10;
constexpr double integral_tol = 1e-8;
constexpr double z_max = 3.0;
constexpr double band_per_n = 5.0;
constexpr double correlation_min = 0.9;
constexpr double aggregate_fraction = 0.05;
constexpr double counting_factor = 3.0;
constexpr double norm_factor = 3.0;

constexpr std::uint64_t seed = 20240611;
constexpr unsigned threads = 4;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Criterion = std::function<void(Outcome&)>;

void combinatorics(Outcome& o) {
  using namespace walks;
  bool recurrence = true;
  for (int m = 1; m <= 28; ++m) recurrence = recurrence && modified_catalan_recurrence(m) == modified_catalan(m);
  o.require(recurrence, "recurrence vs closed form, m=1..28");
  bool two = true, four = true;
  for (int m = 1; m <= 5; ++m) two = two && count_admissible_walks(m, WalkProfile::two) == catalan(m);
  for (int m = 1; m <= 4; ++m) four = four && count_admissible_walks(m, WalkProfile::four) == modified_catalan(m);
  o.require(two, "two-walk counts = C_m, m<=5");
  o.require(four, "four-walk counts = D_m, m<=4");
  o.require(series_identity_check(25), "series identity to order 25");
  const std::vector<Count> d{modified_catalan(1), modified_catalan(2), modified_catalan(3), modified_catalan(4)};
  o.require(d == std::vector<Count>{1, 6, 28, 120}, "D_1..D_4 = 1,6,28,120");
  o.detail << "D_1..D_4 = " << d[0] << "," << d[1] << "," << d[2] << "," << d[3];
}

void moment_formula(Outcome& o) {
  double worst = 0.0;
  for (int k = 2; k <= 12; k += 2) {
    const double d = static_cast<double>(walks::modified_catalan((k - 2) / 2));
    worst = std::max(worst, std::abs(d_moment_integral(k) - d));
  }
  o.require(worst <= moment_tol, "moment integrals");
  double fd_worst = 0.0;
  const double h = 1e-5;
  for (int j = -39; j <= 39; ++j) {
    const double x = 0.05 * j;
    const double fd = (g_antiderivative(x + h) - g_antiderivative(x - h)) / (2 * h);
    fd_worst = std::max(fd_worst, std::abs(fd - g_density(x)));
  }
  o.require(fd_worst <= antiderivative_tol, "antiderivative finite difference");
  o.detail << "max |integral - D| = " << worst << " (tol " << moment_tol << "), max FD error = " << fd_worst
           << " (tol " << antiderivative_tol << ")";
}

void exact_oracle(Outcome& o) {
  const double half = std::sqrt(0.5);
  const auto tp = AtomDistribution::three_point(half);
  const auto b = AtomDistribution::bernoulli(half);
  const auto spec = [](AtomDistribution off, AtomDistribution diag) {
    return EnsembleSpec{2, SymmetryClass::complex_hermitian, off, diag};
  };
  const std::vector<std::pair<EnsembleSpec, EnsembleSpec>> pairs{
      {spec(tp, AtomDistribution::bernoulli(1)), spec(b, AtomDistribution::bernoulli(1))},
      {spec(b, AtomDistribution::three_point(1)), spec(tp, AtomDistribution::three_point(1))},
      {spec(tp, AtomDistribution::three_point(1)), spec(b, AtomDistribution::three_point(1))}};
  double worst = 0.0;
  for (const auto& [pa, pb] : pairs) {
    const double kappa0 = fourth_gap(pa.off_diagonal, pb.off_diagonal);
    const double target = 2.0 * kappa0 * (4.0 - 2.0);
    worst = std::max(worst, std::abs(exact_trace_moment_diff(pa, pb, 4) - target));
  }
  o.require(worst <= exact_tol, "exact k=4 gap");
  o.detail << "3 pairs, max |exact - 2k0(n^2-n)| = " << worst << " (tol " << exact_tol << ")";
}

void monte_carlo_moments(Outcome& o) {
  const auto ensemble = [](std::size_t n, bool laplace) {
    return EnsembleSpec{n, SymmetryClass::complex_hermitian,
                        laplace ? AtomDistribution::laplace(0.5) : AtomDistribution::gaussian(std::sqrt(0.5)),
                        AtomDistribution::gaussian(1.0)};
  };
  const auto a40 = ensemble(40, false), b40 = ensemble(40, true);
  const double kappa0 = fourth_gap(a40.off_diagonal, b40.off_diagonal);
  const auto e4 = mc_trace_moment_diff(a40, b40, 4, 2000, Seed{seed}, threads);
  const double target4 = 2.0 * kappa0 * (40.0 * 40.0 - 40.0);
  const double z4 = z_score(e4, target4);
  o.require(z4 <= z_max, "k=4 z-score");

  const auto a60 = ensemble(60, false), b60 = ensemble(60, true);
  const auto e6 = mc_trace_moment_diff(a60, b60, 6, 4000, Seed{seed}, threads);
  const double lead = 12.0 * kappa0 * 60.0 * 60.0 * 60.0;
  const double slack = band_per_n / 60.0 * std::abs(lead);
  const double z6 = band_z_score(e6, lead - slack, lead + slack);
  o.require(z6 <= z_max, "k=6 band z-score");
  o.detail << "k=4: est " << e4.value << " +- " << e4.std_error << " vs " << target4 << ", z = " << z4
           << "; k=6: est " << e6.value << " +- " << e6.std_error << " vs " << lead << " +- " << slack
           << ", z = " << z6;
}

void shift_reproduction(Outcome& o) {
  const std::size_t n = 500;
  const std::size_t trials = 2000;
  const auto a = EnsembleSpec::real_iid(n, AtomDistribution::gaussian(1.0));
  const auto b = EnsembleSpec::real_iid(n, AtomDistribution::laplace(std::sqrt(0.5)));
  const auto curve = shift_experiment(a, b, trials, Seed{seed}, threads);
  const double corr = bulk_correlation(curve);
  const double lower = aggregate_lower_bound(curve, z_max);
  const double gate = aggregate_fraction * std::abs(curve.kappa0);
  o.require(corr >= correlation_min, "bulk correlation");
  o.require(lower >= gate, "aggregate after noise subtraction");
  o.detail << "n=500, " << trials << " trials each: corr = " << corr << " (min " << correlation_min
           << "), (S - 3 sum SE)/sqrt(n) = " << lower << " (min " << gate << "), S/sqrt(n) = "
           << curve.aggregate / std::sqrt(double(n)) << ", prediction "
           << predicted_aggregate_shift(n, curve.kappa0) / std::sqrt(double(n));
}

void decay_probes(Outcome& o) {
  const std::vector<std::size_t> sizes{100, 200, 400};
  const std::size_t trials = 2000;
  std::vector<DeltaResult> deltas;
  std::vector<MomentEstimate> bulk;
  std::vector<CountingStatistics> counting;
  for (std::size_t n : sizes) {
    const auto spectra = sample_spectra(EnsembleSpec::gue(n), trials, Seed{seed}, EnsembleRole::a, threads);
    deltas.push_back(delta_statistic(spectra, delta_grid(n)));
    bulk.push_back(localization_profile(summarize(spectra)).bulk_mean);
    counting.push_back(counting_statistics(spectra, -1.0, 1.0));
  }
  const auto non_increasing = [](double earlier, double se_earlier, double later, double se_later) {
    return later <= earlier + z_max * std::hypot(se_earlier, se_later);
  };
  for (std::size_t j = 0; j + 1 < sizes.size(); ++j) {
    o.require(non_increasing(deltas[j].delta, deltas[j].std_error, deltas[j + 1].delta, deltas[j + 1].std_error),
              "delta n=" + std::to_string(sizes[j]) + "->" + std::to_string(sizes[j + 1]));
  }
  o.require(non_increasing(bulk[1].value, bulk[1].std_error, bulk[2].value, bulk[2].std_error),
            "bulk localization n=200->400");
  double lo = INFINITY, hi = 0.0;
  for (const auto& c : counting) {
    lo = std::min(lo, c.variance_over_log_n);
    hi = std::max(hi, c.variance_over_log_n);
  }
  o.require(lo > 0.0 && hi <= counting_factor * lo, "Var/log n spread");

  const auto norm_sample = sample_spectra(EnsembleSpec::gue(100), 1000, Seed{seed + 1}, EnsembleRole::a, threads);
  const std::size_t exceed = norm_exceedances(norm_sample, norm_factor);
  o.require(exceed == 0, "norm exceedances");

  o.detail << "delta";
  for (const auto& d : deltas) o.detail << " " << d.delta;
  o.detail << "; bulk loc " << bulk[1].value << " -> " << bulk[2].value << "; Var/log n";
  for (const auto& c : counting) o.detail << " " << c.variance_over_log_n;
  o.detail << "; exceedances " << exceed << "/1000";
}

void semicircle_analytics(Outcome& o) {
  std::mt19937_64 gen(seed);
  double cdf_worst = 0.0, sym_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10000)(gen);
    const std::size_t i = std::uniform_int_distribution<std::size_t>(1, n - 1)(gen);
    cdf_worst = std::max(cdf_worst, std::abs(cdf_sc(classical_location(i, n)) - double(i) / double(n)));
    sym_worst = std::max(sym_worst, std::abs(classical_location(i, n) + classical_location(n - i, n)));
  }
  const double mass = integrate_against_semicircle([](double) { return 1.0; });
  const double g_mass = integrate_against_g([](double) { return 1.0; });
  o.require(cdf_worst <= cdf_tol, "cdf inversion");
  o.require(sym_worst <= symmetry_tol, "symmetry");
  o.require(std::abs(mass - 1.0) <= integral_tol, "density mass");
  o.require(std::abs(g_mass) <= integral_tol, "g mass");
  o.detail << "max cdf error " << cdf_worst << ", max symmetry error " << sym_worst << ", mass - 1 = "
           << mass - 1.0 << ", int g = " << g_mass;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reproducibility(Outcome& o) {
  const fs::path configs = RMTLAB_CONFIG_DIR;
  const fs::path work = fs::temp_directory_path() / "rmtlab_acceptance";
  fs::remove_all(work);
  std::size_t compared = 0;
  for (const char* name : {"selftest", "walks", "moments_small", "delta_small", "localization_small",
                           "shift_small", "counting_small"}) {
    auto config = parse_config(slurp(configs / (std::string(name) + ".ini")));
    std::vector<std::vector<std::string>> bodies;
    int run_index = 0;
    for (unsigned t : {1u, 1u, 4u, 4u}) {
      config.threads = t;
      const auto r = run(config, work / name / std::to_string(run_index++));
      o.require(r.exit_code == exit_success, std::string(name) + " exit code");
      std::vector<std::string> tables;
      for (const auto& f : r.files)
        if (f.string().find(".meta.json") == std::string::npos) tables.push_back(slurp(f));
      bodies.push_back(std::move(tables));
    }
    for (std::size_t j = 1; j < bodies.size(); ++j) o.require(bodies[j] == bodies[0], std::string(name) + " tables");
    compared += bodies[0].size();
  }
  fs::remove_all(work);
  o.detail << "7 kinds, " << compared << " tables, threads 1,1,4,4";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"combinatorial identities", combinatorics},
      {"moment-formula quadrature", moment_formula},
      {"exact k=4 trace gap oracle", exact_oracle},
      {"Monte Carlo trace gaps k=4, k=6", monte_carlo_moments},
      {"n=500 Gaussian vs Laplace shift", shift_reproduction},
      {"localization, delta and counting probes", decay_probes},
      {"semicircle analytics", semicircle_analytics},
      {"byte-identical reruns", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s  %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
