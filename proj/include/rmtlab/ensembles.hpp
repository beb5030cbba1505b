#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rmtlab/error.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/tolerances.hpp"

namespace rmtlab {

enum class AtomKind { gaussian, bernoulli, laplace, three_point };

constexpr std::string_view to_string(AtomKind k) {
  switch (k) {
    case AtomKind::gaussian: return "gaussian";
    case AtomKind::bernoulli: return "bernoulli";
    case AtomKind::laplace: return "laplace";
    case AtomKind::three_point: return "three_point";
  }
  return "?";
}

inline std::optional<AtomKind> parse_atom_kind(std::string_view s) {
  for (auto k : {AtomKind::gaussian, AtomKind::bernoulli, AtomKind::laplace,
                 AtomKind::three_point}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// One support point of a discrete atom; the probability is the exact
/// rational numerator/denominator.
struct AtomPoint {
  double value;
  std::uint64_t numerator;
  std::uint64_t denominator;
};

/// Mean-zero scalar law with closed-form moments.
///
/// `scale` is the standard deviation for gaussian, bernoulli (±scale) and
/// three_point ({-√3·scale, 0, √3·scale} with weights 1/6, 2/3, 1/6); for
/// laplace it is the rate parameter b, so the variance is 2b².
class AtomDistribution {
 public:
  static constexpr int max_order = 8;

  AtomDistribution(AtomKind kind, double scale) : kind_(kind), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw InvalidArgument("AtomDistribution: scale must be positive and finite");
    for (int k = 1; k <= max_order; ++k) moments_[k - 1] = closed_form_moment(k);
  }

  static AtomDistribution gaussian(double sigma) { return {AtomKind::gaussian, sigma}; }
  static AtomDistribution bernoulli(double amplitude) { return {AtomKind::bernoulli, amplitude}; }
  static AtomDistribution laplace(double b) { return {AtomKind::laplace, b}; }
  static AtomDistribution three_point(double sigma) { return {AtomKind::three_point, sigma}; }

  AtomKind kind() const { return kind_; }
  double scale() const { return scale_; }

  /// m_1 … m_8.
  const std::array<double, max_order>& declared_moments() const { return moments_; }
  double variance() const { return moments_[1]; }

  bool is_discrete() const {
    return kind_ == AtomKind::bernoulli || kind_ == AtomKind::three_point;
  }

  /// Support of a discrete atom; empty for continuous kinds.
  std::vector<AtomPoint> support() const {
    switch (kind_) {
      case AtomKind::bernoulli: return {{-scale_, 1, 2}, {scale_, 1, 2}};
      case AtomKind::three_point: {
        const double a = std::sqrt(3.0) * scale_;
        return {{-a, 1, 6}, {0.0, 4, 6}, {a, 1, 6}};
      }
      default: return {};
    }
  }

  /// "kind:scale" with round-trip precision.
  std::string name() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_) << ':' << scale_;
    return os.str();
  }

  friend bool operator==(const AtomDistribution& a, const AtomDistribution& b) {
    return a.kind_ == b.kind_ && a.scale_ == b.scale_;
  }

 private:
  double closed_form_moment(int k) const {
    if (k % 2 == 1) return 0.0;
    const double sk = std::pow(scale_, k);
    switch (kind_) {
      case AtomKind::gaussian: {
        double dfact = 1.0;  // (k-1)!!
        for (int j = k - 1; j > 1; j -= 2) dfact *= j;
        return dfact * sk;
      }
      case AtomKind::laplace: {
        double fact = 1.0;
        for (int j = 2; j <= k; ++j) fact *= j;
        return fact * sk;
      }
      case AtomKind::bernoulli: return sk;
      case AtomKind::three_point: return std::pow(3.0, k / 2) * sk / 3.0;
    }
    return 0.0;
  }

  AtomKind kind_;
  double scale_;
  std::array<double, max_order> moments_{};
};

/// E η^k for 1 ≤ k ≤ 8.
inline double atom_moment(const AtomDistribution& dist, int k) {
  if (k < 1 || k > AtomDistribution::max_order)
    throw UnsupportedOrder("atom_moment: order " + std::to_string(k) +
                           " outside the supported range 1..8");
  return dist.declared_moments()[static_cast<std::size_t>(k - 1)];
}

/// One draw from `dist`.
template <class Rng>
double sample_atom(const AtomDistribution& dist, Rng& rng) {
  const double s = dist.scale();
  switch (dist.kind()) {
    case AtomKind::gaussian: return s * standard_normal(rng);
    case AtomKind::bernoulli: return (rng() >> 63) ? s : -s;
    case AtomKind::laplace: {
      const double u = rng.uniform() - 0.5;
      const double mag = -s * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -mag : mag;
    }
    case AtomKind::three_point: {
      const double u = rng.uniform();
      const double a = std::sqrt(3.0) * s;
      if (u < 1.0 / 6.0) return -a;
      if (u < 5.0 / 6.0) return 0.0;
      return a;
    }
  }
  return 0.0;
}

/// Required atom variance of each slot under the class convention: the real
/// and imaginary parts of complex off-diagonal entries have variance 1/2 each,
/// real off-diagonal entries and all diagonal entries have variance 1.
constexpr double off_diagonal_variance(SymmetryClass c) {
  return c == SymmetryClass::complex_hermitian ? 0.5 : 1.0;
}
constexpr double diagonal_variance(SymmetryClass) { return 1.0; }

inline bool same_variance(double a, double b) {
  return std::abs(a - b) <= Tolerances::variance_match * std::max(std::abs(a), std::abs(b));
}

struct EnsembleSpec {
  std::size_t n = 1;
  SymmetryClass symmetry = SymmetryClass::complex_hermitian;
  AtomDistribution off_diagonal = AtomDistribution::gaussian(std::sqrt(0.5));
  AtomDistribution diagonal = AtomDistribution::gaussian(1.0);

  /// GUE: Gaussian atoms, variance 1/2 per part off the diagonal, 1 on it.
  static EnsembleSpec gue(std::size_t n) {
    return {n, SymmetryClass::complex_hermitian, AtomDistribution::gaussian(std::sqrt(0.5)),
            AtomDistribution::gaussian(1.0)};
  }

  /// Real symmetric ensemble with every upper-triangular entry drawn from `atom`.
  static EnsembleSpec real_iid(std::size_t n, const AtomDistribution& atom) {
    return {n, SymmetryClass::real_symmetric, atom, atom};
  }

  void validate() const {
    if (n < 1) throw InvalidArgument("EnsembleSpec: n must be at least 1");
    if (!same_variance(off_diagonal.variance(), off_diagonal_variance(symmetry)))
      throw InvalidArgument("EnsembleSpec: off-diagonal atom " + off_diagonal.name() +
                            " violates the " + std::string(to_string(symmetry)) +
                            " variance convention");
    if (!same_variance(diagonal.variance(), diagonal_variance(symmetry)))
      throw InvalidArgument("EnsembleSpec: diagonal atom " + diagonal.name() +
                            " must have variance 1");
  }

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Draws one Wigner matrix. Entries are generated row by row over the upper
/// triangle (diagonal first in each row) and mirrored, so the result is
/// self-adjoint bit for bit.
template <class Rng>
HermitianMatrix sample_wigner(const EnsembleSpec& spec, Rng& rng,
                              std::optional<SampleOrigin> origin = {}) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  if (spec.symmetry == SymmetryClass::real_symmetric) {
    HermitianMatrix::Real m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = sample_atom(spec.diagonal, rng);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        m(i, j) = sample_atom(spec.off_diagonal, rng);
        m(j, i) = m(i, j);
      }
    }
    return HermitianMatrix(std::move(m), origin);
  }
  HermitianMatrix::Complex m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = sample_atom(spec.diagonal, rng);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = sample_atom(spec.off_diagonal, rng);
      const double im = sample_atom(spec.off_diagonal, rng);
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  }
  return HermitianMatrix(std::move(m), origin);
}

/// Matrix for substream (seed, trial, stream); the same triple always yields
/// the same matrix.
inline HermitianMatrix sample_wigner(const EnsembleSpec& spec, Seed seed, StreamId id) {
  CounterRng rng(seed, id);
  return sample_wigner(spec, rng, SampleOrigin{seed.value, id.trial, id.stream});
}

/// κ₀ = E η⁴ − E η'⁴.
inline double fourth_gap(const AtomDistribution& eta, const AtomDistribution& eta_prime) {
  if (!same_variance(eta.variance(), eta_prime.variance()))
    throw IncompatibleEnsembles("fourth_gap: " + eta.name() + " and " + eta_prime.name() +
                                " have different variances");
  return atom_moment(eta, 4) - atom_moment(eta_prime, 4);
}

/// E|ζ|⁴ of an off-diagonal entry. For the complex class
/// E|X + iY|⁴ = 2 E η⁴ + 2 (E η²)².
inline double entry_fourth_moment(const EnsembleSpec& spec) {
  const double m2 = atom_moment(spec.off_diagonal, 2);
  const double m4 = atom_moment(spec.off_diagonal, 4);
  return spec.symmetry == SymmetryClass::complex_hermitian ? 2.0 * m4 + 2.0 * m2 * m2 : m4;
}

inline void check_compatible(const EnsembleSpec& a, const EnsembleSpec& b) {
  a.validate();
  b.validate();
  if (a.n != b.n || a.symmetry != b.symmetry)
    throw IncompatibleEnsembles("ensemble pair must share n and symmetry class");
}

/// E|ζ_ab|⁴ − E|ζ'_ab|⁴ for off-diagonal entries: 2κ₀ in the complex class,
/// κ₀ in the real class.
inline double entry_fourth_gap(const EnsembleSpec& a, const EnsembleSpec& b) {
  check_compatible(a, b);
  return entry_fourth_moment(a) - entry_fourth_moment(b);
}

/// Exact E tr M⁴ − E tr M'⁴ = (n² − n)·(entry gap) + n·(diagonal gap).
/// With matching diagonal atoms in the complex class this is 2κ₀(n² − n).
inline double trace4_gap(const EnsembleSpec& a, const EnsembleSpec& b) {
  const double n = static_cast<double>(a.n);
  const double diag_gap = atom_moment(a.diagonal, 4) - atom_moment(b.diagonal, 4);
  return (n * n - n) * entry_fourth_gap(a, b) + n * diag_gap;
}

}  // namespace rmtlab
