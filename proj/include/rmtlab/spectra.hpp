#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rmtlab/error.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/tolerances.hpp"

namespace rmtlab {

enum class SymmetryClass { complex_hermitian, real_symmetric };

constexpr std::string_view to_string(SymmetryClass c) {
  return c == SymmetryClass::complex_hermitian ? "complex_hermitian" : "real_symmetric";
}

/// Dense self-adjoint matrix. Real-symmetric samples are stored as real
/// matrices so the solver can take the cheaper real path.
class HermitianMatrix {
 public:
  using Real = Eigen::MatrixXd;
  using Complex = Eigen::MatrixXcd;

  explicit HermitianMatrix(Real m, std::optional<SampleOrigin> origin = {})
      : entries_(std::move(m)), origin_(origin) {
    check_square();
  }
  explicit HermitianMatrix(Complex m, std::optional<SampleOrigin> origin = {})
      : entries_(std::move(m)), origin_(origin) {
    check_square();
  }

  std::size_t n() const {
    return static_cast<std::size_t>(std::visit([](const auto& m) { return m.rows(); }, entries_));
  }
  SymmetryClass symmetry() const {
    return std::holds_alternative<Real>(entries_) ? SymmetryClass::real_symmetric
                                                  : SymmetryClass::complex_hermitian;
  }
  bool is_real() const { return std::holds_alternative<Real>(entries_); }
  const Real& real() const { return std::get<Real>(entries_); }
  const Complex& complex() const { return std::get<Complex>(entries_); }
  const std::optional<SampleOrigin>& origin() const { return origin_; }

  /// Exact (bitwise) check that entries(j,i) == conj(entries(i,j)).
  bool is_self_adjoint() const {
    return std::visit([](const auto& m) { return m == m.adjoint(); }, entries_);
  }

  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    return std::visit([&](const auto& m) { return std::complex<double>(m(r, c)); }, entries_);
  }

  /// tr(M^2) as the sum of squared moduli of all entries.
  double frobenius_squared() const {
    return std::visit([](const auto& m) { return m.squaredNorm(); }, entries_);
  }

  double trace() const {
    return std::visit([](const auto& m) { return std::real(m.trace()); }, entries_);
  }

 private:
  void check_square() const {
    std::visit(
        [](const auto& m) {
          if (m.rows() != m.cols() || m.rows() == 0)
            throw InvalidArgument("HermitianMatrix: expected a non-empty square matrix");
        },
        entries_);
  }

  std::variant<Real, Complex> entries_;
  std::optional<SampleOrigin> origin_;
};

/// Ascending eigenvalues λ_1 ≤ … ≤ λ_n of one sample, unnormalised.
struct Spectrum {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

namespace detail {

template <class Matrix>
std::vector<double> solve_eigenvalues(const Matrix& m,
                                      const std::optional<SampleOrigin>& origin) {
  using Solver = Eigen::SelfAdjointEigenSolver<Matrix>;
  static_assert(Solver::m_maxIterations == Tolerances::eigen_sweeps_per_value);
  Solver solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigenvalues: implicit-shift iteration did not converge", origin);
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace detail

/// All eigenvalues in ascending order. Throws NumericalFailure (carrying the
/// sample origin when known) if the QR iteration exceeds its sweep cap.
inline Spectrum eigenvalues(const HermitianMatrix& m) {
  if (!m.is_self_adjoint()) throw InvalidArgument("eigenvalues: matrix is not self-adjoint");
  Spectrum s;
  if (m.is_real()) {
    s.values = detail::solve_eigenvalues(m.real(), m.origin());
  } else {
    s.values = detail::solve_eigenvalues(m.complex(), m.origin());
  }
  std::stable_sort(s.values.begin(), s.values.end());
  return s;
}

/// Σ_i λ_i^k.
inline double trace_power(const Spectrum& s, unsigned k) {
  if (k == 0) return static_cast<double>(s.size());
  CompensatedSum sum;
  for (double v : s.values) {
    double p = v;
    for (unsigned j = 1; j < k; ++j) p *= v;
    sum.add(p);
  }
  return sum.value();
}

/// max(|λ_1|, |λ_n|).
inline double spectral_norm(const Spectrum& s) {
  if (s.values.empty()) throw InvalidArgument("spectral_norm: empty spectrum");
  return std::max(std::abs(s.values.front()), std::abs(s.values.back()));
}

}  // namespace rmtlab
