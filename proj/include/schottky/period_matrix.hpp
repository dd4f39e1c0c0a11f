#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <cstdint>
#include <sstream>
#include <vector>

#include "schottky/errors.hpp"
#include "schottky/random.hpp"

namespace schottky {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-12;

/// A point of the Siegel upper half-space: symmetric complex g x g matrix
/// with positive-definite imaginary part. Only `validate_period_matrix` and
/// `sample_siegel` construct one.
class PeriodMatrix {
 public:
  int genus() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const noexcept { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }

  RealMatrix imag() const { return entries_.imag(); }
  RealMatrix real() const { return entries_.real(); }

  double smallest_imag_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(imag(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
  }

  friend PeriodMatrix validate_period_matrix(int g, const ComplexMatrix& raw);

 private:
  explicit PeriodMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {}
  ComplexMatrix entries_;
};

inline PeriodMatrix validate_period_matrix(int g, const ComplexMatrix& raw) {
  if (g < 1) throw InvalidArgument("genus must be positive");
  if (raw.rows() != g || raw.cols() != g) {
    std::ostringstream os;
    os << "period matrix must be " << g << "x" << g << ", got " << raw.rows() << "x"
       << raw.cols();
    throw DimensionMismatch(os.str());
  }
  if (!raw.allFinite()) throw InvalidArgument("period matrix has non-finite entries");
  double asym = 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) asym = std::max(asym, std::abs(raw(i, j) - raw(j, i)));
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << "max |tau_ij - tau_ji| = " << asym << " exceeds " << kSymmetryTolerance;
    throw AsymmetryError(os.str());
  }
  ComplexMatrix sym = raw;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      const Complex mean = 0.5 * (raw(i, j) + raw(j, i));
      sym(i, j) = mean;
      sym(j, i) = mean;
    }
  Eigen::LLT<RealMatrix> llt(sym.imag());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Im(tau) is not positive definite");
  return PeriodMatrix(std::move(sym));
}

/// Characteristic eps = bits/2; bit i of `index` is coordinate i.
struct Characteristic {
  std::vector<int> bits;
  int index = 0;

  static Characteristic from_index(int g, int index) {
    Characteristic c;
    c.index = index;
    c.bits.resize(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) c.bits[static_cast<std::size_t>(i)] = (index >> i) & 1;
    return c;
  }

  double eps(int i) const { return 0.5 * bits[static_cast<std::size_t>(i)]; }
};

inline int characteristic_count(int g) { return 1 << g; }

/// tau = S + i (A A^T + 0.3 I) with S symmetric and A entries uniform in
/// [-spread, spread]. S is drawn first (upper triangle, row-major), then A.
inline PeriodMatrix sample_siegel(int g, std::uint64_t seed, double spread = 0.5) {
  if (g < 1) throw InvalidArgument("genus must be positive");
  if (!(spread > 0.0)) throw InvalidArgument("spread must be positive");
  constexpr double kShift = 0.3;
  Rng rng(seed);
  RealMatrix s(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = i; j < g; ++j) {
      s(i, j) = rng.uniform(-spread, spread);
      s(j, i) = s(i, j);
    }
  RealMatrix a(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) a(i, j) = rng.uniform(-spread, spread);
  RealMatrix y = a * a.transpose();
  y = 0.5 * (y + y.transpose());
  y.diagonal().array() += kShift;
  ComplexMatrix tau(g, g);
  tau.real() = s;
  tau.imag() = y;
  return validate_period_matrix(g, tau);
}

/// Block-diagonal diag(first, second).
inline PeriodMatrix block_diagonal(const PeriodMatrix& first, const PeriodMatrix& second) {
  const int g1 = first.genus();
  const int g2 = second.genus();
  ComplexMatrix tau = ComplexMatrix::Zero(g1 + g2, g1 + g2);
  tau.topLeftCorner(g1, g1) = first.entries();
  tau.bottomRightCorner(g2, g2) = second.entries();
  return validate_period_matrix(g1 + g2, tau);
}

}  // namespace schottky
