#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "schottky/errors.hpp"
#include "schottky/period_matrix.hpp"

namespace schottky {

/// Index of the independent entry tau_ij (i <= j), row-major over the upper
/// triangle: (0,0),(0,1),...,(0,g-1),(1,1),...,(g-1,g-1).
class PairIndex {
 public:
  explicit PairIndex(int g) : g_(g), first_(static_cast<std::size_t>(count(g))),
                              second_(static_cast<std::size_t>(count(g))) {
    int p = 0;
    for (int i = 0; i < g; ++i)
      for (int j = i; j < g; ++j, ++p) {
        first_[static_cast<std::size_t>(p)] = i;
        second_[static_cast<std::size_t>(p)] = j;
      }
  }

  static constexpr int count(int g) { return g * (g + 1) / 2; }

  int genus() const noexcept { return g_; }
  int size() const noexcept { return count(g_); }

  int operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * g_ - i * (i - 1) / 2 + (j - i);
  }

  int first(int p) const { return first_[static_cast<std::size_t>(p)]; }
  int second(int p) const { return second_[static_cast<std::size_t>(p)]; }

  // Multiplicity of a stored pair in a full (i,j) double sum.
  double weight(int p) const { return first(p) == second(p) ? 1.0 : 2.0; }

 private:
  int g_;
  std::vector<int> first_;
  std::vector<int> second_;
};

struct TruncationPolicy {
  double tol = 1e-13;
  int max_radius = 60;
  double min_eigen_floor = 0.05;

  void check() const {
    if (!(tol > 0.0)) throw InvalidArgument("truncation tol must be positive");
    if (max_radius < 1) throw InvalidArgument("max_radius must be at least 1");
    if (!(min_eigen_floor > 0.0)) throw InvalidArgument("min_eigen_floor must be positive");
  }
};

/// Theta constants of the second order at tau together with their first and
/// second derivatives in the independent entries tau_ij, i <= j.
///
///   values(b)     = sum_x exp(2 pi i x^T tau x),             x in Z^g + eps_b
///   grad(b, p)    = sum_x 2 pi i x_i x_j exp(...),           p = (i, j)
///   hess[b](p, q) = sum_x (2 pi i)^2 x_i x_j x_k x_l exp(...)
///
/// With this convention the full contraction sum_{i,j} A_ij d/dtau_ij equals
/// the directional derivative along the symmetric matrix A.
struct ThetaJet {
  PeriodMatrix tau;
  ComplexVector values;
  ComplexMatrix grad;
  std::vector<ComplexMatrix> hess;
  int radius_used = 0;
  double tail_bound = 0.0;

  int genus() const { return tau.genus(); }
  int characteristics() const { return static_cast<int>(values.size()); }
  int pairs() const { return static_cast<int>(grad.cols()); }
};

struct ThetaValues {
  PeriodMatrix tau;
  ComplexVector values;
  int radius_used = 0;
  double tail_bound = 0.0;
};

/// Upper bound on the contribution of all lattice points outside the box
/// |x|_inf <= radius to any stored component of derivative order `order`.
/// Shell r >= radius+1 holds at most (2r+1)^g - (2r-1)^g points, each with
/// |x|_2 >= r - 1/2 and |x_i| <= r.
inline double truncation_tail(int g, double lambda_min, int radius, int order) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  for (int r = radius + 1;; ++r) {
    const double rd = r;
    const double shell = std::pow(2.0 * rd + 1.0, g) - std::pow(2.0 * rd - 1.0, g);
    double prefactor = 1.0;
    if (order >= 1) prefactor = std::max(prefactor, two_pi * rd * rd);
    if (order >= 2) prefactor = std::max(prefactor, two_pi * two_pi * rd * rd * rd * rd);
    const double decay = std::exp(-two_pi * lambda_min * (rd - 0.5) * (rd - 0.5));
    const double term = shell * prefactor * decay;
    total += term;
    if (term <= total * 1e-18 || term == 0.0 || r > radius + 100000) break;
  }
  return total;
}

inline int required_radius(int g, double lambda_min, const TruncationPolicy& policy, int order) {
  for (int r = 1; r <= policy.max_radius; ++r)
    if (truncation_tail(g, lambda_min, r, order) <= policy.tol) return r;
  std::ostringstream os;
  os << "radius needed for tol " << policy.tol << " exceeds max_radius " << policy.max_radius;
  throw RadiusExceeded(os.str());
}

namespace detail {

inline double check_floor(const PeriodMatrix& tau, const TruncationPolicy& policy) {
  policy.check();
  const double lambda_min = tau.smallest_imag_eigenvalue();
  if (lambda_min < policy.min_eigen_floor) {
    std::ostringstream os;
    os << "smallest eigenvalue of Im(tau) " << lambda_min << " is below the floor "
       << policy.min_eigen_floor;
    throw EigenFloorError(os.str());
  }
  return lambda_min;
}

// Visits x = m + eps over the box |x|_inf <= radius in odometer order
// (coordinate 0 fastest) and passes x with exp(2 pi i x^T tau x).
template <typename Visitor>
void for_each_lattice_term(const PeriodMatrix& tau, const Characteristic& ch, int radius,
                           Visitor&& visit) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int g = tau.genus();
  const RealMatrix re = tau.real();
  const RealMatrix im = tau.imag();
  std::vector<int> lo(static_cast<std::size_t>(g));
  std::vector<int> hi(static_cast<std::size_t>(g));
  std::vector<int> m(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const auto k = static_cast<std::size_t>(i);
    lo[k] = -radius;
    hi[k] = ch.bits[k] ? radius - 1 : radius;
    m[k] = lo[k];
  }
  std::vector<double> x(static_cast<std::size_t>(g));
  while (true) {
    for (int i = 0; i < g; ++i) x[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] + ch.eps(i);
    double qr = 0.0;
    double qi = 0.0;
    for (int i = 0; i < g; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      qr += re(i, i) * xi * xi;
      qi += im(i, i) * xi * xi;
      for (int j = i + 1; j < g; ++j) {
        const double xij = 2.0 * xi * x[static_cast<std::size_t>(j)];
        qr += re(i, j) * xij;
        qi += im(i, j) * xij;
      }
    }
    const double phase = two_pi * (qr - std::round(qr));
    const double modulus = std::exp(-two_pi * qi);
    visit(x, Complex(modulus * std::cos(phase), modulus * std::sin(phase)));

    int i = 0;
    for (; i < g; ++i) {
      auto& mi = m[static_cast<std::size_t>(i)];
      if (mi < hi[static_cast<std::size_t>(i)]) {
        ++mi;
        break;
      }
      mi = lo[static_cast<std::size_t>(i)];
    }
    if (i == g) break;
  }
}

}  // namespace detail

/// Values only, truncated at a fixed box radius.
inline ComplexVector theta_values_at_radius(const PeriodMatrix& tau, int radius) {
  const int g = tau.genus();
  const int n = characteristic_count(g);
  ComplexVector values = ComplexVector::Zero(n);
  for (int b = 0; b < n; ++b) {
    const auto ch = Characteristic::from_index(g, b);
    Complex sum = 0.0;
    detail::for_each_lattice_term(tau, ch, radius,
                                  [&](const std::vector<double>&, Complex t) { sum += t; });
    values(b) = sum;
  }
  return values;
}

/// Full jet truncated at a fixed box radius; tail_bound is left at zero.
inline ThetaJet theta_jet_at_radius(const PeriodMatrix& tau, int radius) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int g = tau.genus();
  const int n = characteristic_count(g);
  const PairIndex pairs(g);
  const int np = pairs.size();

  ThetaJet jet{tau, ComplexVector::Zero(n), ComplexMatrix::Zero(n, np),
               std::vector<ComplexMatrix>(static_cast<std::size_t>(n)), radius, 0.0};
  std::vector<double> mono(static_cast<std::size_t>(np));
  std::vector<Complex> grad(static_cast<std::size_t>(np));
  std::vector<Complex> hess(static_cast<std::size_t>(np * np));

  for (int b = 0; b < n; ++b) {
    const auto ch = Characteristic::from_index(g, b);
    Complex value = 0.0;
    std::fill(grad.begin(), grad.end(), Complex(0.0));
    std::fill(hess.begin(), hess.end(), Complex(0.0));
    detail::for_each_lattice_term(tau, ch, radius, [&](const std::vector<double>& x, Complex t) {
      value += t;
      for (int p = 0; p < np; ++p)
        mono[static_cast<std::size_t>(p)] =
            x[static_cast<std::size_t>(pairs.first(p))] * x[static_cast<std::size_t>(pairs.second(p))];
      for (int p = 0; p < np; ++p) {
        const Complex tp = mono[static_cast<std::size_t>(p)] * t;
        grad[static_cast<std::size_t>(p)] += tp;
        for (int q = p; q < np; ++q)
          hess[static_cast<std::size_t>(p * np + q)] += mono[static_cast<std::size_t>(q)] * tp;
      }
    });
    const Complex d1(0.0, two_pi);
    const Complex d2 = d1 * d1;
    jet.values(b) = value;
    auto& h = jet.hess[static_cast<std::size_t>(b)];
    h.resize(np, np);
    for (int p = 0; p < np; ++p) {
      jet.grad(b, p) = d1 * grad[static_cast<std::size_t>(p)];
      for (int q = p; q < np; ++q) {
        h(p, q) = d2 * hess[static_cast<std::size_t>(p * np + q)];
        h(q, p) = h(p, q);
      }
    }
  }
  return jet;
}

/// Theta constants with certified truncation: every component is within
/// policy.tol of the full lattice sum.
inline ThetaValues theta_constants(const PeriodMatrix& tau, const TruncationPolicy& policy = {}) {
  const double lambda_min = detail::check_floor(tau, policy);
  const int radius = required_radius(tau.genus(), lambda_min, policy, 0);
  return {tau, theta_values_at_radius(tau, radius), radius,
          truncation_tail(tau.genus(), lambda_min, radius, 0)};
}

inline ThetaJet theta_jet(const PeriodMatrix& tau, const TruncationPolicy& policy = {}) {
  const double lambda_min = detail::check_floor(tau, policy);
  const int radius = required_radius(tau.genus(), lambda_min, policy, 2);
  ThetaJet jet = theta_jet_at_radius(tau, radius);
  jet.tail_bound = truncation_tail(tau.genus(), lambda_min, radius, 2);
  return jet;
}

}  // namespace schottky
