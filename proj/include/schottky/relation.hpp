#pragma once

#include <cstdint>
#include <vector>

#include "schottky/errors.hpp"
#include "schottky/theta.hpp"

namespace schottky {

struct Monomial {
  std::vector<int> exps;
  Complex coef = 1.0;
};

/// Polynomial in the 2^g theta constants, as a list of monomials.
struct Polynomial {
  std::vector<Monomial> monomials;

  /// Total degree; throws NonHomogeneous if monomials disagree.
  int homogeneous_degree(int variables) const {
    if (monomials.empty()) throw InvalidArgument("polynomial has no monomials");
    int degree = -1;
    for (const auto& m : monomials) {
      if (static_cast<int>(m.exps.size()) != variables)
        throw DimensionMismatch("monomial has " + std::to_string(m.exps.size()) +
                                " exponents, expected " + std::to_string(variables));
      int d = 0;
      for (int e : m.exps) {
        if (e < 0) throw InvalidArgument("negative exponent");
        d += e;
      }
      if (degree >= 0 && d != degree) throw NonHomogeneous("monomial degrees differ");
      degree = d;
    }
    return degree;
  }

  Complex evaluate(const ComplexVector& x) const {
    Complex sum = 0.0;
    for (const auto& m : monomials) {
      Complex term = m.coef;
      for (std::size_t i = 0; i < m.exps.size(); ++i)
        for (int e = 0; e < m.exps[i]; ++e) term *= x(static_cast<Eigen::Index>(i));
      sum += term;
    }
    return sum;
  }
};

/// max over sampled tau of |P(Theta(tau) / |Theta(tau)|)|. Sample s uses
/// sample_siegel(g, mix_seed(seed, s), 0.5).
inline double relation_test(const Polynomial& poly, int g, int n_samples, std::uint64_t seed,
                            const TruncationPolicy& policy = {}) {
  if (g < 1) throw InvalidArgument("genus must be positive");
  if (n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  poly.homogeneous_degree(characteristic_count(g));
  double worst = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const auto tau = sample_siegel(g, mix_seed(seed, static_cast<std::uint64_t>(s)), 0.5);
    const auto theta = theta_constants(tau, policy);
    const ComplexVector x = theta.values / theta.values.norm();
    worst = std::max(worst, std::abs(poly.evaluate(x)));
  }
  return worst;
}

}  // namespace schottky
