#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "schottky/kp.hpp"

using namespace schottky;

namespace {

constexpr Complex I(0.0, 1.0);

ThetaJet jet_at_i() {
  ComplexMatrix m(1, 1);
  m << I;
  return theta_jet(validate_period_matrix(1, m));
}

ThetaJet diag_i_jet(int g) {
  ComplexMatrix m = ComplexMatrix::Zero(g, g);
  m.diagonal().setConstant(I);
  return theta_jet(validate_period_matrix(g, m));
}

ComplexVector unit(int g, int i) {
  ComplexVector e = ComplexVector::Zero(g);
  e(i) = 1.0;
  return e;
}

ComplexVector random_vector(int g, Rng& rng) {
  ComplexVector v(g);
  for (int i = 0; i < g; ++i) v(i) = rng.complex_normal();
  return v;
}

KpCandidate random_candidate(int g, Rng& rng) {
  ComplexVector u = random_vector(g, rng);
  u /= u.norm();
  return {u, random_vector(g, rng), random_vector(g, rng), rng.complex_normal()};
}

ThetaJet scaled(ThetaJet jet, Complex s) {
  jet.values *= s;
  jet.grad *= s;
  for (auto& h : jet.hess) h *= s;
  return jet;
}

}  // namespace

TEST(DirectionalFirst, ZeroDirection) {
  const auto jet = theta_jet(sample_siegel(2, 3, 0.5));
  EXPECT_EQ(directional_first(jet, ComplexVector::Zero(2), unit(2, 1)).norm(), 0.0);
}

TEST(DirectionalFirst, CrossBlockVanishes) {
  const auto jet = diag_i_jet(2);
  EXPECT_LE(directional_first(jet, unit(2, 0), unit(2, 1)).cwiseAbs().maxCoeff(), 2e-13);
}

TEST(DirectionalFirst, GenusOneSeries) {
  const auto jet = jet_at_i();
  const ComplexVector one = ComplexVector::Ones(1);
  // 2 pi i sum n^2 exp(-2 pi n^2), direct summation to radius 6.
  double series = 0.0;
  for (int n = -6; n <= 6; ++n) series += n * n * std::exp(-2.0 * std::numbers::pi * n * n);
  const Complex expected = Complex(0.0, 2.0 * std::numbers::pi) * series;
  EXPECT_LT(std::abs(directional_first(jet, one, one)(0) - expected), 1e-14);
  EXPECT_NEAR(series, 0.0037348855607084313, 1e-17);
}

TEST(DirectionalFirst, DimensionMismatch) {
  const auto jet = jet_at_i();
  EXPECT_THROW(directional_first(jet, ComplexVector::Ones(2), ComplexVector::Ones(1)),
               DimensionMismatch);
}

TEST(DirectionalFourth, ZeroAndUnitDirections) {
  const auto jet = theta_jet(sample_siegel(3, 2, 0.5));
  EXPECT_EQ(directional_fourth(jet, ComplexVector::Zero(3)).norm(), 0.0);
  const ComplexVector f = directional_fourth(jet, unit(3, 0));
  for (int b = 0; b < 8; ++b) EXPECT_EQ(f(b), jet.hess[b](0, 0));
}

TEST(DirectionalFourth, GenusOneSeries) {
  const auto jet = jet_at_i();
  double series = 0.0;
  for (int n = -6; n <= 6; ++n) series += std::pow(n, 4) * std::exp(-2.0 * std::numbers::pi * n * n);
  const double expected = -4.0 * std::numbers::pi * std::numbers::pi * series;
  const Complex got = directional_fourth(jet, ComplexVector::Ones(1))(0);
  EXPECT_NEAR(got.real(), expected, 1e-14);
  EXPECT_NEAR(expected, -0.147447383392988469, 1e-15);
}

TEST(DirectionalFourth, MatchesFullTensorContraction) {
  Rng rng(5);
  const auto jet = theta_jet(sample_siegel(3, 9, 0.5));
  const ComplexVector u = random_vector(3, rng);
  const PairIndex pairs(3);
  for (int b = 0; b < 8; ++b) {
    Complex sum = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            sum += u(i) * u(j) * u(k) * u(l) * jet.hess[b](pairs(i, j), pairs(k, l));
    EXPECT_LT(std::abs(directional_fourth(jet, u)(b) - sum), 1e-12 * (1.0 + std::abs(sum)));
  }
}

TEST(KpResidual, ReducesToFourthTerm) {
  Rng rng(1);
  const auto jet = theta_jet(sample_siegel(2, 4, 0.5));
  auto cand = random_candidate(2, rng);
  cand.v.setZero();
  cand.w.setZero();
  cand.c = 0.0;
  EXPECT_LT((kp_residual(jet, cand) - directional_fourth(jet, cand.u)).norm(), 1e-15);
}

TEST(KpResidual, AffineInC) {
  Rng rng(2);
  const auto jet = theta_jet(sample_siegel(2, 5, 0.5));
  auto cand = random_candidate(2, rng);
  const ComplexVector r0 = kp_residual(jet, cand);
  cand.c += Complex(0.5, -1.0);
  const ComplexVector r1 = kp_residual(jet, cand);
  EXPECT_LT((r1 - r0 - Complex(0.5, -1.0) * jet.values).norm(), 1e-13);
}

TEST(KpResidual, GenusOneInnerLinearSolve) {
  const auto jet = jet_at_i();
  // With u = 1: F_b + m G_b + c Theta_b = 0, m = 3/4 v^2 - w; Cramer's rule.
  const Complex f0 = jet.hess[0](0, 0), f1 = jet.hess[1](0, 0);
  const Complex g0 = jet.grad(0, 0), g1 = jet.grad(1, 0);
  const Complex t0 = jet.values(0), t1 = jet.values(1);
  const Complex det = g0 * t1 - g1 * t0;
  const Complex m = (-f0 * t1 + f1 * t0) / det;
  const Complex c = (-g0 * f1 + g1 * f0) / det;
  KpCandidate cand{ComplexVector::Ones(1), ComplexVector::Zero(1), ComplexVector::Constant(1, -m), c};
  EXPECT_LE(kp_residual(jet, cand).norm(), 1e-8 * jet_scale(jet));
}

TEST(KpResidual, GaugeScaling) {
  Rng rng(3);
  const auto jet = theta_jet(sample_siegel(3, 6, 0.5));
  const auto cand = random_candidate(3, rng);
  const Complex a(0.7, -1.3);
  const ComplexVector r = kp_residual(jet, cand);
  const ComplexVector ra = kp_residual(jet, apply_gauge(cand, a));
  EXPECT_LT((ra - std::pow(a, 4) * r).norm(), 1e-12 * ra.norm());
}

TEST(Gauge, FixedRepresentativeIsInvariant) {
  Rng rng(4);
  const auto cand = random_candidate(3, rng);
  const auto fixed = gauge_fix(cand);
  EXPECT_TRUE(is_gauge_fixed(fixed));
  const auto again = gauge_fix(apply_gauge(cand, Complex(-2.0, 0.5)));
  EXPECT_LT((fixed.u - again.u).norm(), 1e-14);
  EXPECT_LT((fixed.v - again.v).norm(), 1e-13);
  EXPECT_LT((fixed.w - again.w).norm(), 1e-13);
  EXPECT_LT(std::abs(fixed.c - again.c), 1e-13);
  KpCandidate zero{ComplexVector::Zero(2), ComplexVector::Zero(2), ComplexVector::Zero(2), 0.0};
  EXPECT_THROW(gauge_fix(zero), InvalidArgument);
}

TEST(RelaxedProfile, GenusOneIsExact) {
  const auto jet = jet_at_i();
  const auto prof = relaxed_profile(jet, ComplexVector::Ones(1));
  EXPECT_LE(prof.residual, 1e-12 * jet_scale(jet));
  const ComplexVector r = directional_fourth(jet, ComplexVector::Ones(1)) +
                          contract_first(jet, prof.b) + prof.c * jet.values;
  EXPECT_LE(r.norm(), 1e-12 * jet_scale(jet));
}

TEST(RelaxedProfile, GenusTwoSquareSystem) {
  Rng rng(6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto jet = theta_jet(sample_siegel(2, 40 + seed, 0.5));
    ComplexVector u = random_vector(2, rng);
    u /= u.norm();
    EXPECT_LE(relaxed_profile(jet, u).residual, 1e-8 * jet_scale(jet));
  }
}

TEST(RelaxedProfile, HomogeneousInJetScale) {
  Rng rng(7);
  const auto jet = theta_jet(sample_siegel(4, 2, 0.5));
  ComplexVector u = random_vector(4, rng);
  u /= u.norm();
  const double base = relaxed_profile(jet, u).residual;
  const Complex s(-2.5, 1.0);
  EXPECT_NEAR(relaxed_profile(scaled(jet, s), u).residual, std::abs(s) * base, 1e-10 * base);
}

TEST(RelaxedProfile, RequiresUnitU) {
  const auto jet = jet_at_i();
  EXPECT_THROW(relaxed_profile(jet, ComplexVector::Constant(1, 2.0)), InvalidArgument);
}

TEST(RelaxedProfile, LowerBoundsStructuredResidual) {
  Rng rng(8);
  for (int g = 2; g <= 4; ++g) {
    const auto jet = theta_jet(sample_siegel(g, 60 + g, 0.5));
    for (int trial = 0; trial < 20; ++trial) {
      const auto cand = random_candidate(g, rng);
      EXPECT_LE(relaxed_profile(jet, cand.u).residual, kp_residual(jet, cand).norm() + 1e-12);
    }
  }
}

TEST(Sasaki, GenusOneFullRank) {
  const auto jet = jet_at_i();
  const auto m = sasaki_matrix(jet);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  const Complex det = jet.grad(0, 0) * jet.values(1) - jet.grad(1, 0) * jet.values(0);
  EXPECT_GT(std::abs(det), 1e-3);
  EXPECT_EQ(rank_test(m, default_rank_tol(1)).rank, 2);
}

TEST(Sasaki, DiagonalIsDeficient) {
  const auto jet = diag_i_jet(2);
  const auto r = rank_test(sasaki_matrix(jet), default_rank_tol(2));
  EXPECT_LT(r.rank, 4);
}

TEST(Sasaki, GenusThreeSampledFullRank) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto jet = theta_jet(sample_siegel(3, seed, 0.5));
    const auto m = sasaki_matrix(jet);
    EXPECT_EQ(m.rows(), 7);
    EXPECT_EQ(m.cols(), 8);
    EXPECT_EQ(rank_test(m, default_rank_tol(3)).rank, 7);
  }
}

TEST(StrictMin, GenusOneAtI) {
  const auto report = strict_min(jet_at_i());
  EXPECT_LE(report.strict_residual / report.scale, 1e-8);
  EXPECT_EQ(report.decision, Decision::JacobianLike);
}

TEST(StrictMin, GenusTwoSampled) {
  const auto report = strict_min(theta_jet(sample_siegel(2, 7, 0.5)));
  EXPECT_LE(report.strict_residual / report.scale, 1e-8);
  EXPECT_EQ(report.decision, Decision::JacobianLike);
  EXPECT_TRUE(is_gauge_fixed(report.best_candidate));
  EXPECT_NEAR(report.best_candidate.u.norm(), 1.0, 1e-14);
}

TEST(StrictMin, GenusFourSampledRejected) {
  const auto report = strict_min(theta_jet(sample_siegel(4, 1, 0.5)));
  EXPECT_GE(report.relaxed_residual / report.scale, SolverConfig{}.theta_neg);
  EXPECT_EQ(report.decision, Decision::NonJacobian);
  EXPECT_LE(report.relaxed_residual, report.strict_residual + 1e-12);
}

TEST(StrictMin, DecomposableIsInconclusive) {
  const auto report = strict_min(diag_i_jet(2));
  EXPECT_LT(report.sasaki_rank, 4);
  EXPECT_EQ(report.decision, Decision::Inconclusive);
}

TEST(StrictMin, Deterministic) {
  const auto jet = theta_jet(sample_siegel(3, 3, 0.5));
  SolverConfig cfg;
  cfg.seed = 17;
  const auto a = strict_min(jet, cfg);
  const auto b = strict_min(jet, cfg);
  EXPECT_EQ(a.strict_residual, b.strict_residual);
  EXPECT_EQ(a.relaxed_residual, b.relaxed_residual);
  EXPECT_EQ(a.best_candidate.u, b.best_candidate.u);
  EXPECT_EQ(a.best_candidate.w, b.best_candidate.w);
  EXPECT_EQ(a.sasaki_singular_values, b.sasaki_singular_values);
  EXPECT_EQ(a.decision, b.decision);
}

TEST(StrictMin, MoreStartsNeverWorse) {
  const auto jet = theta_jet(sample_siegel(4, 5, 0.5));
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {1, 2, 4, 8}) {
    SolverConfig cfg;
    cfg.n_starts = n;
    cfg.max_iters = 150;
    const auto r = strict_min(jet, cfg);
    EXPECT_LE(r.strict_residual, prev);
    prev = r.strict_residual;
  }
}

TEST(StrictMin, RelaxedNeverAboveStrict) {
  for (int g = 1; g <= 4; ++g) {
    SolverConfig cfg;
    cfg.n_starts = 4;
    const auto r = strict_min(theta_jet(sample_siegel(g, 30 + g, 0.5)), cfg);
    EXPECT_LE(r.relaxed_residual, r.strict_residual + 1e-12);
    EXPECT_GE(r.relaxed_residual, 0.0);
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  cfg.n_starts = 0;
  EXPECT_THROW(cfg.check(), InvalidArgument);
  cfg = {};
  cfg.theta_pos = 1.0;
  cfg.theta_neg = 0.5;
  EXPECT_THROW(cfg.check(), InvalidArgument);
}
