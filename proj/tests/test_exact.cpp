#include <gtest/gtest.h>

#include "oracles.hpp"
#include "schottky/exact.hpp"

using namespace schottky;

namespace {

ExactRational q(long long n, long long d = 1) { return ExactRational(BigInt(n), BigInt(d)); }
ExactRational big(const char* s) { return ExactRational(BigInt(s)); }

}  // namespace

TEST(ExactRational, LowestTermsAndParsing) {
  const auto x = q(6, -4);
  EXPECT_EQ(x.numerator(), -3);
  EXPECT_EQ(x.denominator(), 2);
  EXPECT_EQ(ExactRational::parse("10/-4"), q(-5, 2));
  EXPECT_EQ(ExactRational::parse("7"), q(7));
  EXPECT_EQ(ExactRational::parse("-125/64").to_string(), "-125/64");
  EXPECT_THROW(ExactRational::parse("1/0"), InvalidArgument);
  EXPECT_THROW(ExactRational::parse("1.5"), ParseError);
  EXPECT_THROW(ExactRational::parse("/3"), ParseError);
  EXPECT_THROW(q(1) / q(0), InvalidArgument);
}

TEST(ExactRational, Log2OfHugeValues) {
  const ExactRational x(pow2(5000) * 3, pow2(1000));
  EXPECT_NEAR(x.log2_abs(), 4000.0 + std::log2(3.0), 1e-9);
}

TEST(Bernoulli, ClassicalValues) {
  EXPECT_EQ(bernoulli(0), q(1));
  EXPECT_EQ(bernoulli(2), q(1, 6));
  EXPECT_EQ(bernoulli(4), q(-1, 30));
  EXPECT_EQ(bernoulli(12), q(-691, 2730));
}

TEST(Bernoulli, MatchesAkiyamaTanigawa) {
  for (int n = 0; n <= 40; n += 2) {
    const auto ref = oracle::bernoulli_at(n);
    EXPECT_EQ(bernoulli(n), ExactRational(boost::multiprecision::numerator(ref),
                                          boost::multiprecision::denominator(ref)))
        << "n=" << n;
  }
}

TEST(Bernoulli, RejectsOddAndNegative) {
  EXPECT_THROW(bernoulli(3), InvalidArgument);
  EXPECT_THROW(bernoulli(-2), InvalidArgument);
}

TEST(Zeta, NegativeOddValues) {
  EXPECT_EQ(zeta_neg_odd(1), q(-1, 12));
  EXPECT_EQ(zeta_neg_odd(2), q(1, 120));
  EXPECT_EQ(zeta_neg_odd(3), q(-1, 252));
  EXPECT_THROW(zeta_neg_odd(0), InvalidArgument);
}

TEST(LevelIndex, SmallGenera) {
  EXPECT_EQ(level_index(1), 24);
  EXPECT_EQ(level_index(2), 11520);
  EXPECT_EQ(level_index(3), 92897280);
  EXPECT_THROW(level_index(0), InvalidArgument);
}

TEST(LambdaTop, SmallGenera) {
  EXPECT_EQ(lambda_top_ag(1), q(1, 24));
  EXPECT_EQ(lambda_top_ag(2), q(1, 2880));
  // Back-substitution: deg 16 at g = 3 forces <lambda^6> = 16 * 2^6 / (2 * index).
  EXPECT_EQ(lambda_top_ag(3), q(16 * 64) / (q(2) * ExactRational(level_index(3))));
}

TEST(Degrees, AbelianTable) {
  const char* expected[] = {"1", "1", "16", "13056", "1234714624", "25653961176383488",
                            "197972857997555419746140160"};
  for (int g = 1; g <= 7; ++g) {
    const auto d = deg_th_ag(g);
    EXPECT_TRUE(d.is_integer());
    EXPECT_EQ(d, big(expected[g - 1])) << "g=" << g;
  }
}

TEST(Degrees, JacobianTableAndImpliedIntersections) {
  EXPECT_EQ(deg_th_jg(4), big("208896"));
  EXPECT_EQ(deg_th_jg(6), big("23303354757572198400"));
  EXPECT_THROW(deg_th_jg(8), TableAbsent);
  for (int g = 1; g <= 3; ++g) EXPECT_EQ(deg_th_jg(g), deg_th_ag(g));
  for (int g = 2; g <= 7; ++g) {
    const auto m = implied_lambda_top_mg(g);
    EXPECT_GT(m.sign(), 0);
    // Inverting the relation reproduces the stored degree.
    EXPECT_EQ(ExactRational(level_index(g)) * m / ExactRational(pow2(3 * g - 3)), deg_th_jg(g));
  }
}

TEST(Degrees, Ratios) {
  EXPECT_EQ(ratio_j_over_a(1), q(1));
  EXPECT_EQ(ratio_j_over_a(3), q(1));
  EXPECT_EQ(ratio_j_over_a(4), q(16));
  EXPECT_EQ(ratio_j_over_a(5), q(2976, 13));
  EXPECT_EQ(ratio_j_over_a(6), q(202742400, 223193));
  EXPECT_EQ(ratio_j_over_a(7), q(8678490624LL, 19627855));
  for (int g = 5; g <= 7; ++g) EXPECT_FALSE(ratio_j_over_a(g).is_integer());
  EXPECT_THROW(ratio_j_over_a(8), TableAbsent);
}

TEST(Degrees, ReducibleRatio) {
  // 2 <lambda>_{A_1} / (24 <lambda^3>_{A_2}) = 2 (1/24) / (24/2880) = 10.
  EXPECT_EQ(reducible_ratio_ag(2), q(10));
  for (int g = 4; g <= 7; ++g) EXPECT_GT(reducible_ratio_ag(g).denominator(), 1) << "g=" << g;
  EXPECT_THROW(reducible_ratio_ag(1), InvalidArgument);
}

TEST(Degrees, ReportConsistency) {
  for (int g = 1; g <= 9; ++g) {
    const auto r = degree_report(g);
    EXPECT_EQ(r.deg_th_ag, ExactRational(r.level_index) * q(2) * r.lambda_top_ag /
                               ExactRational(pow2(static_cast<unsigned>(g * (g + 1) / 2))));
    EXPECT_EQ(r.deg_th_jg.has_value(), g <= 7);
    EXPECT_EQ(r.reducible_ratio.has_value(), g >= 2);
    if (r.ratio_j_over_a) EXPECT_EQ(*r.ratio_j_over_a, *r.deg_th_jg / r.deg_th_ag);
  }
}

TEST(Bound, GenusTwoUnitConstant) {
  const auto b = degree_bound(2, q(1));
  EXPECT_EQ(b.c_big, q(125, 64));
  EXPECT_EQ(b.degree_bound, q(2109375, 4));
}

TEST(Bound, HomogeneousInConstant) {
  for (int g = 2; g <= 6; ++g)
    EXPECT_EQ(degree_bound(g, q(3, 7)).degree_bound / degree_bound(g, q(6, 7)).degree_bound,
              ExactRational(1) / ExactRational(pow2(static_cast<unsigned>(g))));
}

TEST(Bound, StructureOfLeadingOrder) {
  // log2 bound - [2g^2 + log2((3g-3)! C^g g^{2g})] = 3 + log2 prod (1 - 4^-k),
  // which lies in (1, 3) for every g.
  for (int g = 5; g <= 12; ++g) {
    const auto b = degree_bound(g, q(1));
    const double rest = b.lambda_bound.log2_abs();
    const double remainder = b.degree_bound.log2_abs() - 2.0 * g * g - rest;
    EXPECT_GT(remainder, 1.0);
    EXPECT_LT(remainder, 3.0);
  }
}

TEST(Bound, RejectsNonPositiveConstant) {
  EXPECT_THROW(degree_bound(3, q(0)), InvalidArgument);
  EXPECT_THROW(degree_bound(3, q(-1, 2)), InvalidArgument);
  EXPECT_THROW(degree_bound(1, q(1)), InvalidArgument);
}

TEST(Nullstellensatz, GenusOne) {
  const auto s = nullstellensatz_sizes(1);
  EXPECT_EQ(s.unknowns, 1628770);
  EXPECT_EQ(s.equations_linear, 1028790);
  EXPECT_EQ(s.equations, 2);
  EXPECT_EQ(s.variables, 4);
  EXPECT_EQ(s.multiplier_degree, 64);
  EXPECT_EQ(s.kollar_degree, 256);
}

TEST(Nullstellensatz, AgreesWithPrimeFactorOracle) {
  for (int g = 1; g <= 4; ++g) {
    const auto s = nullstellensatz_sizes(g);
    const BigInt n = pow2(static_cast<unsigned>(6 * g));
    const auto k = static_cast<unsigned>(3 * g + 1);
    EXPECT_EQ(s.unknowns, BigInt(1 << g) * oracle::binomial_by_primes(n + 3 * g + 1, k));
    EXPECT_EQ(s.equations_linear, oracle::binomial_by_primes(n + 3 * g + 5, k));
    EXPECT_GT(s.equations_linear, s.unknowns / (1 << g));
  }
}

TEST(Binomial, EdgeCases) {
  EXPECT_EQ(binomial(5, 0), 1);
  EXPECT_EQ(binomial(5, 5), 1);
  EXPECT_EQ(binomial(5, 7), 0);
  EXPECT_EQ(binomial(68, 4), 814385);
}
