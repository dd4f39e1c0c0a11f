#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schottky/errors.hpp"

namespace schottky {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
class ExactRational {
 public:
  using Value = boost::multiprecision::cpp_rational;

  ExactRational() = default;
  ExactRational(long long n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  ExactRational(const BigInt& n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  ExactRational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    // Boost rejects negative denominators, so move the sign up first.
    value_ = den < 0 ? Value(-num, -den) : Value(num, den);
  }

  /// Parses "p", "p/q" or "-p/q" with decimal integers.
  static ExactRational parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
      std::size_t i = 0;
      if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
      if (i == s.size()) throw ParseError("malformed rational '" + std::string(text) + "'");
      for (std::size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9')
          throw ParseError("malformed rational '" + std::string(text) + "'");
      return BigInt(std::string(s));
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return ExactRational(parse_int(text));
    return ExactRational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }
  bool is_integer() const { return denominator() == 1; }
  int sign() const { return value_.sign(); }

  std::string to_string() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  /// log2 |x| for x != 0, accurate to double precision even when the
  /// numerator and denominator overflow a double.
  double log2_abs() const {
    if (sign() == 0) throw InvalidArgument("log2 of zero");
    return log2_big(abs(numerator())) - log2_big(denominator());
  }

  double to_double() const { return static_cast<double>(value_); }

  ExactRational& operator+=(const ExactRational& o) { value_ += o.value_; return *this; }
  ExactRational& operator-=(const ExactRational& o) { value_ -= o.value_; return *this; }
  ExactRational& operator*=(const ExactRational& o) { value_ *= o.value_; return *this; }
  ExactRational& operator/=(const ExactRational& o) {
    if (o.sign() == 0) throw InvalidArgument("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
  friend ExactRational operator-(const ExactRational& a) {
    ExactRational r;
    r.value_ = -a.value_;
    return r;
  }
  friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.value_ == b.value_; }
  friend bool operator<(const ExactRational& a, const ExactRational& b) { return a.value_ < b.value_; }
  friend bool operator>(const ExactRational& a, const ExactRational& b) { return b < a; }
  friend bool operator<=(const ExactRational& a, const ExactRational& b) { return !(b < a); }
  friend bool operator>=(const ExactRational& a, const ExactRational& b) { return !(a < b); }

 private:
  static double log2_big(const BigInt& x) {
    const auto bits = boost::multiprecision::msb(x);
    if (bits < 60) return std::log2(static_cast<double>(x));
    const auto shift = bits - 60;
    return std::log2(static_cast<double>(BigInt(x >> shift))) + static_cast<double>(shift);
  }

  Value value_;
};

inline BigInt pow2(unsigned exponent) { return BigInt(1) << exponent; }

inline BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Exact C(n, k) by the multiplicative formula; every partial quotient is
/// an integer.
inline BigInt binomial(const BigInt& n, unsigned k) {
  if (n < 0) throw InvalidArgument("binomial with negative n");
  if (BigInt(k) > n) return 0;
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// (2k-1)!! = (2k-1)(2k-3)...3*1, with the empty product for k = 0.
inline BigInt odd_double_factorial(unsigned k) {
  BigInt r = 1;
  for (unsigned j = 1; j <= k; ++j) r *= 2 * j - 1;
  return r;
}

/// B_n from sum_{k=0}^{m} C(m+1,k) B_k = 0, B_0 = 1, B_1 = -1/2. Memoized.
inline ExactRational bernoulli(int n) {
  if (n < 0) throw InvalidArgument("Bernoulli index must be nonnegative");
  if (n % 2 != 0) throw InvalidArgument("only even Bernoulli indices are supported");
  static std::mutex mutex;
  static std::vector<ExactRational> cache{ExactRational(1), ExactRational(-1, 2)};
  std::lock_guard<std::mutex> lock(mutex);
  for (int m = static_cast<int>(cache.size()); m <= n; ++m) {
    ExactRational sum;
    for (int k = 0; k < m; ++k)
      sum += ExactRational(binomial(m + 1, static_cast<unsigned>(k))) * cache[static_cast<std::size_t>(k)];
    cache.push_back(-sum / ExactRational(m + 1));
  }
  return cache[static_cast<std::size_t>(n)];
}

/// zeta(1 - 2k) = -B_{2k} / (2k).
inline ExactRational zeta_neg_odd(int k) {
  if (k < 1) throw InvalidArgument("zeta_neg_odd needs k >= 1");
  return -bernoulli(2 * k) / ExactRational(2 * k);
}

inline void require_genus(int g, int min_g = 1) {
  if (g < min_g) throw InvalidArgument("genus must be at least " + std::to_string(min_g));
}

inline BigInt symplectic_product(int g) {
  BigInt p = 1;
  for (int k = 1; k <= g; ++k) p *= pow2(static_cast<unsigned>(2 * k)) - 1;
  return p;
}

/// [Gamma_g : Gamma_g(2,4)] = 2^{g^2+2g} prod_{k=1}^g (2^{2k} - 1).
inline BigInt level_index(int g) {
  require_genus(g);
  return pow2(static_cast<unsigned>(g * g + 2 * g)) * symplectic_product(g);
}

/// Top self-intersection of lambda on A_g in the orbifold sense:
///   (-1)^N N! prod_{k=1}^g zeta(1-2k) / (2 (2k-1)!!),  N = g(g+1)/2.
inline ExactRational lambda_top_ag(int g) {
  require_genus(g);
  const unsigned n = static_cast<unsigned>(g * (g + 1) / 2);
  ExactRational r(factorial(n));
  if (n % 2 == 1) r = -r;
  for (int k = 1; k <= g; ++k)
    r *= zeta_neg_odd(k) / ExactRational(2 * odd_double_factorial(static_cast<unsigned>(k)));
  return r;
}

/// deg Th(A_g^{2,4}) = level_index * 2 * <lambda^N> / 2^N; the factor 2 is
/// the orbifold correction for the involution x -> -x.
inline ExactRational deg_th_ag(int g) {
  require_genus(g);
  const unsigned n = static_cast<unsigned>(g * (g + 1) / 2);
  return ExactRational(level_index(g)) * ExactRational(2) * lambda_top_ag(g) /
         ExactRational(pow2(n));
}

inline constexpr int kJacobianTableMaxGenus = 7;

/// Degrees of Th(J_g^{2,4}) for g = 1..7, obtained from Faber's
/// intersection numbers on the moduli of curves.
inline ExactRational deg_th_jg(int g) {
  require_genus(g);
  static const std::array<const char*, kJacobianTableMaxGenus> table{
      "1", "1", "16", "208896", "282654670848", "23303354757572198400",
      "87534047502300588892024209408"};
  if (g > kJacobianTableMaxGenus)
    throw TableAbsent("Jacobian degree is only tabulated for g <= 7");
  return ExactRational(BigInt(table[static_cast<std::size_t>(g - 1)]));
}

/// <lambda^{3g-3}> on the moduli of curves implied by the stored degree:
/// deg = level_index * <(lambda/2)^{3g-3}>.
inline ExactRational implied_lambda_top_mg(int g) {
  const ExactRational deg = deg_th_jg(g);
  return deg * ExactRational(pow2(static_cast<unsigned>(3 * g - 3))) /
         ExactRational(level_index(g));
}

inline ExactRational ratio_j_over_a(int g) { return deg_th_jg(g) / deg_th_ag(g); }

/// deg Th(A_1 x A_{g-1}) / deg Th(A_g)
///   = 2^{g-1} <lambda^{g(g-1)/2}>_{A_{g-1}} / (24 <lambda^{g(g+1)/2}>_{A_g}).
inline ExactRational reducible_ratio_ag(int g) {
  require_genus(g, 2);
  return ExactRational(pow2(static_cast<unsigned>(g - 1))) * lambda_top_ag(g - 1) /
         (ExactRational(24) * lambda_top_ag(g));
}

struct DegreeReport {
  int g = 0;
  BigInt level_index;
  ExactRational lambda_top_ag;
  ExactRational deg_th_ag;
  std::optional<ExactRational> deg_th_jg;
  std::optional<ExactRational> implied_lambda_top_mg;
  std::optional<ExactRational> ratio_j_over_a;
  std::optional<ExactRational> reducible_ratio;
};

inline DegreeReport degree_report(int g) {
  require_genus(g);
  DegreeReport r;
  r.g = g;
  r.level_index = level_index(g);
  r.lambda_top_ag = lambda_top_ag(g);
  r.deg_th_ag = deg_th_ag(g);
  if (g <= kJacobianTableMaxGenus) {
    r.deg_th_jg = deg_th_jg(g);
    r.implied_lambda_top_mg = implied_lambda_top_mg(g);
    r.ratio_j_over_a = *r.deg_th_jg / r.deg_th_ag;
  }
  if (g >= 2) r.reducible_ratio = reducible_ratio_ag(g);
  return r;
}

struct BoundReport {
  int g = 0;
  ExactRational c_input;
  ExactRational c_big;         // 125 c / 64
  ExactRational lambda_bound;  // (3g-3)! C^g g^{2g}
  ExactRational degree_bound;  // lambda_bound 2^{g^2-g+3} prod (2^{2k}-1)
};

/// Upper bound on deg Th(J_g^{2,4}) for a Weil-Petersson volume constant c
/// with Vol_{g,0} < c^g g^{2g}.
inline BoundReport degree_bound(int g, const ExactRational& c) {
  require_genus(g, 2);
  if (c.sign() <= 0) throw InvalidArgument("the volume constant c must be positive");
  BoundReport r;
  r.g = g;
  r.c_input = c;
  r.c_big = ExactRational(125) * c / ExactRational(64);
  ExactRational c_pow(1);
  for (int k = 0; k < g; ++k) c_pow *= r.c_big;
  BigInt g_pow = boost::multiprecision::pow(BigInt(g), static_cast<unsigned>(2 * g));
  r.lambda_bound = ExactRational(factorial(static_cast<unsigned>(3 * g - 3))) * c_pow *
                   ExactRational(g_pow);
  r.degree_bound = r.lambda_bound *
                   ExactRational(pow2(static_cast<unsigned>(g * g - g + 3)) * symplectic_product(g));
  return r;
}

/// Sizes of the linear system behind the effective Nullstellensatz applied
/// to the 2^g quartic KP equations in 3g+1 unknowns.
struct NullstellensatzSizes {
  int g = 0;
  int equations = 0;            // M = 2^g
  int variables = 0;            // N = 3g + 1
  int degree = 4;               // d
  BigInt multiplier_degree;     // 4^{3g}, the degree bound used for each c_i
  BigInt kollar_degree;         // d^N = 4^{3g+1}, the bound on deg(c_i f_i)
  BigInt unknowns;              // K = 2^g C(4^{3g}+3g+1, 3g+1)
  BigInt equations_linear;      // L = C(4^{3g}+3g+5, 3g+1)
};

inline NullstellensatzSizes nullstellensatz_sizes(int g) {
  require_genus(g);
  if (g > 20) throw InvalidArgument("nullstellensatz sizes are limited to g <= 20");
  NullstellensatzSizes s;
  s.g = g;
  s.equations = 1 << g;
  s.variables = 3 * g + 1;
  s.multiplier_degree = pow2(static_cast<unsigned>(6 * g));
  s.kollar_degree = pow2(static_cast<unsigned>(6 * g + 2));
  const auto k = static_cast<unsigned>(3 * g + 1);
  s.unknowns = BigInt(s.equations) * binomial(s.multiplier_degree + 3 * g + 1, k);
  s.equations_linear = binomial(s.multiplier_degree + 3 * g + 5, k);
  return s;
}

}  // namespace schottky
