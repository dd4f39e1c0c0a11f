#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "schottky/errors.hpp"
#include "schottky/random.hpp"
#include "schottky/theta.hpp"

namespace schottky {

/// Unknowns of the theta-constant form of the KP equation
///   u^4 d^2 Theta + (3/4 v^2 - u w) d Theta + c Theta = 0   for every eps.
struct KpCandidate {
  ComplexVector u;
  ComplexVector v;
  ComplexVector w;
  Complex c = 0.0;

  int genus() const { return static_cast<int>(u.size()); }
};

/// (u, v, w, c) -> (a u, a^2 v, a^3 w, a^4 c); scales the residual by a^4.
inline KpCandidate apply_gauge(const KpCandidate& cand, Complex a) {
  const Complex a2 = a * a;
  return {a * cand.u, a2 * cand.v, a2 * a * cand.w, a2 * a2 * cand.c};
}

/// Representative with |u| = 1 and the first coordinate of modulus > 1e-8
/// real and positive.
inline KpCandidate gauge_fix(const KpCandidate& cand) {
  const double norm = cand.u.norm();
  if (!(norm > 0.0)) throw InvalidArgument("u must be nonzero");
  Complex phase = 1.0;
  for (Eigen::Index i = 0; i < cand.u.size(); ++i)
    if (std::abs(cand.u(i)) / norm > 1e-8) {
      phase = cand.u(i) / std::abs(cand.u(i));
      break;
    }
  return apply_gauge(cand, std::conj(phase) / norm);
}

inline bool is_gauge_fixed(const KpCandidate& cand, double tol = 1e-12) {
  if (std::abs(cand.u.norm() - 1.0) > tol) return false;
  for (Eigen::Index i = 0; i < cand.u.size(); ++i)
    if (std::abs(cand.u(i)) > 1e-8)
      return std::abs(cand.u(i).imag()) <= tol && cand.u(i).real() > 0.0;
  return false;
}

enum class Decision { JacobianLike, NonJacobian, Inconclusive };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::JacobianLike: return "JACOBIAN_LIKE";
    case Decision::NonJacobian: return "NON_JACOBIAN";
    case Decision::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct SolverConfig {
  int n_starts = 32;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double theta_pos = 1e-8;
  double theta_neg = 1e-6;
  // Relative threshold for the Sasaki rank; <= 0 selects 1e-10 * 2^g.
  double rank_tol = 0.0;

  void check() const {
    if (n_starts < 1) throw InvalidArgument("n_starts must be at least 1");
    if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
    if (!(theta_pos < theta_neg)) throw InvalidArgument("theta_pos must be below theta_neg");
  }
};

struct KpReport {
  double strict_residual = 0.0;
  double relaxed_residual = 0.0;
  KpCandidate best_candidate;
  int sasaki_rank = 0;
  std::vector<double> sasaki_singular_values;
  double scale = 1.0;
  Decision decision = Decision::Inconclusive;
};

struct RelaxedProfile {
  double residual = 0.0;
  ComplexMatrix b;
  Complex c = 0.0;
};

struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;
};

namespace detail {

inline void require_length(const ComplexVector& x, int g, const char* name) {
  if (x.size() != g) {
    std::ostringstream os;
    os << name << " has length " << x.size() << ", jet genus is " << g;
    throw DimensionMismatch(os.str());
  }
}

// Full-index views of a jet: G_b(i,j) = d Theta_b / d tau_ij and the
// fully symmetric 4-tensor H_b[ijkl].
class KpTensors {
 public:
  explicit KpTensors(const ThetaJet& jet)
      : g_(jet.genus()), n_(jet.characteristics()), values_(jet.values) {
    const PairIndex pairs(g_);
    grad_.resize(static_cast<std::size_t>(n_));
    quartic_.resize(static_cast<std::size_t>(n_));
    for (int b = 0; b < n_; ++b) {
      auto& gm = grad_[static_cast<std::size_t>(b)];
      gm.resize(g_, g_);
      for (int i = 0; i < g_; ++i)
        for (int j = 0; j < g_; ++j) gm(i, j) = jet.grad(b, pairs(i, j));
      auto& h = quartic_[static_cast<std::size_t>(b)];
      h.resize(static_cast<std::size_t>(g_ * g_ * g_ * g_));
      const auto& hb = jet.hess[static_cast<std::size_t>(b)];
      for (int i = 0; i < g_; ++i)
        for (int j = 0; j < g_; ++j)
          for (int k = 0; k < g_; ++k)
            for (int l = 0; l < g_; ++l)
              h[static_cast<std::size_t>(((i * g_ + j) * g_ + k) * g_ + l)] =
                  hb(pairs(i, j), pairs(k, l));
    }
  }

  int genus() const { return g_; }
  int equations() const { return n_; }
  const ComplexVector& values() const { return values_; }
  const ComplexMatrix& grad(int b) const { return grad_[static_cast<std::size_t>(b)]; }

  // T_b[p] = sum_{jkl} H_b[pjkl] u_j u_k u_l, so that the quartic form is
  // sum_p u_p T_b[p] and its gradient is 4 T_b.
  ComplexVector cubic(int b, const ComplexVector& u) const {
    const auto& h = quartic_[static_cast<std::size_t>(b)];
    ComplexVector t = ComplexVector::Zero(g_);
    for (int p = 0; p < g_; ++p) {
      Complex acc = 0.0;
      for (int j = 0; j < g_; ++j) {
        Complex accj = 0.0;
        for (int k = 0; k < g_; ++k) {
          Complex acck = 0.0;
          for (int l = 0; l < g_; ++l)
            acck += h[static_cast<std::size_t>(((p * g_ + j) * g_ + k) * g_ + l)] * u(l);
          accj += acck * u(k);
        }
        acc += accj * u(j);
      }
      t(p) = acc;
    }
    return t;
  }

 private:
  int g_;
  int n_;
  ComplexVector values_;
  std::vector<ComplexMatrix> grad_;
  std::vector<std::vector<Complex>> quartic_;
};

}  // namespace detail

/// sum_{i,j} u_i v_j dTheta/dtau_ij for every characteristic.
inline ComplexVector directional_first(const ThetaJet& jet, const ComplexVector& u,
                                       const ComplexVector& v) {
  const int g = jet.genus();
  detail::require_length(u, g, "u");
  detail::require_length(v, g, "v");
  const PairIndex pairs(g);
  ComplexVector out = ComplexVector::Zero(jet.characteristics());
  for (int p = 0; p < pairs.size(); ++p) {
    const int i = pairs.first(p);
    const int j = pairs.second(p);
    const Complex coeff = i == j ? u(i) * v(i) : u(i) * v(j) + u(j) * v(i);
    out += coeff * jet.grad.col(p);
  }
  return out;
}

/// sum_{i,j} m_ij dTheta/dtau_ij; only the symmetric part of m contributes.
inline ComplexVector contract_first(const ThetaJet& jet, const ComplexMatrix& m) {
  const int g = jet.genus();
  if (m.rows() != g || m.cols() != g) throw DimensionMismatch("coefficient matrix must be g x g");
  const PairIndex pairs(g);
  ComplexVector out = ComplexVector::Zero(jet.characteristics());
  for (int p = 0; p < pairs.size(); ++p) {
    const int i = pairs.first(p);
    const int j = pairs.second(p);
    const Complex coeff = i == j ? m(i, i) : m(i, j) + m(j, i);
    out += coeff * jet.grad.col(p);
  }
  return out;
}

/// Contraction of u x u x u x u with d^2 Theta / dtau_ij dtau_kl.
inline ComplexVector directional_fourth(const ThetaJet& jet, const ComplexVector& u) {
  const int g = jet.genus();
  detail::require_length(u, g, "u");
  const PairIndex pairs(g);
  const int np = pairs.size();
  ComplexVector up(np);
  for (int p = 0; p < np; ++p) up(p) = pairs.weight(p) * u(pairs.first(p)) * u(pairs.second(p));
  ComplexVector out(jet.characteristics());
  for (int b = 0; b < jet.characteristics(); ++b)
    out(b) = up.transpose() * jet.hess[static_cast<std::size_t>(b)] * up;
  return out;
}

/// Bilinear coefficient 3/4 v v^T - (u w^T + w u^T)/2.
inline ComplexMatrix kp_coefficient(const KpCandidate& cand) {
  const ComplexMatrix uw = cand.u * cand.w.transpose();
  return 0.75 * cand.v * cand.v.transpose() - 0.5 * (uw + uw.transpose());
}

inline ComplexVector kp_residual(const ThetaJet& jet, const KpCandidate& cand) {
  const int g = jet.genus();
  detail::require_length(cand.u, g, "u");
  detail::require_length(cand.v, g, "v");
  detail::require_length(cand.w, g, "w");
  return directional_fourth(jet, cand.u) + contract_first(jet, kp_coefficient(cand)) +
         cand.c * jet.values;
}

/// sqrt(|values|^2 + |grad|^2 + |hess|^2) over the stored components.
inline double jet_scale(const ThetaJet& jet) {
  double s = jet.values.squaredNorm() + jet.grad.squaredNorm();
  for (const auto& h : jet.hess) s += h.squaredNorm();
  return std::sqrt(s);
}

/// Linear least squares over a free symmetric B and scalar c:
///   min | u^4 d^2 Theta + B d Theta + c Theta |.
/// The design matrix depends only on the jet, so its SVD is shared across u.
class RelaxedSystem {
 public:
  explicit RelaxedSystem(const ThetaJet& jet) : pairs_(jet.genus()) {
    const int n = jet.characteristics();
    const int np = pairs_.size();
    ComplexMatrix design(n, np + 1);
    for (int p = 0; p < np; ++p) design.col(p) = pairs_.weight(p) * jet.grad.col(p);
    design.col(np) = jet.values;
    Eigen::JacobiSVD<ComplexMatrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? sigma(0) * 1e-14 : 0.0;
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
    range_ = svd.matrixU().leftCols(rank);
    right_ = svd.matrixV().leftCols(rank);
    inv_sigma_ = sigma.head(rank).cwiseInverse();
  }

  // Component of f orthogonal to the span of the gradient rows and values.
  ComplexVector project_out(const ComplexVector& f) const {
    return f - range_ * (range_.adjoint() * f);
  }

  RelaxedProfile solve(const ThetaJet& jet, const ComplexVector& u) const {
    const ComplexVector f = directional_fourth(jet, u);
    const ComplexVector coeffs = -right_ * (inv_sigma_.asDiagonal() * (range_.adjoint() * f));
    const int g = pairs_.genus();
    RelaxedProfile out;
    out.b = ComplexMatrix::Zero(g, g);
    for (int p = 0; p < pairs_.size(); ++p) {
      out.b(pairs_.first(p), pairs_.second(p)) = coeffs(p);
      out.b(pairs_.second(p), pairs_.first(p)) = coeffs(p);
    }
    out.c = coeffs(pairs_.size());
    out.residual = project_out(f).norm();
    return out;
  }

 private:
  PairIndex pairs_;
  ComplexMatrix range_;
  ComplexMatrix right_;
  RealVector inv_sigma_;
};

inline RelaxedProfile relaxed_profile(const ThetaJet& jet, const ComplexVector& u) {
  detail::require_length(u, jet.genus(), "u");
  if (std::abs(u.norm() - 1.0) > 1e-10) throw InvalidArgument("u must have unit norm");
  return RelaxedSystem(jet).solve(jet, u);
}

/// Rows d Theta / d tau_ij (stored pairs, in pair order) followed by Theta.
inline ComplexMatrix sasaki_matrix(const ThetaJet& jet) {
  const int np = jet.pairs();
  ComplexMatrix m(np + 1, jet.characteristics());
  m.topRows(np) = jet.grad.transpose();
  m.row(np) = jet.values.transpose();
  return m;
}

inline double default_rank_tol(int g) { return 1e-10 * static_cast<double>(1 << g); }

/// Numerical rank: singular values above tol * sigma_max.
inline RankResult rank_test(const ComplexMatrix& m, double tol) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  RankResult out;
  const auto& sigma = svd.singularValues();
  out.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const double cutoff = sigma.size() > 0 ? tol * sigma(0) : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++out.rank;
  return out;
}

namespace detail {

// Levenberg-Marquardt on (unit sphere in C^g) x C^k for holomorphic
// residuals. Problem supplies:
//   int extra_dim() const;
//   ComplexVector residual(const ComplexVector& u, const ComplexVector& e) const;
//   void jacobian(u, e, ComplexMatrix& ju, ComplexMatrix& je) const;
//   void retract(ComplexVector& u, ComplexVector& e, du, de) const;
// Steps in u are restricted to the complex orthogonal complement of u.
struct LmResult {
  ComplexVector u;
  ComplexVector extra;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

template <typename Problem>
LmResult sphere_lm(const Problem& problem, ComplexVector u, ComplexVector extra, int max_iters,
                   double target, Rng& rng) {
  const int g = static_cast<int>(u.size());
  const int k = problem.extra_dim();
  LmResult best{u, extra, problem.residual(u, extra).norm(), 0};
  double mu = 1e-3;
  int rejections = 0;
  int stalls = 0;

  auto tangent_basis = [g](const ComplexVector& x) {
    Eigen::HouseholderQR<ComplexMatrix> qr(x);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g, g);
    return ComplexMatrix(q.rightCols(g - 1));
  };

  for (int it = 0; it < max_iters && best.residual > target; ++it) {
    best.iterations = it + 1;
    const ComplexVector r = problem.residual(best.u, best.extra);
    ComplexMatrix ju;
    ComplexMatrix je;
    problem.jacobian(best.u, best.extra, ju, je);
    const ComplexMatrix basis = tangent_basis(best.u);
    const int nt = g - 1;
    const int nv = nt + k;
    const Eigen::Index m = r.size();
    if (nv == 0) break;
    ComplexMatrix jac(m, nv);
    if (nt > 0) jac.leftCols(nt) = ju * basis;
    if (k > 0) jac.rightCols(k) = je;

    ComplexMatrix aug(m + nv, nv);
    aug.topRows(m) = jac;
    aug.bottomRows(nv) = std::sqrt(mu) * ComplexMatrix::Identity(nv, nv);
    ComplexVector rhs = ComplexVector::Zero(m + nv);
    rhs.head(m) = -r;
    const ComplexVector step = aug.colPivHouseholderQr().solve(rhs);

    ComplexVector du = nt > 0 ? ComplexVector(basis * step.head(nt)) : ComplexVector::Zero(g);
    ComplexVector de = k > 0 ? ComplexVector(step.tail(k)) : ComplexVector();
    ComplexVector nu = best.u;
    ComplexVector ne = best.extra;
    problem.retract(nu, ne, du, de);
    const double nr = problem.residual(nu, ne).norm();

    if (std::isfinite(nr) && nr < best.residual) {
      const double gain = (best.residual - nr) / best.residual;
      best.u = nu;
      best.extra = ne;
      best.residual = nr;
      mu = std::max(mu / 3.0, 1e-15);
      rejections = 0;
      stalls = gain < 1e-12 ? stalls + 1 : 0;
      if (stalls >= 5) break;
      continue;
    }
    mu *= 4.0;
    if (++rejections < 12 && mu < 1e16) continue;

    // Derivative-free fallback: random tangent probes over decreasing radii.
    bool improved = false;
    for (double radius = 0.1; radius >= 1e-7 && !improved; radius *= 0.1)
      for (int probe = 0; probe < 8 && !improved; ++probe) {
        ComplexVector pu = ComplexVector::Zero(g);
        if (nt > 0) {
          ComplexVector beta(nt);
          for (int i = 0; i < nt; ++i) beta(i) = rng.complex_normal();
          pu = basis * (radius * beta / beta.norm());
        }
        ComplexVector pe(k);
        for (int i = 0; i < k; ++i)
          pe(i) = radius * (1.0 + std::abs(best.extra(i))) * rng.complex_normal();
        ComplexVector qu = best.u;
        ComplexVector qe = best.extra;
        problem.retract(qu, qe, pu, pe);
        const double qr = problem.residual(qu, qe).norm();
        if (std::isfinite(qr) && qr < best.residual) {
          best.u = qu;
          best.extra = qe;
          best.residual = qr;
          improved = true;
        }
      }
    if (!improved) break;
    mu = 1e-3;
    rejections = 0;
  }
  return best;
}

class StrictProblem {
 public:
  explicit StrictProblem(const KpTensors& t) : t_(t), g_(t.genus()) {}

  int extra_dim() const { return 2 * g_ + 1; }

  ComplexVector residual(const ComplexVector& u, const ComplexVector& e) const {
    const ComplexVector v = e.head(g_);
    const ComplexVector w = e.segment(g_, g_);
    const Complex c = e(2 * g_);
    ComplexVector r(t_.equations());
    for (int b = 0; b < t_.equations(); ++b) {
      const ComplexMatrix& gm = t_.grad(b);
      const Complex quartic = u.transpose() * t_.cubic(b, u);
      const Complex vv = v.transpose() * gm * v;
      const Complex uw = u.transpose() * gm * w;
      r(b) = quartic + 0.75 * vv - uw + c * t_.values()(b);
    }
    return r;
  }

  void jacobian(const ComplexVector& u, const ComplexVector& e, ComplexMatrix& ju,
                ComplexMatrix& je) const {
    const ComplexVector v = e.head(g_);
    const ComplexVector w = e.segment(g_, g_);
    const int n = t_.equations();
    ju.resize(n, g_);
    je.resize(n, 2 * g_ + 1);
    for (int b = 0; b < n; ++b) {
      const ComplexMatrix& gm = t_.grad(b);
      ju.row(b) = (4.0 * t_.cubic(b, u) - gm * w).transpose();
      je.row(b).head(g_) = (1.5 * (gm * v)).transpose();
      je.row(b).segment(g_, g_) = (-(gm.transpose() * u)).transpose();
      je(b, 2 * g_) = t_.values()(b);
    }
  }

  void retract(ComplexVector& u, ComplexVector& e, const ComplexVector& du,
               const ComplexVector& de) const {
    u += du;
    e += de;
    const double a = u.norm();
    u /= a;
    e.head(g_) /= a * a;
    e.segment(g_, g_) /= a * a * a;
    e(2 * g_) /= a * a * a * a;
  }

  // Least-squares (w, c) for fixed (u, v); the residual is affine in both.
  ComplexVector warm_start(const ComplexVector& u, const ComplexVector& v) const {
    const int n = t_.equations();
    ComplexMatrix a(n, g_ + 1);
    ComplexVector rhs(n);
    for (int b = 0; b < n; ++b) {
      const ComplexMatrix& gm = t_.grad(b);
      a.row(b).head(g_) = (-(gm.transpose() * u)).transpose();
      a(b, g_) = t_.values()(b);
      const Complex quartic = u.transpose() * t_.cubic(b, u);
      const Complex vv = v.transpose() * gm * v;
      rhs(b) = -(quartic + 0.75 * vv);
    }
    const ComplexVector wc = a.completeOrthogonalDecomposition().solve(rhs);
    ComplexVector e(2 * g_ + 1);
    e.head(g_) = v;
    e.tail(g_ + 1) = wc;
    return e;
  }

 private:
  const KpTensors& t_;
  int g_;
};

class RelaxedProblem {
 public:
  RelaxedProblem(const KpTensors& t, const RelaxedSystem& sys) : t_(t), sys_(sys) {}

  int extra_dim() const { return 0; }

  ComplexVector residual(const ComplexVector& u, const ComplexVector&) const {
    ComplexVector f(t_.equations());
    for (int b = 0; b < t_.equations(); ++b) f(b) = u.transpose() * t_.cubic(b, u);
    return sys_.project_out(f);
  }

  void jacobian(const ComplexVector& u, const ComplexVector&, ComplexMatrix& ju,
                ComplexMatrix& je) const {
    const int n = t_.equations();
    ComplexMatrix jf(n, t_.genus());
    for (int b = 0; b < n; ++b) jf.row(b) = 4.0 * t_.cubic(b, u).transpose();
    ju.resize(n, t_.genus());
    for (int p = 0; p < t_.genus(); ++p) ju.col(p) = sys_.project_out(jf.col(p));
    je.resize(n, 0);
  }

  void retract(ComplexVector& u, ComplexVector&, const ComplexVector& du,
               const ComplexVector&) const {
    u += du;
    u /= u.norm();
  }

 private:
  const KpTensors& t_;
  const RelaxedSystem& sys_;
};

inline ComplexVector random_unit(int g, Rng& rng) {
  ComplexVector u(g);
  for (int i = 0; i < g; ++i) u(i) = rng.complex_normal();
  return u / u.norm();
}

}  // namespace detail

/// Sasaki rank, relaxed lower bound and strict multi-start minimization of
/// the KP residual, combined into a decision.
inline KpReport strict_min(const ThetaJet& jet, const SolverConfig& config = {}) {
  config.check();
  const int g = jet.genus();
  const detail::KpTensors tensors(jet);
  KpReport report;
  report.scale = jet_scale(jet);
  const double scale = report.scale;
  // Starts stop early once the residual is at rounding level; later starts
  // can then only tie.
  const double target = 1e-15 * scale;

  const detail::StrictProblem strict(tensors);
  std::optional<detail::LmResult> best_strict;
  for (int s = 0; s < config.n_starts; ++s) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(2 * s)));
    const ComplexVector u = detail::random_unit(g, rng);
    ComplexVector v(g);
    for (int i = 0; i < g; ++i) v(i) = rng.complex_normal();
    const ComplexVector extra = strict.warm_start(u, v);
    auto result = detail::sphere_lm(strict, u, extra, config.max_iters, target, rng);
    if (!best_strict || result.residual < best_strict->residual) best_strict = std::move(result);
    if (best_strict->residual <= target) break;
  }
  KpCandidate cand{best_strict->u, best_strict->extra.head(g), best_strict->extra.segment(g, g),
                   best_strict->extra(2 * g)};
  report.best_candidate = gauge_fix(cand);
  report.strict_residual = kp_residual(jet, report.best_candidate).norm();

  const RelaxedSystem relaxed_sys(jet);
  const detail::RelaxedProblem relaxed(tensors, relaxed_sys);
  double relaxed_best = relaxed_sys.solve(jet, report.best_candidate.u).residual;
  for (int s = 0; s < config.n_starts && relaxed_best > target; ++s) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(2 * s + 1)));
    const ComplexVector u = detail::random_unit(g, rng);
    const auto result = detail::sphere_lm(relaxed, u, ComplexVector(), config.max_iters, target, rng);
    relaxed_best = std::min(relaxed_best, relaxed_sys.solve(jet, result.u).residual);
  }
  // The strict optimum is feasible for the relaxed problem.
  report.relaxed_residual = std::min(relaxed_best, report.strict_residual);

  const double rank_tol = config.rank_tol > 0.0 ? config.rank_tol : default_rank_tol(g);
  const RankResult rank = rank_test(sasaki_matrix(jet), rank_tol);
  report.sasaki_rank = rank.rank;
  report.sasaki_singular_values = rank.singular_values;

  const bool full_rank = rank.rank == jet.pairs() + 1;
  if (!full_rank)
    report.decision = Decision::Inconclusive;
  else if (report.strict_residual / scale <= config.theta_pos)
    report.decision = Decision::JacobianLike;
  else if (report.relaxed_residual / scale >= config.theta_neg)
    report.decision = Decision::NonJacobian;
  else
    report.decision = Decision::Inconclusive;
  return report;
}

}  // namespace schottky
