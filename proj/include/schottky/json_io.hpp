#pragma once

#include <json.hpp>

#include <string>

#include "schottky/errors.hpp"
#include "schottky/exact.hpp"
#include "schottky/kp.hpp"
#include "schottky/relation.hpp"
#include "schottky/theta.hpp"

namespace schottky::io {

using nlohmann::json;

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json complex_vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

inline json real_matrix_json(const RealMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Complex parse_complex(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

// {"g": int, "re": [[...]], "im": [[...]]}
inline json period_matrix_json(const PeriodMatrix& tau) {
  return {{"g", tau.genus()}, {"re", real_matrix_json(tau.real())},
          {"im", real_matrix_json(tau.imag())}};
}

inline PeriodMatrix parse_period_matrix(const json& j) {
  if (!j.is_object() || !j.contains("g") || !j.contains("re") || !j.contains("im"))
    throw ParseError("period matrix needs keys g, re, im");
  if (!j["g"].is_number_integer()) throw ParseError("g must be an integer");
  const int g = j["g"].get<int>();
  if (g < 1) throw ParseError("g must be positive");
  auto read = [&](const json& rows, const char* name) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != g)
      throw ParseError(std::string(name) + " must have g rows");
    RealMatrix m(g, g);
    for (int i = 0; i < g; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != g)
        throw ParseError(std::string(name) + " rows must have g entries");
      for (int k = 0; k < g; ++k) {
        const auto& x = row[static_cast<std::size_t>(k)];
        if (!x.is_number()) throw ParseError(std::string(name) + " entries must be numbers");
        m(i, k) = x.get<double>();
      }
    }
    return m;
  };
  ComplexMatrix raw(g, g);
  raw.real() = read(j["re"], "re");
  raw.imag() = read(j["im"], "im");
  return validate_period_matrix(g, raw);
}

inline json jet_json(const ThetaJet& jet) {
  json grad = json::array();
  json hess = json::array();
  for (int b = 0; b < jet.characteristics(); ++b) {
    grad.push_back(complex_vector_json(jet.grad.row(b).transpose()));
    json hb = json::array();
    const auto& h = jet.hess[static_cast<std::size_t>(b)];
    for (Eigen::Index p = 0; p < h.rows(); ++p) hb.push_back(complex_vector_json(h.row(p).transpose()));
    hess.push_back(std::move(hb));
  }
  return {{"values", complex_vector_json(jet.values)},
          {"grad", std::move(grad)},
          {"hess", std::move(hess)},
          {"radius", jet.radius_used},
          {"tail_bound", jet.tail_bound}};
}

inline json kp_report_json(const KpReport& r) {
  return {{"strict_residual", r.strict_residual},
          {"relaxed_residual", r.relaxed_residual},
          {"u", complex_vector_json(r.best_candidate.u)},
          {"v", complex_vector_json(r.best_candidate.v)},
          {"w", complex_vector_json(r.best_candidate.w)},
          {"c", complex_json(r.best_candidate.c)},
          {"rank", r.sasaki_rank},
          {"singular_values", r.sasaki_singular_values},
          {"scale", r.scale},
          {"decision", to_string(r.decision)}};
}

inline json rational_json(const ExactRational& x) {
  return {{"num", x.numerator().str()}, {"den", x.denominator().str()}};
}

inline json optional_rational_json(const std::optional<ExactRational>& x) {
  return x ? rational_json(*x) : json(nullptr);
}

inline json degree_report_json(const DegreeReport& r) {
  return {{"g", r.g},
          {"level_index", r.level_index.str()},
          {"lambda_top_ag", rational_json(r.lambda_top_ag)},
          {"deg_th_ag", rational_json(r.deg_th_ag)},
          {"deg_th_jg", optional_rational_json(r.deg_th_jg)},
          {"implied_lambda_top_mg", optional_rational_json(r.implied_lambda_top_mg)},
          {"ratio_j_over_a", optional_rational_json(r.ratio_j_over_a)},
          {"reducible_ratio", optional_rational_json(r.reducible_ratio)}};
}

inline json bound_report_json(const BoundReport& r) {
  return {{"g", r.g},
          {"c_input", rational_json(r.c_input)},
          {"C", rational_json(r.c_big)},
          {"lambda_bound", rational_json(r.lambda_bound)},
          {"degree_bound", rational_json(r.degree_bound)},
          {"log2_degree_bound", r.degree_bound.log2_abs()}};
}

inline json nss_json(const NullstellensatzSizes& s) {
  return {{"g", s.g},
          {"M", s.equations},
          {"N_vars", s.variables},
          {"d", s.degree},
          {"multiplier_degree", s.multiplier_degree.str()},
          {"kollar_degree", s.kollar_degree.str()},
          {"K", s.unknowns.str()},
          {"L", s.equations_linear.str()}};
}

// {"monomials": [{"exps": [e0, ...], "coef": [re, im]}]}
inline Polynomial parse_polynomial(const json& j) {
  if (!j.is_object() || !j.contains("monomials") || !j["monomials"].is_array())
    throw ParseError("polynomial needs a monomials array");
  Polynomial poly;
  for (const auto& m : j["monomials"]) {
    if (!m.is_object() || !m.contains("exps") || !m.contains("coef") || !m["exps"].is_array())
      throw ParseError("monomial needs exps and coef");
    Monomial mono;
    for (const auto& e : m["exps"]) {
      if (!e.is_number_integer()) throw ParseError("exponents must be integers");
      mono.exps.push_back(e.get<int>());
    }
    mono.coef = parse_complex(m["coef"]);
    poly.monomials.push_back(std::move(mono));
  }
  return poly;
}

}  // namespace schottky::io
