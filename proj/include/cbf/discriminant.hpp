#pragma once

#include "cbf/divisor.hpp"
#include "cbf/fibration.hpp"

#include <map>
#include <string>
#include <vector>

namespace cbf {

struct DiscriminantResult {
  DivisorQ coefficients;                     // B_R = sum c_i B_i
  std::map<std::string, Rational> lct;       // per base component of B
  std::map<std::string, std::string> witness;  // upstairs component attaining the lct

  Rational coefficient(const std::string& base_component) const {
    return coefficients.coefficient(base_component);
  }
};

/// Whether upstairs component j lies over the generic point of B_i: its row is supported
/// on column i alone. Rows meeting several columns map into intersections of the B_k.
inline bool lies_over_generic_point(const FibrationModel& model, std::size_t j, std::size_t i) {
  if (model.exponent(j, i) <= 0) return false;
  for (std::size_t k = 0; k < model.base_dim(); ++k)
    if (k != i && model.exponent(j, k) != 0) return false;
  return true;
}

/// B_R from the smallest D with R_v + f*(B - D) <= red(f*B) over the generic point of each
/// component B_i of B: lct_i = min over rows j over B_i of (1 - r_j) / a_ji, c_i = 1 - lct_i.
/// Coefficients may be negative. Ties pick the lowest row for the witness. Throws
/// DomainError when no component of the chart lies over the generic point of some B_i.
inline DiscriminantResult discriminant_divisor(const FibrationModel& model) {
  require_valid(model);
  DiscriminantResult out;
  std::vector<DivisorQ::Term> terms;
  for (std::size_t i = 0; i < model.base_dim(); ++i) {
    if (!model.in_base_divisor(i)) continue;
    bool have = false;
    Rational best;
    std::size_t best_row = 0;
    for (std::size_t j = 0; j < model.rows(); ++j) {
      if (!lies_over_generic_point(model, j, i)) continue;
      const int a = model.exponent(j, i);
      Rational t = (Rational(1) - model.r(j)) / a;
      if (!have || t < best) {
        have = true;
        best = t;
        best_row = j;
      }
    }
    const auto& name = model.base_name(i);
    if (!have)
      throw DomainError("no component of this chart lies over the generic point of '" + name +
                        "'; its coefficient has to be read off another chart");
    out.lct[name] = best;
    out.witness[name] = model.upstairs_name(best_row);
    terms.emplace_back(PrimeComponent::base(name), Rational(1) - best);
  }
  out.coefficients = DivisorQ(terms);
  return out;
}

/// Adds f*S to R; S must be supported on B.
inline FibrationModel translate_by_pullback(const FibrationModel& model, const DivisorQ& s) {
  for (const auto& [c, q] : s.terms())
    if (c.space() != Space::base || !model.in_base_divisor(model.base_index(c.name())))
      throw DomainError("translation divisor must be supported on B ('" + c.name() + "')");
  DivisorQ fs = pullback(model, s);
  std::vector<Rational> r = model.r();
  for (std::size_t j = 0; j < model.rows(); ++j) r[j] += fs.coefficient(model.upstairs_name(j));
  return model.with_r(std::move(r));
}

/// Whether B_{R + f*S} = B_R + S exactly.
inline bool verify_translation_identity(const FibrationModel& model, const DivisorQ& s) {
  const auto before = discriminant_divisor(model);
  const auto after = discriminant_divisor(translate_by_pullback(model, s));
  return after.coefficients == before.coefficients + s;
}

/// (Y, B_R) is klt at the generic point of the component, i.e. c_i < 1.
inline bool is_klt_over(const FibrationModel& model, const std::string& base_component) {
  model.base_index(base_component);  // throws on unknown names
  return discriminant_divisor(model).coefficient(base_component) < 1;
}

/// Adds T to the horizontal part of R; T must not touch vertical components.
inline FibrationModel perturb_horizontal(const FibrationModel& model, const DivisorQ& t) {
  std::vector<Rational> r = model.r();
  for (const auto& [c, q] : t.terms()) {
    std::size_t j = model.upstairs_index(c.name());
    if (model.is_vertical(j))
      throw DomainError("perturbation touches vertical component '" + c.name() + "'");
    r[j] += q;
  }
  return model.with_r(std::move(r));
}

/// Whether B_R is unchanged by the horizontal perturbation T.
inline bool horizontal_irrelevance_check(const FibrationModel& model, const DivisorQ& t) {
  return discriminant_divisor(perturb_horizontal(model, t)).coefficients ==
         discriminant_divisor(model).coefficients;
}

}  // namespace cbf
