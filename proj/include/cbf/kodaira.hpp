#pragma once

// Canonical bundle formula for elliptic fibrations over a curve. Each singular fiber type is
// stored as SNC resolution data (multiplicities of f*P and coefficients of R defined by
// K_{X'} + R = g*K_X); its discriminant coefficient is recomputed from that data.

#include "cbf/discriminant.hpp"
#include "cbf/fibration.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cbf {

enum class KodairaType { I_b, I_star_b, II, III, IV, II_star, III_star, IV_star };

inline bool takes_parameter(KodairaType t) {
  return t == KodairaType::I_b || t == KodairaType::I_star_b;
}

inline std::string to_string(KodairaType t, int b = 0) {
  switch (t) {
    case KodairaType::I_b: return "I_" + std::to_string(b);
    case KodairaType::I_star_b: return "I*_" + std::to_string(b);
    case KodairaType::II: return "II";
    case KodairaType::III: return "III";
    case KodairaType::IV: return "IV";
    case KodairaType::II_star: return "II*";
    case KodairaType::III_star: return "III*";
    case KodairaType::IV_star: return "IV*";
  }
  return "?";
}

/// Parses "II*", "I*_2", "I*2", "I_3", "I3", "I_b"-style tags. A numeric suffix is
/// returned through `b` when present.
inline KodairaType parse_kodaira_type(std::string_view tag, int* b = nullptr) {
  std::string s(tag);
  auto take_suffix = [&](std::size_t from) {
    std::string rest = s.substr(from);
    if (!rest.empty() && rest.front() == '_') rest.erase(0, 1);
    if (rest.empty() || rest == "b") return;
    for (char c : rest)
      if (c < '0' || c > '9') throw DomainError("bad Kodaira type '" + s + "'");
    if (b) *b = std::stoi(rest);
  };
  if (s == "II") return KodairaType::II;
  if (s == "III") return KodairaType::III;
  if (s == "IV") return KodairaType::IV;
  if (s == "II*") return KodairaType::II_star;
  if (s == "III*") return KodairaType::III_star;
  if (s == "IV*") return KodairaType::IV_star;
  if (s.rfind("I*", 0) == 0) {
    take_suffix(2);
    return KodairaType::I_star_b;
  }
  if (s.rfind("I", 0) == 0 && s.size() > 1 && s[1] != 'I' && s[1] != 'V') {
    take_suffix(1);
    return KodairaType::I_b;
  }
  throw DomainError("bad Kodaira type '" + s + "'");
}

struct KodairaFiberData {
  KodairaType type;
  int b = 0;
  std::vector<int> multiplicities;
  std::vector<Rational> relative_canonical;
  int j_pole_order = 0;

  std::string tag() const { return to_string(type, b); }
};

/// Standard multiplicity data; II, III, IV come with a fixed blow-up resolution.
inline KodairaFiberData kodaira_preset(KodairaType type, int b = 0) {
  KodairaFiberData d{type, b, {}, {}, 0};
  auto zeros = [&] { d.relative_canonical.assign(d.multiplicities.size(), Rational(0)); };
  if (!takes_parameter(type) && b != 0)
    throw DomainError("Kodaira type " + to_string(type) + " takes no parameter");
  switch (type) {
    case KodairaType::I_b:
      if (b < 1) throw DomainError("I_b needs b >= 1");
      d.multiplicities.assign(static_cast<std::size_t>(b), 1);
      d.j_pole_order = b;
      zeros();
      break;
    case KodairaType::I_star_b:
      if (b < 0) throw DomainError("I*_b needs b >= 0");
      d.multiplicities = {1, 1, 1, 1};
      d.multiplicities.insert(d.multiplicities.end(), static_cast<std::size_t>(b) + 1, 2);
      d.j_pole_order = b;
      zeros();
      break;
    case KodairaType::II_star:
      d.multiplicities = {1, 2, 3, 4, 5, 6, 4, 2, 3};
      zeros();
      break;
    case KodairaType::III_star:
      d.multiplicities = {1, 2, 3, 4, 3, 2, 1, 2};
      zeros();
      break;
    case KodairaType::IV_star:
      d.multiplicities = {1, 2, 3, 2, 1, 2, 1};
      zeros();
      break;
    case KodairaType::II:
      d.multiplicities = {1, 2, 3, 6};
      d.relative_canonical = {0, -1, -2, -4};
      break;
    case KodairaType::III:
      d.multiplicities = {1, 1, 2, 4};
      d.relative_canonical = {0, 0, -1, -2};
      break;
    case KodairaType::IV:
      d.multiplicities = {1, 1, 1, 3};
      d.relative_canonical = {0, 0, 0, -1};
      break;
  }
  return d;
}

/// The one-dimensional-base model whose rows are the fiber components F_1..F_k over P.
inline FibrationModel to_fibration_model(const KodairaFiberData& data) {
  if (data.multiplicities.empty() || data.multiplicities.size() != data.relative_canonical.size())
    throw DomainError("fiber data needs matching, nonempty multiplicity and coefficient lists");
  std::vector<std::vector<int>> rows;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < data.multiplicities.size(); ++k) {
    if (data.multiplicities[k] < 1) throw DomainError("fiber multiplicities must be positive");
    rows.push_back({data.multiplicities[k]});
    names.push_back("F" + std::to_string(k + 1));
  }
  return FibrationModel(1, rows.size() - 1, rows, data.relative_canonical, {"P"}, names, {"P"});
}

inline Rational sigma_coefficient(const KodairaFiberData& data) {
  return discriminant_divisor(to_fibration_model(data)).coefficient("P");
}

/// (m-1)/m for a multiple fiber f*Q = mF, cross-checked against the one-row model.
inline Rational multiple_fiber_coefficient(int m) {
  if (m < 2) throw DomainError("multiple fiber needs m >= 2");
  Rational expected(m - 1, m);
  FibrationModel one_row(1, 0, {{m}}, {Rational(0)}, {"Q"}, {"F"}, {"Q"});
  if (discriminant_divisor(one_row).coefficient("Q") != expected)
    throw std::logic_error("multiple fiber coefficient disagrees with the discriminant formula");
  return expected;
}

struct EllipticFormulaResult {
  Rational discriminant_part;
  Rational moduli_part;
  Rational total;
};

/// deg of B_R + J: sum sigma_k + sum (m_i - 1)/m_i, plus (1/12) sum of j-pole orders.
inline EllipticFormulaResult elliptic_degree(const std::vector<KodairaFiberData>& fibers,
                                             const std::vector<int>& multiple_fibers) {
  EllipticFormulaResult out;
  int poles = 0;
  for (const auto& f : fibers) {
    out.discriminant_part += sigma_coefficient(f);
    poles += f.j_pole_order;
  }
  for (int m : multiple_fibers) out.discriminant_part += multiple_fiber_coefficient(m);
  out.moduli_part = Rational(poles, 12);
  out.total = out.discriminant_part + out.moduli_part;
  return out;
}

}  // namespace cbf
