#pragma once

#include "cbf/rational.hpp"

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cbf {

enum class Space { total_space, base };
enum class ComponentKind { horizontal, vertical, base_component };

inline const char* to_string(Space s) { return s == Space::base ? "base" : "total_space"; }
inline const char* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::horizontal: return "horizontal";
    case ComponentKind::vertical: return "vertical";
    default: return "base_component";
  }
}

/// A named prime divisor, either upstairs (horizontal or vertical) or on the base.
class PrimeComponent {
public:
  static PrimeComponent base(std::string name) {
    return {std::move(name), Space::base, ComponentKind::base_component};
  }
  static PrimeComponent horizontal(std::string name) {
    return {std::move(name), Space::total_space, ComponentKind::horizontal};
  }
  static PrimeComponent vertical(std::string name) {
    return {std::move(name), Space::total_space, ComponentKind::vertical};
  }

  const std::string& name() const { return name_; }
  Space space() const { return space_; }
  ComponentKind kind() const { return kind_; }

  bool operator==(const PrimeComponent&) const = default;

private:
  PrimeComponent(std::string name, Space space, ComponentKind kind)
      : name_(std::move(name)), space_(space), kind_(kind) {}

  std::string name_;
  Space space_;
  ComponentKind kind_;
};

/// Formal Q-divisor: exact rational coefficients over named prime components of one space.
/// Zero coefficients are never stored.
class DivisorQ {
public:
  using Term = std::pair<PrimeComponent, Rational>;

  DivisorQ() = default;
  DivisorQ(std::initializer_list<Term> terms) {
    for (const auto& [c, q] : terms) accumulate(c, q);
  }
  explicit DivisorQ(const std::vector<Term>& terms) {
    for (const auto& [c, q] : terms) accumulate(c, q);
  }

  /// Convenience for base divisors given as name → coefficient.
  static DivisorQ on_base(std::initializer_list<std::pair<std::string, Rational>> terms) {
    DivisorQ d;
    for (const auto& [n, q] : terms) d.accumulate(PrimeComponent::base(n), q);
    return d;
  }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::optional<Space> space() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->second.first.space();
  }

  /// Terms in name order.
  std::vector<Term> terms() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [_, t] : terms_) out.push_back(t);
    return out;
  }

  Rational coefficient(const std::string& name) const {
    auto it = terms_.find(name);
    return it == terms_.end() ? Rational(0) : it->second.second;
  }

  bool contains(const std::string& name) const { return terms_.count(name) != 0; }

  friend DivisorQ operator+(const DivisorQ& a, const DivisorQ& b) {
    DivisorQ out = a;
    for (const auto& [_, t] : b.terms_) out.accumulate(t.first, t.second);
    return out;
  }
  friend DivisorQ operator*(const Rational& k, const DivisorQ& d) {
    DivisorQ out;
    if (k == 0) return out;
    for (const auto& [_, t] : d.terms_) out.accumulate(t.first, k * t.second);
    return out;
  }
  friend DivisorQ operator-(const DivisorQ& d) { return Rational(-1) * d; }
  friend DivisorQ operator-(const DivisorQ& a, const DivisorQ& b) { return a + (-b); }

  friend bool operator==(const DivisorQ& a, const DivisorQ& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (auto ia = a.terms_.begin(), ib = b.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib)
      if (ia->second.first != ib->second.first || ia->second.second != ib->second.second)
        return false;
    return true;
  }

private:
  void accumulate(const PrimeComponent& c, const Rational& q) {
    if (!terms_.empty()) {
      const auto& first = terms_.begin()->second.first;
      if (first.space() != c.space())
        throw DomainError("divisor mixes components of different spaces ('" + first.name() +
                          "' and '" + c.name() + "')");
    }
    auto it = terms_.find(c.name());
    if (it == terms_.end()) {
      if (q != 0) terms_.emplace(c.name(), Term{c, q});
      return;
    }
    if (it->second.first != c)
      throw DomainError("component '" + c.name() + "' used with two different kinds");
    it->second.second += q;
    if (it->second.second == 0) terms_.erase(it);
  }

  std::map<std::string, Term> terms_;
};

/// Exact coefficientwise sum. Throws DomainError on operands from different spaces.
inline DivisorQ add(const DivisorQ& a, const DivisorQ& b) { return a + b; }

/// Componentwise ⌈-D⌉. For coefficients below 1, D + ⌈-D⌉ has coefficients in [0,1).
inline DivisorQ round_up_negative_part(const DivisorQ& d) {
  std::vector<DivisorQ::Term> out;
  for (const auto& [c, q] : d.terms()) out.emplace_back(c, Rational(ceil_of(-q)));
  return DivisorQ(out);
}

/// Toric (monomial) valuation on the base: a nonnegative weight per coordinate component.
class MonomialValuation {
public:
  explicit MonomialValuation(std::map<std::string, Rational> weights) : weights_(std::move(weights)) {
    bool positive = false;
    for (const auto& [n, w] : weights_) {
      if (w < 0) throw DomainError("valuation weight for '" + n + "' is negative");
      positive = positive || w > 0;
    }
    if (!positive) throw DomainError("valuation needs at least one positive weight");
  }

  Rational weight(const std::string& name) const {
    auto it = weights_.find(name);
    return it == weights_.end() ? Rational(0) : it->second;
  }
  const std::map<std::string, Rational>& weights() const { return weights_; }

private:
  std::map<std::string, Rational> weights_;
};

/// Σ weight(B_i)·coeff(B_i): the generic Lelong number of Σ c_i log|z_i|² along the toric
/// divisor with weight vector v.
inline Rational valuation_of(const DivisorQ& d, const MonomialValuation& v) {
  if (d.space() == Space::total_space)
    throw DomainError("valuation_of expects a divisor on the base");
  Rational total = 0;
  for (const auto& [c, q] : d.terms()) total += v.weight(c.name()) * q;
  return total;
}

}  // namespace cbf
