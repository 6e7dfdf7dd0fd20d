#pragma once

// Local monomial model of an SNC fibration: upstairs coordinates w_1..w_{n+m} on the unit
// polydisc map to base coordinates by z_i = prod_j w_j^{a_ji}, with a divisor
// R = sum_j r_j {w_j = 0} upstairs and a reduced base divisor B made of coordinate
// hyperplanes {z_i = 0}.

#include "cbf/divisor.hpp"
#include "cbf/linalg.hpp"
#include "cbf/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbf {

/// One failed item of the SNC condition. Item 0 marks the exponent-matrix rank requirement,
/// which is not a numbered item but is implied by surjectivity.
struct Violation {
  int item = 0;
  std::string message;

  std::string describe() const {
    if (item == 0) return "rank: " + message;
    return "Def. 4.1(" + std::to_string(item) + "): " + message;
  }
  bool operator==(const Violation&) const = default;
};

class ModelError : public std::runtime_error {
public:
  explicit ModelError(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string s = "invalid SNC model";
    for (const auto& v : vs) s += "; " + v.describe();
    return s;
  }
  std::vector<Violation> violations_;
};

class FibrationModel {
public:
  /// `exponents` has n+m rows (upstairs coordinates) and m columns (base coordinates);
  /// `r` has one coefficient per row; `base_divisor` lists base column names in B.
  /// Empty name lists default to w1.. and z1.. .
  FibrationModel(std::size_t m, std::size_t n, std::vector<std::vector<int>> exponents,
                 std::vector<Rational> r, std::set<std::string> base_divisor,
                 std::vector<std::string> upstairs_names = {},
                 std::vector<std::string> base_names = {})
      : m_(m), n_(n), a_(std::move(exponents)), r_(std::move(r)),
        upstairs_(std::move(upstairs_names)), base_(std::move(base_names)) {
    const std::size_t rows = m_ + n_;
    if (m_ == 0) throw DomainError("base dimension m must be positive");
    if (a_.size() != rows)
      throw DomainError("exponent matrix must have n+m = " + std::to_string(rows) + " rows");
    for (const auto& row : a_) {
      if (row.size() != m_)
        throw DomainError("exponent matrix rows must have m = " + std::to_string(m_) + " entries");
      for (int e : row)
        if (e < 0) throw DomainError("exponents must be nonnegative integers");
    }
    if (r_.empty()) r_.assign(rows, Rational(0));
    if (r_.size() != rows) throw DomainError("r must have one coefficient per upstairs coordinate");
    if (upstairs_.empty())
      for (std::size_t j = 0; j < rows; ++j) upstairs_.push_back("w" + std::to_string(j + 1));
    if (base_.empty())
      for (std::size_t i = 0; i < m_; ++i) base_.push_back("z" + std::to_string(i + 1));
    if (upstairs_.size() != rows || base_.size() != m_)
      throw DomainError("name lists do not match the model dimensions");
    check_unique(upstairs_, "upstairs");
    check_unique(base_, "base");
    in_b_.assign(m_, false);
    for (const auto& name : base_divisor) in_b_[base_index(name)] = true;
  }

  std::size_t base_dim() const { return m_; }
  std::size_t fiber_dim() const { return n_; }
  std::size_t rows() const { return m_ + n_; }

  int exponent(std::size_t row, std::size_t col) const { return a_[row][col]; }
  const std::vector<std::vector<int>>& exponents() const { return a_; }
  const Rational& r(std::size_t row) const { return r_[row]; }
  const std::vector<Rational>& r() const { return r_; }

  const std::string& upstairs_name(std::size_t row) const { return upstairs_[row]; }
  const std::string& base_name(std::size_t col) const { return base_[col]; }
  const std::vector<std::string>& upstairs_names() const { return upstairs_; }
  const std::vector<std::string>& base_names() const { return base_; }

  bool in_base_divisor(std::size_t col) const { return in_b_[col]; }
  std::set<std::string> base_divisor() const {
    std::set<std::string> out;
    for (std::size_t i = 0; i < m_; ++i)
      if (in_b_[i]) out.insert(base_[i]);
    return out;
  }

  /// Vertical iff the row is nonzero (the component maps into a coordinate hyperplane).
  bool is_vertical(std::size_t row) const {
    return std::any_of(a_[row].begin(), a_[row].end(), [](int e) { return e != 0; });
  }

  PrimeComponent component(std::size_t row) const {
    return is_vertical(row) ? PrimeComponent::vertical(upstairs_[row])
                            : PrimeComponent::horizontal(upstairs_[row]);
  }

  std::size_t base_index(const std::string& name) const {
    auto it = std::find(base_.begin(), base_.end(), name);
    if (it == base_.end()) throw DomainError("unknown base component '" + name + "'");
    return static_cast<std::size_t>(it - base_.begin());
  }
  std::size_t upstairs_index(const std::string& name) const {
    auto it = std::find(upstairs_.begin(), upstairs_.end(), name);
    if (it == upstairs_.end()) throw DomainError("unknown upstairs component '" + name + "'");
    return static_cast<std::size_t>(it - upstairs_.begin());
  }

  /// R = sum r_j {w_j = 0}, zero terms dropped.
  DivisorQ divisor_r() const {
    std::vector<DivisorQ::Term> terms;
    for (std::size_t j = 0; j < rows(); ++j) terms.emplace_back(component(j), r_[j]);
    return DivisorQ(terms);
  }

  FibrationModel with_r(std::vector<Rational> r) const {
    FibrationModel copy = *this;
    if (r.size() != rows()) throw DomainError("r must have one coefficient per upstairs coordinate");
    copy.r_ = std::move(r);
    return copy;
  }

  /// Same model with upstairs coordinates reordered: row k of the result is row perm[k] here.
  FibrationModel permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != rows()) throw DomainError("permutation has the wrong length");
    std::vector<std::vector<int>> a;
    std::vector<Rational> r;
    std::vector<std::string> names;
    for (std::size_t k : perm) {
      a.push_back(a_.at(k));
      r.push_back(r_.at(k));
      names.push_back(upstairs_.at(k));
    }
    return FibrationModel(m_, n_, a, r, base_divisor(), names, base_);
  }

  linalg::QMatrix exponent_matrix() const {
    linalg::QMatrix q(rows(), std::vector<Rational>(m_));
    for (std::size_t j = 0; j < rows(); ++j)
      for (std::size_t i = 0; i < m_; ++i) q[j][i] = a_[j][i];
    return q;
  }

private:
  static void check_unique(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        throw DomainError(std::string("duplicate ") + what + " component name '" + n + "'");
  }

  std::size_t m_, n_;
  std::vector<std::vector<int>> a_;
  std::vector<Rational> r_;
  std::vector<std::string> upstairs_, base_;
  std::vector<bool> in_b_;
};

/// Partition of upstairs coordinates used for fiber integration.
struct VariableGroups {
  std::vector<std::size_t> a_group;  // m indices with invertible exponent submatrix
  std::vector<std::size_t> b_group;  // remaining indices with nonzero rows
  std::vector<std::size_t> c_group;  // zero rows
  bool operator==(const VariableGroups&) const = default;
};

/// Checks the SNC conditions that are visible in a monomial chart. Items (1), (2), (4) and
/// (6) hold automatically for coordinate hyperplanes; (3), (5), (7) and the rank condition
/// are checked.
inline std::vector<Violation> validate(const FibrationModel& model) {
  std::vector<Violation> out;
  const std::size_t m = model.base_dim();

  if (linalg::rank(model.exponent_matrix()) < m)
    out.push_back({0, "exponent matrix has rank < m, so f is not surjective"});

  for (std::size_t i = 0; i < m; ++i) {
    if (model.in_base_divisor(i)) continue;
    // Off B the map must be smooth: {z_i = 0} may only pull back to one reduced component.
    int nonzero = 0;
    bool reduced = true;
    for (std::size_t j = 0; j < model.rows(); ++j) {
      int e = model.exponent(j, i);
      if (e != 0) ++nonzero;
      if (e > 1) reduced = false;
    }
    if (nonzero > 1 || !reduced)
      out.push_back({5, "f is not smooth over {" + model.base_name(i) + " = 0}, which is not in B"});
  }

  for (std::size_t j = 0; j < model.rows(); ++j) {
    if (model.is_vertical(j)) {
      if (model.r(j) == 0) continue;
      bool over_b = false;
      for (std::size_t i = 0; i < m; ++i)
        if (model.exponent(j, i) > 0 && model.in_base_divisor(i)) over_b = true;
      if (!over_b)
        out.push_back({3, "vertical component '" + model.upstairs_name(j) +
                              "' of R does not map into B"});
    } else if (model.r(j) >= 1) {
      out.push_back({7, "horizontal component '" + model.upstairs_name(j) + "' has coefficient " +
                            to_string(model.r(j)) + ", outside (-inf,1)"});
    }
  }
  return out;
}

inline void require_valid(const FibrationModel& model) {
  auto v = validate(model);
  if (!v.empty()) throw ModelError(std::move(v));
}

/// A-group: lexicographically first m-subset of rows with invertible exponent submatrix.
inline VariableGroups classify_variables(const FibrationModel& model) {
  const std::size_t rows = model.rows();
  const std::size_t m = model.base_dim();
  const auto a = model.exponent_matrix();

  std::vector<std::size_t> pick(m);
  for (std::size_t k = 0; k < m; ++k) pick[k] = k;
  bool found = false;
  while (true) {
    linalg::QMatrix sub;
    for (std::size_t k : pick) sub.push_back(a[k]);
    if (linalg::determinant(sub) != 0) {
      found = true;
      break;
    }
    // next combination in lexicographic order
    std::size_t k = m;
    while (k > 0 && pick[k - 1] == rows - m + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t t = k; t < m; ++t) pick[t] = pick[t - 1] + 1;
  }
  if (!found) throw ModelError({{0, "no invertible m x m exponent submatrix"}});

  VariableGroups g;
  g.a_group = pick;
  for (std::size_t j = 0; j < rows; ++j) {
    if (std::find(pick.begin(), pick.end(), j) != pick.end()) continue;
    (model.is_vertical(j) ? g.b_group : g.c_group).push_back(j);
  }
  return g;
}

/// f*(sum d_i {z_i = 0}) = sum_j (sum_i a_ji d_i) {w_j = 0}.
inline DivisorQ pullback(const FibrationModel& model, const DivisorQ& d) {
  if (d.space() == Space::total_space) throw DomainError("pullback expects a divisor on the base");
  std::vector<Rational> coeff(model.rows(), Rational(0));
  for (const auto& [c, q] : d.terms()) {
    std::size_t i = model.base_index(c.name());
    for (std::size_t j = 0; j < model.rows(); ++j) coeff[j] += model.exponent(j, i) * q;
  }
  std::vector<DivisorQ::Term> terms;
  for (std::size_t j = 0; j < model.rows(); ++j) terms.emplace_back(model.component(j), coeff[j]);
  return DivisorQ(terms);
}

}  // namespace cbf
