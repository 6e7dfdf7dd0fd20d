#pragma once

#include "cbf/fibration.hpp"

#include <random>
#include <vector>

namespace cbf::testkit {

/// p/q with q in [1, max_den] and p/q in [lo, hi].
inline Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int max_den = 6) {
  std::uniform_int_distribution<int> den_dist(1, max_den);
  const int q = den_dist(rng);
  const Integer p_lo = ceil_of(lo * q), p_hi = floor_of(hi * q);
  if (p_hi < p_lo) return lo;
  std::uniform_int_distribution<long long> p_dist(p_lo.convert_to<long long>(), p_hi.convert_to<long long>());
  return Rational(p_dist(rng), q);
}

struct ModelShape {
  std::size_t max_m = 2;
  std::size_t max_n = 2;
  int max_exponent = 3;
  Rational r_lo = Rational(-1, 2);
  Rational r_hi = Rational(3, 4);
  // every column has a row supported on it alone, so B_R is readable from the chart
  bool generic_rows = true;
};

/// A valid model with every base coordinate in B, random exponents and coefficients.
inline FibrationModel random_model(std::mt19937_64& rng, const ModelShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> m_dist(1, shape.max_m), n_dist(0, shape.max_n);
  std::uniform_int_distribution<int> e_dist(0, shape.max_exponent);
  std::bernoulli_distribution zero_row(0.25);
  while (true) {
    const std::size_t m = m_dist(rng), n = n_dist(rng);
    std::vector<std::vector<int>> a(m + n, std::vector<int>(m, 0));
    for (auto& row : a) {
      if (zero_row(rng)) continue;
      for (auto& e : row) e = e_dist(rng);
    }
    std::vector<Rational> r;
    for (std::size_t j = 0; j < m + n; ++j) r.push_back(random_rational(rng, shape.r_lo, shape.r_hi));
    std::set<std::string> b;
    for (std::size_t i = 0; i < m; ++i) b.insert("z" + std::to_string(i + 1));
    if (shape.generic_rows) {
      bool all = true;
      for (std::size_t i = 0; i < m; ++i) {
        bool found = false;
        for (const auto& row : a) {
          std::size_t support = 0;
          for (int e : row) support += e != 0;
          found = found || (support == 1 && row[i] > 0);
        }
        all = all && found;
      }
      if (!all) continue;
    }
    FibrationModel model(m, n, a, r, b);
    if (validate(model).empty()) return model;
  }
}

}  // namespace cbf::testkit
