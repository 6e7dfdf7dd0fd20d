#pragma once

// Fiber integrals V(z) of the volume form prod_j |w_j|^{-2 r_j} |dw|^2 over the fibers of a
// monomial model, normalized so that f_* u = V(z) |dz|^2 and the unit disc has measure pi.
//
// Reduction: with A-group exponent block M (rows = A-group coordinates) and x = log|w_A|,
// rho = log|w_B|, zeta = log|z|, the fiber relation is zeta = M^T x + N^T rho. Polar
// coordinates in the B-group and the Jacobian of z -> w_A turn the fiber integral into
//
//   V = (2 pi)^v * C * |det M|^{-1} * prod_i |z_i|^{2 e_i} * int_region exp(c . rho) d rho
//
// where C is the closed-form C-group factor, the region is {x(rho) <= 0, rho <= 0}, and the
// |det M| sheets of the multivalued inverse are counted.

#include "cbf/fibration.hpp"
#include "cbf/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cbf {

struct FiberIntegralParams {
  double quad_tolerance = 1e-8;
  unsigned max_depth = 15;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 20240611;
  double density_scale = 1.0;  // constant factor g of the volume form

  void check() const {
    if (!(quad_tolerance > 0) || max_depth == 0 || mc_samples == 0 || !(density_scale > 0))
      throw DomainError("integration parameters must be positive");
  }
};

/// Moduli |z_i| of a base point in the punctured polydisc.
class BasePoint {
public:
  explicit BasePoint(std::vector<double> moduli) : z_(std::move(moduli)) {
    for (double v : z_)
      if (!(v > 0.0 && v < 1.0))
        throw DomainError("base point moduli must lie in (0,1), got " + std::to_string(v));
  }
  const std::vector<double>& moduli() const { return z_; }
  std::size_t size() const { return z_.size(); }

private:
  std::vector<double> z_;
};

/// zeta . zeta_coeff + rho . rho_coeff, exact.
struct LinearForm {
  std::vector<Rational> zeta;
  std::vector<Rational> rho;

  bool operator==(const LinearForm&) const = default;
  bool has_rho() const {
    return std::any_of(rho.begin(), rho.end(), [](const Rational& q) { return q != 0; });
  }
};

/// Bounds for rho_k given rho_{k+1..v}: max(lower) <= rho_k <= min(upper).
struct LevelBounds {
  std::vector<LinearForm> lower;
  std::vector<LinearForm> upper;
};

struct IntegrationRegion {
  std::size_t v = 0;
  std::vector<LevelBounds> levels;       // levels[0] is rho_1, integrated innermost
  std::vector<LinearForm> feasibility;   // conditions form(zeta) <= 0 for a nonempty region
};

struct ReducedIntegrand {
  VariableGroups groups;
  std::vector<Rational> c;                // exponential rate per B-group variable
  std::vector<Rational> base_prefactor;   // e_i in prod |z_i|^{2 e_i}
  Rational sheet_factor;                  // 1 / |det M|
  double c_group_constant = 1.0;          // prod over C-group of pi / (1 - r_k)
  double theta_constant = 1.0;            // (2 pi)^v
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double partial)
      : std::runtime_error(what), partial_(partial) {}
  double partial_estimate() const { return partial_; }

private:
  double partial_;
};

class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Closed form of prod over the C-group of the unit-disc integral of |w|^{-2 r}.
inline double c_group_factor(const FibrationModel& model) {
  double out = 1.0;
  for (std::size_t j = 0; j < model.rows(); ++j) {
    if (model.is_vertical(j)) continue;
    if (model.r(j) >= 1)
      throw ModelError({{7, "horizontal component '" + model.upstairs_name(j) +
                                "' is not klt (coefficient >= 1)"}});
    out *= std::numbers::pi / to_double(Rational(1) - model.r(j));
  }
  return out;
}

namespace detail {

// Constraint form(zeta, rho) <= 0, scaled so the first nonzero coefficient has magnitude 1.
inline LinearForm normalized(LinearForm f) {
  Rational scale = 0;
  for (const auto& q : f.rho)
    if (q != 0) { scale = q; break; }
  if (scale == 0)
    for (const auto& q : f.zeta)
      if (q != 0) { scale = q; break; }
  if (scale < 0) scale = -scale;
  if (scale != 0) {
    for (auto& q : f.rho) q /= scale;
    for (auto& q : f.zeta) q /= scale;
  }
  return f;
}

inline std::string key(const LinearForm& f) {
  std::string s;
  for (const auto& q : f.zeta) s += to_string(q) + ",";
  s += "|";
  for (const auto& q : f.rho) s += to_string(q) + ",";
  return s;
}

inline void dedupe(std::vector<LinearForm>& forms) {
  std::set<std::string> seen;
  std::vector<LinearForm> out;
  for (auto& f : forms)
    if (seen.insert(key(f)).second) out.push_back(std::move(f));
  forms = std::move(out);
}

// Bound on rho_k extracted from constraint g <= 0 with coefficient beta != 0 on rho_k:
// rho_k compared against -(g - beta rho_k) / beta.
inline LinearForm solve_for(const LinearForm& g, std::size_t k) {
  const Rational beta = g.rho[k];
  LinearForm b;
  b.zeta.resize(g.zeta.size());
  b.rho.resize(g.rho.size());
  for (std::size_t i = 0; i < g.zeta.size(); ++i) b.zeta[i] = -g.zeta[i] / beta;
  for (std::size_t i = 0; i < g.rho.size(); ++i) b.rho[i] = i == k ? Rational(0) : -g.rho[i] / beta;
  return b;
}

inline IntegrationRegion eliminate(std::vector<LinearForm> constraints, std::size_t v) {
  IntegrationRegion region;
  region.v = v;
  for (auto& c : constraints) c = normalized(std::move(c));
  dedupe(constraints);
  for (std::size_t k = 0; k < v; ++k) {
    LevelBounds level;
    std::vector<LinearForm> pos, neg, next;
    for (auto& c : constraints) {
      if (c.rho[k] > 0) pos.push_back(c);
      else if (c.rho[k] < 0) neg.push_back(c);
      else next.push_back(c);
    }
    for (const auto& c : pos) level.upper.push_back(solve_for(c, k));
    for (const auto& c : neg) level.lower.push_back(solve_for(c, k));
    for (const auto& p : pos)
      for (const auto& q : neg) {
        LinearForm f;
        const Rational wp = -q.rho[k], wq = p.rho[k];
        f.zeta.resize(p.zeta.size());
        f.rho.resize(p.rho.size());
        for (std::size_t i = 0; i < f.zeta.size(); ++i) f.zeta[i] = wp * p.zeta[i] + wq * q.zeta[i];
        for (std::size_t i = 0; i < f.rho.size(); ++i) f.rho[i] = wp * p.rho[i] + wq * q.rho[i];
        next.push_back(normalized(std::move(f)));
      }
    dedupe(level.lower);
    dedupe(level.upper);
    dedupe(next);
    region.levels.push_back(std::move(level));
    constraints = std::move(next);
  }
  // zeta <= 0 always, so forms with nonnegative zeta coefficients hold automatically.
  for (auto& c : constraints) {
    bool trivial = std::all_of(c.zeta.begin(), c.zeta.end(), [](const Rational& q) { return q >= 0; });
    if (!trivial) region.feasibility.push_back(std::move(c));
  }
  return region;
}

struct DoubleForm {
  std::vector<double> zeta, rho;
  double eval(const std::vector<double>& z, const std::vector<double>& r) const {
    double s = 0;
    for (std::size_t i = 0; i < zeta.size(); ++i) s += zeta[i] * z[i];
    for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * r[i];
    return s;
  }
};

inline DoubleForm to_double_form(const LinearForm& f) {
  DoubleForm d;
  for (const auto& q : f.zeta) d.zeta.push_back(to_double(q));
  for (const auto& q : f.rho) d.rho.push_back(to_double(q));
  return d;
}

inline double splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Exact reduction of the fiber integral to a v-fold exponential integral over a polytope.
inline std::pair<ReducedIntegrand, IntegrationRegion> reduce(const FibrationModel& model) {
  require_valid(model);
  ReducedIntegrand out;
  out.groups = classify_variables(model);
  out.c_group_constant = c_group_factor(model);

  const auto& ga = out.groups.a_group;
  const auto& gb = out.groups.b_group;
  const std::size_t m = model.base_dim(), v = gb.size();

  linalg::QMatrix mt(m, std::vector<Rational>(m));  // M^T: mt[i][a] = a_{A[a], i}
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < m; ++i) mt[i][a] = model.exponent(ga[a], i);
  auto p = linalg::inverse(mt);
  if (!p) throw ModelError({{0, "A-group exponent block is singular"}});
  Rational det = linalg::determinant(mt);
  out.sheet_factor = Rational(1) / (det < 0 ? Rational(-det) : det);

  // h = P^T g with g_a = 2 (1 - r_{A[a]})
  std::vector<Rational> h(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < m; ++a) h[i] += (*p)[a][i] * 2 * (Rational(1) - model.r(ga[a]));
  for (std::size_t i = 0; i < m; ++i) out.base_prefactor.push_back(h[i] / 2 - 1);
  for (std::size_t k = 0; k < v; ++k) {
    Rational c = 2 * (Rational(1) - model.r(gb[k]));
    for (std::size_t i = 0; i < m; ++i) c -= model.exponent(gb[k], i) * h[i];
    out.c.push_back(c);
  }
  out.theta_constant = std::pow(2.0 * std::numbers::pi, static_cast<double>(v));

  // x_a = sum_i P[a][i] (zeta_i - sum_k N[k][i] rho_k) <= 0, and rho_k <= 0.
  std::vector<LinearForm> constraints;
  for (std::size_t a = 0; a < m; ++a) {
    LinearForm f{std::vector<Rational>(m), std::vector<Rational>(v, Rational(0))};
    for (std::size_t i = 0; i < m; ++i) f.zeta[i] = (*p)[a][i];
    for (std::size_t k = 0; k < v; ++k)
      for (std::size_t i = 0; i < m; ++i) f.rho[k] -= (*p)[a][i] * model.exponent(gb[k], i);
    constraints.push_back(std::move(f));
  }
  for (std::size_t k = 0; k < v; ++k) {
    LinearForm f{std::vector<Rational>(m, Rational(0)), std::vector<Rational>(v, Rational(0))};
    f.rho[k] = 1;
    constraints.push_back(std::move(f));
  }
  auto region = detail::eliminate(std::move(constraints), v);
  for (std::size_t k = 0; k < v; ++k)
    if (region.levels[k].lower.empty() && out.c[k] <= 0)
      throw ModelError({{0, "fiber variable '" + model.upstairs_name(gb[k]) +
                                "' has an unbounded-below region with nonpositive rate"}});
  return {out, region};
}

struct FiberValue {
  double value = 0;
  double rel_error = 0;
  std::size_t region_dim = 0;
  bool degenerate = false;  // empty region at this base point
};

struct MonteCarloValue {
  double estimate = 0;
  double stderr_ = 0;
  std::size_t accepted = 0;
  std::size_t samples = 0;
};

/// Reduced fiber integral of one model, reusable across base points.
class FiberIntegral {
public:
  explicit FiberIntegral(FibrationModel model) : model_(std::move(model)) {
    auto [integrand, region] = reduce(model_);
    integrand_ = std::move(integrand);
    region_ = std::move(region);
    for (const auto& q : integrand_.c) rates_.push_back(to_double(q));
    for (const auto& lvl : region_.levels) {
      Level d;
      for (const auto& f : lvl.lower) d.lower.push_back(detail::to_double_form(f));
      for (const auto& f : lvl.upper) d.upper.push_back(detail::to_double_form(f));
      levels_.push_back(std::move(d));
    }
    for (const auto& f : region_.feasibility) feasibility_.push_back(detail::to_double_form(f));
  }

  const FibrationModel& model() const { return model_; }
  const ReducedIntegrand& integrand() const { return integrand_; }
  const IntegrationRegion& region() const { return region_; }

  /// Nested adaptive Gauss-Kronrod over the region, closed form for the innermost variable.
  FiberValue quadrature(const BasePoint& t, const FiberIntegralParams& params) const {
    params.check();
    check_point(t);
    const auto zeta = log_moduli(t);
    FiberValue out;
    out.region_dim = region_.v;
    std::vector<double> rho(region_.v, 0.0);
    for (const auto& f : feasibility_)
      if (f.eval(zeta, rho) > 1e-12) {
        out.degenerate = true;
        return out;
      }
    double rel = 0;
    double integral = region_.v == 0 ? 1.0 : level_integral(region_.v - 1, zeta, rho, params, rel);
    if (integral <= 0) out.degenerate = true;
    out.value = constant() * prefactor(zeta) * integral;
    out.rel_error = rel;
    return out;
  }

  /// Independent estimate in the original coordinates: fiber coordinates drawn on the unit
  /// polydisc, A-group moduli solved from the monomial relations, samples outside the
  /// polydisc rejected, density prod |w_j|^{-2 r_j} / |det dz/dw_A|^2 times the sheet count.
  /// Radii of coordinates with r_k > 0 are drawn from t^{1 - 2 r_k} dt to keep the variance
  /// finite.
  MonteCarloValue monte_carlo(const BasePoint& t, const FiberIntegralParams& params) const {
    params.check();
    check_point(t);
    const std::size_t m = model_.base_dim();
    const auto& ga = integrand_.groups.a_group;
    std::vector<std::size_t> fiber = integrand_.groups.b_group;
    fiber.insert(fiber.end(), integrand_.groups.c_group.begin(), integrand_.groups.c_group.end());
    const auto zeta = log_moduli(t);

    // Dense double copy of the A-block for an LU solve per sample.
    std::vector<std::vector<double>> mt(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t a = 0; a < m; ++a) mt[i][a] = model_.exponent(ga[a], i);
    const double det = std::abs(lu_det(mt));

    std::vector<double> q(fiber.size()), r_fiber(fiber.size());
    for (std::size_t k = 0; k < fiber.size(); ++k) {
      r_fiber[k] = to_double(model_.r(fiber[k]));
      q[k] = std::max(r_fiber[k], 0.0);
    }
    std::vector<double> r_a(m);
    for (std::size_t a = 0; a < m; ++a) r_a[a] = to_double(model_.r(ga[a]));
    double log_z_sum = 0;
    for (double zl : zeta) log_z_sum += zl;

    std::uint64_t state = params.seed;
    double sum = 0, sum_sq = 0;
    std::size_t accepted = 0;
    std::vector<double> rhs(m), x(m), logw(fiber.size());
    for (std::size_t s = 0; s < params.mc_samples; ++s) {
      double log_weight = 0;
      for (std::size_t k = 0; k < fiber.size(); ++k) {
        double u = detail::splitmix64(state);
        if (u <= 0) u = std::numeric_limits<double>::min();
        // radius with density (2 - 2q) t^{1 - 2q} on [0,1]
        logw[k] = std::log(u) / (2.0 - 2.0 * q[k]);
        log_weight += std::log(2.0 * std::numbers::pi / (2.0 - 2.0 * q[k])) +
                      (2.0 * q[k] - 2.0 * r_fiber[k]) * logw[k];
      }
      for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = zeta[i];
        for (std::size_t k = 0; k < fiber.size(); ++k) rhs[i] -= model_.exponent(fiber[k], i) * logw[k];
      }
      lu_solve(mt, rhs, x);
      // closed polydisc; the slack absorbs rounding when a fiber lies on |w_a| = 1
      double magnitude = 1;
      for (double v : rhs) magnitude += std::abs(v);
      bool inside = true;
      for (std::size_t a = 0; a < m; ++a)
        if (x[a] > 1e-12 * magnitude) inside = false;
      if (!inside) continue;
      ++accepted;
      // prod_A |w_a|^{-2 r_a} * prod_A |w_a|^2 / (det^2 prod |z|^2) * det sheets
      double log_density = -2.0 * log_z_sum - std::log(det);
      for (std::size_t a = 0; a < m; ++a) log_density += (2.0 - 2.0 * r_a[a]) * x[a];
      const double w = std::exp(log_density + log_weight);
      sum += w;
      sum_sq += w * w;
    }
    if (accepted == 0)
      throw DegenerateError("no Monte Carlo sample landed in the fiber region");
    const double n = static_cast<double>(params.mc_samples);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    const double scale = params.density_scale;
    return {mean * scale, std::sqrt(var / (n - 1 > 0 ? n - 1 : 1)) * scale, accepted,
            params.mc_samples};
  }

private:
  struct Level {
    std::vector<detail::DoubleForm> lower, upper;
  };

  double constant() const {
    return integrand_.theta_constant * integrand_.c_group_constant * to_double(integrand_.sheet_factor);
  }

  double prefactor(const std::vector<double>& zeta) const {
    double s = 0;
    for (std::size_t i = 0; i < zeta.size(); ++i) s += 2.0 * to_double(integrand_.base_prefactor[i]) * zeta[i];
    return std::exp(s);
  }

  void check_point(const BasePoint& t) const {
    if (t.size() != model_.base_dim())
      throw DomainError("base point has " + std::to_string(t.size()) + " coordinates, model has m = " +
                        std::to_string(model_.base_dim()));
  }

  static std::vector<double> log_moduli(const BasePoint& t) {
    std::vector<double> z;
    for (double v : t.moduli()) z.push_back(std::log(v));
    return z;
  }

  double level_integral(std::size_t k, const std::vector<double>& zeta, std::vector<double>& rho,
                        const FiberIntegralParams& params, double& rel) const {
    const Level& lvl = levels_[k];
    if (lvl.lower.empty())
      throw ModelError({{0, "unbounded-below integration region"}});
    double lo = -std::numeric_limits<double>::infinity();
    double hi = 0.0;  // rho_k <= 0 is always among the upper bounds
    for (const auto& f : lvl.lower) lo = std::max(lo, f.eval(zeta, rho));
    for (const auto& f : lvl.upper) hi = std::min(hi, f.eval(zeta, rho));
    if (!(hi > lo)) return 0.0;
    const double c = rates_[k];

    if (k == 0) {
      if (c == 0.0) return hi - lo;
      return std::exp(c * lo) * std::expm1(c * (hi - lo)) / c;
    }

    // Breakpoints where the inner bounds change active branch or cross.
    std::vector<double> cuts{lo, hi};
    const Level& inner = levels_[k - 1];
    std::vector<const detail::DoubleForm*> forms;
    for (const auto& f : inner.lower) forms.push_back(&f);
    for (const auto& f : inner.upper) forms.push_back(&f);
    for (std::size_t p = 0; p < forms.size(); ++p)
      for (std::size_t q = p + 1; q < forms.size(); ++q) {
        const double slope = forms[p]->rho[k] - forms[q]->rho[k];
        if (slope == 0.0) continue;
        rho[k] = 0.0;
        const double offset = forms[p]->eval(zeta, rho) - forms[q]->eval(zeta, rho);
        const double root = -offset / slope;
        if (root > lo && root < hi) cuts.push_back(root);
      }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double total = 0, err_total = 0, l1_total = 0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      if (cuts[s + 1] - cuts[s] <= 0) continue;
      auto f = [&](double x) {
        std::vector<double> local = rho;
        local[k] = x;
        double inner_rel = 0;
        double val = std::exp(c * x) * level_integral(k - 1, zeta, local, params, inner_rel);
        rel = std::max(rel, inner_rel);
        return val;
      };
      double err = 0, l1 = 0;
      double piece = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, cuts[s], cuts[s + 1], params.max_depth, params.quad_tolerance, &err, &l1);
      total += piece;
      err_total += err;
      l1_total += l1;
    }
    if (l1_total > 0) rel = std::max(rel, err_total / l1_total);
    if (err_total > std::max(params.quad_tolerance * l1_total, 1e-300))
      throw QuadratureError("nested quadrature did not reach tolerance within max_depth", total);
    return total;
  }

  static double lu_det(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (a[piv][col] == 0) return 0;
      if (piv != col) {
        std::swap(a[piv], a[col]);
        det = -det;
      }
      det *= a[col][col];
      for (std::size_t r = col + 1; r < n; ++r) {
        double f = a[r][col] / a[col][col];
        for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
      }
    }
    return det;
  }

  static void lu_solve(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      std::swap(a[piv], a[col]);
      std::swap(b[piv], b[col]);
      for (std::size_t r = col + 1; r < n; ++r) {
        double f = a[r][col] / a[col][col];
        for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
        b[r] -= f * b[col];
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = b[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
      x[i] = s / a[i][i];
    }
  }

  FibrationModel model_;
  ReducedIntegrand integrand_;
  IntegrationRegion region_;
  std::vector<double> rates_;
  std::vector<Level> levels_;
  std::vector<detail::DoubleForm> feasibility_;
};

inline FiberValue evaluate_quadrature(const FibrationModel& model, const BasePoint& t,
                                      const FiberIntegralParams& params = {}) {
  auto v = FiberIntegral(model).quadrature(t, params);
  v.value *= params.density_scale;
  return v;
}

inline MonteCarloValue evaluate_monte_carlo(const FibrationModel& model, const BasePoint& t,
                                            const FiberIntegralParams& params = {}) {
  return FiberIntegral(model).monte_carlo(t, params);
}

/// Runs `work(index)` for every index on up to `threads` workers; results keep input order.
template <class Result, class Work>
std::vector<Result> parallel_map(std::size_t count, unsigned threads, Work work) {
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(work(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Either a value or the error message for one point of a batch.
template <class T>
struct PointResult {
  std::optional<T> value;
  std::string error;
};

inline std::vector<PointResult<FiberValue>> evaluate_quadrature_batch(
    const FibrationModel& model, const std::vector<BasePoint>& points,
    const FiberIntegralParams& params = {}, unsigned threads = 1) {
  const FiberIntegral integral(model);
  return parallel_map<PointResult<FiberValue>>(points.size(), threads, [&](std::size_t i) {
    PointResult<FiberValue> r;
    try {
      auto v = integral.quadrature(points[i], params);
      v.value *= params.density_scale;
      r.value = v;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });
}

/// Per-point seeds are seed XOR point index.
inline std::vector<PointResult<MonteCarloValue>> evaluate_monte_carlo_batch(
    const FibrationModel& model, const std::vector<BasePoint>& points,
    const FiberIntegralParams& params = {}, unsigned threads = 1) {
  const FiberIntegral integral(model);
  return parallel_map<PointResult<MonteCarloValue>>(points.size(), threads, [&](std::size_t i) {
    PointResult<MonteCarloValue> r;
    try {
      FiberIntegralParams local = params;
      local.seed = params.seed ^ static_cast<std::uint64_t>(i);
      r.value = integral.monte_carlo(points[i], local);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });
}

}  // namespace cbf
