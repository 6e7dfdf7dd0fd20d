#pragma once

// Pole-order extraction for V along rays |z_i| = s^{u_i} through the origin of the base.
// Model: log V = -2 alpha log s + beta log(-log s) + const.

#include "cbf/discriminant.hpp"
#include "cbf/fiber_integral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace cbf {

class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Geometric grid from `from` down to `to` with `count` points.
inline std::vector<double> geometric_grid(double from, double to, std::size_t count) {
  if (!(from > 0 && from < 1 && to > 0 && to < from) || count < 2)
    throw DomainError("grid needs 1 > from > to > 0 and at least two points");
  std::vector<double> g;
  const double step = std::log(to / from) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g.push_back(from * std::exp(step * static_cast<double>(k)));
  g.back() = to;
  return g;
}

/// Path |z_i| = s^{u_i}; coordinates with u_i = 0 stay at the fixed modulus `anchor`.
class Ray {
public:
  explicit Ray(std::vector<Rational> u, std::vector<double> s_grid = geometric_grid(1e-1, 1e-6, 24),
               double anchor = 0.5)
      : u_(std::move(u)), grid_(std::move(s_grid)), anchor_(anchor) {
    if (u_.empty()) throw DomainError("ray direction is empty");
    bool positive = false;
    for (const auto& q : u_) {
      if (q < 0) throw DomainError("ray direction must be nonnegative");
      positive = positive || q > 0;
    }
    if (!positive) throw DomainError("ray direction must have a positive entry");
    if (!(anchor_ > 0 && anchor_ < 1)) throw DomainError("ray anchor must lie in (0,1)");
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (!(grid_[k] > 0 && grid_[k] < 1)) throw DomainError("grid points must lie in (0,1)");
      if (k > 0 && !(grid_[k] < grid_[k - 1])) throw DomainError("grid must be strictly decreasing");
    }
  }

  const std::vector<Rational>& direction() const { return u_; }
  const std::vector<double>& grid() const { return grid_; }
  double anchor() const { return anchor_; }

  BasePoint point(double s) const {
    std::vector<double> z;
    for (const auto& q : u_) z.push_back(q == 0 ? anchor_ : std::pow(s, to_double(q)));
    return BasePoint(std::move(z));
  }

  MonomialValuation valuation(const FibrationModel& model) const {
    if (u_.size() != model.base_dim()) throw DomainError("ray dimension does not match the model");
    std::map<std::string, Rational> w;
    for (std::size_t i = 0; i < u_.size(); ++i) w[model.base_name(i)] = u_[i];
    return MonomialValuation(std::move(w));
  }

private:
  std::vector<Rational> u_;
  std::vector<double> grid_;
  double anchor_;
};

struct RaySample {
  double s = 0;
  double value = 0;
  bool ok = false;
  std::string error;  // set when the point was skipped
};

/// Quadrature values along the ray; failing points are flagged and kept in grid order.
inline std::vector<RaySample> sample_ray(const FibrationModel& model, const Ray& ray,
                                         const FiberIntegralParams& params = {}, unsigned threads = 1) {
  if (ray.direction().size() != model.base_dim())
    throw DomainError("ray dimension does not match the model");
  std::vector<BasePoint> points;
  for (double s : ray.grid()) points.push_back(ray.point(s));
  auto values = evaluate_quadrature_batch(model, points, params, threads);
  std::vector<RaySample> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    RaySample r;
    r.s = ray.grid()[k];
    if (values[k].value && !values[k].value->degenerate && values[k].value->value > 0) {
      r.value = values[k].value->value;
      r.ok = true;
    } else {
      r.error = values[k].value ? "empty fiber region" : values[k].error;
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<std::pair<double, double>> usable(const std::vector<RaySample>& samples) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : samples)
    if (r.ok) out.emplace_back(r.s, r.value);
  return out;
}

struct AsymptoticFit {
  double alpha = 0;
  double beta = 0;
  double constant = 0;
  double max_rel_residual = 0;  // in log V
  double alpha_stderr = 0;
};

namespace detail {

struct LeastSquares {
  Eigen::VectorXd coef;
  Eigen::VectorXd residual;
  Eigen::MatrixXd covariance;
};

inline LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) throw FitError("degenerate design matrix");
  LeastSquares ls;
  ls.coef = qr.solve(y);
  ls.residual = y - x * ls.coef;
  const double dof = static_cast<double>(x.rows() - x.cols());
  const double sigma2 = dof > 0 ? ls.residual.squaredNorm() / dof : 0.0;
  ls.covariance = sigma2 * (x.transpose() * x).inverse();
  return ls;
}

}  // namespace detail

/// Ordinary least squares of log V on (1, log s, log(-log s)).
inline AsymptoticFit fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 6) throw FitError("need at least 6 samples, got " + std::to_string(samples.size()));
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto [s, v] = samples[static_cast<std::size_t>(k)];
    if (!(v > 0)) throw FitError("non-positive sample value");
    if (!(s > 0 && s < 1)) throw FitError("sample abscissa outside (0,1)");
    x(k, 0) = 1.0;
    x(k, 1) = std::log(s);
    x(k, 2) = std::log(-std::log(s));
    y(k) = std::log(v);
  }
  auto ls = detail::least_squares(x, y);
  AsymptoticFit f;
  f.constant = ls.coef(0);
  f.alpha = -ls.coef(1) / 2.0;
  f.beta = ls.coef(2);
  f.max_rel_residual = ls.residual.size() ? ls.residual.cwiseAbs().maxCoeff() : 0.0;
  f.alpha_stderr = std::sqrt(std::max(ls.covariance(1, 1), 0.0)) / 2.0;
  return f;
}

struct PredictionReport {
  double alpha = 0;
  Rational alpha_star;
  double gap = 0;
  double beta = 0;
  bool pass = false;
};

/// Compares the fitted pole order with the pairing of B_R against the ray's toric valuation.
inline PredictionReport verify_prediction(const FibrationModel& model, const Ray& ray,
                                          const AsymptoticFit& f, double tol) {
  PredictionReport r;
  r.alpha = f.alpha;
  r.beta = f.beta;
  r.alpha_star = valuation_of(discriminant_divisor(model).coefficients, ray.valuation(model));
  r.gap = std::abs(f.alpha - to_double(r.alpha_star));
  r.pass = r.gap <= tol;
  return r;
}

struct LelongReport {
  double slope = 0;       // polynomial rate of the residual against log s
  double raw_slope = 0;   // slope without the log-log regressor, for inspection
  std::vector<std::pair<double, bool>> per_epsilon;
  bool pass = false;
  std::string note =
      "sub-polynomial growth of the residual along the ray; plurisubharmonicity is not tested";
};

/// psi(s) = log V + 2 alpha* log s. Over the tail half of the samples (smallest s) the rate of
/// psi against log s is fitted with log(-log s) as a nuisance regressor, so logarithmic
/// factors do not count as polynomial growth. PASS iff |rate| < eps for every eps.
inline LelongReport lelong_zero_check(std::vector<std::pair<double, double>> samples, double alpha_star,
                                      const std::vector<double>& eps_grid = {0.2, 0.1, 0.05}) {
  LelongReport rep;
  for (const auto& [s, v] : samples)
    if (!(v > 0) || !(s > 0 && s < 1)) throw FitError("lelong check needs positive samples with s in (0,1)");
  std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.first > b.first; });
  // tail half; short grids use every sample so the log-log regressor stays in the fit
  std::size_t first = samples.size() / 2;
  if (samples.size() - first < 4) first = 0;
  std::vector<std::pair<double, double>> tail(samples.begin() + static_cast<std::ptrdiff_t>(first), samples.end());
  if (tail.size() < 4) throw FitError("lelong check needs at least 4 samples");

  const auto n = static_cast<Eigen::Index>(tail.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::MatrixXd x_raw(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto [s, v] = tail[static_cast<std::size_t>(k)];
    const double ls = std::log(s);
    x(k, 0) = 1.0;
    x(k, 1) = ls;
    x(k, 2) = std::log(-ls);
    x_raw(k, 0) = 1.0;
    x_raw(k, 1) = ls;
    y(k) = std::log(v) + 2.0 * alpha_star * ls;
  }
  rep.slope = detail::least_squares(x, y).coef(1);
  rep.raw_slope = detail::least_squares(x_raw, y).coef(1);
  rep.pass = true;
  for (double eps : eps_grid) {
    bool ok = std::abs(rep.slope) < eps;
    rep.per_epsilon.emplace_back(eps, ok);
    rep.pass = rep.pass && ok;
  }
  return rep;
}

}  // namespace cbf
