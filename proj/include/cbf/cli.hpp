#pragma once

// Command-line front end. Exit codes: 0 success/PASS, 1 verification FAIL or numerical
// failure, 2 invalid input.

#include "cbf/asymptotics.hpp"
#include "cbf/discriminant.hpp"
#include "cbf/fiber_integral.hpp"
#include "cbf/kodaira.hpp"
#include "cbf/model_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace cbf::cli {

inline constexpr const char* kCsvVersion = "cbf-csv v1";

enum class Exit : int { ok = 0, fail = 1, invalid = 2 };

/// Failure of a verification step that should end the run with exit code 1.
class RunFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string num(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string exact_and_decimal(const Rational& q) { return to_string(q) + " (" + num(to_double(q), 10) + ")"; }

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw DomainError("bad number '" + s + "' in " + what);
  }
}

/// "a,b,..." where each entry is a scalar (broadcast to every base coordinate) or "x/y/..".
inline std::vector<BasePoint> parse_points(const std::string& spec, std::size_t base_dim) {
  std::vector<BasePoint> points;
  for (const auto& item : split(spec, ',')) {
    auto coords = split(item, '/');
    std::vector<double> z;
    for (const auto& c : coords) z.push_back(parse_double(c, "--at"));
    if (z.size() == 1) z.assign(base_dim, z[0]);
    if (z.size() != base_dim)
      throw DomainError("point '" + item + "' has " + std::to_string(z.size()) + " coordinates, model base has " +
                        std::to_string(base_dim));
    points.emplace_back(std::move(z));
  }
  if (points.empty()) throw DomainError("--at needs at least one point");
  return points;
}

inline std::vector<Rational> parse_direction(const std::string& spec) {
  std::vector<Rational> u;
  for (const auto& c : split(spec, ',')) u.push_back(parse_rational(c));
  return u;
}

/// "from:to:count"
inline std::vector<double> parse_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw DomainError("grid must be from:to:count, got '" + spec + "'");
  const double from = parse_double(parts[0], "--grid"), to = parse_double(parts[1], "--grid");
  const double count = parse_double(parts[2], "--grid");
  if (count < 2 || count != std::floor(count)) throw DomainError("grid count must be an integer >= 2");
  return geometric_grid(from, to, static_cast<std::size_t>(count));
}

/// Worker count: hardware concurrency, capped by CBF_THREADS when set.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CBF_THREADS")) {
    const double cap = parse_double(env, "CBF_THREADS");
    if (cap < 1 || cap != std::floor(cap)) throw DomainError("CBF_THREADS must be a positive integer");
    n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

inline FibrationModel load_valid_model(const std::string& path) {
  auto model = io::load_model(path);
  require_valid(model);
  return model;
}

inline std::string csv_header(const std::string& command, const std::string& extra) {
  return std::string("# ") + kCsvVersion + " command=" + command + (extra.empty() ? "" : " " + extra) + "\n";
}

/// Writes to `path`, creating parent directories. Only called for user-given output paths.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path.string() + "'");
  f << content;
}

// ---------------------------------------------------------------------------------------------
// discriminant

inline std::string rationals_text(const DivisorQ& d) {
  std::string s;
  for (const auto& [comp, q] : d.terms()) s += (s.empty() ? "" : " ") + comp.name() + "=" + to_string(q);
  return s.empty() ? "0" : s;
}

struct DiscriminantOptions {
  std::string model;
  std::string translation;
  bool horizontal = false;
  std::string format = "human";
};

inline std::string discriminant_csv(const FibrationModel& model, const DiscriminantResult& d) {
  std::string s = csv_header("discriminant", "") + "component,c,c_decimal,lct,lct_decimal,witness\n";
  for (const auto& name : model.base_names()) {
    if (!d.lct.count(name)) continue;
    const auto c = d.coefficient(name), l = d.lct.at(name);
    s += name + "," + to_string(c) + "," + num(to_double(c)) + "," + to_string(l) + "," + num(to_double(l)) + "," +
         d.witness.at(name) + "\n";
  }
  return s;
}

/// Horizontal perturbations that keep every coefficient below 1: each horizontal r_j moves
/// halfway toward 1 and halfway toward -1.
inline std::vector<DivisorQ> horizontal_probes(const FibrationModel& model) {
  std::vector<DivisorQ> probes;
  for (std::size_t j = 0; j < model.rows(); ++j) {
    if (model.is_vertical(j)) continue;
    const auto& c = model.component(j);
    const Rational r = model.r(j);
    probes.push_back(DivisorQ({{c, (Rational(1) - r) / 2}}));
    probes.push_back(DivisorQ({{c, (Rational(-1) - r) / 2}}));
  }
  return probes;
}

inline Exit run_discriminant(const DiscriminantOptions& opt, std::ostream& out) {
  const auto model = load_valid_model(opt.model);
  const auto d = discriminant_divisor(model);
  if (opt.format == "csv") {
    out << discriminant_csv(model, d);
  } else {
    for (const auto& name : model.base_names()) {
      if (!d.lct.count(name)) continue;
      out << "c_" << name << " = " << exact_and_decimal(d.coefficient(name)) << "  lct = "
          << exact_and_decimal(d.lct.at(name)) << "  witness = " << d.witness.at(name) << "\n";
    }
    out << "B_R: " << rationals_text(d.coefficients) << "\n";
  }

  bool ok = true;
  if (!opt.translation.empty()) {
    const auto s = io::base_divisor_from_json(io::read_json_file(opt.translation));
    const bool pass = verify_translation_identity(model, s);
    out << "translation identity: " << (pass ? "PASS" : "FAIL") << "\n";
    ok = ok && pass;
  }
  if (opt.horizontal) {
    const auto probes = horizontal_probes(model);
    bool pass = true;
    for (const auto& t : probes) pass = pass && horizontal_irrelevance_check(model, t);
    out << "horizontal irrelevance: " << (pass ? "PASS" : "FAIL") << " (" << probes.size() << " perturbations)\n";
    ok = ok && pass;
  }
  return ok ? Exit::ok : Exit::fail;
}

// ---------------------------------------------------------------------------------------------
// kodaira

struct KodairaOptions {
  std::string type;
  int b = -1;
  std::string degree;
  int multiple = 0;
  std::string format = "human";
};

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + std::to_string(v[k]);
  return s;
}

inline std::string join_rationals(const std::vector<Rational>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + to_string(v[k]);
  return s;
}

inline Exit run_kodaira(const KodairaOptions& opt, std::ostream& out) {
  const int modes = !opt.type.empty() + !opt.degree.empty() + (opt.multiple != 0);
  if (modes != 1) throw DomainError("kodaira needs exactly one of --type, --degree, --multiple");
  const bool csv = opt.format == "csv";

  if (!opt.type.empty()) {
    int suffix_b = 0;
    const auto type = parse_kodaira_type(opt.type, &suffix_b);
    const auto data = kodaira_preset(type, opt.b >= 0 ? opt.b : suffix_b);
    const auto sigma = sigma_coefficient(data);
    if (csv) {
      out << csv_header("kodaira", "") << "type,multiplicities,r,sigma,sigma_decimal,j_pole_order\n"
          << data.tag() << "," << join_ints(data.multiplicities) << "," << join_rationals(data.relative_canonical)
          << "," << to_string(sigma) << "," << num(to_double(sigma)) << "," << data.j_pole_order << "\n";
    } else {
      out << "type: " << data.tag() << "\n"
          << "multiplicities: " << join_ints(data.multiplicities) << "\n"
          << "r: " << join_rationals(data.relative_canonical) << "\n"
          << "sigma: " << exact_and_decimal(sigma) << "\n"
          << "lct: " << exact_and_decimal(1 - sigma) << "\n"
          << "j_pole_order: " << data.j_pole_order << "\n";
    }
    return Exit::ok;
  }

  if (opt.multiple != 0) {
    const auto c = multiple_fiber_coefficient(opt.multiple);
    if (csv)
      out << csv_header("kodaira", "") << "m,coefficient,coefficient_decimal\n"
          << opt.multiple << "," << to_string(c) << "," << num(to_double(c)) << "\n";
    else
      out << "multiple fiber m = " << opt.multiple << ": coefficient " << exact_and_decimal(c) << "\n";
    return Exit::ok;
  }

  const auto [fibers, multiple] = io::fibers_from_json(io::read_json_file(opt.degree));
  const auto r = elliptic_degree(fibers, multiple);
  if (csv) {
    out << csv_header("kodaira", "") << "discriminant_part,moduli_part,total,total_decimal\n"
        << to_string(r.discriminant_part) << "," << to_string(r.moduli_part) << "," << to_string(r.total) << ","
        << num(to_double(r.total)) << "\n";
  } else {
    out << "fibers: " << fibers.size() << " singular, " << multiple.size() << " multiple\n"
        << "discriminant_part: " << exact_and_decimal(r.discriminant_part) << "\n"
        << "moduli_part: " << exact_and_decimal(r.moduli_part) << "\n"
        << "total: " << exact_and_decimal(r.total) << "\n";
  }
  return Exit::ok;
}

// ---------------------------------------------------------------------------------------------
// integrate

struct IntegrateOptions {
  std::vector<std::string> models;  // several charts are summed
  std::string at;
  bool mc = false;
  bool quad = false;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = FiberIntegralParams{}.seed;
  double tol = FiberIntegralParams{}.quad_tolerance;
  std::string out_path;
};

inline std::string point_label(const BasePoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "/" : "") + num(p.moduli()[i]);
  return s;
}

inline Exit run_integrate(const IntegrateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.mc && opt.quad) throw DomainError("--mc and --quad are exclusive");
  std::vector<FibrationModel> charts;
  for (const auto& path : opt.models) charts.push_back(load_valid_model(path));
  for (const auto& c : charts)
    if (c.base_dim() != charts.front().base_dim()) throw DomainError("charts must share the base dimension");
  const auto points = parse_points(opt.at, charts.front().base_dim());

  FiberIntegralParams params;
  params.mc_samples = opt.samples;
  params.seed = opt.seed;
  params.quad_tolerance = opt.tol;
  params.check();
  const unsigned threads = thread_count();

  struct Row {
    double value = 0, var = 0;
    std::size_t dim = 0;
    std::vector<std::string> flags;
  };
  std::vector<Row> rows(points.size());
  for (const auto& chart : charts) {
    if (opt.mc) {
      auto res = evaluate_monte_carlo_batch(chart, points, params, threads);
      for (std::size_t i = 0; i < res.size(); ++i) {
        rows[i].dim = std::max(rows[i].dim, FiberIntegral(chart).region().v);
        if (!res[i].value) {
          rows[i].flags.push_back(res[i].error.find("empty") != std::string::npos ? "degenerate" : "error");
          continue;
        }
        rows[i].value += res[i].value->estimate;
        rows[i].var += res[i].value->stderr_ * res[i].value->stderr_;
      }
    } else {
      auto res = evaluate_quadrature_batch(chart, points, params, threads);
      for (std::size_t i = 0; i < res.size(); ++i) {
        if (!res[i].value) {
          rows[i].flags.push_back("quadrature_error");
          err << "warning: point " << point_label(points[i]) << ": " << res[i].error << "\n";
          continue;
        }
        rows[i].value += res[i].value->value;
        rows[i].dim = std::max(rows[i].dim, res[i].value->region_dim);
        if (res[i].value->degenerate) rows[i].flags.push_back("degenerate");
      }
    }
  }

  std::string csv = csv_header("integrate", std::string("method=") + (opt.mc ? "mc" : "quad") +
                                                " seed=" + std::to_string(opt.seed) +
                                                " charts=" + std::to_string(charts.size())) +
                    "point,value,stderr,region_dim,flags\n";
  bool failed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& r = rows[i];
    std::sort(r.flags.begin(), r.flags.end());
    r.flags.erase(std::unique(r.flags.begin(), r.flags.end()), r.flags.end());
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    failed = failed || std::count(r.flags.begin(), r.flags.end(), "quadrature_error") ||
             std::count(r.flags.begin(), r.flags.end(), "error");
    csv += point_label(points[i]) + "," + num(r.value) + "," + (opt.mc ? num(std::sqrt(r.var)) : "") + "," +
           std::to_string(r.dim) + "," + flags + "\n";
  }
  if (opt.out_path.empty())
    out << csv;
  else
    write_file(opt.out_path, csv);
  return failed ? Exit::fail : Exit::ok;
}

// ---------------------------------------------------------------------------------------------
// asymptotics

struct AsymptoticsOptions {
  std::string model;
  std::string ray;
  std::string grid = "1e-1:1e-6:24";
  double tol = 0.02;
  double anchor = 0.5;
  std::string out_path;
};

struct RayOutcome {
  std::string csv;
  std::vector<std::string> report;
  bool pass = false;
};

inline RayOutcome ray_check(const FibrationModel& model, const Ray& ray, double tol, unsigned threads,
                            const std::string& header_extra) {
  RayOutcome o;
  const auto samples = sample_ray(model, ray, {}, threads);
  const auto good = usable(samples);
  const auto f = fit(good);
  const auto pred = verify_prediction(model, ray, f, tol);
  const double astar = to_double(pred.alpha_star);
  const auto lel = lelong_zero_check(good, astar);

  o.csv = csv_header("asymptotics", header_extra) + "s,V,psi,flags\n";
  for (const auto& x : samples) {
    if (x.ok)
      o.csv += num(x.s) + "," + num(x.value) + "," + num(std::log(x.value) + 2 * astar * std::log(x.s)) + ",\n";
    else
      o.csv += num(x.s) + ",,," + std::string(x.error.find("empty") != std::string::npos ? "degenerate" : "error") +
               "\n";
  }
  o.report.push_back("alpha = " + num(f.alpha, 6) + " +- " + num(f.alpha_stderr, 3) + "  alpha* = " +
                     exact_and_decimal(pred.alpha_star) + "  gap = " + num(pred.gap, 3) + "  tol = " + num(tol, 6));
  o.report.push_back("beta = " + num(f.beta, 6) + "  const = " + num(f.constant, 6) + "  used " +
                     std::to_string(good.size()) + "/" + std::to_string(samples.size()) + " points");
  std::string eps;
  for (const auto& [e, ok] : lel.per_epsilon) eps += " eps=" + num(e, 3) + ":" + (ok ? "PASS" : "FAIL");
  o.report.push_back("lelong slope = " + num(lel.slope, 4) + " (raw " + num(lel.raw_slope, 4) + ")" + eps);
  o.report.push_back("prediction: " + std::string(pred.pass ? "PASS" : "FAIL"));
  o.report.push_back("lelong: " + std::string(lel.pass ? "PASS" : "FAIL"));
  o.pass = pred.pass && lel.pass;
  o.report.push_back("result: " + std::string(o.pass ? "PASS" : "FAIL"));
  return o;
}

inline Exit run_asymptotics(const AsymptoticsOptions& opt, std::ostream& out) {
  const auto model = load_valid_model(opt.model);
  const Ray ray(parse_direction(opt.ray), parse_grid(opt.grid), opt.anchor);
  if (ray.direction().size() != model.base_dim())
    throw DomainError("ray has " + std::to_string(ray.direction().size()) + " entries, model base has " +
                      std::to_string(model.base_dim()));
  if (!(opt.tol > 0)) throw DomainError("--tol must be positive");
  RayOutcome o;
  try {
    o = ray_check(model, ray, opt.tol, thread_count(), "ray=" + opt.ray + " grid=" + opt.grid);
  } catch (const FitError& e) {
    throw RunFailure(std::string("fit failed: ") + e.what());
  }
  if (opt.out_path.empty()) {
    out << o.csv;
    for (const auto& line : o.report) out << "# " << line << "\n";
  } else {
    write_file(opt.out_path, o.csv);
    for (const auto& line : o.report) out << line << "\n";
  }
  return o.pass ? Exit::ok : Exit::fail;
}

// ---------------------------------------------------------------------------------------------
// verify-all

struct VerifyOptions {
  std::string suite;
  std::uint64_t seed = FiberIntegralParams{}.seed;
  std::string out_dir;
};

struct CaseResult {
  std::string name, kind, status, detail;
  std::string artifact;  // CSV content written as <name>.csv
};

inline FibrationModel case_model(const nlohmann::json& c, const std::filesystem::path& dir) {
  const auto& m = c.at("model");
  auto model = m.is_string() ? io::load_model((dir / m.get<std::string>()).string()) : io::model_from_json(m);
  return model;
}

inline CaseResult run_case(const nlohmann::json& c, const std::filesystem::path& dir, std::uint64_t seed,
                           unsigned threads) {
  CaseResult r;
  r.kind = c.at("kind").get<std::string>();
  std::vector<std::string> problems;

  if (r.kind == "discriminant") {
    if (c.contains("expect_invalid")) {
      const int item = c.at("expect_invalid").get<int>();
      auto model = case_model(c, dir);
      auto vs = validate(model);
      bool found = std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.item == item; });
      if (!found) problems.push_back("expected violation of item " + std::to_string(item));
      r.detail = vs.empty() ? "model valid" : vs.front().describe();
    } else {
      auto model = case_model(c, dir);
      auto got = discriminant_divisor(model).coefficients;
      auto want = io::base_divisor_from_json(c.at("expect"));
      if (!(got == want)) problems.push_back("expected " + rationals_text(want) + ", got " + rationals_text(got));
      r.detail = rationals_text(got);
    }
  } else if (r.kind == "kodaira") {
    auto rows = c.at("expect");
    std::string detail;
    for (const auto& [tag, v] : rows.items()) {
      const Rational want = io::rational_from_json(v);
      Rational got;
      if (tag.rfind("m=", 0) == 0) {
        got = multiple_fiber_coefficient(static_cast<int>(parse_double(tag.substr(2), "multiple fiber tag")));
      } else {
        int b = 0;
        const auto type = parse_kodaira_type(tag, &b);
        got = sigma_coefficient(kodaira_preset(type, b));
      }
      if (got != want) problems.push_back(tag + ": expected " + to_string(want) + ", got " + to_string(got));
    }
    r.detail = std::to_string(rows.size()) + " entries";
  } else if (r.kind == "cross_validation") {
    auto model = case_model(c, dir);
    require_valid(model);
    std::vector<BasePoint> points;
    for (const auto& p : c.at("points")) points.emplace_back(p.get<std::vector<double>>());
    FiberIntegralParams params;
    params.mc_samples = c.value("samples", std::size_t{1'000'000});
    params.seed = seed;
    const double max_rel = c.value("max_rel_stderr", 0.02);
    const double sigmas = c.value("sigmas", 3.0);
    auto quad = evaluate_quadrature_batch(model, points, params, threads);
    auto mc = evaluate_monte_carlo_batch(model, points, params, threads);
    r.artifact = csv_header("verify-all", "case=cross_validation seed=" + std::to_string(seed)) +
                 "point,quad,mc,stderr,z\n";
    double worst = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto label = point_label(points[i]);
      if (!quad[i].value || !mc[i].value) {
        problems.push_back(label + ": " + (quad[i].value ? mc[i].error : quad[i].error));
        continue;
      }
      const double q = quad[i].value->value, m = mc[i].value->estimate, se = mc[i].value->stderr_;
      // rounding slack: fibers without free directions are integrated exactly by both routes
      const double slack = 1e-9 * std::abs(q);
      const double z = std::abs(m - q) <= slack ? 0.0 : (se > 0 ? std::abs(m - q) / se : INFINITY);
      worst = std::max(worst, z);
      r.artifact += label + "," + num(q) + "," + num(m) + "," + num(se) + "," + num(z, 4) + "\n";
      if (z > sigmas) problems.push_back(label + ": |mc - quad| = " + num(z, 3) + " stderr");
      if (!(se < max_rel * std::abs(m))) problems.push_back(label + ": stderr " + num(se / m, 3) + " of estimate");
    }
    r.detail = std::to_string(points.size()) + " points, max z = " + num(worst, 3);
  } else if (r.kind == "ray") {
    auto model = case_model(c, dir);
    require_valid(model);
    const Ray ray(parse_direction(c.at("ray").get<std::string>()),
                  parse_grid(c.value("grid", std::string("1e-1:1e-6:24"))), c.value("anchor", 0.5));
    const double tol = c.value("tol", 0.02);
    auto o = ray_check(model, ray, tol, threads, "case=ray ray=" + c.at("ray").get<std::string>());
    bool ok = o.pass;
    if (c.contains("expect_alpha")) {
      const Rational want = io::rational_from_json(c.at("expect_alpha"));
      const auto star = valuation_of(discriminant_divisor(model).coefficients, ray.valuation(model));
      if (star != want) problems.push_back("alpha* = " + to_string(star) + ", expected " + to_string(want));
    }
    if (!ok)
      for (const auto& line : o.report)
        if (line.find("FAIL") != std::string::npos && line.rfind("result", 0) != 0) problems.push_back(line);
    r.artifact = o.csv;
    r.detail = o.report.front();
  } else {
    throw DomainError("unknown case kind '" + r.kind + "'");
  }

  r.status = problems.empty() ? "PASS" : "FAIL";
  if (!problems.empty()) {
    std::string d;
    for (const auto& p : problems) d += (d.empty() ? "" : "; ") + p;
    r.detail = d;
  }
  return r;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline Exit run_verify_all(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const fs::path dir(opt.suite);
  if (!fs::is_directory(dir)) throw DomainError("suite directory '" + opt.suite + "' not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const unsigned threads = thread_count();

  std::vector<CaseResult> results;
  bool any_error = false;
  for (const auto& f : files) {
    const auto c = io::read_json_file(f.string());
    if (!c.is_object() || !c.contains("kind")) continue;  // not a case file, e.g. a model used by cases
    CaseResult r;
    try {
      r = run_case(c, dir, opt.seed, threads);
    } catch (const ModelError& e) {
      r = {"", c.value("kind", ""), "ERROR", e.what(), ""};
      any_error = true;
    } catch (const DomainError& e) {
      r = {"", c.value("kind", ""), "ERROR", e.what(), ""};
      any_error = true;
    } catch (const nlohmann::json::exception& e) {
      r = {"", c.value("kind", ""), "ERROR", std::string("malformed case: ") + e.what(), ""};
      any_error = true;
    } catch (const std::runtime_error& e) {
      r = {"", c.value("kind", ""), "FAIL", e.what(), ""};
    }
    r.name = c.value("name", f.stem().string());
    results.push_back(std::move(r));
  }

  std::string summary =
      csv_header("verify-all", "seed=" + std::to_string(opt.seed)) + "case,kind,status,detail\n";
  bool all_pass = true;
  for (const auto& r : results) {
    summary += csv_field(r.name) + "," + r.kind + "," + r.status + "," + csv_field(r.detail) + "\n";
    out << r.status << "  " << r.name << " (" << r.kind << "): " << r.detail << "\n";
    all_pass = all_pass && r.status == "PASS";
  }
  if (results.empty()) err << "warning: suite '" << opt.suite << "' has no cases\n";
  out << "verify-all: " << (all_pass ? "PASS" : "FAIL") << " (" << results.size() << " cases)\n";

  if (!opt.out_dir.empty()) {
    write_file(fs::path(opt.out_dir) / "summary.csv", summary);
    for (const auto& r : results)
      if (!r.artifact.empty()) write_file(fs::path(opt.out_dir) / (r.name + ".csv"), r.artifact);
  }
  if (any_error) return Exit::invalid;
  return all_pass ? Exit::ok : Exit::fail;
}

// ---------------------------------------------------------------------------------------------

/// Entry point; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Discriminant divisors and fiber integrals of monomial fibrations"};
  app.require_subcommand(1);

  DiscriminantOptions dopt;
  auto* disc = app.add_subcommand("discriminant", "B_R with per-component lct and witness");
  disc->add_option("model", dopt.model, "model JSON")->required();
  disc->add_option("--check-translation", dopt.translation, "base divisor JSON S on B; checks B_{R+f*S} = B_R + S");
  disc->add_flag("--check-horizontal", dopt.horizontal, "checks that horizontal perturbations leave B_R unchanged");
  disc->add_option("--format", dopt.format, "human or csv")->check(CLI::IsMember({"human", "csv"}));

  KodairaOptions kopt;
  auto* kod = app.add_subcommand("kodaira", "Kodaira fiber presets and the elliptic degree formula");
  kod->add_option("--type", kopt.type, "fiber type, e.g. II*, I_3, I*_2");
  kod->add_option("--b", kopt.b, "parameter for I_b and I*_b");
  kod->add_option("--degree", kopt.degree, "fiber list JSON");
  kod->add_option("--multiple", kopt.multiple, "multiplicity m of a multiple fiber");
  kod->add_option("--format", kopt.format, "human or csv")->check(CLI::IsMember({"human", "csv"}));

  IntegrateOptions iopt;
  auto* integ = app.add_subcommand("integrate", "fiber integral V(t) at base points");
  integ->add_option("model", iopt.models, "model JSON; several charts are summed")->required();
  integ->add_option("--at", iopt.at, "points: comma list, each a modulus or x/y/.. per coordinate")->required();
  integ->add_flag("--mc", iopt.mc, "Monte Carlo instead of quadrature");
  integ->add_flag("--quad", iopt.quad, "nested quadrature (default)");
  integ->add_option("--samples", iopt.samples, "Monte Carlo samples per point")->capture_default_str();
  integ->add_option("--seed", iopt.seed, "Monte Carlo seed (point k uses seed xor k)")->capture_default_str();
  integ->add_option("--tol", iopt.tol, "quadrature relative tolerance")->capture_default_str();
  integ->add_option("--out", iopt.out_path, "CSV output file (default stdout)");

  AsymptoticsOptions aopt;
  auto* asym = app.add_subcommand("asymptotics", "pole order of V along a ray against the discriminant");
  asym->add_option("model", aopt.model, "model JSON")->required();
  asym->add_option("--ray", aopt.ray, "direction u, comma separated rationals")->required();
  asym->add_option("--grid", aopt.grid, "from:to:count geometric grid in s")->capture_default_str();
  asym->add_option("--tol", aopt.tol, "tolerance on |alpha - alpha*|")->capture_default_str();
  asym->add_option("--anchor", aopt.anchor, "modulus for coordinates with u_i = 0")->capture_default_str();
  asym->add_option("--out", aopt.out_path, "CSV output file (default stdout)");

  VerifyOptions vopt;
  auto* ver = app.add_subcommand("verify-all", "runs every case file in a suite directory");
  ver->add_option("suite", vopt.suite, "suite directory")->required();
  ver->add_option("--seed", vopt.seed, "Monte Carlo seed")->capture_default_str();
  ver->add_option("--out", vopt.out_dir, "directory for summary.csv and per-case CSV artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(Exit::invalid);
  }

  try {
    Exit code = Exit::ok;
    if (*disc) code = run_discriminant(dopt, out);
    else if (*kod) code = run_kodaira(kopt, out);
    else if (*integ) code = run_integrate(iopt, out, err);
    else if (*asym) code = run_asymptotics(aopt, out);
    else if (*ver) code = run_verify_all(vopt, out, err);
    return static_cast<int>(code);
  } catch (const ModelError& e) {
    err << "error: invalid model\n";
    for (const auto& v : e.violations()) err << "  " << v.describe() << "\n";
    return static_cast<int>(Exit::invalid);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(Exit::invalid);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(Exit::fail);
  }
}

}  // namespace cbf::cli
