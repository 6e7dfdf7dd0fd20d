#pragma once

// JSON formats.
//
//   model:   {"m": 1, "n": 1, "exponents": [[1], [1]], "r": {"E": "1/2"},
//             "base_divisor": ["H"], "names": {"upstairs": ["H'", "E"], "base": ["H"]}}
//   divisor: {"H": "1/3", "E": "-2"}    coefficients as exact strings (or JSON integers)
//   fibers:  [{"type": "II*"}, {"type": "I_b", "b": 3}, {"type": "I_b", "b": 0, "m": 2}]

#include "cbf/divisor.hpp"
#include "cbf/fibration.hpp"
#include "cbf/kodaira.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cbf::io {

using nlohmann::json;

inline Rational rational_from_json(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw DomainError("coefficient must be an exact string or an integer, got " + v.dump());
}

inline json divisor_to_json(const DivisorQ& d) {
  json out = json::object();
  for (const auto& [c, q] : d.terms()) out[c.name()] = to_string(q);
  return out;
}

/// Reads a base divisor {"name": "p/q", ...}.
inline DivisorQ base_divisor_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("divisor must be a JSON object");
  std::vector<DivisorQ::Term> terms;
  for (const auto& [name, v] : j.items()) terms.emplace_back(PrimeComponent::base(name), rational_from_json(v));
  return DivisorQ(terms);
}

/// Reads an upstairs divisor, taking component kinds from the model.
inline DivisorQ upstairs_divisor_from_json(const json& j, const FibrationModel& model) {
  if (!j.is_object()) throw DomainError("divisor must be a JSON object");
  std::vector<DivisorQ::Term> terms;
  for (const auto& [name, v] : j.items())
    terms.emplace_back(model.component(model.upstairs_index(name)), rational_from_json(v));
  return DivisorQ(terms);
}

inline FibrationModel model_from_json(const json& j) {
  try {
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    auto exponents = j.at("exponents").get<std::vector<std::vector<int>>>();
    std::vector<std::string> up, base;
    if (j.contains("names")) {
      const auto& names = j.at("names");
      if (names.contains("upstairs")) up = names.at("upstairs").get<std::vector<std::string>>();
      if (names.contains("base")) base = names.at("base").get<std::vector<std::string>>();
    }
    std::set<std::string> b;
    if (j.contains("base_divisor"))
      for (const auto& name : j.at("base_divisor")) b.insert(name.get<std::string>());
    // names are needed to key r, so build once without r
    FibrationModel shape(m, n, exponents, {}, b, up, base);
    std::vector<Rational> r(shape.rows(), Rational(0));
    if (j.contains("r")) {
      const auto& rj = j.at("r");
      if (!rj.is_object()) throw DomainError("\"r\" must map upstairs names to coefficients");
      for (const auto& [name, v] : rj.items()) r[shape.upstairs_index(name)] = rational_from_json(v);
    }
    return shape.with_r(std::move(r));
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed model JSON: ") + e.what());
  }
}

inline json model_to_json(const FibrationModel& model) {
  json r = json::object();
  for (std::size_t j = 0; j < model.rows(); ++j)
    if (model.r(j) != 0) r[model.upstairs_name(j)] = to_string(model.r(j));
  json b = json::array();
  for (const auto& name : model.base_divisor()) b.push_back(name);
  return json{{"m", model.base_dim()},
              {"n", model.fiber_dim()},
              {"exponents", model.exponents()},
              {"r", r},
              {"base_divisor", b},
              {"names", {{"upstairs", model.upstairs_names()}, {"base", model.base_names()}}}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline FibrationModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

/// Fiber list for the elliptic degree. A record with "m" >= 2 is a multiple fiber of type
/// mI_b: it contributes (m-1)/m, plus the I_b data when b >= 1. "j" overrides the pole order.
inline std::pair<std::vector<KodairaFiberData>, std::vector<int>> fibers_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("fiber list must be a JSON array");
  std::vector<KodairaFiberData> fibers;
  std::vector<int> multiple;
  for (const auto& rec : j) {
    try {
      int b = rec.value("b", 0);
      int suffix_b = b;
      const auto type = parse_kodaira_type(rec.at("type").get<std::string>(), &suffix_b);
      if (!rec.contains("b")) b = suffix_b;
      if (rec.contains("m")) {
        const int m = rec.at("m").get<int>();
        if (type != KodairaType::I_b) throw DomainError("multiple fibers must be of type I_b");
        multiple.push_back(m);
        if (b >= 1) fibers.push_back(kodaira_preset(type, b));
        if (rec.contains("j") && b >= 1) fibers.back().j_pole_order = rec.at("j").get<int>();
        continue;
      }
      auto data = kodaira_preset(type, b);
      if (rec.contains("j")) {
        const int jp = rec.at("j").get<int>();
        if (jp < 0) throw DomainError("j pole order must be nonnegative");
        data.j_pole_order = jp;
      }
      fibers.push_back(std::move(data));
    } catch (const json::exception& e) {
      throw DomainError(std::string("malformed fiber record: ") + e.what());
    }
  }
  return {fibers, multiple};
}

}  // namespace cbf::io
