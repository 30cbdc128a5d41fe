#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace projkit {

/// Distinct outcomes; only `pass` counts as a pass.
enum class Outcome { pass, fail, vacuous, not_applicable, hypothesis_violated };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::vacuous: return "vacuous";
    case Outcome::not_applicable: return "not_applicable";
    case Outcome::hypothesis_violated: return "hypothesis_violated";
  }
  return "unknown";
}

/// A named inequality stored as lhs <= rhs + tolerance; the flag is recomputable from the sides.
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  static constexpr int kSchemaVersion = 1;

  std::string experiment;
  std::string id;
  std::vector<std::pair<std::string, std::string>> bodies;  // role, descriptor
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<InequalityCheck> checks;
  std::vector<std::pair<std::string, double>> empirical_constants;
  std::vector<std::pair<std::string, double>> tolerances;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::fail;
  std::string note;

  void body(std::string role, std::string descriptor) { bodies.emplace_back(std::move(role), std::move(descriptor)); }
  void quantity(std::string name, double v) { quantities.emplace_back(std::move(name), v); }
  void constant(std::string name, double v) { empirical_constants.emplace_back(std::move(name), v); }
  void tolerance(std::string name, double v) { tolerances.emplace_back(std::move(name), v); }

  bool check(std::string name, double lhs, double rhs, double tol) {
    const bool ok = lhs <= rhs + tol;
    checks.push_back({std::move(name), lhs, rhs, tol, ok});
    return ok;
  }

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  /// Outcome from the checks; special outcomes set earlier are kept.
  void conclude() {
    if (outcome == Outcome::pass || outcome == Outcome::fail)
      outcome = !checks.empty() && all_checks_pass() ? Outcome::pass : Outcome::fail;
  }

  bool passed() const { return outcome == Outcome::pass; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = experiment;
    j["id"] = id;
    j["seed"] = seed;
    j["outcome"] = to_string(outcome);
    j["note"] = note;
    auto pairs = [](const auto& v) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      for (const auto& [k, x] : v) o[k] = number(x);
      return o;
    };
    j["bodies"] = nlohmann::ordered_json::object();
    for (const auto& [role, d] : bodies) j["bodies"][role] = d;
    j["quantities"] = pairs(quantities);
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)},
                             {"tolerance", number(c.tolerance)}, {"pass", c.pass}});
    j["empirical_constants"] = pairs(empirical_constants);
    j["tolerances"] = pairs(tolerances);
    return j;
  }

  static std::string csv_header() { return "experiment,id,seed,outcome,kind,name,lhs,rhs,tolerance,pass"; }

  /// One row per check, quantity and empirical constant.
  std::string csv_rows() const {
    std::ostringstream os;
    os.precision(17);
    const auto prefix = csv_field(experiment) + "," + csv_field(id) + "," + std::to_string(seed) + "," + to_string(outcome);
    for (const auto& c : checks)
      os << prefix << ",check," << csv_field(c.name) << "," << c.lhs << "," << c.rhs << "," << c.tolerance << ","
         << (c.pass ? "true" : "false") << "\n";
    for (const auto& [k, v] : quantities) os << prefix << ",quantity," << csv_field(k) << "," << v << ",,,\n";
    for (const auto& [k, v] : empirical_constants) os << prefix << ",constant," << csv_field(k) << "," << v << ",,,\n";
    return os.str();
  }

 private:
  // JSON has no inf or nan
  static nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  }
  static std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
  }
};

}  // namespace projkit
