#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "projkit/bodies.hpp"
#include "projkit/error.hpp"

namespace projkit {

namespace detail {

inline double json_number(const nlohmann::json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw Error(Errc::parse, what + " must be a number");
}

inline std::vector<Vector> json_points(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].empty())
    throw Error(Errc::parse, std::string("'") + key + "' must be a non-empty list of points");
  std::vector<Vector> out;
  for (const auto& row : j[key]) {
    if (!row.is_array() || row.empty()) throw Error(Errc::parse, std::string("entries of '") + key + "' must be lists");
    Vector v(static_cast<int>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<int>(i)] = json_number(row[i], key);
    if (!out.empty() && out.front().size() != v.size()) throw Error(Errc::dimension_mismatch, "points of different length");
    out.push_back(std::move(v));
  }
  return out;
}

inline nlohmann::json json_rows(const std::vector<Vector>& pts) {
  auto rows = nlohmann::json::array();
  for (const auto& p : pts) rows.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return rows;
}

}  // namespace detail

/// Body from the JSON schema: polytope (vertices), zonotope (generators), lp_ball (dim, p,
/// optional radius), smooth (L, coeffs keyed "m,k").
inline Body body_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw Error(Errc::parse, "body needs a string 'type'");
  const auto type = j["type"].get<std::string>();
  if (type == "polytope") return Polytope::from_vertices(detail::json_points(j, "vertices"));
  if (type == "zonotope") return Zonotope::from_generators(detail::json_points(j, "generators"));
  if (type == "lp_ball") {
    if (!j.contains("dim") || !j.contains("p")) throw Error(Errc::parse, "lp_ball needs 'dim' and 'p'");
    const double dim = detail::json_number(j["dim"], "dim");
    if (dim != std::floor(dim) || dim < 2) throw Error(Errc::parse, "dim must be an integer >= 2");
    const double r = j.contains("radius") ? detail::json_number(j["radius"], "radius") : 1.0;
    return LpBall::make(static_cast<int>(dim), detail::json_number(j["p"], "p"), r);
  }
  if (type == "smooth") {
    if (!j.contains("L") || !j["L"].is_number_integer()) throw Error(Errc::parse, "smooth body needs an integer 'L'");
    if (!j.contains("coeffs") || !j["coeffs"].is_object()) throw Error(Errc::parse, "smooth body needs a 'coeffs' object");
    const int L = j["L"].get<int>();
    auto h = HarmonicExpansion::zero(L);
    for (const auto& [key, value] : j["coeffs"].items()) {
      int m = 0, k = 0;
      char comma = 0;
      std::istringstream is(key);
      if (!(is >> m >> comma >> k) || comma != ',' || !is.eof())
        throw Error(Errc::parse, "coefficient key '" + key + "' is not of the form m,k");
      if (m < 0 || m > L || k < -m || k > m) throw Error(Errc::parse, "coefficient '" + key + "' out of range");
      if (m % 2 != 0) throw Error(Errc::symmetry_violation, "odd degree coefficient '" + key + "'");
      h.coeffs[harmonic_index(m, k)] = detail::json_number(value, key);
    }
    return SmoothBody::from_expansion(std::move(h));
  }
  throw Error(Errc::parse, "unknown body type '" + type + "'");
}

inline nlohmann::json body_to_json(const Body& body) {
  return std::visit([](const auto& b) -> nlohmann::json {
    using T = std::decay_t<decltype(b)>;
    if constexpr (std::is_same_v<T, Polytope>) {
      return {{"type", "polytope"}, {"vertices", detail::json_rows(b.vertices())}};
    } else if constexpr (std::is_same_v<T, Zonotope>) {
      return {{"type", "zonotope"}, {"generators", detail::json_rows(b.generators())}};
    } else if constexpr (std::is_same_v<T, LpBall>) {
      nlohmann::json p = b.p;
      if (std::isinf(b.p)) p = "inf";
      return {{"type", "lp_ball"}, {"dim", b.dimension}, {"p", p}, {"radius", b.radius}};
    } else {
      nlohmann::json c = nlohmann::json::object();
      const auto& h = b.support_expansion();
      for (int m = 0; m <= h.max_degree; m += 2)
        for (int k = -m; k <= m; ++k)
          if (const double v = h.coeffs[harmonic_index(m, k)]; v != 0.0) c[std::to_string(m) + "," + std::to_string(k)] = v;
      return {{"type", "smooth"}, {"L", h.max_degree}, {"coeffs", c}};
    }
  }, body);
}

inline Body load_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot open body file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, "malformed JSON in '" + path + "': " + e.what());
  }
  return body_from_json(j);
}

/// Inline form "type key=value ...", e.g. "lp_ball p=1.5 dim=3"; only lp_ball takes scalars.
inline Body body_from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error(Errc::parse, "empty body description");
  nlohmann::json j;
  j["type"] = tokens[0];
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) throw Error(Errc::parse, "expected key=value, got '" + tokens[i] + "'");
    const auto key = tokens[i].substr(0, eq), value = tokens[i].substr(eq + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      j[key] = v;
    } catch (const std::exception&) {
      j[key] = value;
    }
  }
  return body_from_json(j);
}

}  // namespace projkit
