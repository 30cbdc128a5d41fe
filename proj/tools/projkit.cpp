// Command-line driver: body classification, projection tables, isotropic position, the Minkowski
// solver, counterexample construction, the acceptance suite and experiment reports.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "projkit/acceptance.hpp"
#include "projkit/harness.hpp"
#include "projkit/json_io.hpp"

namespace fs = std::filesystem;
using namespace projkit;
using json = nlohmann::ordered_json;

namespace {

constexpr int kAssertionFailed = 1;
constexpr int kInputError = 2;

struct Globals {
  HarnessOptions opt;
  std::vector<std::string> tol_overrides;
  std::string tol_file;
  std::string out;
};

void apply_tolerances(Globals& g) {
  if (!g.tol_file.empty()) {
    std::ifstream in(g.tol_file);
    if (!in) throw Error(Errc::parse, "cannot open tolerance file '" + g.tol_file + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse, "malformed tolerance file: " + std::string(e.what()));
    }
    g.opt.tol.override_from(j);
  }
  for (const auto& kv : g.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::parse, "--tol expects name=value, got '" + kv + "'");
    double v = 0.0;
    try {
      v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::parse, "--tol value is not a number: '" + kv + "'");
    }
    g.opt.tol.override_from(nlohmann::json{{kv.substr(0, eq), v}});
  }
}

/// Positional arguments to bodies: a file path, a quoted inline description, or a type name
/// followed by key=value tokens ("lp_ball p=1.5 dim=3").
std::vector<Body> parse_bodies(const std::vector<std::string>& args) {
  std::vector<Body> out;
  std::vector<std::string> pending;
  auto flush = [&] {
    if (!pending.empty()) out.push_back(body_from_tokens(pending));
    pending.clear();
  };
  for (const auto& a : args) {
    if (a.find(' ') != std::string::npos) {
      flush();
      std::istringstream is(a);
      std::vector<std::string> t{std::istream_iterator<std::string>(is), {}};
      out.push_back(body_from_tokens(t));
    } else if (a.find('=') != std::string::npos && !pending.empty()) {
      pending.push_back(a);
    } else if (fs::exists(a) || a.ends_with(".json")) {
      flush();
      out.push_back(load_body(a));
    } else {
      flush();
      pending.push_back(a);
    }
  }
  flush();
  return out;
}

Body one_body(const std::vector<std::string>& args) {
  auto b = parse_bodies(args);
  if (b.size() != 1) throw Error(Errc::parse, "expected exactly one body, got " + std::to_string(b.size()));
  return std::move(b[0]);
}

SmoothBody as_smooth(const Body& b, int L) {
  if (const auto* s = std::get_if<SmoothBody>(&b)) return *s;
  return smooth(b, L);
}

json vec(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

json matrix(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

void emit(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(g.out);
  const auto path = fs::path(g.out) / name;
  std::ofstream(path) << text;
  std::cerr << "wrote " << path.string() << "\n";
}

void emit_report(const Globals& g, const ExperimentReport& r, const std::string& stem) {
  if (g.out.empty()) {
    std::cout << r.to_json().dump(2) << "\n";
    return;
  }
  emit(g, stem + ".json", r.to_json().dump(2) + "\n");
  emit(g, stem + ".csv", ExperimentReport::csv_header() + "\n" + r.csv_rows());
}

// ---------------------------------------------------------------------------------------------
// Subcommands

int cmd_classify(const Globals& g, const std::vector<std::string>& args, const std::string& expect) {
  const Body body = one_body(args);
  const auto c = is_projection_body(as_smooth(body, g.opt.degree), zonoid_options(g.opt));
  json j;
  j["body"] = describe(body);
  j["degree"] = g.opt.degree;
  j["verdict"] = to_string(c.verdict);
  j["sup_norm"] = c.sup_norm;
  j["max_value"] = c.max_value;
  j["excursion"] = c.excursion;
  j["tolerance"] = c.tol;
  j["grid_spacing"] = c.grid_spacing;
  if (c.witness)
    j["witness_cap"] = {{"center", vec(c.witness->center)}, {"radius", c.witness->radius},
                        {"inradius", c.witness->inradius}, {"grid_nodes", c.witness->grid_nodes}};
  j["reason"] = c.reason;
  emit(g, "classify.json", j.dump(2) + "\n");
  return expect.empty() || expect == to_string(c.verdict) ? 0 : kAssertionFailed;
}

int cmd_project(const Globals& g, const std::vector<std::string>& args, const std::vector<double>& xi) {
  const Body body = one_body(args);
  std::vector<Eigen::Vector3d> dirs;
  if (!xi.empty()) {
    if (xi.size() % 3 != 0) throw Error(Errc::parse, "--xi expects triples of coordinates");
    for (std::size_t i = 0; i < xi.size(); i += 3) dirs.emplace_back(xi[i], xi[i + 1], xi[i + 2]);
  } else {
    dirs = fibonacci_sphere(g.opt.grid);
  }
  std::ostringstream os;
  os.precision(17);
  os << "x,y,z,P\n";
  for (const auto& d : dirs) {
    const Direction dir = Direction::from(Vector(d));
    const auto u = dir.coords();
    os << u[0] << "," << u[1] << "," << u[2] << "," << projection_function(body, dir) << "\n";
  }
  emit(g, "projection.csv", os.str());
  return 0;
}

int cmd_isotropize(const Globals& g, const std::vector<std::string>& args) {
  const Body body = one_body(args);
  const auto r = isotropize(body);
  json j;
  j["input"] = describe(body);
  j["transform"] = matrix(r.certificate.transform);
  j["isotropic_constant"] = r.certificate.isotropic_constant;
  j["covariance_residual"] = r.certificate.covariance_residual;
  j["volume_error"] = r.certificate.volume_error;
  j["method"] = r.certificate.method;
  j["body"] = body_to_json(r.body);
  emit(g, "isotropic.json", j.dump(2) + "\n");
  return r.certificate.valid(g.opt.tol.isotropy) ? 0 : kAssertionFailed;
}

AtomicMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot open measure file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, "malformed JSON in '" + path + "': " + e.what());
  }
  if (!j.contains("areas") || !j["areas"].is_array()) throw Error(Errc::parse, "measure needs 'normals' and 'areas'");
  AtomicMeasure m;
  m.normals = detail::json_points(j, "normals");
  for (const auto& a : j["areas"]) m.areas.push_back(detail::json_number(a, "areas"));
  if (m.areas.size() != m.normals.size()) throw Error(Errc::parse, "'normals' and 'areas' differ in length");
  m.dimension = static_cast<int>(m.normals.front().size());
  return m;
}

int cmd_minkowski(const Globals& g, const std::vector<std::string>& args, const std::string& measure_file) {
  MinkowskiOptions mo;
  mo.tolerance = g.opt.tol.kkt;
  json j;
  if (!measure_file.empty() || !args.empty()) {
    std::optional<Body> input;
    if (measure_file.empty()) input = one_body(args);
    if (input && (std::holds_alternative<SmoothBody>(*input) || std::holds_alternative<LpBall>(*input))) {
      const auto s = as_smooth(*input, g.opt.degree);
      const auto sol = solve_minkowski(s.curvature().density, s.degree(), mo);
      double h_err = 0.0;
      for (const auto& x : fibonacci_sphere(g.opt.grid))
        h_err = std::max(h_err, std::abs(sol.body.support(Vector(x)) - s.support(Vector(x))));
      j["input"] = describe(*input);
      j["density_l2_error"] = sol.density_l2_error;
      j["kkt_residual"] = sol.discrete.kkt_residual;
      j["iterations"] = sol.discrete.iterations;
      j["max_support_error"] = h_err;
      j["body"] = body_to_json(sol.body);
    } else {
      AtomicMeasure m;
      if (input) {
        if (const auto* p = std::get_if<Polytope>(&*input)) m = surface_measure(*p);
        else m = surface_measure(std::get<Zonotope>(*input));
        j["input"] = describe(*input);
      } else {
        m = load_measure(measure_file);
        j["input"] = measure_file;
      }
      const auto sol = solve_minkowski(m, mo);
      j["atoms"] = m.areas.size();
      j["max_area_error"] = sol.max_area_error;
      j["kkt_residual"] = sol.kkt_residual;
      j["iterations"] = sol.iterations;
      j["support"] = sol.support;
      j["body"] = body_to_json(sol.polytope());
    }
  } else {
    throw Error(Errc::parse, "minkowski needs a body or --measure");
  }
  emit(g, "minkowski.json", j.dump(2) + "\n");
  return 0;
}

int cmd_counterexample(const Globals& g, const std::vector<std::string>& args) {
  const auto r = run_counterexamples(one_body(args), g.opt);
  emit_report(g, r, "counterexamples");
  return r.passed() ? 0 : kAssertionFailed;
}

int cmd_verify(const Globals& g, const std::string& suite, const std::vector<int>& which) {
  if (suite != "acceptance") throw Error(Errc::parse, "unknown suite '" + suite + "'");
  int failed = 0;
  json reports = json::array();
  json times = json::array();
  std::string csv = ExperimentReport::csv_header() + "\n";
  run_acceptance(g.opt, which, [&](const CriterionResult& r) {
    std::printf("criterion %2d %s  %-36s %8.2f s (budget %g s)%s%s\n", r.index, r.pass() ? "PASS" : "FAIL",
                r.title.c_str(), r.seconds, r.budget, r.report.note.empty() ? "" : "  ", r.report.note.c_str());
    for (const auto& c : r.report.checks)
      if (!c.pass) std::printf("    FAIL %s: %.6g <= %.6g + %.3g\n", c.name.c_str(), c.lhs, c.rhs, c.tolerance);
    std::fflush(stdout);
    if (!r.pass()) ++failed;
    reports.push_back(r.report.to_json());
    csv += r.report.csv_rows();
    times.push_back({{"criterion", r.index}, {"seconds", r.seconds}, {"budget", r.budget}, {"within_budget", r.within_budget()}});
  });
  // timings vary between runs and stay out of the deterministic report
  const std::string dir = g.out.empty() ? "reports" : g.out;
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / "acceptance.json") << reports.dump(2) << "\n";
  std::ofstream(fs::path(dir) / "acceptance.csv") << csv;
  std::ofstream(fs::path(dir) / "acceptance_timing.json") << times.dump(2) << "\n";
  std::printf("%s: %d of %zu criteria failed; reports in %s\n", failed ? "FAIL" : "PASS", failed, reports.size(), dir.c_str());
  return failed == 0 ? 0 : kAssertionFailed;
}

/// Aggregates report JSON files (single reports or arrays) into one JSON array and one CSV.
int cmd_aggregate(const Globals& g, const std::vector<std::string>& inputs) {
  json all = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "file," << ExperimentReport::csv_header() << "\n";
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in))
        if (e.path().extension() == ".json") files.push_back(e.path());
    } else {
      files.emplace_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream is(f);
    json j;
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw Error(Errc::parse, "malformed report '" + f.string() + "': " + e.what());
    }
    const json list = j.is_array() ? j : json::array({j});
    for (const auto& r : list) {
      if (!r.is_object() || !r.contains("schema_version") || !r.contains("checks")) continue;
      all.push_back(r);
      for (const auto& c : r["checks"])
        csv << f.filename().string() << "," << r["experiment"].get<std::string>() << "," << r["id"].get<std::string>() << ","
            << r["seed"].dump() << "," << r["outcome"].get<std::string>() << ",check,\"" << c["name"].get<std::string>() << "\","
            << c["lhs"].dump() << "," << c["rhs"].dump() << "," << c["tolerance"].dump() << "," << c["pass"].dump() << "\n";
    }
  }
  if (g.out.empty()) {
    std::cout << csv.str();
  } else {
    emit(g, "summary.json", all.dump(2) + "\n");
    emit(g, "summary.csv", csv.str());
  }
  bool ok = true;
  for (const auto& r : all) ok = ok && r["outcome"] == "pass";
  return ok ? 0 : kAssertionFailed;
}

int cmd_report(const Globals& g, const std::string& experiment, const std::vector<std::string>& args, double eps) {
  if (experiment == "aggregate") return cmd_aggregate(g, args);
  const auto bodies = parse_bodies(args);
  auto need = [&](std::size_t n) {
    if (bodies.size() != n)
      throw Error(Errc::parse, experiment + " needs " + std::to_string(n) + " bodies, got " + std::to_string(bodies.size()));
  };
  // smooth, isotropic surrogates for polytopal inputs
  auto prepared = [&](const Body& b) -> Body {
    if (std::holds_alternative<SmoothBody>(b)) return b;
    return smooth_isotropic(b, g.opt.degree);
  };
  ExperimentReport r;
  if (experiment == "stability") {
    need(2);
    r = run_stability(as_smooth(bodies[0], g.opt.degree), prepared(bodies[1]),
                         eps >= 0 ? std::optional<double>(eps) : std::nullopt, g.opt);
  } else if (experiment == "volume-difference") {
    need(2);
    r = run_volume_difference(as_smooth(bodies[0], g.opt.degree), prepared(bodies[1]), g.opt);
  } else if (experiment == "surface-area") {
    need(1);
    r = run_surface_area(bodies[0], g.opt);
  } else if (experiment == "counterexamples") {
    need(1);
    r = run_counterexamples(bodies[0], g.opt);
  } else if (experiment == "hyperplane") {
    need(1);
    r = run_hyperplane_inequalities(bodies[0], g.opt);
  } else {
    throw Error(Errc::parse, "unknown experiment '" + experiment + "'");
  }
  emit_report(g, r, experiment);
  std::cerr << experiment << ": " << to_string(r.outcome) << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
  return r.passed() ? 0 : kAssertionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection bodies, zonoid tests and Shephard-type volume inequalities"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.opt.seed, "64-bit seed for sampled quantities");
  app.add_option("--grid", g.opt.grid, "Fibonacci direction grid size")->check(CLI::PositiveNumber);
  app.add_option("--degree,-L", g.opt.degree, "harmonic degree L of smoothed bodies")->check(CLI::Range(2, 64));
  app.add_option("--tol", g.tol_overrides, "tolerance override name=value (repeatable)");
  app.add_option("--tol-file", g.tol_file, "JSON map of tolerance overrides");
  app.add_option("--out", g.out, "output directory (default: stdout)");
  app.fallthrough();

  std::vector<std::string> args;
  std::string expect, measure, suite = "acceptance", experiment;
  std::vector<double> xi;
  std::vector<int> criteria;
  double eps = -1.0;

  auto* classify = app.add_subcommand("classify", "zonoid test of a body (smoothed at degree L if needed)");
  classify->add_option("body", args, "body file or inline description")->required();
  classify->add_option("--expect", expect, "exit non-zero unless the verdict matches")
      ->check(CLI::IsMember({"certified_yes", "certified_no", "inconclusive"}));

  auto* project = app.add_subcommand("project", "CSV table of P_K over the direction grid");
  project->add_option("body", args)->required();
  project->add_option("--xi", xi, "explicit directions as coordinate triples");

  auto* iso = app.add_subcommand("isotropize", "isotropic position with certificate");
  iso->add_option("body", args)->required();

  auto* mink = app.add_subcommand("minkowski", "reconstruct a body from its surface area measure");
  mink->add_option("body", args, "body whose measure is reconstructed");
  mink->add_option("--measure", measure, "JSON file with 'normals' and 'areas'");

  auto* ce = app.add_subcommand("counterexample", "stability and separation constructions for a non-projection body");
  ce->add_option("body", args)->required();

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"acceptance"}));
  verify->add_option("--criteria", criteria, "subset of criteria 1-10")->delimiter(',');

  auto* report = app.add_subcommand("report", "run one experiment, or aggregate reports, into JSON and CSV");
  report->add_option("experiment", experiment,
                     "stability | volume-difference | surface-area | counterexamples | hyperplane | aggregate")
      ->required();
  report->add_option("bodies", args, "bodies (K first), or report files and directories for aggregate");
  report->add_option("--eps", eps, "stability: epsilon of the hypothesis (default: measured)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    apply_tolerances(g);
    if (*classify) return cmd_classify(g, args, expect);
    if (*project) return cmd_project(g, args, xi);
    if (*iso) return cmd_isotropize(g, args);
    if (*mink) return cmd_minkowski(g, args, measure);
    if (*ce) return cmd_counterexample(g, args);
    if (*verify) return cmd_verify(g, suite, criteria);
    if (*report) return cmd_report(g, experiment, args, eps);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
