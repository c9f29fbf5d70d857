// SPDX-License-Identifier: Apache-2.0
// Batch front end: forward, farfield, acoustic, oracle, verify, compare.
#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dscat/dscat.hpp"

using namespace dscat;

namespace {

enum Exit { kPass = 0, kComputeFailure = 1, kConfigError = 2, kVerifyFailure = 3 };

struct Globals {
  std::string config;
  std::string out = ".";
  int threads = 0;
  bool quiet = false;
};

class Run {
 public:
  Run(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {}

  /// Loads the config; a "command" key, if present, must name this command.
  ConfigNode load() {
    if (g_.config.empty()) throw ConfigError("", "--config is required for " + command_);
    cfg_ = load_config_file(g_.config);
    digest_ = config_digest(cfg_);
    ConfigNode n(cfg_, "");
    if (n.has("command") && n.string("command") != command_)
      throw ConfigError("/command", "config is for \"" + cfg_["command"].get<std::string>() + "\", not \"" + command_ + "\"");
    return n;
  }

  json meta() const {
    return json{{"command", command_}, {"config_digest", digest_}};
  }

  std::string path(const std::string& name) const {
    std::filesystem::create_directories(g_.out);
    return (std::filesystem::path(g_.out) / name).string();
  }

  void log(const std::string& s) const {
    if (!g_.quiet) std::cerr << "[" << command_ << "] " << s << "\n";
  }

  void write_metadata(json extra) const {
    json m = meta();
    m["conventions"] = convention_block();
    m["config"] = cfg_;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_json(path("metadata.json"), m);
  }

  const json& config() const { return cfg_; }

 private:
  const Globals& g_;
  std::string command_;
  json cfg_;
  std::string digest_;
};

json warnings_json(const std::vector<std::string>& a, const std::vector<std::string>& b = {}) {
  json w = json::array();
  for (const auto& s : a) w.push_back(s);
  for (const auto& s : b) w.push_back(s);
  return w;
}

int cmd_forward(const Globals& g) {
  Run run(g, "forward");
  const auto n = run.load();
  const double k = n.positive("k");
  auto sc = parse_scatterer(n);
  if (n.has("grid")) {
    if (n.has("potential")) throw ConfigError("/grid", "the field grid comes from /potential/grid when a potential is given");
    const auto grid = parse_grid(n.object("grid"), 1.2);
    sc.potential = PotentialSample{grid, std::vector<double>(grid.size(), 0.0), {}};
  }
  const IncidentField inc = n.has("incident") ? parse_incident(n.object("incident"), k) : IncidentField(PlaneWave{});
  const SolverOptions opt = n.has("solver") ? parse_solver(n.object("solver")) : SolverOptions{};
  n.finish();
  run.log("assembling " + std::to_string(sc.potential.active_cells().size()) + " cells + " +
          std::to_string(sc.delta.mesh.size()) + " panels");
  const DeltaSolver solver(sc.potential, sc.delta, k, opt);
  const auto sol = solver.solve(inc);
  json m = run.meta();
  m["k"] = k;
  write_field_csv(run.path("field.csv"), sol, m);
  if (sol.mesh().size() > 0) write_density_csv(run.path("density.csv"), sol, m);
  run.write_metadata({{"residual", sol.residual},
                      {"rcond", solver.rcond()},
                      {"warnings", warnings_json(sc.potential.warnings, sc.delta.mesh.warnings)}});
  run.log("residual " + fmt17(sol.residual));
  return kPass;
}

int cmd_farfield(const Globals& g) {
  Run run(g, "farfield");
  const auto n = run.load();
  const double k = n.positive("k");
  const auto sc = parse_scatterer(n);
  const auto inc = n.has("incidence") ? parse_directions(n.object("incidence"), 2, 4) : std::vector<Vec3>{Vec3::UnitZ()};
  const auto obs = n.has("observation") ? parse_directions(n.object("observation"), 16, 32) : observation_grid();
  const std::string route = n.string("route", "source");
  if (route != "source" && route != "kirchhoff") throw ConfigError("/route", "expected \"source\" or \"kirchhoff\"");
  KirchhoffOptions ko;
  if (n.has("kirchhoff")) {
    const auto kn = n.object("kirchhoff");
    ko.n_theta = kn.integer("n_theta", ko.n_theta);
    ko.n_phi = kn.integer("n_phi", ko.n_phi);
    ko.analytic_gradient = kn.boolean("analytic_gradient", ko.analytic_gradient);
    kn.finish();
  }
  const double r_outer = n.number("r_outer", 0.0);
  const SolverOptions opt = n.has("solver") ? parse_solver(n.object("solver")) : SolverOptions{};
  n.finish();
  const DeltaSolver solver(sc.potential, sc.delta, k, opt);
  double r = r_outer;
  if (route == "kirchhoff" && r <= 0.0) r = 1.5 * scatterer_radius(*solver.scatterer()) + 0.5;
  run.log(std::to_string(inc.size()) + " incidences x " + std::to_string(obs.size()) + " observations, " + route + " route");
  const auto ff = compute_farfield(solver, plane_incidences(inc, k), obs,
                                   route == "source" ? FarFieldRoute::Source : FarFieldRoute::Kirchhoff, r, ko);
  json m = run.meta();
  m["route"] = route;
  if (route == "kirchhoff") m["r_outer"] = r;
  write_farfield_csv(run.path("farfield.csv"), ff, m);
  run.write_metadata({{"rcond", solver.rcond()}, {"warnings", warnings_json(sc.potential.warnings, sc.delta.mesh.warnings)}});
  return kPass;
}

int cmd_acoustic(const Globals& g) {
  Run run(g, "acoustic");
  const auto n = run.load();
  const auto medium = parse_medium(n.object("medium"));
  const auto omegas = n.numbers("omega");
  for (std::size_t i = 0; i < omegas.size(); ++i)
    if (!(omegas[i] > 0.0)) throw ConfigError("/omega/" + std::to_string(i), "must be positive");
  const auto grid = n.has("grid") ? parse_grid(n.object("grid"), medium.cutoff.radius)
                                  : make_volume_grid(Box{Vec3::Constant(-medium.cutoff.radius), Vec3::Constant(medium.cutoff.radius)}, 16);
  const auto inc = n.has("incidence") ? parse_directions(n.object("incidence"), 2, 4) : std::vector<Vec3>{Vec3::UnitZ()};
  const auto obs = n.has("observation") ? parse_directions(n.object("observation"), 16, 32) : observation_grid();
  const SolverOptions opt = n.has("solver") ? parse_solver(n.object("solver")) : SolverOptions{};
  n.finish();
  json runs = json::array();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double w = omegas[i];
    run.log("omega " + fmt17(w));
    const auto data = acoustic_to_schrodinger(medium, w, grid, opt);
    const DeltaSolver solver(data.potential, data.delta, w, opt);
    const auto ff = compute_farfield(solver, plane_incidences(inc, w), obs);
    json m = run.meta();
    m["omega"] = w;
    const std::string name = "farfield_omega" + std::to_string(i) + ".csv";
    write_farfield_csv(run.path(name), ff, m);
    double amax = 0.0;
    for (double a : data.delta.alpha) amax = std::max(amax, std::abs(a));
    runs.push_back({{"omega", w},
                    {"file", name},
                    {"active_cells", data.potential.active_cells().size()},
                    {"max_abs_alpha", amax},
                    {"rcond", solver.rcond()},
                    {"warnings", warnings_json(data.warnings, data.potential.warnings)}});
  }
  run.write_metadata({{"runs", runs}});
  return kPass;
}

int cmd_oracle(const Globals& g) {
  Run run(g, "oracle");
  const auto n = run.load();
  const double k = n.positive("k");
  const auto rm = parse_radial_medium(n);
  const int L = n.integer("L", 50);
  if (L < 0 || L > kMaxBesselOrder) throw ConfigError("/L", "must be in 0.." + std::to_string(kMaxBesselOrder));
  const auto inc = n.has("incidence") ? parse_directions(n.object("incidence"), 2, 4) : std::vector<Vec3>{Vec3::UnitZ()};
  const auto obs = n.has("observation") ? parse_directions(n.object("observation"), 16, 32) : observation_grid();
  n.finish();
  const auto pw = solve_partial_waves(rm, k, L);
  const auto ff = mie_pattern(rm, k, L, inc, obs);
  json m = run.meta();
  m["L"] = pw.L;
  write_farfield_csv(run.path("farfield.csv"), ff, m);
  json t = json::array();
  for (const auto& c : pw.t) t.push_back({c.real(), c.imag()});
  run.write_metadata({{"L", pw.L}, {"t", t}, {"failed_modes", pw.failed_modes}});
  return kPass;
}

int cmd_verify(const Globals& g) {
  Run run(g, "verify");
  std::vector<std::string> names = {"green_pairing", "fourier_identity", "sommerfeld", "reciprocity", "uniqueness"};
  std::string profile = "reference";
  if (!g.config.empty()) {
    const auto n = run.load();
    profile = n.string("profile", profile);
    if (n.has("experiments")) {
      const auto& e = n.raw("experiments");
      if (!e.is_array()) throw ConfigError("/experiments", "expected an array of experiment names");
      std::vector<std::string> chosen;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (!e[i].is_string()) throw ConfigError("/experiments/" + std::to_string(i), "expected a string");
        const auto s = e[i].get<std::string>();
        if (s == "all") {
          chosen = names;
          break;
        }
        if (std::find(names.begin(), names.end(), s) == names.end())
          throw ConfigError("/experiments/" + std::to_string(i), "unknown experiment \"" + s + "\"");
        chosen.push_back(s);
      }
      names = chosen;
    }
    n.finish();
  }
  if (profile != "quick" && profile != "reference") throw ConfigError("/profile", "expected \"quick\" or \"reference\"");
  const SuiteProfile p = profile == "quick" ? quick_profile() : reference_profile();
  json reports = json::array();
  bool pass = true;
  for (const auto& name : names) {
    run.log("running " + name + " (" + profile + ")");
    std::vector<ExperimentReport> rs;
    if (name == "green_pairing") rs = run_green_pairing(p);
    if (name == "fourier_identity") rs = run_fourier_identity(p);
    if (name == "sommerfeld") rs = run_sommerfeld(p);
    if (name == "reciprocity") rs = run_reciprocity(p);
    if (name == "uniqueness") rs = run_uniqueness(p);
    for (const auto& r : rs) {
      run.log(r.name + (r.pass ? " PASS" : " FAIL"));
      pass = pass && r.pass;
      reports.push_back(report_to_json(r));
    }
  }
  json bundle = run.meta();
  bundle["profile"] = profile;
  bundle["conventions"] = convention_block();
  bundle["reports"] = reports;
  bundle["pass"] = pass;
  write_json(run.path("reports.json"), bundle);
  return pass ? kPass : kVerifyFailure;
}

int cmd_compare(const Globals& g, std::vector<std::string> files, double tolerance) {
  Run run(g, "compare");
  if (!g.config.empty()) {
    const auto n = run.load();
    if (files.empty()) files = {n.string("a"), n.string("b")};
    tolerance = n.number("tolerance", tolerance);
    n.finish();
  }
  if (files.size() != 2) throw ConfigError("", "compare needs two far-field files");
  const auto a = read_farfield_csv(files[0]);
  const auto b = read_farfield_csv(files[1]);
  if (std::abs(a.k - b.k) > 1e-12 * std::max(1.0, a.k)) throw ValidationError("grid mismatch: far fields are at different k");
  const auto d = pattern_distance(a, b);
  json out{{"a", files[0]}, {"b", files[1]}, {"relative_l2", d.l2}, {"relative_max", d.max}};
  if (tolerance > 0) {
    out["tolerance"] = tolerance;
    out["pass"] = d.l2 <= tolerance;
  }
  std::cout << out.dump() << "\n";
  if (g.out != ".") write_json(run.path("compare.json"), out);
  return tolerance > 0 && !(d.l2 <= tolerance) ? kVerifyFailure : kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering by media with a density jump across a surface: forward solves, far fields, oracle, verification"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "no progress output");
  app.fallthrough();

  auto* forward = app.add_subcommand("forward", "single forward solve: field and density CSV");
  auto* farfield = app.add_subcommand("farfield", "far-field table of a scatterer");
  auto* acoustic = app.add_subcommand("acoustic", "far fields of an acoustic medium through its Schrodinger form");
  auto* oracle = app.add_subcommand("oracle", "partial-wave far field of a radial medium");
  auto* verify = app.add_subcommand("verify", "run the certification experiments");
  auto* compare = app.add_subcommand("compare", "distance between two far-field CSV files");
  std::vector<std::string> files;
  double tolerance = 0.0;
  compare->add_option("files", files, "two far-field CSV files");
  compare->add_option("--tolerance", tolerance, "exit 3 when the relative L2 distance exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*forward) return cmd_forward(g);
    if (*farfield) return cmd_farfield(g);
    if (*acoustic) return cmd_acoustic(g);
    if (*oracle) return cmd_oracle(g);
    if (*verify) return cmd_verify(g);
    if (*compare) return cmd_compare(g, files, tolerance);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << e.kind() << " error: " << e.what() << "\n";
    return e.kind() == "validation" || e.kind() == "parse" ? kConfigError : kComputeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputeFailure;
  }
  return kConfigError;
}
