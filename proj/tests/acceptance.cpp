// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dscat/dscat.hpp"

using namespace dscat;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool all_pass(const std::vector<ExperimentReport>& reports, std::string& summary) {
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("  %-42s %s", r.name.c_str(), r.pass ? "pass" : "FAIL");
    for (const auto& t : r.thresholds)
      std::printf("  %s=%.3e %s %.1e", t.metric.c_str(), r.value(t.metric), t.relation.c_str(), t.bound);
    std::printf("  (%.1f s)\n", r.seconds);
    if (!r.pass) {
      ok = false;
      summary += (summary.empty() ? "failed: " : ", ") + r.name;
    }
  }
  if (ok) summary = std::to_string(reports.size()) + " reports pass";
  return ok;
}

// Incidence and observation grids of the partial-wave comparison.
const std::vector<Vec3>& mie_incidence() {
  static const auto d = observation_grid(2, 4);
  return d;
}
const std::vector<Vec3>& mie_observation() {
  static const auto d = observation_grid(16, 32);
  return d;
}

Outcome mie_agreement() {
  const double k = 2.0, alpha = 2.0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto oracle = mie_pattern(RadialMedium{1.0, alpha, {}}, k, 50, mie_incidence(), mie_observation());
  std::vector<double> err;
  std::vector<std::size_t> panels;
  for (int level : {3, 4}) {
    const auto mesh = make_sphere_mesh(1.0, level);
    panels.push_back(mesh.size());
    DeltaSolver solver(empty_potential(), constant_delta(mesh, alpha), k);
    const auto ff = compute_farfield(solver, plane_incidences(mie_incidence(), k), mie_observation());
    err.push_back(pattern_distance(oracle, ff).l2);
    std::printf("  %zu panels: relative L2 far-field error %.4e\n", panels.back(), err.back());
  }
  const double secs = seconds_since(t0);
  std::printf("  runtime %.1f s\n", secs);
  Outcome o;
  o.pass = err[0] <= 0.05 && err[1] <= 0.02 && err[1] < err[0] && secs <= 180.0;
  o.summary = "err " + fmt("%.3e", err[0]) + " -> " + fmt("%.3e", err[1]) + ", " + fmt("%.1f s", secs);
  return o;
}

Outcome farfield_routes() {
  struct Case {
    std::string name;
    PotentialSample v;
    DeltaSpec delta;
    double k;
  };
  std::vector<Case> cases;
  cases.push_back({"alpha sphere 1280 panels", empty_potential(), constant_delta(make_sphere_mesh(1.0, 3), 2.0), 2.0});
  {
    const auto m = pairing_media(reference_profile()).second;
    cases.push_back({"volume and surface medium", m.potential, m.delta, 1.0});
  }
  const auto obs = observation_grid(8, 16);
  bool ok = true;
  double worst_route = 0, worst_radius = 0;
  for (const auto& c : cases) {
    const auto sol = solve_delta_system(c.v, c.delta, PlaneWave{Vec3(1, 2, 2).normalized()}, c.k);
    const auto src = farfield_source(sol, obs);
    const auto k2 = farfield_kirchhoff(sol, 2.0, obs);
    const auto k3 = farfield_kirchhoff(sol, 3.0, obs);
    double n = 0, d_route = 0, d_radius = 0;
    for (std::size_t o = 0; o < obs.size(); ++o) {
      n += std::norm(src[o]);
      d_route += std::norm(src[o] - k2[o]);
      d_radius += std::norm(k2[o] - k3[o]);
    }
    d_route = std::sqrt(d_route / n);
    d_radius = std::sqrt(d_radius / n);
    std::printf("  %-28s source vs Kirchhoff %.3e, Kirchhoff R=2 vs R=3 %.3e\n", c.name.c_str(), d_route, d_radius);
    worst_route = std::max(worst_route, d_route);
    worst_radius = std::max(worst_radius, d_radius);
    ok = ok && d_route <= 1e-3 && d_radius <= 1e-4;
  }
  return {ok, "routes " + fmt("%.2e", worst_route) + ", radii " + fmt("%.2e", worst_radius)};
}

Outcome jump_relation() {
  bool ok = true;
  double worst = 0;
  for (int which = 0; which < 2; ++which) {
    std::vector<double> errs;
    for (int s = 1; s <= 3; ++s) {
      const auto m = make_sphere_mesh(1.0, s);
      std::vector<cplx> xi(m.size(), 1.0);
      if (which == 1)
        for (std::size_t q = 0; q < m.size(); ++q) xi[q] = m.centroid[q](2) / m.centroid[q].norm();
      errs.push_back(check_jump_relation(m, 1.0, xi));
    }
    std::printf("  density %s: %.4e %.4e %.4e\n", which == 0 ? "constant" : "Y1", errs[0], errs[1], errs[2]);
    ok = ok && errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 0.05;
    worst = std::max(worst, errs[2]);
  }
  return {ok, "finest-level error " + fmt("%.3e", worst)};
}

Outcome from_reports(const std::vector<ExperimentReport>& reports) {
  Outcome o;
  o.pass = all_pass(reports, o.summary);
  return o;
}

Outcome fourier_identity() {
  const auto reports = run_fourier_identity(reference_profile());
  for (const auto& r : reports)
    std::printf("  %s: finite-w remainder %.3e, |F_xi| %.3e\n", r.name.c_str(), r.value("finite_w_remainder"),
                r.value("f_xi_abs"));
  return from_reports(reports);
}

Outcome acoustic_consistency() {
  MediumSpec m;
  m.gamma = make_sphere_mesh(0.5, 2);
  m.shell_density.assign(m.gamma.size(), 0.0);
  m.cutoff = RadialCutoff{2.5, 1.75};
  m.rho_bumps.push_back(GaussianBump{0.3, Vec3(0, 0.2, 0), 0.5});
  m.v_bumps.push_back(GaussianBump{0.5, Vec3(0.1, 0, 0), 0.5});
  const auto grid = make_volume_grid(Box{Vec3::Constant(-2.5), Vec3::Constant(2.5)}, 12);
  const double w = 1.0;
  const auto inc = observation_grid(2, 2);
  const auto obs = observation_grid(6, 12);

  const auto delta_route = acoustic_farfield(m, w, grid, inc, obs);
  const auto data = acoustic_to_schrodinger(m, w, grid);
  VolumeSolver ls(data.potential, w);
  FarFieldPattern vol{w, plane_incidences(inc, w), obs, CMatrix(static_cast<Eigen::Index>(inc.size()),
                                                                static_cast<Eigen::Index>(obs.size()))};
  for (std::size_t i = 0; i < inc.size(); ++i) {
    const auto f = ls.solve(PlaneWave{inc[i]});
    for (std::size_t o = 0; o < obs.size(); ++o) {
      cplx acc = 0.0;
      for (auto c : ls.active())
        acc += std::exp(-kI * (w * obs[o].dot(grid.cell_center(c)))) * data.potential.values[c] * f.values[c];
      vol.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) = -acc * grid.cell_volume / (4.0 * kPi);
    }
  }
  const double d_pipe = pattern_distance(vol, delta_route).l2;
  std::printf("  zero shell density: delta pipeline vs Lippmann-Schwinger far field %.3e\n", d_pipe);

  auto shell = m;
  shell.shell_density.assign(shell.gamma.size(), 1.0);
  const double w2 = 2.0;
  const auto s1 = acoustic_to_schrodinger(shell, w, grid);
  const auto s2 = acoustic_to_schrodinger(shell, w2, grid);
  double d_v = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    d_v = std::max(d_v, std::abs(s2.potential.values[i] - s1.potential.values[i] - (w2 * w2 - w * w) * s1.v_speed[i]));
  const bool alpha_same = s1.delta.alpha == s2.delta.alpha;
  std::printf("  V(2) - V(1) - 3 (1 - 1/v^2): max %.3e; alpha bitwise identical: %s\n", d_v, alpha_same ? "yes" : "no");
  return {d_pipe <= 1e-3 && d_v <= 1e-12 && alpha_same,
          "pipelines " + fmt("%.2e", d_pipe) + ", V identity " + fmt("%.1e", d_v) + ", alpha " +
              (alpha_same ? "identical" : "differs")};
}

Outcome oracle_self_checks() {
  double w_err = 0;
  for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
    for (int l = 0; l <= 20; ++l) {
      const auto j = spherical_bessel(l, x);
      const auto h = spherical_hankel(l, x);
      const cplx w = j.value * h.derivative - j.derivative * h.value;
      w_err = std::max(w_err, std::abs(w - kI / (x * x)) * x * x);
    }
  const double k = 2.0;
  double t_zero = 0;
  for (const auto& t : solve_partial_waves(RadialMedium{1.0, 0.0, {}}, k, 30).t) t_zero = std::max(t_zero, std::abs(t));
  double flux = 0;
  for (const auto& m : std::vector<RadialMedium>{{1.0, 2.0, {}}, {1.0, -3.0, {{0.5, 4.0}, {1.0, -1.0}}}, {0.7, 1.5, {{1.2, 0.8}}}})
    for (const auto& t : solve_partial_waves(m, k, 40).t) flux = std::max(flux, std::abs(std::abs(1.0 + 2.0 * t) - 1.0));
  double soft = 0;
  const auto s = solve_partial_waves(RadialMedium{1.0, 1e6, {}}, k, 30);
  for (int l = 0; l <= 10; ++l) {
    const cplx lim = -spherical_bessel(l, k).value / spherical_hankel(l, k).value;
    soft = std::max(soft, std::abs(s.t[static_cast<std::size_t>(l)] - lim) / std::max(1.0, std::abs(lim)));
  }
  std::printf("  Wronskian %.2e, alpha=0 max|t| %.1e, flux %.2e, sound-soft limit %.2e\n", w_err, t_zero, flux, soft);
  return {w_err <= 1e-12 && t_zero == 0.0 && flux <= 1e-10 && soft <= 1e-4,
          "Wronskian " + fmt("%.1e", w_err) + ", flux " + fmt("%.1e", flux) + ", limit " + fmt("%.1e", soft)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const auto profile = reference_profile();
  const std::vector<Criterion> criteria{
      {"partial-wave agreement", mie_agreement},
      {"far-field route agreement", farfield_routes},
      {"single-layer jump relation", jump_relation},
      {"Green pairing", [&] { return from_reports(run_green_pairing(profile)); }},
      {"Fourier split identity", fourier_identity},
      {"Sommerfeld radiation condition", [&] { return from_reports(run_sommerfeld(profile)); }},
      {"acoustic reduction consistency", acoustic_consistency},
      {"uniqueness discrimination", [&] { return from_reports(run_uniqueness(profile)); }},
      {"oracle self-consistency", oracle_self_checks},
  };
  int failures = 0;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("[%zu] %s\n", i + 1, criteria[i].name);
    std::fflush(stdout);
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s criterion %zu (%s): %s", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                  o.summary.c_str());
    std::printf("%s\n\n", buf);
    std::fflush(stdout);
    lines.push_back(buf);
    failures += o.pass ? 0 : 1;
  }
  std::printf("summary\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  return failures == 0 ? 0 : 1;
}
