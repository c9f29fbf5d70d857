// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dscat/acoustic.hpp"
#include "dscat/harness.hpp"
#include "dscat/mie.hpp"

namespace dscat {

/// Resolution preset for the standard verification experiments.
struct SuiteProfile {
  std::string name = "reference";
  int level = 3;       ///< icosphere subdivisions for the pairing and Sommerfeld media
  int grid_n = 12;     ///< cells per axis for the pairing media
  int recip_level = 3; ///< finest level of the reciprocity study
  UniquenessOptions uniqueness;
};

inline SuiteProfile reference_profile() { return SuiteProfile{}; }

inline SuiteProfile quick_profile() {
  SuiteProfile p;
  p.name = "quick";
  p.level = 2;
  p.grid_n = 8;
  p.recip_level = 2;
  p.uniqueness.coarse_level = 1;
  p.uniqueness.fine_level = 2;
  p.uniqueness.coarse_n = 8;
  p.uniqueness.fine_n = 10;
  p.uniqueness.obs_theta = 4;
  p.uniqueness.obs_phi = 8;
  return p;
}

/// Constant V on the ball |x| < rv and constant alpha on the sphere |x| = a.
inline SchrodingerData sphere_schrodinger(double v, double rv, double alpha, double a, int level, int n,
                                          double half = 1.2) {
  SchrodingerData d;
  const auto g = make_volume_grid(Box{Vec3::Constant(-half), Vec3::Constant(half)}, n);
  d.potential = sample_potential(g, [&](const Vec3& x) { return x.norm() < rv ? v : 0.0; });
  d.delta = constant_delta(make_sphere_mesh(a, level), alpha);
  return d;
}

/// The two distinct sphere media of the pairing experiments.
inline std::pair<SchrodingerData, SchrodingerData> pairing_media(const SuiteProfile& p) {
  return {sphere_schrodinger(1.0, 0.5, 1.0, 1.0, p.level, p.grid_n),
          sphere_schrodinger(2.0, 0.5, 2.0, 1.0, p.level, p.grid_n)};
}

/// Green pairing at k = 1, w = 0.5: same medium and direction, same medium
/// with the Sigma_k pair, and two distinct media.
inline std::vector<ExperimentReport> run_green_pairing(const SuiteProfile& p, double R = 1.6) {
  const auto [m1, m2] = pairing_media(p);
  const auto [r1, r2] = sigma_pair_for_xi(Vec3(0, 0, 1), 1.0, 0.5);
  std::vector<ExperimentReport> out;
  out.push_back(green_pairing_check(m1, m1, r1, r1, R));
  out.back().name = "green_pairing_same_medium_same_direction";
  out.push_back(green_pairing_check(m1, m1, r1, r2, R));
  out.back().name = "green_pairing_same_medium";
  out.push_back(green_pairing_check(m1, m2, r1, r2, R));
  out.back().name = "green_pairing_distinct_media";
  return out;
}

inline std::vector<ExperimentReport> run_fourier_identity(const SuiteProfile& p) {
  const auto [m1, m2] = pairing_media(p);
  std::vector<ExperimentReport> out;
  out.push_back(fourier_identity_check(m1, m1, Vec3(0, 0, 1), 0.5, 1.0));
  out.back().name = "fourier_identity_same_medium";
  out.push_back(fourier_identity_check(m1, m2, Vec3(0, 0, 1), 0.5, 1.0));
  out.back().name = "fourier_identity_distinct_media";
  return out;
}

/// Sommerfeld residual for every solved configuration family: the boundary
/// element sphere, the partial-wave oracle, a volume + surface medium, and an
/// acoustic shell medium.
inline std::vector<ExperimentReport> run_sommerfeld(const SuiteProfile& p, const std::vector<double>& radii = {4, 8, 16}) {
  std::vector<ExperimentReport> out;
  {
    const auto sol = solve_delta_system(empty_potential(), constant_delta(make_sphere_mesh(1.0, p.level), 2.0),
                                        PlaneWave{}, 2.0);
    out.push_back(sommerfeld_check(sol, radii));
    out.back().name = "sommerfeld_bem_sphere";
  }
  {
    const RadialMedium rm{1.0, 2.0, {}};
    out.push_back(sommerfeld_check(solve_partial_waves(rm, 2.0, 50), Vec3::UnitZ(), radii, rm.outer_radius()));
    out.back().name = "sommerfeld_partial_waves";
  }
  {
    const auto m = pairing_media(p).second;
    const auto sol = solve_delta_system(m.potential, m.delta, PlaneWave{Vec3(1, 1, 1).normalized()}, 1.0);
    out.push_back(sommerfeld_check(sol, radii));
    out.back().name = "sommerfeld_volume_and_surface";
  }
  {
    MediumSpec m;
    m.gamma = make_sphere_mesh(0.5, p.level);
    m.shell_density.assign(m.gamma.size(), 1.0);
    m.cutoff = RadialCutoff{1.5, 0.75};
    const auto grid = make_volume_grid(Box{Vec3::Constant(-1.5), Vec3::Constant(1.5)}, p.grid_n);
    const auto d = acoustic_to_schrodinger(m, 1.0, grid);
    const auto sol = solve_delta_system(d.potential, d.delta, PlaneWave{}, 1.0);
    out.push_back(sommerfeld_check(sol, radii));
    out.back().name = "sommerfeld_acoustic_medium";
  }
  return out;
}

/// Oracle pattern, then boundary element spheres at increasing level; the
/// last report also carries the monotonicity of the asymmetry sequence.
inline std::vector<ExperimentReport> run_reciprocity(const SuiteProfile& p) {
  const auto dirs = observation_grid(6, 12);
  std::vector<ExperimentReport> out;
  out.push_back(reciprocity_check(mie_pattern(RadialMedium{1.0, 2.0, {}}, 2.0, 50, dirs, dirs), 1e-12));
  out.back().name = "reciprocity_partial_waves";
  std::vector<double> seq;
  for (int level = std::max(1, p.recip_level - 2); level <= p.recip_level; ++level) {
    DeltaSolver solver(empty_potential(), constant_delta(make_sphere_mesh(1.0, level), 2.0), 2.0);
    auto r = reciprocity_check(compute_farfield(solver, plane_incidences(dirs, 2.0), dirs));
    r.name = "reciprocity_bem_level" + std::to_string(level);
    seq.push_back(r.value("asymmetry"));
    out.push_back(std::move(r));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < seq.size(); ++i) decreasing = decreasing && seq[i] < seq[i - 1];
  out.back().metric("decreasing_with_refinement", decreasing ? 1.0 : 0.0);
  out.back().require("decreasing_with_refinement", ">=", 1.0);
  return out;
}

/// Shell medium around a sphere of radius 0.5: shell density xi, optional
/// Gaussian bump of the sound speed.
inline MediumSpec sla_medium(int level, double xi, double v_amplitude = 0.0) {
  MediumSpec m;
  m.gamma = make_sphere_mesh(0.5, level);
  m.shell_density.assign(m.gamma.size(), xi);
  m.cutoff = RadialCutoff{2.5, 1.75};
  if (v_amplitude != 0.0) m.v_bumps.push_back(GaussianBump{v_amplitude, Vec3::Zero(), 0.5});
  return m;
}

/// Shell density 1 vs 1.5, sound-speed bump vs none, and identical media,
/// at omega = 1 and 2.
inline std::vector<ExperimentReport> run_uniqueness(const SuiteProfile& p) {
  std::vector<ExperimentReport> out;
  const auto base = [](int l) { return sla_medium(l, 1.0); };
  out.push_back(uniqueness_experiment(base, [](int l) { return sla_medium(l, 1.5); }, 1.0, 2.0, p.uniqueness));
  out.back().name = "uniqueness_shell_density";
  out.push_back(uniqueness_experiment(base, [](int l) { return sla_medium(l, 1.0, 0.5); }, 1.0, 2.0, p.uniqueness));
  out.back().name = "uniqueness_sound_speed";
  out.push_back(uniqueness_experiment(base, base, 1.0, 2.0, p.uniqueness));
  out.back().name = "uniqueness_identical";
  return out;
}

}  // namespace dscat
