// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dscat/boundary.hpp"
#include "dscat/core.hpp"
#include "dscat/geometry.hpp"
#include "dscat/kernels.hpp"

namespace dscat {

/// psi_inf tabulated as values(incidence, observation).
struct FarFieldPattern {
  double k = 1.0;
  std::vector<ComplexDirection> incidence;
  std::vector<Vec3> observations;
  CMatrix values;
};

/// (theta, phi) of a unit vector, phi in [0, 2 pi).
inline std::pair<double, double> spherical_angles(const Vec3& d) {
  const double theta = std::acos(std::clamp(d(2) / d.norm(), -1.0, 1.0));
  double phi = std::atan2(d(1), d(0));
  if (phi < 0) phi += 2.0 * kPi;
  return {theta, phi};
}

inline Vec3 unit_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Equiangular grid theta_i = (i + 1/2) pi / n_theta, phi_j = 2 pi j / n_phi.
/// With n_phi even it is closed under x -> -x.
inline std::vector<Vec3> observation_grid(int n_theta = 16, int n_phi = 32) {
  if (n_theta < 1 || n_phi < 1) throw ValidationError("observation grid needs n_theta, n_phi >= 1");
  std::vector<Vec3> g;
  g.reserve(static_cast<std::size_t>(n_theta * n_phi));
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) g.push_back(unit_from_angles((i + 0.5) * kPi / n_theta, 2.0 * kPi * j / n_phi));
  return g;
}

/// Radius of the smallest origin-centered ball holding Gamma and supp(V).
inline double scatterer_radius(const Scatterer& s) {
  double r = 0.0;
  const auto& grid = s.potential.grid;
  const double half_diag = 0.5 * grid.step.norm();
  for (auto c : s.active) r = std::max(r, grid.cell_center(c).norm() + half_diag);
  for (const auto& v : s.delta.mesh.vertices) r = std::max(r, v.norm());
  return r;
}

/// Far field of the source representation,
///   psi_inf(x) = -(1/4 pi)[sum_j e^{-ik x.c_j} V_j psi_j vol + int_Gamma e^{-ik x.y} eta],
/// with the surface part on the same panel rule as the field evaluation.
inline std::vector<cplx> farfield_source(const DeltaSolution& sol, const std::vector<Vec3>& obs) {
  const Scatterer& s = *sol.scatterer;
  const auto& grid = s.potential.grid;
  const auto& mesh = s.delta.mesh;
  const double k = sol.k;
  std::vector<Vec3> cc(s.active.size());
  for (std::size_t j = 0; j < cc.size(); ++j) cc[j] = grid.cell_center(s.active[j]);
  std::vector<cplx> out(obs.size());
#pragma omp parallel for schedule(static)
  for (std::size_t o = 0; o < obs.size(); ++o) {
    const Vec3& x = obs[o];
    cplx acc = 0.0;
    for (std::size_t j = 0; j < cc.size(); ++j)
      acc += std::exp(-kI * (k * x.dot(cc[j]))) * (s.potential.values[s.active[j]] * sol.active_psi[j]) * grid.cell_volume;
    for (std::size_t q = 0; q < mesh.size(); ++q) {
      cplx e = 0.0;
      if (sol.options.centroid_rule) {
        e = std::exp(-kI * (k * x.dot(mesh.centroid[q])));
      } else {
        for (const auto& y : mesh.quad_points(q)) e += std::exp(-kI * (k * x.dot(y))) / 3.0;
      }
      acc += e * sol.density.eta[q] * mesh.area[q];
    }
    out[o] = -acc / (4.0 * kPi);
  }
  return out;
}

struct KirchhoffOptions {
  int n_theta = 32;
  int n_phi = 64;
  /// Radial derivative from the differentiated representation instead of
  /// central differences.
  bool analytic_gradient = false;
};

/// Far field from the scattered field on a sphere of radius r_outer:
///   psi_inf(x) = (1/4 pi) int (psi_sc d_r e^{-ik x.y} - e^{-ik x.y} d_r psi_sc) dsigma.
inline std::vector<cplx> farfield_kirchhoff(const DeltaSolution& sol, double r_outer, const std::vector<Vec3>& obs,
                                            const KirchhoffOptions& ko = {}) {
  const double need = scatterer_radius(*sol.scatterer);
  if (!(r_outer > need))
    throw ValidationError("Kirchhoff sphere radius " + std::to_string(r_outer) +
                          " does not enclose the scatterer (radius " + std::to_string(need) + ")");
  const auto sg = make_sphere_grid(r_outer, ko.n_theta, ko.n_phi);
  const double h = std::min(1e-3, r_outer * 1e-4);
  const double k = sol.k;
  std::vector<cplx> val(sg.size()), dr(sg.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t m = 0; m < sg.size(); ++m) {
    const Vec3& y = sg.nodes[m];
    const Vec3& n = sg.normals[m];
    val[m] = eval_scattered_field(sol, y);
    if (ko.analytic_gradient) {
      const CVec3 g = eval_scattered_gradient(sol, y);
      dr[m] = g(0) * n(0) + g(1) * n(1) + g(2) * n(2);
    } else {
      dr[m] = (eval_scattered_field(sol, y + h * n) - eval_scattered_field(sol, y - h * n)) / (2.0 * h);
    }
  }
  std::vector<cplx> out(obs.size());
  for (std::size_t o = 0; o < obs.size(); ++o) {
    const Vec3& x = obs[o];
    cplx acc = 0.0;
    for (std::size_t m = 0; m < sg.size(); ++m) {
      const cplx e = std::exp(-kI * (k * x.dot(sg.nodes[m])));
      const cplx de = -kI * k * x.dot(sg.normals[m]) * e;
      acc += sg.weights[m] * (val[m] * de - e * dr[m]);
    }
    out[o] = acc / (4.0 * kPi);
  }
  return out;
}

enum class FarFieldRoute { Source, Kirchhoff };

/// One factorization, one solve per incidence, one far-field row each.
inline FarFieldPattern compute_farfield(const DeltaSolver& solver, const std::vector<ComplexDirection>& incidence,
                                        const std::vector<Vec3>& obs, FarFieldRoute route = FarFieldRoute::Source,
                                        double r_outer = 0.0, const KirchhoffOptions& ko = {}) {
  FarFieldPattern ff{solver.k(), incidence, obs, CMatrix(static_cast<Eigen::Index>(incidence.size()),
                                                         static_cast<Eigen::Index>(obs.size()))};
  for (std::size_t i = 0; i < incidence.size(); ++i) {
    const auto& d = incidence[i];
    const IncidentField inc = d.is_plane_wave() ? IncidentField(PlaneWave{d.xi_hat}) : IncidentField(Exponential{d});
    const auto sol = solver.solve(inc);
    const auto row = route == FarFieldRoute::Source ? farfield_source(sol, obs) : farfield_kirchhoff(sol, r_outer, obs, ko);
    for (std::size_t o = 0; o < obs.size(); ++o) ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) = row[o];
  }
  return ff;
}

inline std::vector<ComplexDirection> plane_incidences(const std::vector<Vec3>& dirs, double k) {
  std::vector<ComplexDirection> v;
  v.reserve(dirs.size());
  for (const auto& d : dirs) v.push_back(plane_direction(d, k));
  return v;
}

inline constexpr double kAmplitudeFactor = 15.749609945722419;  // (2 pi)^{3/2}

/// s = (2 pi)^{3/2} psi_inf; plane-wave incidence only.
inline FarFieldPattern scattering_amplitude(const FarFieldPattern& ff) {
  for (const auto& d : ff.incidence)
    if (!d.is_plane_wave()) throw ValidationError("scattering amplitude is defined for plane-wave incidence only (w > 0 row)");
  FarFieldPattern s = ff;
  s.values *= kAmplitudeFactor;
  return s;
}

/// Relative L2 and max distances between two patterns on identical grids.
struct PatternDistance {
  double l2 = 0.0;
  double max = 0.0;
};

inline PatternDistance pattern_distance(const FarFieldPattern& a, const FarFieldPattern& b, double grid_tol = 1e-9) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw ValidationError("far-field grids differ in shape");
  for (std::size_t o = 0; o < a.observations.size() && o < b.observations.size(); ++o)
    if ((a.observations[o] - b.observations[o]).norm() > grid_tol) throw ValidationError("observation grids differ");
  for (std::size_t i = 0; i < a.incidence.size() && i < b.incidence.size(); ++i)
    if ((a.incidence[i].rho - b.incidence[i].rho).norm() > grid_tol * (1.0 + a.incidence[i].rho.norm()))
      throw ValidationError("incidence grids differ");
  const double na = a.values.norm();
  const double ma = a.values.cwiseAbs().maxCoeff();
  PatternDistance d;
  const CMatrix diff = a.values - b.values;
  d.l2 = na > 0 ? diff.norm() / na : diff.norm();
  d.max = ma > 0 ? diff.cwiseAbs().maxCoeff() / ma : diff.cwiseAbs().maxCoeff();
  return d;
}

}  // namespace dscat
