// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dscat/boundary.hpp"
#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/geometry.hpp"
#include "dscat/quadrature.hpp"
#include "dscat/volume.hpp"

namespace dscat {

/// A e^{-|x-c|^2 / s^2}.
struct GaussianBump {
  double amplitude = 0.0;
  Vec3 center = Vec3::Zero();
  double width = 1.0;

  double value(const Vec3& x) const { return amplitude * std::exp(-(x - center).squaredNorm() / (width * width)); }
  Vec3 grad(const Vec3& x) const { return (-2.0 / (width * width)) * value(x) * (x - center); }
  double laplacian(const Vec3& x) const {
    const double s2 = width * width;
    return (4.0 * (x - center).squaredNorm() / (s2 * s2) - 6.0 / s2) * value(x);
  }
};

/// Radial C^2 cutoff: 1 on B_{R - width}, 0 outside B_R, quintic smoothstep between.
struct RadialCutoff {
  double radius = 3.0;
  double width = 1.0;

  struct Sample {
    double value, dr, drr;
  };

  Sample radial(double r) const {
    const double s = (r - (radius - width)) / width;
    if (s <= 0.0) return {1.0, 0.0, 0.0};
    if (s >= 1.0) return {0.0, 0.0, 0.0};
    const double s2 = s * s, s3 = s2 * s;
    return {1.0 - (6.0 * s3 * s2 - 15.0 * s2 * s2 + 10.0 * s3), -(30.0 * s2 * s2 - 60.0 * s3 + 30.0 * s2) / width,
            -(120.0 * s3 - 180.0 * s2 + 60.0 * s) / (width * width)};
  }

  double value(const Vec3& x) const { return radial(x.norm()).value; }
};

/// rho = 1 + chi (rho_smooth + SL xi), v = 1 + chi sum(v bumps).
struct MediumSpec {
  SurfaceMesh gamma;
  std::vector<GaussianBump> rho_bumps;
  std::vector<double> shell_density;  ///< xi per panel
  RadialCutoff cutoff;
  std::vector<GaussianBump> v_bumps;

  void validate() const {
    if (shell_density.size() != gamma.size())
      throw ValidationError("shell_density must have one value per panel of gamma");
    if (!(cutoff.radius > 0.0) || !(cutoff.width > 0.0) || cutoff.width > cutoff.radius)
      throw ValidationError("cutoff needs 0 < width <= radius");
    for (const auto& v : gamma.vertices)
      if (v.norm() >= cutoff.radius - cutoff.width)
        throw ValidationError("gamma must lie inside the cutoff plateau (|x| < radius - width)");
  }

  double sound_speed(const Vec3& x) const {
    double s = 0.0;
    for (const auto& b : v_bumps) s += b.value(x);
    return 1.0 + cutoff.value(x) * s;
  }
};

struct DensitySample {
  double rho = 1.0;
  Vec3 grad = Vec3::Zero();
  double laplacian = 0.0;  ///< one-sided: the layer part is harmonic off Gamma
  bool near_surface = false;
};

inline DensitySample eval_density(const MediumSpec& m, const Vec3& x, bool with_derivatives = true) {
  const double r = x.norm();
  const auto chi = m.cutoff.radial(r);
  DensitySample out;
  if (chi.value == 0.0 && chi.dr == 0.0) return out;
  double base = 0.0, lap = 0.0;
  Vec3 grad = Vec3::Zero();
  for (const auto& b : m.rho_bumps) {
    base += b.value(x);
    if (with_derivatives) {
      grad += b.grad(x);
      lap += b.laplacian(x);
    }
  }
  // static layer integrated in closed form on every panel, so rho is smooth off Gamma
  const auto& g = m.gamma;
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (m.shell_density[q] == 0.0) continue;
    const auto tp = triangle_potential(x, g.vertex(q, 0), g.vertex(q, 1), g.vertex(q, 2), with_derivatives);
    base += m.shell_density[q] * tp.value / (4.0 * kPi);
    if (with_derivatives) grad += m.shell_density[q] * tp.grad / (4.0 * kPi);
    if ((x - g.centroid[q]).norm() <= 0.25 * g.diameter[q]) out.near_surface = true;
  }
  out.rho = 1.0 + chi.value * base;
  if (with_derivatives) {
    const Vec3 rhat = r > 0 ? Vec3(x / r) : Vec3::Zero();
    const Vec3 dchi = chi.dr * rhat;
    const double lchi = chi.drr + (r > 0 ? 2.0 * chi.dr / r : 0.0);
    out.grad = dchi * base + chi.value * grad;
    out.laplacian = lchi * base + 2.0 * dchi.dot(grad) + chi.value * lap;
  }
  return out;
}

/// Schrodinger data for one frequency: V = V_phi + V_v, alpha per panel.
struct SchrodingerData {
  PotentialSample potential;
  std::vector<double> v_phi;   ///< Delta phi / phi per cell
  std::vector<double> v_speed; ///< 1 - 1/v^2 per cell (times omega^2 gives V_v)
  DeltaSpec delta;
  double omega = 1.0;
  std::vector<std::string> warnings;
};

/// V_phi = Delta phi / phi for phi = rho^{-1/2}, through rho derivatives:
/// (-1/2 Delta rho / rho^{3/2} + 3/4 |grad rho|^2 / rho^{5/2}) rho^{1/2}.
inline double liouville_potential(const DensitySample& d) {
  return (-0.5 * d.laplacian / std::pow(d.rho, 1.5) + 0.75 * d.grad.squaredNorm() / std::pow(d.rho, 2.5)) *
         std::sqrt(d.rho);
}

/// alpha per panel: [gamma_1] phi / gamma_0 phi = chi xi / (2 gamma_0 rho),
/// since the jump of the layer part of rho is -chi xi.
inline std::vector<double> shell_strength(const MediumSpec& m) {
  std::vector<double> alpha(m.gamma.size(), 0.0);
  for (std::size_t q = 0; q < m.gamma.size(); ++q) {
    if (m.shell_density[q] == 0.0) continue;
    const double rho = eval_density(m, m.gamma.centroid[q], false).rho;
    if (!(rho > 0.0))
      throw ValidationError("medium validity: rho = " + std::to_string(rho) + " <= 0 on panel " + std::to_string(q));
    alpha[q] = 0.5 * m.cutoff.value(m.gamma.centroid[q]) * m.shell_density[q] / rho;
  }
  return alpha;
}

inline SchrodingerData acoustic_to_schrodinger(const MediumSpec& m, double omega, const VolumeGrid& grid,
                                               const SolverOptions& opt = {}) {
  m.validate();
  if (!(omega > 0.0)) throw ValidationError("omega must be positive");
  const double need = m.cutoff.radius;
  if (grid.bbox.lo.maxCoeff() > -need || grid.bbox.hi.minCoeff() < need)
    throw ValidationError("volume grid must cover the cutoff ball B_R, R = " + std::to_string(need));
  SchrodingerData d;
  d.omega = omega;
  d.potential.grid = grid;
  d.potential.values.assign(grid.size(), 0.0);
  d.v_phi.assign(grid.size(), 0.0);
  d.v_speed.assign(grid.size(), 0.0);
  std::size_t near = 0;
  const int sub = std::max(1, opt.potential_subcells);
  const double reach = 0.5 * grid.step.norm() + m.gamma.max_diameter();
  auto cut_by_gamma = [&](const Vec3& c) {
    for (const auto& y : m.gamma.centroid)
      if ((c - y).norm() < reach) return true;
    return false;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 c = grid.cell_center(i);
    if (c.norm() >= m.cutoff.radius) continue;
    const auto ds = eval_density(m, c, true);
    if (!(ds.rho > 0.0))
      throw ValidationError("medium validity: rho = " + std::to_string(ds.rho) + " <= 0 at cell " + std::to_string(i));
    if (ds.near_surface) ++near;
    const double v = m.sound_speed(c);
    if (!(v > 0.0)) throw ValidationError("medium validity: sound speed <= 0 at cell " + std::to_string(i));
    d.v_phi[i] = liouville_potential(ds);
    if (sub > 1 && cut_by_gamma(c)) {
      double acc = 0.0;
      for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b)
          for (int e = 0; e < sub; ++e) {
            const Vec3 off((a + 0.5) / sub - 0.5, (b + 0.5) / sub - 0.5, (e + 0.5) / sub - 0.5);
            const auto dsub = eval_density(m, c + off.cwiseProduct(grid.step), true);
            if (!(dsub.rho > 0.0))
              throw ValidationError("medium validity: rho = " + std::to_string(dsub.rho) + " <= 0 near cell " +
                                    std::to_string(i));
            acc += liouville_potential(dsub);
          }
      d.v_phi[i] = acc / (sub * sub * sub);
    }
    d.v_speed[i] = 1.0 - 1.0 / (v * v);
    d.potential.values[i] = d.v_phi[i] + omega * omega * d.v_speed[i];
  }
  if (near > 0)
    d.warnings.push_back(std::to_string(near) + " cell center(s) within a quarter panel diameter of gamma (near-field accuracy)");
  d.delta = DeltaSpec{m.gamma, shell_strength(m)};
  return d;
}

/// u = sqrt(rho) psi.
inline cplx schrodinger_to_acoustic_field(cplx psi, double rho) {
  if (!(rho > 0.0)) throw ValidationError("medium validity: rho must be positive");
  return std::sqrt(rho) * psi;
}

/// End to end: Schrodinger data, one factorization, source-route far field.
/// rho = 1 outside the cutoff ball, so the acoustic far field is psi_inf.
inline FarFieldPattern acoustic_farfield(const MediumSpec& m, double omega, const VolumeGrid& grid,
                                         const std::vector<Vec3>& incidence, const std::vector<Vec3>& obs,
                                         const SolverOptions& opt = {}) {
  const auto data = acoustic_to_schrodinger(m, omega, grid, opt);
  DeltaSolver solver(data.potential, data.delta, omega, opt);
  return compute_farfield(solver, plane_incidences(incidence, omega), obs);
}

}  // namespace dscat
