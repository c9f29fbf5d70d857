// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "dscat/core.hpp"
#include "dscat/geometry.hpp"
#include "dscat/kernels.hpp"
#include "dscat/quadrature.hpp"
#include "dscat/volume.hpp"

namespace dscat {

/// Surface strength alpha, piecewise constant per panel, standing for
/// alpha * delta_Gamma.
struct DeltaSpec {
  SurfaceMesh mesh;
  std::vector<double> alpha;

  /// Discrete L^p(Gamma) norm (sum |alpha|^p area)^{1/p}.
  double lp_norm(double p = 4.0) const {
    double s = 0.0;
    for (std::size_t q = 0; q < alpha.size(); ++q) s += std::pow(std::abs(alpha[q]), p) * mesh.area[q];
    return std::pow(s, 1.0 / p);
  }

  bool empty() const { return mesh.size() == 0; }
};

inline DeltaSpec constant_delta(SurfaceMesh mesh, double alpha) {
  std::vector<double> a(mesh.size(), alpha);
  return DeltaSpec{std::move(mesh), std::move(a)};
}

inline DeltaSpec empty_delta() { return DeltaSpec{}; }

namespace detail {

// (e^{ikR} - 1) / (4 pi R), bounded at R = 0
inline cplx smooth_kernel(double r, double k) {
  const double kr = k * r;
  if (kr < 1e-6) return (kI * k - 0.5 * k * kr) / (4.0 * kPi);
  return (std::exp(kI * kr) - 1.0) / (4.0 * kPi * r);
}

// derivative of smooth_kernel with respect to R
inline cplx smooth_kernel_dr(double r, double k) {
  const double kr = k * r;
  if (kr < 1e-4) return (-0.5 * k * k - kI * (k * k * kr / 3.0)) / (4.0 * kPi);
  const cplx e = std::exp(kI * kr);
  return (kI * kr * e - (e - 1.0)) / (4.0 * kPi * r * r);
}

}  // namespace detail

/// int_{panel q} kernel(x, y) dsigma(y). Near the panel (and on it) the 1/R
/// part is integrated in closed form and only the bounded remainder
/// (e^{ikR}-1)/(4 pi R) goes through the 3-point rule.
inline cplx panel_integral(const SurfaceMesh& m, std::size_t q, const Vec3& x, double k,
                           const SolverOptions& opt = {}) {
  const double dist = (x - m.centroid[q]).norm();
  const bool near = dist < std::max(opt.near_factor, 1e-12) * m.diameter[q];
  if (near) {
    const auto tp = triangle_potential(x, m.vertex(q, 0), m.vertex(q, 1), m.vertex(q, 2));
    cplx s = tp.value / (4.0 * kPi);
    if (k != 0.0) {
      const auto pts = m.quad_points(q);
      for (const auto& y : pts) s += m.area[q] / 3.0 * detail::smooth_kernel((x - y).norm(), k);
    }
    return s;
  }
  if (opt.centroid_rule) return helmholtz_kernel(x, m.centroid[q], k) * m.area[q];
  const auto pts = m.quad_points(q);
  cplx s = 0.0;
  for (const auto& y : pts) s += helmholtz_kernel(x, y, k);
  return s * (m.area[q] / 3.0);
}

inline CVec3 panel_integral_grad(const SurfaceMesh& m, std::size_t q, const Vec3& x, double k,
                                 const SolverOptions& opt = {}) {
  const double dist = (x - m.centroid[q]).norm();
  const bool near = dist < std::max(opt.near_factor, 1e-12) * m.diameter[q];
  if (near) {
    const auto tp = triangle_potential(x, m.vertex(q, 0), m.vertex(q, 1), m.vertex(q, 2), true);
    CVec3 g = (tp.grad / (4.0 * kPi)).cast<cplx>();
    if (k != 0.0) {
      for (const auto& y : m.quad_points(q)) {
        const Vec3 d = x - y;
        const double r = d.norm();
        if (r > 0) g += (m.area[q] / 3.0 * detail::smooth_kernel_dr(r, k) / r) * d.cast<cplx>();
      }
    }
    return g;
  }
  if (opt.centroid_rule) return helmholtz_kernel_grad(x, m.centroid[q], k) * m.area[q];
  CVec3 g = CVec3::Zero();
  for (const auto& y : m.quad_points(q)) g += helmholtz_kernel_grad(x, y, k);
  return g * (m.area[q] / 3.0);
}

/// S[i][j] = int_{panel j} kernel(c_i, y) dsigma(y), collocated at centroids.
inline CMatrix assemble_single_layer(const SurfaceMesh& m, double k, const SolverOptions& opt = {}) {
  if (m.size() > opt.max_panels)
    throw SizeError("mesh has " + std::to_string(m.size()) + " panels, cap is " + std::to_string(opt.max_panels));
  const auto n = static_cast<Eigen::Index>(m.size());
  CMatrix s(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      s(i, j) = panel_integral(m, static_cast<std::size_t>(j), m.centroid[static_cast<std::size_t>(i)], k, opt);
  return s;
}

/// Single-layer potential of a per-panel density at x.
inline cplx single_layer(const SurfaceMesh& m, const std::vector<cplx>& density, const Vec3& x, double k,
                         const SolverOptions& opt = {}) {
  cplx s = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q) s += panel_integral(m, q, x, k, opt) * density[q];
  return s;
}

inline CVec3 single_layer_grad(const SurfaceMesh& m, const std::vector<cplx>& density, const Vec3& x, double k,
                               const SolverOptions& opt = {}) {
  CVec3 g = CVec3::Zero();
  for (std::size_t q = 0; q < m.size(); ++q) g += panel_integral_grad(m, q, x, k, opt) * density[q];
  return g;
}

/// Shared scatterer description: potential on a grid plus the delta shell.
struct Scatterer {
  PotentialSample potential;
  DeltaSpec delta;
  std::vector<std::size_t> active;  ///< cells with V != 0
};

/// Per-panel density eta = alpha * trace (the jump of the normal derivative).
struct BoundaryDensity {
  std::vector<cplx> eta;
  std::vector<cplx> trace;  ///< gamma_0 of the total field at panel centroids
};

struct DeltaSolution {
  std::shared_ptr<const Scatterer> scatterer;
  IncidentField incident;
  double k = 1.0;
  SolverOptions options;
  BoundaryDensity density;
  VolumeField volume_field;
  std::vector<cplx> active_psi;  ///< total field on the active cells, solver order
  double residual = 0.0;

  const SurfaceMesh& mesh() const { return scatterer->delta.mesh; }
  const PotentialSample& potential() const { return scatterer->potential; }
};

namespace detail {

inline std::vector<cplx> volume_sources(const Scatterer& s, const std::vector<cplx>& psi) {
  std::vector<cplx> src(s.active.size());
  for (std::size_t j = 0; j < s.active.size(); ++j) src[j] = s.potential.values[s.active[j]] * psi[j];
  return src;
}

}  // namespace detail

struct FieldSample {
  cplx value;
  bool near_surface = false;  ///< x within a quarter panel diameter of a centroid
};

/// Scattered part psi - psi0 = -sum G V psi vol - sum SL eta at x.
inline cplx eval_scattered_field(const DeltaSolution& sol, const Vec3& x) {
  const Scatterer& s = *sol.scatterer;
  cplx v = 0.0;
  if (!s.active.empty())
    v -= volume_potential(s.potential.grid, s.active, detail::volume_sources(s, sol.active_psi), sol.k, x);
  if (!s.delta.empty()) v -= single_layer(s.delta.mesh, sol.density.eta, x, sol.k, sol.options);
  return v;
}

inline CVec3 eval_scattered_gradient(const DeltaSolution& sol, const Vec3& x) {
  const Scatterer& s = *sol.scatterer;
  CVec3 g = CVec3::Zero();
  if (!s.active.empty())
    g -= volume_potential_grad(s.potential.grid, s.active, detail::volume_sources(s, sol.active_psi), sol.k, x);
  if (!s.delta.empty()) g -= single_layer_grad(s.delta.mesh, sol.density.eta, x, sol.k, sol.options);
  return g;
}

inline FieldSample eval_total_field(const DeltaSolution& sol, const Vec3& x) {
  FieldSample f{eval_incident(sol.incident, sol.k, x) + eval_scattered_field(sol, x), false};
  const auto& m = sol.mesh();
  for (std::size_t q = 0; q < m.size(); ++q)
    if ((x - m.centroid[q]).norm() <= 0.25 * m.diameter[q]) {
      f.near_surface = true;
      break;
    }
  return f;
}

inline CVec3 eval_total_gradient(const DeltaSolution& sol, const Vec3& x) {
  return eval_incident_grad(sol.incident, sol.k, x) + eval_scattered_gradient(sol, x);
}

/// Coupled volume/surface system in the unknowns (psi on cells with V != 0,
/// eta on panels):
///   psi_i + sum_j G_ij V_j psi_j + sum_q SL_iq eta_q        = psi0(c_i)
///   eta_q + alpha_q (sum_j Tr_qj V_j psi_j + sum_p S_qp eta_p) = alpha_q psi0(c_q)
/// so that eta = alpha * gamma_0(psi) at the panel centroids.
class DeltaSolver {
 public:
  DeltaSolver(PotentialSample v, DeltaSpec delta, double k, const SolverOptions& opt = {}) : k_(k), opt_(opt) {
    if (!(k > 0.0)) throw ValidationError("wavenumber must be positive");
    if (delta.alpha.size() != delta.mesh.size()) throw ValidationError("alpha must have one value per panel");
    for (double a : delta.alpha)
      if (!std::isfinite(a)) throw ValidationError("alpha is not finite");
    if (v.values.size() != v.grid.size()) throw ValidationError("potential and grid sizes differ");
    if (delta.mesh.size() > opt.max_panels)
      throw SizeError("mesh has " + std::to_string(delta.mesh.size()) + " panels, cap is " +
                      std::to_string(opt.max_panels));
    auto s = std::make_shared<Scatterer>();
    s->active = v.active_cells();
    s->potential = std::move(v);
    s->delta = std::move(delta);
    if (s->active.size() > opt.max_cells)
      throw SizeError("volume system has " + std::to_string(s->active.size()) + " active cells, cap is " +
                      std::to_string(opt.max_cells));
    scat_ = s;
    assemble();
  }

  DeltaSolution solve(const IncidentField& inc) const {
    const Scatterer& s = *scat_;
    const auto nc = static_cast<Eigen::Index>(s.active.size());
    const auto np = static_cast<Eigen::Index>(s.delta.mesh.size());
    const auto& grid = s.potential.grid;
    const auto& mesh = s.delta.mesh;
    CVector rhs(nc + np);
    CVector inc_panel(np);
    for (Eigen::Index i = 0; i < nc; ++i) rhs(i) = eval_incident(inc, k_, grid.cell_center(s.active[static_cast<std::size_t>(i)]));
    for (Eigen::Index q = 0; q < np; ++q) {
      inc_panel(q) = eval_incident(inc, k_, mesh.centroid[static_cast<std::size_t>(q)]);
      rhs(nc + q) = s.delta.alpha[static_cast<std::size_t>(q)] * inc_panel(q);
    }
    DeltaSolution sol;
    sol.scatterer = scat_;
    sol.incident = inc;
    sol.k = k_;
    sol.options = opt_;
    CVector x = CVector::Zero(nc + np);
    if (nc + np > 0) {
      x = lu_.solve(rhs);
      sol.residual = detail::relative_residual(system_, x, rhs);
    }
    sol.active_psi.assign(x.data(), x.data() + nc);
    sol.density.eta.assign(x.data() + nc, x.data() + nc + np);
    // traces: psi0 - Tr V psi - S eta
    if (np > 0) {
      CVector tr = inc_panel - s_ * x.tail(np);
      if (nc > 0) tr -= trv_ * x.head(nc);
      sol.density.trace.assign(tr.data(), tr.data() + np);
    }
    // total field on every cell
    sol.volume_field.grid = grid;
    sol.volume_field.values.resize(grid.size());
    std::vector<char> is_active(grid.size(), 0);
    for (std::size_t j = 0; j < s.active.size(); ++j) {
      is_active[s.active[j]] = 1;
      sol.volume_field.values[s.active[j]] = sol.active_psi[j];
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!is_active[i]) sol.volume_field.values[i] = eval_total_field(sol, grid.cell_center(i)).value;
    sol.volume_field.residual = sol.residual;
    return sol;
  }

  const std::shared_ptr<const Scatterer>& scatterer() const { return scat_; }
  double rcond() const { return rcond_; }
  double k() const { return k_; }
  const SolverOptions& options() const { return opt_; }

 private:
  void assemble() {
    const Scatterer& s = *scat_;
    const auto nc = static_cast<Eigen::Index>(s.active.size());
    const auto np = static_cast<Eigen::Index>(s.delta.mesh.size());
    const auto& grid = s.potential.grid;
    const auto& mesh = s.delta.mesh;
    const double a = grid.equivalent_radius();
    std::vector<Vec3> cc(s.active.size());
    for (std::size_t i = 0; i < cc.size(); ++i) cc[i] = grid.cell_center(s.active[i]);

    system_ = CMatrix::Zero(nc + np, nc + np);
    if (nc > 0) {
      system_.topLeftCorner(nc, nc) = assemble_volume_block(grid, s.active, k_);
      for (Eigen::Index j = 0; j < nc; ++j) system_.col(j).head(nc) *= s.potential.values[s.active[static_cast<std::size_t>(j)]];
    }
    if (np > 0) {
      s_ = assemble_single_layer(mesh, k_, opt_);
      system_.bottomRightCorner(np, np) = s_;
      for (Eigen::Index q = 0; q < np; ++q) system_.row(nc + q).tail(np) *= s.delta.alpha[static_cast<std::size_t>(q)];
    }
    if (nc > 0 && np > 0) {
      trv_.resize(np, nc);
#pragma omp parallel for schedule(static)
      for (Eigen::Index i = 0; i < nc; ++i) {
        const auto& ci = cc[static_cast<std::size_t>(i)];
        const double vi = s.potential.values[s.active[static_cast<std::size_t>(i)]];
        for (Eigen::Index q = 0; q < np; ++q) {
          const auto qq = static_cast<std::size_t>(q);
          system_(i, nc + q) = panel_integral(mesh, qq, ci, k_, opt_);
          trv_(q, i) = cell_integral(mesh.centroid[qq], ci, grid.cell_volume, a, k_) * vi;
        }
      }
      for (Eigen::Index q = 0; q < np; ++q)
        system_.row(nc + q).head(nc) = s.delta.alpha[static_cast<std::size_t>(q)] * trv_.row(q);
    }
    system_.diagonal().array() += 1.0;
    if (nc + np == 0) return;
    lu_.compute(system_);
    rcond_ = lu_.rcond();
    if (rcond_ < opt_.rcond_floor)
      throw SolverError("discrete exceptional frequency: coupled system is numerically singular (rcond " +
                        std::to_string(rcond_) + "); perturb k");
  }

  std::shared_ptr<const Scatterer> scat_;
  double k_;
  SolverOptions opt_;
  CMatrix system_;
  CMatrix s_;    ///< single-layer block
  CMatrix trv_;  ///< Tr * diag(V): volume sources traced at panel centroids
  Eigen::PartialPivLU<CMatrix> lu_;
  double rcond_ = 1.0;
};

inline DeltaSolution solve_delta_system(const PotentialSample& v, const DeltaSpec& delta, const IncidentField& inc,
                                        double k, const SolverOptions& opt = {}) {
  return DeltaSolver(v, delta, k, opt).solve(inc);
}

/// Operator-composition route, kept for cross-validation at small sizes:
///   psi^V = (I + G V)^{-1} psi0,  X = (I + G V)^{-1} SL,
///   gamma_0 SL^V = S - Tr V X,
///   eta = (1 + alpha gamma_0 SL^V)^{-1} alpha gamma_0 psi^V,
///   psi = psi^V - X eta.
/// Returns the total field on the active cells and eta.
inline std::pair<CVector, CVector> solve_delta_composed(const PotentialSample& v, const DeltaSpec& delta,
                                                        const IncidentField& inc, double k,
                                                        const SolverOptions& opt = {}) {
  const auto act = v.active_cells();
  const auto nc = static_cast<Eigen::Index>(act.size());
  const auto np = static_cast<Eigen::Index>(delta.mesh.size());
  const auto& grid = v.grid;
  const double a = grid.equivalent_radius();
  CMatrix m = CMatrix::Identity(nc, nc);
  if (nc > 0) {
    CMatrix g = assemble_volume_block(grid, act, k);
    for (Eigen::Index j = 0; j < nc; ++j) g.col(j) *= v.values[act[static_cast<std::size_t>(j)]];
    m = CMatrix::Identity(nc, nc) + g;
  }
  CMatrix sl(nc, np), tr(np, nc);
  for (Eigen::Index i = 0; i < nc; ++i)
    for (Eigen::Index q = 0; q < np; ++q) {
      const Vec3 ci = grid.cell_center(act[static_cast<std::size_t>(i)]);
      sl(i, q) = panel_integral(delta.mesh, static_cast<std::size_t>(q), ci, k, opt);
      tr(q, i) = cell_integral(delta.mesh.centroid[static_cast<std::size_t>(q)], ci, grid.cell_volume, a, k) *
                 v.values[act[static_cast<std::size_t>(i)]];
    }
  CVector psi0(nc), inc_panel(np);
  for (Eigen::Index i = 0; i < nc; ++i) psi0(i) = eval_incident(inc, k, grid.cell_center(act[static_cast<std::size_t>(i)]));
  for (Eigen::Index q = 0; q < np; ++q) inc_panel(q) = eval_incident(inc, k, delta.mesh.centroid[static_cast<std::size_t>(q)]);
  Eigen::PartialPivLU<CMatrix> lu;
  CVector psi_v = psi0;
  CMatrix x = CMatrix::Zero(nc, np);
  if (nc > 0) {
    lu.compute(m);
    psi_v = lu.solve(psi0);
    x = lu.solve(sl);
  }
  const CMatrix s = assemble_single_layer(delta.mesh, k, opt);
  CMatrix gsl = s;
  if (nc > 0) gsl -= tr * x;
  CVector trace_v = inc_panel;
  if (nc > 0) trace_v -= tr * psi_v;
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(delta.alpha.data(), np);
  CMatrix lhs = CMatrix::Identity(np, np) + alpha.cast<cplx>().asDiagonal() * gsl;
  const CVector eta = lhs.partialPivLu().solve(alpha.cast<cplx>().asDiagonal() * trace_v);
  CVector psi = psi_v;
  if (nc > 0) psi -= x * eta;
  return {psi, eta};
}

/// Relative error of the single-layer jump relation [d_n SL xi] = -xi,
/// with the normal derivative taken by central differences at c_q +- delta n_q,
/// delta = delta_factor * panel diameter.
inline double check_jump_relation(const SurfaceMesh& m, double k, const std::vector<cplx>& xi,
                                  double delta_factor = 0.1, const SolverOptions& opt = {}) {
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q) {
    const double d = delta_factor * m.diameter[q];
    const double h = 0.5 * d;
    const Vec3& c = m.centroid[q];
    const Vec3& n = m.normal[q];
    auto dn = [&](const Vec3& p) {
      return (single_layer(m, xi, p + h * n, k, opt) - single_layer(m, xi, p - h * n, k, opt)) / (2.0 * h);
    };
    const cplx jump = dn(c + d * n) - dn(c - d * n);
    num += std::norm(jump + xi[q]) * m.area[q];
    den += std::norm(xi[q]) * m.area[q];
  }
  return std::sqrt(num / den);
}

}  // namespace dscat
