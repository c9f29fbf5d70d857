// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "dscat/core.hpp"
#include "dscat/geometry.hpp"
#include "dscat/kernels.hpp"

namespace dscat {

/// Limits and switches shared by the dense solvers.
struct SolverOptions {
  std::size_t max_cells = 32 * 32 * 32;
  std::size_t max_panels = 8192;
  /// Reciprocal condition estimate below which the system is treated as singular.
  double rcond_floor = 1e-12;
  /// Panels are integrated with the centroid rule instead of the 3-point rule.
  bool centroid_rule = false;
  /// Off-diagonal panels closer than near_factor * diameter get the analytic
  /// static part; 0 disables it (plain 3-point rule off the diagonal).
  double near_factor = 2.0;
  /// Cells cut by a density interface carry the mean of the Liouville
  /// potential over subcells^3 midpoints instead of the center value.
  int potential_subcells = 3;
};

/// Potential V sampled cellwise (piecewise constant).
struct PotentialSample {
  VolumeGrid grid;
  std::vector<double> values;
  std::vector<std::string> warnings;

  std::vector<std::size_t> active_cells() const {
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] != 0.0) a.push_back(i);
    return a;
  }
};

inline PotentialSample sample_potential(const VolumeGrid& grid, const std::function<double(const Vec3&)>& v) {
  PotentialSample p{grid, std::vector<double>(grid.size(), 0.0), {}};
  std::size_t boundary_hits = 0;
  const auto n = static_cast<std::size_t>(grid.n);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double val = v(grid.cell_center(idx));
    if (!std::isfinite(val)) throw ValidationError("potential is not finite at cell " + std::to_string(idx));
    p.values[idx] = val;
    const std::size_t i = idx % n, j = (idx / n) % n, l = idx / (n * n);
    const bool boundary = i == 0 || j == 0 || l == 0 || i == n - 1 || j == n - 1 || l == n - 1;
    if (boundary && val != 0.0) ++boundary_hits;
  }
  if (boundary_hits > 0)
    p.warnings.push_back(std::to_string(boundary_hits) +
                         " boundary cell(s) carry nonzero V; the support may be clipped by the box");
  return p;
}

/// Zero potential on a nominal 2^3 grid (no volume scatterer).
inline PotentialSample empty_potential() {
  const auto g = make_volume_grid(Box{Vec3::Constant(-1.0), Vec3::Constant(1.0)}, 2);
  return PotentialSample{g, std::vector<double>(g.size(), 0.0), {}};
}

/// Total field sampled at every cell center.
struct VolumeField {
  VolumeGrid grid;
  std::vector<cplx> values;
  double residual = 0.0;
};

/// int over a cell of the kernel, seen from x. Inside the equal-volume ball
/// of the cell the closed-form ball integral is used,
///   (e^{ika}(1 - ika) j0(kd) - 1) / k^2      (a^2/2 - d^2/6 at k = 0),
/// outside it the midpoint rule.
inline cplx cell_integral(const Vec3& x, const Vec3& center, double volume, double a, double k) {
  const double d = (x - center).norm();
  if (d < a) {
    if (k == 0.0) return a * a / 2.0 - d * d / 6.0;
    const double kd = k * d;
    const double j0 = kd < 1e-8 ? 1.0 - kd * kd / 6.0 : std::sin(kd) / kd;
    return (std::exp(kI * (k * a)) * (1.0 - kI * (k * a)) * j0 - 1.0) / (k * k);
  }
  return std::exp(kI * (k * d)) / (4.0 * kPi * d) * volume;
}

inline CVec3 cell_integral_grad(const Vec3& x, const Vec3& center, double volume, double a, double k) {
  const Vec3 r = x - center;
  const double d = r.norm();
  if (d < a) {
    if (d == 0.0) return CVec3::Zero();
    if (k == 0.0) return (-1.0 / 3.0) * r.cast<cplx>();
    const double kd = k * d;
    // d/dd j0(kd) = -k j1(kd)
    const double j1 = kd < 1e-4 ? kd / 3.0 - kd * kd * kd / 30.0 : (std::sin(kd) / kd - std::cos(kd)) / kd;
    const cplx du = -(std::exp(kI * (k * a)) * (1.0 - kI * (k * a))) * j1 / k;
    return (du / d) * r.cast<cplx>();
  }
  return helmholtz_kernel_grad(x, center, k) * volume;
}

/// Dense G with G[i][j] = int_{cell j} kernel(c_i, y) dy over the given cells.
inline CMatrix assemble_volume_block(const VolumeGrid& grid, const std::vector<std::size_t>& cells, double k) {
  const auto n = static_cast<Eigen::Index>(cells.size());
  CMatrix g(n, n);
  const double a = grid.equivalent_radius();
  std::vector<Vec3> c(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) c[i] = grid.cell_center(cells[i]);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = cell_integral(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)], grid.cell_volume, a, k);
  return g;
}

inline CMatrix assemble_volume_operator(const VolumeGrid& grid, double k, const SolverOptions& opt = {}) {
  if (grid.size() > opt.max_cells)
    throw SizeError("volume grid has " + std::to_string(grid.size()) + " cells, cap is " +
                    std::to_string(opt.max_cells));
  std::vector<std::size_t> all(grid.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return assemble_volume_block(grid, all, k);
}

/// sum_j int_{cell j} kernel(x, y) dy * src_j over the listed cells.
inline cplx volume_potential(const VolumeGrid& grid, const std::vector<std::size_t>& cells,
                             const std::vector<cplx>& src, double k, const Vec3& x) {
  const double a = grid.equivalent_radius();
  cplx s = 0.0;
  for (std::size_t j = 0; j < cells.size(); ++j)
    s += cell_integral(x, grid.cell_center(cells[j]), grid.cell_volume, a, k) * src[j];
  return s;
}

inline CVec3 volume_potential_grad(const VolumeGrid& grid, const std::vector<std::size_t>& cells,
                                   const std::vector<cplx>& src, double k, const Vec3& x) {
  const double a = grid.equivalent_radius();
  CVec3 s = CVec3::Zero();
  for (std::size_t j = 0; j < cells.size(); ++j)
    s += cell_integral_grad(x, grid.cell_center(cells[j]), grid.cell_volume, a, k) * src[j];
  return s;
}

namespace detail {

inline double relative_residual(const CMatrix& a, const CVector& x, const CVector& b) {
  const double nb = b.norm();
  return (a * x - b).norm() / (nb > 0 ? nb : 1.0);
}

}  // namespace detail

/// Factorized (I + G diag(V)) restricted to cells with V != 0; solves for any
/// number of incident fields.
class VolumeSolver {
 public:
  VolumeSolver(PotentialSample v, double k, const SolverOptions& opt = {}) : v_(std::move(v)), k_(k) {
    if (!(k > 0.0)) throw ValidationError("wavenumber must be positive");
    if (v_.values.size() != v_.grid.size()) throw ValidationError("potential and grid sizes differ");
    active_ = v_.active_cells();
    if (active_.size() > opt.max_cells)
      throw SizeError("volume system has " + std::to_string(active_.size()) + " active cells, cap is " +
                      std::to_string(opt.max_cells));
    if (active_.empty()) return;
    system_ = assemble_volume_block(v_.grid, active_, k);
    for (std::size_t j = 0; j < active_.size(); ++j)
      system_.col(static_cast<Eigen::Index>(j)) *= v_.values[active_[j]];
    system_.diagonal().array() += 1.0;
    lu_.compute(system_);
    if (lu_.rcond() < opt.rcond_floor)
      throw SolverError("Lippmann-Schwinger system is numerically singular (rcond " +
                        std::to_string(lu_.rcond()) + "); perturb k");
  }

  VolumeField solve(const IncidentField& inc) const {
    VolumeField f{v_.grid, std::vector<cplx>(v_.grid.size()), 0.0};
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = eval_incident(inc, k_, v_.grid.cell_center(i));
    if (active_.empty()) return f;
    CVector rhs(static_cast<Eigen::Index>(active_.size()));
    for (std::size_t j = 0; j < active_.size(); ++j) rhs(static_cast<Eigen::Index>(j)) = f.values[active_[j]];
    const CVector psi = lu_.solve(rhs);
    f.residual = detail::relative_residual(system_, psi, rhs);
    std::vector<cplx> src(active_.size());
    for (std::size_t j = 0; j < active_.size(); ++j) {
      src[j] = v_.values[active_[j]] * psi(static_cast<Eigen::Index>(j));
      f.values[active_[j]] = psi(static_cast<Eigen::Index>(j));
    }
    // cells outside supp(V) follow from the representation formula
    std::vector<char> is_active(v_.grid.size(), 0);
    for (auto c : active_) is_active[c] = 1;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (!is_active[i]) f.values[i] -= volume_potential(v_.grid, active_, src, k_, v_.grid.cell_center(i));
    return f;
  }

  const PotentialSample& potential() const { return v_; }
  const std::vector<std::size_t>& active() const { return active_; }
  double k() const { return k_; }

 private:
  PotentialSample v_;
  double k_;
  std::vector<std::size_t> active_;
  CMatrix system_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

inline VolumeField solve_lippmann_schwinger(const PotentialSample& v, const IncidentField& inc, double k,
                                            const SolverOptions& opt = {}) {
  return VolumeSolver(v, k, opt).solve(inc);
}

/// psi(x) = psi0(x) - sum_j int_{cell j} kernel(x,y) dy V_j psi_j.
inline cplx eval_volume_field(const VolumeField& psi, const PotentialSample& v, const IncidentField& inc, double k,
                              const Vec3& x) {
  const auto act = v.active_cells();
  std::vector<cplx> src(act.size());
  for (std::size_t j = 0; j < act.size(); ++j) src[j] = v.values[act[j]] * psi.values[act[j]];
  return eval_incident(inc, k, x) - volume_potential(v.grid, act, src, k, x);
}

}  // namespace dscat
