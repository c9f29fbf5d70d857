// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dscat/acoustic.hpp"
#include "dscat/boundary.hpp"
#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/geometry.hpp"
#include "dscat/kernels.hpp"
#include "dscat/mie.hpp"

namespace dscat {

/// A bound on one reported metric: value <= bound or value >= bound.
struct Threshold {
  std::string metric;
  std::string relation;  ///< "<=" or ">="
  double bound = 0.0;
  bool pass = false;
};

/// Outcome of one certification experiment. Every asserted metric carries
/// its threshold; metrics without one are reported only.
struct ExperimentReport {
  std::string name;
  std::string inputs_digest;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Threshold> thresholds;
  std::vector<std::string> notes;
  bool pass = true;
  double seconds = 0.0;

  void input(const std::string& key, const std::string& value) { inputs.emplace_back(key, value); }
  void input(const std::string& key, double value) { inputs.emplace_back(key, format_double(value)); }

  void metric(const std::string& key, double value) { metrics.emplace_back(key, value); }

  double value(const std::string& key) const {
    for (const auto& [k, v] : metrics)
      if (k == key) return v;
    throw ValidationError("report " + name + " has no metric " + key);
  }

  bool has_metric(const std::string& key) const {
    for (const auto& m : metrics)
      if (m.first == key) return true;
    return false;
  }

  /// Asserts a reported metric; NaN never passes.
  void require(const std::string& key, const std::string& relation, double bound) {
    const double v = value(key);
    Threshold t{key, relation, bound, false};
    if (relation == "<=")
      t.pass = v <= bound;
    else if (relation == ">=")
      t.pass = v >= bound;
    else
      throw ValidationError("unknown threshold relation " + relation);
    pass = pass && t.pass;
    thresholds.push_back(t);
  }

  static std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

/// Incremental FNV-1a over the numeric inputs of an experiment.
class InputDigest {
 public:
  InputDigest& add(double v) {
    h_ = fnv1a(&v, sizeof v, h_);
    return *this;
  }
  InputDigest& add(std::uint64_t v) {
    h_ = fnv1a(&v, sizeof v, h_);
    return *this;
  }
  InputDigest& add(const std::string& s) {
    h_ = fnv1a(s.data(), s.size(), h_);
    return *this;
  }
  InputDigest& add(const std::vector<double>& v) {
    if (!v.empty()) h_ = fnv1a(v.data(), v.size() * sizeof(double), h_);
    return add(static_cast<std::uint64_t>(v.size()));
  }
  InputDigest& add(const Vec3& v) { return add(v(0)).add(v(1)).add(v(2)); }
  InputDigest& add(const CVec3& v) {
    for (int i = 0; i < 3; ++i) add(v(i).real()).add(v(i).imag());
    return *this;
  }
  InputDigest& add(const VolumeGrid& g) {
    return add(g.bbox.lo).add(g.bbox.hi).add(static_cast<std::uint64_t>(g.n));
  }
  InputDigest& add(const SchrodingerData& m) {
    return add(m.potential.grid).add(m.potential.values).add(m.delta.mesh.digest()).add(m.delta.alpha);
  }
  InputDigest& add(const MediumSpec& m) {
    add(m.gamma.digest()).add(m.shell_density).add(m.cutoff.radius).add(m.cutoff.width);
    for (const auto* bumps : {&m.rho_bumps, &m.v_bumps}) {
      add(static_cast<std::uint64_t>(bumps->size()));
      for (const auto& b : *bumps) add(b.amplitude).add(b.center).add(b.width);
    }
    return *this;
  }

  std::string hex() const { return hex64(h_); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline bool same_operator(const SchrodingerData& a, const SchrodingerData& b) {
  return a.potential.grid == b.potential.grid && a.potential.values == b.potential.values &&
         a.delta.mesh.digest() == b.delta.mesh.digest() && a.delta.alpha == b.delta.alpha;
}

/// Total field of `sol` at the centroids of `mesh`: its own traces when the
/// mesh is its own Gamma, otherwise the representation formula, which must
/// not be evaluated on or next to the solution's own surface.
inline std::vector<cplx> trace_on(const DeltaSolution& sol, const SurfaceMesh& mesh) {
  if (mesh.size() == 0) return {};
  if (sol.mesh().size() == mesh.size() && sol.mesh().digest() == mesh.digest()) return sol.density.trace;
  std::vector<cplx> t(mesh.size());
  for (std::size_t q = 0; q < mesh.size(); ++q) {
    const auto f = eval_total_field(sol, mesh.centroid[q]);
    if (f.near_surface)
      throw ValidationError("overlapping-support misconfiguration: the two surfaces intersect or touch near panel " +
                            std::to_string(q));
    t[q] = f.value;
  }
  return t;
}

/// Collocation nodes of <psi1 (V~1 - V~2), psi2> with conjugation on psi1:
/// cells where V1 != V2 (weight (V1 - V2) vol) and the panels of both
/// surfaces (weights +alpha1 area and -alpha2 area, merged on a shared mesh).
struct PairingNodes {
  std::vector<Vec3> x;
  std::vector<double> weight;
  std::vector<cplx> psi1, psi2;
  std::size_t n_cells = 0;
};

inline PairingNodes pairing_nodes(const DeltaSolution& s1, const DeltaSolution& s2) {
  const auto& g1 = s1.potential().grid;
  const auto& g2 = s2.potential().grid;
  if (!(g1 == g2)) throw ValidationError("pairing needs both potentials sampled on the same volume grid");
  PairingNodes p;
  const auto& v1 = s1.potential().values;
  const auto& v2 = s2.potential().values;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double dv = v1[i] - v2[i];
    if (dv == 0.0) continue;
    p.x.push_back(g1.cell_center(i));
    p.weight.push_back(dv * g1.cell_volume);
    p.psi1.push_back(s1.volume_field.values[i]);
    p.psi2.push_back(s2.volume_field.values[i]);
  }
  p.n_cells = p.x.size();
  const auto& m1 = s1.mesh();
  const auto& m2 = s2.mesh();
  const auto& a1 = s1.scatterer->delta.alpha;
  const auto& a2 = s2.scatterer->delta.alpha;
  const bool shared = m1.size() > 0 && m1.size() == m2.size() && m1.digest() == m2.digest();
  if (shared) {
    for (std::size_t q = 0; q < m1.size(); ++q) {
      const double da = a1[q] - a2[q];
      if (da == 0.0) continue;
      p.x.push_back(m1.centroid[q]);
      p.weight.push_back(da * m1.area[q]);
      p.psi1.push_back(s1.density.trace[q]);
      p.psi2.push_back(s2.density.trace[q]);
    }
    return p;
  }
  const auto t21 = trace_on(s2, m1);
  for (std::size_t q = 0; q < m1.size(); ++q) {
    if (a1[q] == 0.0) continue;
    p.x.push_back(m1.centroid[q]);
    p.weight.push_back(a1[q] * m1.area[q]);
    p.psi1.push_back(s1.density.trace[q]);
    p.psi2.push_back(t21[q]);
  }
  const auto t12 = trace_on(s1, m2);
  for (std::size_t q = 0; q < m2.size(); ++q) {
    if (a2[q] == 0.0) continue;
    p.x.push_back(m2.centroid[q]);
    p.weight.push_back(-a2[q] * m2.area[q]);
    p.psi1.push_back(t12[q]);
    p.psi2.push_back(s2.density.trace[q]);
  }
  return p;
}

inline IncidentField exponential_incidence(const ComplexDirection& d) {
  return d.is_plane_wave() ? IncidentField(PlaneWave{d.xi_hat}) : IncidentField(Exponential{d});
}

}  // namespace detail

/// Quadrature of the sphere Wronskian.
struct PairingOptions {
  int n_theta = 32;
  int n_phi = 64;
  /// Relative tolerance of the Green-identity match (distinct media).
  double green_tolerance = 1e-2;
  /// Tolerance of the identically-zero pairings.
  double exact_tolerance = 1e-10;
  SolverOptions solver;
};

/// Green pairing between two solutions at the same k:
///   LHS = sum conj(psi1)(V1 - V2) psi2 vol + sum [conj(eta1) gamma0 psi2 - conj(gamma0 psi1) eta2] area
///   RHS = int_{|x|=R} [psi2 d_r conj(psi1) - conj(psi1) d_r psi2]
inline ExperimentReport green_pairing_check(const DeltaSolution& s1, const DeltaSolution& s2, double R,
                                            const PairingOptions& po = {}) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "green_pairing";
  if (std::abs(s1.k - s2.k) > 1e-14 * s1.k) throw ValidationError("green pairing: both solutions need the same k");
  const double need = std::max(scatterer_radius(*s1.scatterer), scatterer_radius(*s2.scatterer));
  if (!(R > need))
    throw ValidationError("green pairing: B_R must contain both scatterers (R = " + std::to_string(R) +
                          ", scatterer radius " + std::to_string(need) + ")");
  const bool same_op = s1.scatterer == s2.scatterer ||
                       (s1.potential().grid == s2.potential().grid &&
                        s1.potential().values == s2.potential().values &&
                        s1.mesh().digest() == s2.mesh().digest() &&
                        s1.scatterer->delta.alpha == s2.scatterer->delta.alpha);

  // LHS from the densities, as in the pairing of the two delta potentials
  const auto& g = s1.potential().grid;
  if (!(g == s2.potential().grid)) throw ValidationError("pairing needs both potentials sampled on the same volume grid");
  cplx lhs = 0.0;
  double lhs_scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dv = s1.potential().values[i] - s2.potential().values[i];
    if (dv == 0.0) continue;
    const cplx t = std::conj(s1.volume_field.values[i]) * dv * s2.volume_field.values[i] * g.cell_volume;
    lhs += t;
    lhs_scale += std::abs(t);
  }
  const auto& m1 = s1.mesh();
  const auto& m2 = s2.mesh();
  const auto t21 = detail::trace_on(s2, m1);
  for (std::size_t q = 0; q < m1.size(); ++q) {
    const cplx t = std::conj(s1.density.eta[q]) * t21[q] * m1.area[q];
    lhs += t;
    lhs_scale += std::abs(t);
  }
  const auto t12 = detail::trace_on(s1, m2);
  for (std::size_t q = 0; q < m2.size(); ++q) {
    const cplx t = std::conj(t12[q]) * s2.density.eta[q] * m2.area[q];
    lhs -= t;
    lhs_scale += std::abs(t);
  }

  // RHS on the sphere
  const auto sg = make_sphere_grid(R, po.n_theta, po.n_phi);
  cplx rhs = 0.0;
  double rhs_scale = 0.0;
  for (std::size_t m = 0; m < sg.size(); ++m) {
    const Vec3& x = sg.nodes[m];
    const Vec3& n = sg.normals[m];
    const cplx p1 = eval_total_field(s1, x).value;
    const cplx p2 = eval_total_field(s2, x).value;
    const cplx d1 = bilinear_dot(eval_total_gradient(s1, x), n);
    const cplx d2 = bilinear_dot(eval_total_gradient(s2, x), n);
    const cplx a = p2 * std::conj(d1), b = std::conj(p1) * d2;
    rhs += sg.weights[m] * (a - b);
    rhs_scale += sg.weights[m] * (std::abs(a) + std::abs(b));
  }

  r.input("k", s1.k);
  r.input("R", R);
  r.input("same_operator", same_op ? "true" : "false");
  r.input("sphere_grid", std::to_string(po.n_theta) + "x" + std::to_string(po.n_phi));
  InputDigest dig;
  dig.add(s1.k).add(R).add(s1.potential().values).add(s2.potential().values);
  dig.add(s1.mesh().digest()).add(s1.scatterer->delta.alpha);
  dig.add(s2.mesh().digest()).add(s2.scatterer->delta.alpha);
  r.inputs_digest = dig.hex();

  r.metric("lhs_re", lhs.real());
  r.metric("lhs_im", lhs.imag());
  r.metric("rhs_re", rhs.real());
  r.metric("rhs_im", rhs.imag());
  r.metric("lhs_scale", lhs_scale);
  r.metric("rhs_scale", rhs_scale);
  const double denom = std::abs(lhs) + std::abs(rhs) + 1e-300;
  r.metric("relative_mismatch", std::abs(lhs - rhs) / denom);
  r.metric("lhs_relative_to_scale", std::abs(lhs) / (lhs_scale + 1e-300));
  r.metric("rhs_relative_to_scale", std::abs(rhs) / (rhs_scale + 1e-300));
  if (same_op) {
    // same operator: the pairing vanishes algebraically, the Wronskian to discretization accuracy
    r.require("lhs_relative_to_scale", "<=", po.exact_tolerance);
    r.require("rhs_relative_to_scale", "<=", po.green_tolerance);
    r.notes.push_back("same operator: LHS vanishes identically; RHS is a discrete flux, zero only to discretization accuracy");
  } else {
    r.require("relative_mismatch", "<=", po.green_tolerance);
  }
  r.seconds = sw.seconds();
  return r;
}

/// Solves both media under exponential incidence e^{rho_m . x} and pairs them.
inline ExperimentReport green_pairing_check(const SchrodingerData& m1, const SchrodingerData& m2,
                                            const ComplexDirection& rho1, const ComplexDirection& rho2, double R,
                                            const PairingOptions& po = {}) {
  detail::Stopwatch sw;
  if (std::abs(rho1.k - rho2.k) > 1e-14 * rho1.k) throw ValidationError("green pairing: rho1, rho2 need the same k");
  const double k = rho1.k;
  const DeltaSolver solver1(m1.potential, m1.delta, k, po.solver);
  const auto s1 = solver1.solve(detail::exponential_incidence(rho1));
  DeltaSolution s2;
  if (detail::same_operator(m1, m2)) {
    s2 = solver1.solve(detail::exponential_incidence(rho2));
  } else {
    s2 = DeltaSolver(m2.potential, m2.delta, k, po.solver).solve(detail::exponential_incidence(rho2));
  }
  auto r = green_pairing_check(s1, s2, R, po);
  InputDigest dig;
  dig.add(m1).add(m2).add(rho1.rho).add(rho2.rho).add(R);
  r.inputs_digest = dig.hex();
  r.input("rho1", "w=" + ExperimentReport::format_double(rho1.w));
  r.input("rho2", "w=" + ExperimentReport::format_double(rho2.w));
  r.seconds = sw.seconds();
  return r;
}

/// Term-by-term split of <psi1 (V~1 - V~2), psi2> for the Sigma_k pair with
/// conj(rho1) + rho2 = -i xi, psi_m = e^{rho_m . x}(1 + phi_m):
///   pairing = <V~1 - V~2, u_xi> + F_xi,
///   F_xi = <V~1 - V~2, u_xi (conj phi1 + phi2)> + <phi1 (V~1 - V~2), u_xi phi2>.
inline ExperimentReport fourier_identity_check(const SchrodingerData& m1, const SchrodingerData& m2, const Vec3& xi,
                                               double w, double k, const SolverOptions& opt = {}) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "fourier_identity";
  const auto [rho1, rho2] = sigma_pair_for_xi(xi, k, w);
  const DeltaSolver solver1(m1.potential, m1.delta, k, opt);
  const auto s1 = solver1.solve(Exponential{rho1});
  const DeltaSolution s2 = detail::same_operator(m1, m2)
                               ? solver1.solve(Exponential{rho2})
                               : DeltaSolver(m2.potential, m2.delta, k, opt).solve(Exponential{rho2});
  const auto nodes = detail::pairing_nodes(s1, s2);

  cplx pairing = 0.0, fourier_term = 0.0, f_linear = 0.0, f_quadratic = 0.0;
  double scale = 0.0, u_defect = 0.0;
  for (std::size_t j = 0; j < nodes.x.size(); ++j) {
    const Vec3& x = nodes.x[j];
    const cplx e1 = std::exp(bilinear_dot(rho1.rho, x));
    const cplx e2 = std::exp(bilinear_dot(rho2.rho, x));
    const cplx u = std::conj(e1) * e2;
    u_defect = std::max(u_defect, std::abs(u - std::exp(-kI * xi.dot(x))));
    const cplx phi1 = nodes.psi1[j] / e1 - 1.0;
    const cplx phi2 = nodes.psi2[j] / e2 - 1.0;
    const double wt = nodes.weight[j];
    const cplx direct = std::conj(nodes.psi1[j]) * wt * nodes.psi2[j];
    pairing += direct;
    fourier_term += wt * u;
    f_linear += wt * u * (std::conj(phi1) + phi2);
    f_quadratic += std::conj(phi1) * wt * u * phi2;
    scale += std::abs(direct) + std::abs(wt * u) + std::abs(wt * u * (std::conj(phi1) + phi2)) +
             std::abs(std::conj(phi1) * wt * u * phi2);
  }
  const cplx f_xi = f_linear + f_quadratic;

  // direct quadrature of hat(V~2)(xi) - hat(V~1)(xi)
  cplx fourier_diff = 0.0;
  const auto& g = m1.potential.grid;
  if (!(g == m2.potential.grid)) throw ValidationError("fourier identity needs both potentials on the same grid");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dv = m2.potential.values[i] - m1.potential.values[i];
    if (dv != 0.0) fourier_diff += dv * std::exp(-kI * xi.dot(g.cell_center(i))) * g.cell_volume;
  }
  auto surface = [&](const DeltaSpec& d, double sign) {
    for (std::size_t q = 0; q < d.mesh.size(); ++q) {
      if (d.alpha[q] == 0.0) continue;
      for (const auto& y : d.mesh.quad_points(q))
        fourier_diff += sign * d.alpha[q] * (d.mesh.area[q] / 3.0) * std::exp(-kI * xi.dot(y));
    }
  };
  surface(m2.delta, 1.0);
  surface(m1.delta, -1.0);

  InputDigest dig;
  dig.add(m1).add(m2).add(xi).add(w).add(k);
  r.inputs_digest = dig.hex();
  r.input("k", k);
  r.input("w", w);
  r.input("xi", ExperimentReport::format_double(xi(0)) + "," + ExperimentReport::format_double(xi(1)) + "," +
                    ExperimentReport::format_double(xi(2)));
  const cplx split = fourier_term + f_xi;
  r.metric("pairing_re", pairing.real());
  r.metric("pairing_im", pairing.imag());
  r.metric("fourier_term_re", fourier_term.real());
  r.metric("fourier_term_im", fourier_term.imag());
  r.metric("f_xi_re", f_xi.real());
  r.metric("f_xi_im", f_xi.imag());
  r.metric("f_xi_abs", std::abs(f_xi));
  r.metric("split_error", std::abs(pairing - split) / (scale > 0 ? scale : 1.0));
  r.metric("u_xi_defect", u_defect);
  r.metric("fourier_difference_re", fourier_diff.real());
  r.metric("fourier_difference_im", fourier_diff.imag());
  r.metric("finite_w_remainder", std::abs(f_xi - fourier_diff));
  r.require("split_error", "<=", 1e-10);
  r.require("u_xi_defect", "<=", 1e-10);
  r.notes.push_back("finite_w_remainder = |F_xi - (hat V~2 - hat V~1)(xi)| is reported, not asserted: it vanishes only along w -> infinity");
  r.seconds = sw.seconds();
  return r;
}

/// Sample of a scattered field and its radial derivative at a point.
using RadialProbe = std::function<std::pair<cplx, cplx>(const Vec3&)>;

/// max over the 26-direction sphere rule of |r (d_r - ik) psi_sc| at each
/// radius; requires a decrease by >= 1.8 per doubling of r.
inline ExperimentReport sommerfeld_check(const RadialProbe& probe, double k, const std::vector<double>& radii,
                                         double min_radius = 0.0) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "sommerfeld";
  if (radii.size() < 2) throw ValidationError("sommerfeld check needs at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > min_radius))
      throw ValidationError("sommerfeld check: radius " + std::to_string(radii[i]) + " is inside the scatterer ball");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ValidationError("sommerfeld check: radii must increase");
  }
  const auto dirs = lebedev26();
  std::vector<double> res;
  for (double rad : radii) {
    double m = 0.0;
    for (const auto& d : dirs.normals) {
      const auto [v, dv] = probe(rad * d);
      m = std::max(m, std::abs(rad * (dv - kI * k * v)));
    }
    res.push_back(m);
    r.metric("residual_r" + ExperimentReport::format_double(rad), m);
  }
  r.input("k", k);
  InputDigest dig;
  dig.add(k).add(radii);
  r.inputs_digest = dig.hex();
  if (res.front() == 0.0) {
    r.metric("max_residual", 0.0);
    r.require("max_residual", "<=", 0.0);
    r.notes.push_back("zero scattered field");
  } else {
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
      const double doublings = std::log2(radii[i + 1] / radii[i]);
      const std::string key = "decay_ratio_" + std::to_string(i);
      r.metric(key, res[i] / res[i + 1]);
      r.require(key, ">=", std::pow(1.8, doublings));
    }
  }
  r.seconds = sw.seconds();
  return r;
}

inline ExperimentReport sommerfeld_check(const DeltaSolution& sol, const std::vector<double>& radii) {
  auto probe = [&sol](const Vec3& x) {
    const Vec3 rhat = x.normalized();
    return std::pair<cplx, cplx>{eval_scattered_field(sol, x), bilinear_dot(eval_scattered_gradient(sol, x), rhat)};
  };
  auto r = sommerfeld_check(probe, sol.k, radii, scatterer_radius(*sol.scatterer));
  r.input("source", "delta_solution");
  return r;
}

inline ExperimentReport sommerfeld_check(const PartialWaveSolution& mie, const Vec3& xi_hat,
                                         const std::vector<double>& radii, double outer_radius) {
  auto probe = [&](const Vec3& x) {
    const auto s = mie_scattered_field(mie, xi_hat, x);
    return std::pair<cplx, cplx>{s.value, s.radial_derivative};
  };
  auto r = sommerfeld_check(probe, mie.k, radii, outer_radius);
  r.input("source", "partial_waves");
  return r;
}

/// s(xi, x) against s(-x, -xi) on a pattern whose incidence and observation
/// grids coincide and are closed under x -> -x.
inline ExperimentReport reciprocity_check(const FarFieldPattern& ff, double tolerance = 1e-2) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "reciprocity";
  const std::size_t n = ff.observations.size();
  if (ff.incidence.size() != n || static_cast<std::size_t>(ff.values.rows()) != n ||
      static_cast<std::size_t>(ff.values.cols()) != n)
    throw ValidationError("reciprocity: incidence and observation grids differ (grid mismatch)");
  for (std::size_t i = 0; i < n; ++i) {
    if (!ff.incidence[i].is_plane_wave()) throw ValidationError("reciprocity: incidences must be plane waves");
    if ((ff.incidence[i].xi_hat - ff.observations[i]).norm() > 1e-9)
      throw ValidationError("reciprocity: incidence and observation grids differ (grid mismatch) at " + std::to_string(i));
  }
  std::vector<std::size_t> anti(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j)
      if ((ff.observations[j] + ff.observations[i]).norm() < 1e-9) best = j;
    if (best == n) throw ValidationError("reciprocity: grid is not closed under x -> -x (grid mismatch)");
    anti[i] = best;
  }
  double num = 0.0;
  const double den = n > 0 ? ff.values.cwiseAbs().maxCoeff() : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < n; ++o) {
      const auto a = ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o));
      const auto b = ff.values(static_cast<Eigen::Index>(anti[o]), static_cast<Eigen::Index>(anti[i]));
      num = std::max(num, std::abs(a - b));
    }
  r.input("k", ff.k);
  r.input("directions", static_cast<double>(n));
  InputDigest dig;
  dig.add(ff.k);
  for (const auto& o : ff.observations) dig.add(o);
  for (Eigen::Index i = 0; i < ff.values.size(); ++i) dig.add(ff.values(i).real()).add(ff.values(i).imag());
  r.inputs_digest = dig.hex();
  r.metric("asymmetry", den > 0 ? num / den : 0.0);
  r.require("asymmetry", "<=", tolerance);
  r.seconds = sw.seconds();
  return r;
}

/// Medium at a given surface refinement level.
using MediumFamily = std::function<MediumSpec(int level)>;

struct UniquenessOptions {
  int coarse_level = 2;
  int fine_level = 3;
  int coarse_n = 12;  ///< volume cells per axis at the coarse resolution
  int fine_n = 16;
  int incidence_theta = 2;
  int incidence_phi = 4;
  int obs_theta = 8;
  int obs_phi = 16;
  double separation = 10.0;  ///< distinct media need D >= separation * N
  SolverOptions solver;
};

/// Far field of an acoustic medium on a grid covering the cutoff ball.
inline FarFieldPattern medium_farfield(const MediumSpec& m, double omega, int n, const std::vector<Vec3>& inc,
                                       const std::vector<Vec3>& obs, const SolverOptions& opt = {}) {
  const double h = m.cutoff.radius;
  const auto grid = make_volume_grid(Box{Vec3::Constant(-h), Vec3::Constant(h)}, n);
  return acoustic_farfield(m, omega, grid, inc, obs, opt);
}

/// Discrimination of two media by far fields at two frequencies against the
/// mesh-refinement noise floor N (same medium, coarse vs fine).
inline ExperimentReport uniqueness_experiment(const MediumFamily& a, const MediumFamily& b, double omega,
                                              double omega2, const UniquenessOptions& uo = {}) {
  detail::Stopwatch sw;
  ExperimentReport r;
  r.name = "uniqueness";
  if (!(omega > 0.0) || !(omega2 > 0.0) || omega == omega2)
    throw ValidationError("uniqueness experiment needs two distinct positive frequencies");
  const MediumSpec a_fine = a(uo.fine_level), a_coarse = a(uo.coarse_level);
  const MediumSpec b_fine = b(uo.fine_level), b_coarse = b(uo.coarse_level);
  for (const auto* m : {&a_fine, &a_coarse, &b_fine, &b_coarse}) m->validate();
  InputDigest da, db;
  da.add(a_fine);
  db.add(b_fine);
  const bool identical = da.value() == db.value();
  InputDigest dig;
  dig.add(a_fine).add(b_fine).add(omega).add(omega2);
  r.inputs_digest = dig.hex();
  r.input("omega", omega);
  r.input("omega2", omega2);
  r.input("media_identical", identical ? "true" : "false");
  r.input("resolutions", "level " + std::to_string(uo.coarse_level) + "/n " + std::to_string(uo.coarse_n) + " vs level " +
                             std::to_string(uo.fine_level) + "/n " + std::to_string(uo.fine_n));
  const auto inc = observation_grid(uo.incidence_theta, uo.incidence_phi);
  const auto obs = observation_grid(uo.obs_theta, uo.obs_phi);
  std::vector<double> d_values;
  for (const double w : {omega, omega2}) {
    const std::string tag = w == omega ? "omega" : "omega2";
    const auto fa = medium_farfield(a_fine, w, uo.fine_n, inc, obs, uo.solver);
    const auto fa_c = medium_farfield(a_coarse, w, uo.coarse_n, inc, obs, uo.solver);
    double noise = pattern_distance(fa, fa_c).l2;
    double dist = 0.0;
    if (!identical) {
      const auto fb = medium_farfield(b_fine, w, uo.fine_n, inc, obs, uo.solver);
      const auto fb_c = medium_farfield(b_coarse, w, uo.coarse_n, inc, obs, uo.solver);
      noise = std::max(noise, pattern_distance(fb, fb_c).l2);
      dist = pattern_distance(fa, fb).l2;
    }
    r.metric("D_" + tag, dist);
    r.metric("N_" + tag, noise);
    r.metric("D_over_N_" + tag, noise > 0 ? dist / noise : (dist > 0 ? INFINITY : 0.0));
    d_values.push_back(dist);
    if (identical) {
      r.metric("N_minus_D_" + tag, noise - dist);
      r.require("N_minus_D_" + tag, ">=", 0.0);
    } else {
      r.require("D_over_N_" + tag, ">=", uo.separation);
    }
  }
  if (!identical && d_values[0] > 0) {
    r.metric("D_ratio", d_values[1] / d_values[0]);
    r.metric("omega_squared_ratio", (omega2 * omega2) / (omega * omega));
  }
  r.seconds = sw.seconds();
  return r;
}

}  // namespace dscat
