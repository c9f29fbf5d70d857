// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dscat/core.hpp"
#include "dscat/farfield.hpp"
#include "dscat/quadrature.hpp"

namespace dscat {

inline constexpr int kMaxBesselOrder = 200;

/// j_0..j_L at complex z by normalized downward (Miller) recurrence.
inline std::vector<cplx> spherical_j_array(int L, cplx z) {
  if (L < 0 || L > kMaxBesselOrder) throw RangeError("spherical Bessel order outside 0.." + std::to_string(kMaxBesselOrder));
  std::vector<cplx> j(static_cast<std::size_t>(std::max(L, 1) + 1));
  const double az = std::abs(z);
  if (az < 1e-300) {
    std::fill(j.begin(), j.end(), cplx(0.0));
    j[0] = 1.0;
    return j;
  }
  const int top = static_cast<int>(j.size()) - 1;
  const int start = top + 20 + static_cast<int>(az) + static_cast<int>(std::sqrt(40.0 * (top + 1)));
  cplx fp1 = 0.0, f = 1e-300;
  for (int l = start; l > 0; --l) {
    const cplx fm1 = (2.0 * l + 1.0) / z * f - fp1;
    fp1 = f;
    f = fm1;
    if (l - 1 <= top) j[static_cast<std::size_t>(l - 1)] = f;
    if (std::abs(f) > 1e250) {
      const double s = 1.0 / std::abs(f);
      f *= s;
      fp1 *= s;
      for (int m = l - 1; m <= top; ++m) j[static_cast<std::size_t>(m)] *= s;
    }
  }
  cplx j0, j1;
  if (az < 1e-6) {
    j0 = 1.0 - z * z / 6.0;
    j1 = z / 3.0;
  } else {
    j0 = std::sin(z) / z;
    j1 = std::sin(z) / (z * z) - std::cos(z) / z;
  }
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / j[0] : j1 / j[1];
  for (auto& v : j) {
    v *= scale;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RangeError("spherical Bessel j overflow");
  }
  return j;
}

/// y_0..y_L at complex z by upward recurrence.
inline std::vector<cplx> spherical_y_array(int L, cplx z) {
  if (L < 0 || L > kMaxBesselOrder) throw RangeError("spherical Bessel order outside 0.." + std::to_string(kMaxBesselOrder));
  if (std::abs(z) == 0.0) throw RangeError("spherical Bessel y is singular at 0");
  std::vector<cplx> y(static_cast<std::size_t>(std::max(L, 1) + 1));
  y[0] = -std::cos(z) / z;
  y[1] = -std::cos(z) / (z * z) - std::sin(z) / z;
  for (std::size_t l = 1; l + 1 < y.size(); ++l) {
    y[l + 1] = (2.0 * static_cast<double>(l) + 1.0) / z * y[l] - y[l - 1];
    if (!std::isfinite(std::abs(y[l + 1])))
      throw RangeError("spherical Bessel y overflow at order " + std::to_string(l + 1) + ", |z| = " + std::to_string(std::abs(z)));
  }
  return y;
}

/// f'_l = f_{l-1} - (l+1) f_l / z, f'_0 = -f_1.
inline std::vector<cplx> spherical_derivatives(const std::vector<cplx>& f, cplx z) {
  std::vector<cplx> d(f.size());
  d[0] = -f[1];
  for (std::size_t l = 1; l < f.size(); ++l) d[l] = f[l - 1] - (static_cast<double>(l) + 1.0) * f[l] / z;
  return d;
}

struct BesselPair {
  cplx value;
  cplx derivative;
};

inline BesselPair spherical_bessel(int l, double x) {
  if (!(x > 0.0)) throw RangeError("spherical_bessel needs x > 0");
  const auto j = spherical_j_array(l, x);
  const auto dj = spherical_derivatives(j, x);
  return {j[static_cast<std::size_t>(l)], dj[static_cast<std::size_t>(l)]};
}

/// h^(1)_l = j_l + i y_l.
inline BesselPair spherical_hankel(int l, double x) {
  if (!(x > 0.0)) throw RangeError("spherical_hankel needs x > 0");
  const auto j = spherical_j_array(l, x);
  const auto y = spherical_y_array(l, x);
  std::vector<cplx> h(j.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = j[i] + kI * y[i];
  const auto dh = spherical_derivatives(h, x);
  return {h[static_cast<std::size_t>(l)], dh[static_cast<std::size_t>(l)]};
}

/// Radially symmetric scatterer: piecewise-constant V on shells plus a delta
/// shell of strength alpha at radius a. Shells are (outer radius, V) with
/// increasing radii; V = 0 beyond the last one. Shells may extend past a.
struct RadialMedium {
  double a = 1.0;
  double alpha = 0.0;
  std::vector<std::pair<double, double>> shells;

  void validate() const {
    if (!(a > 0.0)) throw ValidationError("radial medium: a must be positive");
    double prev = 0.0;
    for (const auto& [r, v] : shells) {
      if (!(r > prev)) throw ValidationError("radial medium: shell radii must increase");
      if (!std::isfinite(v)) throw ValidationError("radial medium: V must be finite");
      prev = r;
    }
  }

  double potential(double r) const {
    for (const auto& [ro, v] : shells)
      if (r < ro) return v;
    return 0.0;
  }

  double outer_radius() const { return std::max(a, shells.empty() ? 0.0 : shells.back().first); }
};

struct PartialWaveSolution {
  double k = 1.0;
  int L = 0;
  std::vector<cplx> t;                 ///< exterior wave j_l + t_l h_l
  std::vector<std::vector<std::pair<cplx, cplx>>> interior;  ///< per mode, per segment (A, B) of A j + B y
  std::vector<double> breakpoints;     ///< segment outer radii
  std::vector<int> failed_modes;
};

namespace detail {

struct RadialState {
  std::vector<cplx> u, du;  // per mode
};

}  // namespace detail

/// Mode-by-mode matching: u, u' continuous at shell interfaces, u'(a+) - u'(a-) = alpha u(a).
/// L is raised (to at most kMaxBesselOrder) until |t_L| < 1e-14.
inline PartialWaveSolution solve_partial_waves(const RadialMedium& m, double k, int L) {
  m.validate();
  if (!(k > 0.0)) throw ValidationError("wavenumber must be positive");
  if (L < 0) throw ValidationError("L must be >= 0");
  std::vector<double> bp;
  for (const auto& s : m.shells) bp.push_back(s.first);
  bp.push_back(m.a);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  for (;;) {
    PartialWaveSolution sol;
    sol.k = k;
    sol.L = L;
    sol.breakpoints = bp;
    sol.t.assign(static_cast<std::size_t>(L + 1), 0.0);
    sol.interior.assign(static_cast<std::size_t>(L + 1), {});
    const auto nl = static_cast<std::size_t>(L + 1);
    std::vector<cplx> u(nl), du(nl);
    double r0 = 0.0;
    for (std::size_t s = 0; s < bp.size(); ++s) {
      const double r1 = bp[s];
      const double v = m.potential(0.5 * (r0 + r1));
      const cplx kappa = std::sqrt(cplx(k * k - v, 0.0));
      const bool flat = std::abs(kappa) < 1e-12;
      std::vector<cplx> j1, y1, dj1, dy1;
      if (!flat) {
        const cplx z1 = kappa * r1;
        j1 = spherical_j_array(L, z1);
        dj1 = spherical_derivatives(j1, z1);
        if (s > 0) {
          y1 = spherical_y_array(L, z1);
          dy1 = spherical_derivatives(y1, z1);
        }
      }
      std::vector<cplx> j0v, y0v, dj0, dy0;
      if (!flat && s > 0) {
        const cplx z0 = kappa * r0;
        j0v = spherical_j_array(L, z0);
        y0v = spherical_y_array(L, z0);
        dj0 = spherical_derivatives(j0v, z0);
        dy0 = spherical_derivatives(y0v, z0);
      }
      for (std::size_t l = 0; l < nl; ++l) {
        const double dl = static_cast<double>(l);
        cplx A = 1.0, B = 0.0;
        if (s > 0) {
          if (flat) {
            // A r^l + B r^{-l-1}
            const cplx p = std::pow(r0, dl), q = std::pow(r0, -dl - 1.0);
            const cplx dp = dl * std::pow(r0, dl - 1.0), dq = (-dl - 1.0) * std::pow(r0, -dl - 2.0);
            const cplx det = p * dq - dp * q;
            A = (u[l] * dq - du[l] * q) / det;
            B = (du[l] * p - u[l] * dp) / det;
          } else {
            const cplx det = kappa * (j0v[l] * dy0[l] - dj0[l] * y0v[l]);
            A = (u[l] * kappa * dy0[l] - du[l] * y0v[l]) / det;
            B = (du[l] * j0v[l] - u[l] * kappa * dj0[l]) / det;
          }
        }
        sol.interior[l].push_back({A, B});
        if (flat) {
          u[l] = A * std::pow(r1, dl) + (s > 0 ? B * std::pow(r1, -dl - 1.0) : cplx(0.0));
          du[l] = A * dl * std::pow(r1, dl - 1.0) + (s > 0 ? B * (-dl - 1.0) * std::pow(r1, -dl - 2.0) : cplx(0.0));
        } else {
          u[l] = A * j1[l] + (s > 0 ? B * y1[l] : cplx(0.0));
          du[l] = kappa * (A * dj1[l] + (s > 0 ? B * dy1[l] : cplx(0.0)));
        }
        if (r1 == m.a) du[l] += m.alpha * u[l];
        const double sc = std::max(std::abs(u[l]), std::abs(du[l]));
        if (sc > 0 && (sc > 1e100 || sc < 1e-100)) {
          u[l] /= sc;
          du[l] /= sc;
        }
      }
      r0 = r1;
    }
    const double ro = bp.back();
    const double z = k * ro;
    const auto j = spherical_j_array(L, z);
    const auto y = spherical_y_array(L, z);
    const auto dj = spherical_derivatives(j, z);
    const auto dy = spherical_derivatives(y, z);
    for (std::size_t l = 0; l < nl; ++l) {
      const cplx h = j[l] + kI * y[l], dh = dj[l] + kI * dy[l];
      const cplx num = k * dj[l] * u[l] - du[l] * j[l];
      const cplx den = k * dh * u[l] - du[l] * h;
      if (std::abs(den) == 0.0 || !std::isfinite(std::abs(num / den))) {
        sol.failed_modes.push_back(static_cast<int>(l));
        sol.t[l] = 0.0;
        continue;
      }
      sol.t[l] = -num / den;
    }
    if (std::abs(sol.t.back()) < 1e-14 || L >= kMaxBesselOrder) return sol;
    L = std::min(kMaxBesselOrder, L + 10);
  }
}

/// psi_inf = (1/(ik)) sum (2l+1) t_l P_l(xi.x) for incident e^{ik xi.x}; the
/// exterior wave is sum i^l (2l+1) (j_l + t_l h_l) P_l.
inline cplx mie_farfield_factor(double k) { return 1.0 / (kI * k); }

inline std::vector<cplx> mie_farfield(const PartialWaveSolution& sol, const Vec3& xi_hat, const std::vector<Vec3>& obs) {
  std::vector<cplx> out(obs.size());
  const Vec3 xi = xi_hat.normalized();
  for (std::size_t o = 0; o < obs.size(); ++o) {
    const auto p = legendre_table(sol.L, std::clamp(xi.dot(obs[o].normalized()), -1.0, 1.0));
    cplx s = 0.0;
    for (int l = sol.L; l >= 0; --l)
      s += (2.0 * l + 1.0) * sol.t[static_cast<std::size_t>(l)] * p[static_cast<std::size_t>(l)];
    out[o] = mie_farfield_factor(sol.k) * s;
  }
  return out;
}

inline FarFieldPattern mie_pattern(const RadialMedium& m, double k, int L, const std::vector<Vec3>& incidence,
                                   const std::vector<Vec3>& obs) {
  const auto sol = solve_partial_waves(m, k, L);
  FarFieldPattern ff{k, plane_incidences(incidence, k), obs,
                     CMatrix(static_cast<Eigen::Index>(incidence.size()), static_cast<Eigen::Index>(obs.size()))};
  for (std::size_t i = 0; i < incidence.size(); ++i) {
    const auto row = mie_farfield(sol, incidence[i], obs);
    for (std::size_t o = 0; o < obs.size(); ++o) ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) = row[o];
  }
  return ff;
}

/// Scattered field sum i^l (2l+1) t_l h_l(kr) P_l(cos) outside the medium,
/// with its radial derivative.
struct RadialSample {
  cplx value;
  cplx radial_derivative;
};

inline RadialSample mie_scattered_field(const PartialWaveSolution& sol, const Vec3& xi_hat, const Vec3& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("mie_scattered_field: x = 0");
  const double z = sol.k * r;
  const auto j = spherical_j_array(sol.L, z);
  const auto y = spherical_y_array(sol.L, z);
  const auto dj = spherical_derivatives(j, z);
  const auto dy = spherical_derivatives(y, z);
  const auto p = legendre_table(sol.L, std::clamp(xi_hat.normalized().dot(x / r), -1.0, 1.0));
  RadialSample out{0.0, 0.0};
  cplx il = 1.0;
  for (int l = 0; l <= sol.L; ++l) {
    const auto li = static_cast<std::size_t>(l);
    const cplx c = il * (2.0 * l + 1.0) * sol.t[li] * p[li];
    out.value += c * (j[li] + kI * y[li]);
    out.radial_derivative += c * sol.k * (dj[li] + kI * dy[li]);
    il *= kI;
  }
  return out;
}

}  // namespace dscat
