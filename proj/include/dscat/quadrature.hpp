// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "dscat/core.hpp"

namespace dscat {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: n must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Legendre polynomials P_0..P_L at t by the three-term recurrence.
inline std::vector<double> legendre_table(int L, double t) {
  std::vector<double> p(static_cast<std::size_t>(L + 1));
  p[0] = 1.0;
  if (L >= 1) p[1] = t;
  for (int l = 2; l <= L; ++l)
    p[static_cast<std::size_t>(l)] =
        ((2.0 * l - 1.0) * t * p[static_cast<std::size_t>(l - 1)] -
         (l - 1.0) * p[static_cast<std::size_t>(l - 2)]) / l;
  return p;
}

/// Symmetric 3-point rule on a triangle (degree 2): barycentric points
/// (2/3,1/6,1/6) and permutations, each weight one third of the area.
inline std::array<Vec3, 3> triangle_points(const Vec3& a, const Vec3& b, const Vec3& c) {
  constexpr double s = 2.0 / 3.0, t = 1.0 / 6.0;
  return {s * a + t * b + t * c, t * a + s * b + t * c, t * a + t * b + s * c};
}

/// Closed-form potential integrals of 1/|x-y| over a flat triangle.
///
/// Edge-based formula: for each edge with outward in-plane normal u, signed
/// distance P0 from the projected point to the edge line and tangential end
/// coordinates l-, l+,
///   I = sum P0 ln((R+ + l+)/(R- + l-)) - |d| sum [atan(P0 l / (R0^2 + |d| R))]_-^+
/// with d the signed height of x above the plane. The gradient follows from
/// differentiating the same expression.
struct TrianglePotential {
  double value = 0.0;  ///< int_T 1/|x-y| dA(y)
  Vec3 grad = Vec3::Zero();  ///< gradient with respect to x
};

namespace detail {

// R + l evaluated without cancellation when l < 0, using (R + l)(R - l) = R0^2.
inline double stable_sum(double r, double l, double r02) { return l >= 0.0 ? r + l : r02 / (r - l); }

}  // namespace detail

inline TrianglePotential triangle_potential(const Vec3& x, const Vec3& v0, const Vec3& v1,
                                            const Vec3& v2, bool want_grad = false) {
  TrianglePotential out;
  Vec3 n = (v1 - v0).cross(v2 - v0);
  n.normalize();
  const double d = n.dot(x - v0);
  const double ad = std::abs(d);
  const Vec3 p = x - d * n;
  const std::array<const Vec3*, 3> v{&v0, &v1, &v2};
  const double scale = std::max({(v1 - v0).norm(), (v2 - v1).norm(), (v0 - v2).norm()});
  const double tiny = 1e-14 * scale;
  double solid = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3& a = *v[static_cast<std::size_t>(e)];
    const Vec3& b = *v[static_cast<std::size_t>((e + 1) % 3)];
    Vec3 t = b - a;
    t.normalize();
    const Vec3 u = t.cross(n);
    const double p0 = (a - p).dot(u);
    const double lp = (b - p).dot(t);
    const double lm = (a - p).dot(t);
    const double r02 = p0 * p0 + d * d;
    const double rp = (x - b).norm();
    const double rm = (x - a).norm();
    double lg = 0.0;
    if (std::sqrt(r02) > tiny)
      lg = std::log(detail::stable_sum(rp, lp, r02) / detail::stable_sum(rm, lm, r02));
    double beta = 0.0;
    if (std::abs(p0) > tiny) {
      beta = std::atan(p0 * lp / (r02 + ad * rp)) - std::atan(p0 * lm / (r02 + ad * rm));
    }
    out.value += p0 * lg - ad * beta;
    solid += beta;
    if (want_grad) out.grad -= u * lg;
  }
  if (want_grad && ad > 0.0) out.grad -= n * (d > 0 ? 1.0 : -1.0) * solid;
  return out;
}

}  // namespace dscat
