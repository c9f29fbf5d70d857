// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dscat/core.hpp"
#include "dscat/geometry.hpp"

namespace dscat {

/// Outgoing free-space kernel e^{ik|x-y|} / (4 pi |x-y|).
inline cplx helmholtz_kernel(const Vec3& x, const Vec3& y, double k) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw DomainError("helmholtz_kernel: coincident points");
  return std::exp(kI * (k * r)) / (4.0 * kPi * r);
}

/// Gradient of the kernel with respect to x.
inline CVec3 helmholtz_kernel_grad(const Vec3& x, const Vec3& y, double k) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (!(r > 0.0)) throw DomainError("helmholtz_kernel_grad: coincident points");
  const cplx f = (kI * (k * r) - 1.0) * std::exp(kI * (k * r)) / (4.0 * kPi * r * r * r);
  return f * d.cast<cplx>();
}

/// Element of Sigma_k = {rho in C^3 : rho.rho = -k^2}, kept with its
/// parametrization rho = w zeta + i sqrt(w^2 + k^2) xi.
struct ComplexDirection {
  CVec3 rho = CVec3::Zero();
  double w = 0.0;
  Vec3 zeta_hat = Vec3::UnitX();
  Vec3 xi_hat = Vec3::UnitZ();
  double k = 1.0;

  bool is_plane_wave() const { return w == 0.0 && rho.real().isZero(0.0); }
};

inline ComplexDirection make_sigma_k(double w, const Vec3& zeta_hat, const Vec3& xi_hat, double k) {
  if (!(k > 0.0)) throw ValidationError("make_sigma_k: k must be positive");
  if (!(w >= 0.0)) throw ValidationError("make_sigma_k: w must be nonnegative");
  if (std::abs(zeta_hat.norm() - 1.0) > 1e-10 || std::abs(xi_hat.norm() - 1.0) > 1e-10 ||
      std::abs(zeta_hat.dot(xi_hat)) > 1e-10)
    throw ValidationError("make_sigma_k: zeta_hat and xi_hat must be orthonormal");
  ComplexDirection d;
  d.w = w;
  d.zeta_hat = zeta_hat;
  d.xi_hat = xi_hat;
  d.k = k;
  d.rho = w * zeta_hat.cast<cplx>() + kI * std::sqrt(w * w + k * k) * xi_hat.cast<cplx>();
  return d;
}

/// Plane wave e^{ik xi.x} as the w = 0 member of Sigma_k.
inline ComplexDirection plane_direction(const Vec3& xi_hat, double k) {
  Vec3 xi = xi_hat.normalized();
  Vec3 helper = std::abs(xi(0)) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 zeta = (helper - helper.dot(xi) * xi).normalized();
  return make_sigma_k(0.0, zeta, xi, k);
}

/// Complex direction from an arbitrary rho (used for the pair construction,
/// whose members are not of the w zeta + i s xi form with the same zeta).
inline ComplexDirection direction_from_rho(const CVec3& rho, double k) {
  ComplexDirection d;
  d.rho = rho;
  d.k = k;
  const Vec3 re = rho.real(), im = rho.imag();
  d.w = re.norm();
  d.zeta_hat = d.w > 0 ? Vec3(re / d.w) : Vec3::UnitX();
  d.xi_hat = im.norm() > 0 ? Vec3(im.normalized()) : Vec3::UnitZ();
  return d;
}

/// Pair (rho1, rho2) in Sigma_k x Sigma_k with conj(rho1) + rho2 = -i xi:
///   rho1 = w mu + i( xi/2 + s nu),  rho2 = -w mu + i(-xi/2 + s nu),
/// mu, nu, xi mutually orthogonal, s = sqrt(w^2 + k^2 - |xi|^2/4).
inline std::pair<ComplexDirection, ComplexDirection> sigma_pair_for_xi(const Vec3& xi, double k, double w) {
  if (!(k > 0.0) || !(w >= 0.0)) throw ValidationError("sigma_pair_for_xi: need k > 0, w >= 0");
  const double s2 = w * w + k * k - 0.25 * xi.squaredNorm();
  if (s2 < -1e-14 * (k * k + xi.squaredNorm()))
    throw ValidationError("insufficient w for this xi: need w^2 + k^2 >= |xi|^2/4");
  const double s = std::sqrt(std::max(0.0, s2));
  Vec3 nu, mu;
  if (xi.norm() == 0.0) {
    nu = Vec3::UnitZ();
    mu = Vec3::UnitX();
  } else {
    const Vec3 xh = xi.normalized();
    int axis = 0;
    xh.cwiseAbs().minCoeff(&axis);
    const Vec3 e = Vec3::Unit(axis);
    nu = (e - e.dot(xh) * xh).normalized();
    mu = xh.cross(nu);
  }
  const CVec3 r1 = w * mu.cast<cplx>() + kI * (0.5 * xi + s * nu).cast<cplx>();
  const CVec3 r2 = -w * mu.cast<cplx>() + kI * (-0.5 * xi + s * nu).cast<cplx>();
  return {direction_from_rho(r1, k), direction_from_rho(r2, k)};
}

struct PlaneWave {
  Vec3 direction = Vec3::UnitZ();
};

struct Exponential {
  ComplexDirection dir;
};

/// Herglotz wave H_k f(x) = int_{S^2} f(d) e^{ik d.x} dsigma(d), discretized
/// on a unit-radius SphereGrid.
struct Herglotz {
  SphereGrid directions;
  std::vector<cplx> density;
};

using IncidentField = std::variant<PlaneWave, Exponential, Herglotz>;

/// Largest |Re(rho.x)| accepted before exp overflow is considered a risk.
inline constexpr double kMaxGrowthExponent = 40.0;

namespace detail {

inline cplx exp_checked(const CVec3& rho, const Vec3& x) {
  const cplx e = bilinear_dot(rho, x);
  if (std::abs(e.real()) > kMaxGrowthExponent)
    throw DomainError("exponential incident field: |Re(rho.x)| = " + std::to_string(std::abs(e.real())) +
                      " exceeds the overflow guard; reduce w or the domain size");
  return std::exp(e);
}

}  // namespace detail

inline cplx eval_incident(const IncidentField& f, double k, const Vec3& x) {
  return std::visit(
      [&](const auto& v) -> cplx {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          return std::exp(kI * (k * v.direction.dot(x)));
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return detail::exp_checked(v.dir.rho, x);
        } else {
          cplx s = 0.0;
          for (std::size_t m = 0; m < v.directions.size(); ++m)
            s += v.directions.weights[m] * v.density[m] * std::exp(kI * (k * v.directions.normals[m].dot(x)));
          return s;
        }
      },
      f);
}

inline CVec3 eval_incident_grad(const IncidentField& f, double k, const Vec3& x) {
  return std::visit(
      [&](const auto& v) -> CVec3 {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          return (kI * k * std::exp(kI * (k * v.direction.dot(x)))) * v.direction.template cast<cplx>();
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return detail::exp_checked(v.dir.rho, x) * v.dir.rho;
        } else {
          CVec3 g = CVec3::Zero();
          for (std::size_t m = 0; m < v.directions.size(); ++m) {
            const Vec3& d = v.directions.normals[m];
            g += (v.directions.weights[m] * v.density[m] * kI * k * std::exp(kI * (k * d.dot(x)))) * d.template cast<cplx>();
          }
          return g;
        }
      },
      f);
}

/// Herglotz wave on a fresh unit SphereGrid with density f(direction).
template <class F>
Herglotz make_herglotz(int n_theta, int n_phi, F&& density) {
  Herglotz h{make_sphere_grid(1.0, n_theta, n_phi), {}};
  h.density.reserve(h.directions.size());
  for (const auto& d : h.directions.normals) h.density.push_back(density(d));
  return h;
}

}  // namespace dscat
