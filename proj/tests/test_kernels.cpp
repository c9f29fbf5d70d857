// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "dscat/kernels.hpp"

using namespace dscat;

TEST(HelmholtzKernel, StaticAndOscillatoryValues) {
  const Vec3 x(0, 0, 0), y(0, 1, 0);
  EXPECT_NEAR(std::abs(helmholtz_kernel(x, y, 0.0) - 1.0 / (4 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(helmholtz_kernel(x, y, 2.0) - std::exp(2.0 * kI) / (4 * kPi)), 0.0, 1e-15);
  EXPECT_THROW(helmholtz_kernel(x, x, 1.0), DomainError);
}

TEST(HelmholtzKernel, SymmetricAndGradientConsistent) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 100; ++t) {
    const Vec3 x(u(gen), u(gen), u(gen)), y(u(gen), u(gen), u(gen));
    EXPECT_EQ(helmholtz_kernel(x, y, 1.3), helmholtz_kernel(y, x, 1.3));
  }
  const Vec3 x(0.3, -0.2, 0.7), y(-0.1, 0.4, 0.2);
  const auto g = helmholtz_kernel_grad(x, y, 1.7);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    const cplx fd = (helmholtz_kernel(x + e, y, 1.7) - helmholtz_kernel(x - e, y, 1.7)) / (2 * h);
    EXPECT_NEAR(std::abs(g(i) - fd), 0.0, 1e-8);
  }
}

TEST(SigmaK, Parametrization) {
  const auto p = make_sigma_k(0.0, Vec3::UnitX(), Vec3::UnitZ(), 2.0);
  EXPECT_NEAR((p.rho - CVec3(0, 0, 2.0 * kI)).norm(), 0.0, 1e-15);
  const auto d = make_sigma_k(3.0, Vec3::UnitX(), Vec3::UnitZ(), 4.0);
  EXPECT_NEAR(d.rho.imag().norm(), 5.0, 1e-14);
  const cplx rr = bilinear_dot(d.rho, d.rho);
  EXPECT_NEAR(rr.real(), -16.0, 1e-10 * 16);
  EXPECT_NEAR(rr.imag(), 0.0, 1e-10);
  EXPECT_THROW(make_sigma_k(1.0, Vec3::UnitX(), Vec3(1, 0, 1).normalized(), 1.0), ValidationError);
}

TEST(SigmaPair, MembershipAndSum) {
  for (const auto& [xi, k, w] : std::vector<std::tuple<Vec3, double, double>>{
           {Vec3::Zero(), 1.0, 2.0}, {Vec3(0, 0, 2), 1.0, 0.0}, {Vec3(0.6, 0, 0.8), 1.0, 1.0},
           {Vec3(1, 2, -0.5), 1.5, 3.0}}) {
    const auto [r1, r2] = sigma_pair_for_xi(xi, k, w);
    EXPECT_NEAR(std::abs(bilinear_dot(r1.rho, r1.rho) + k * k), 0.0, 1e-10 * k * k);
    EXPECT_NEAR(std::abs(bilinear_dot(r2.rho, r2.rho) + k * k), 0.0, 1e-10 * k * k);
    const CVec3 sum = r1.rho.conjugate() + r2.rho + kI * xi.cast<cplx>();
    EXPECT_LT(sum.norm(), 1e-10 * (k + xi.norm()));
    if (xi.norm() == 0.0) EXPECT_LT((r2.rho + r1.rho.conjugate()).norm(), 1e-15);
  }
  try {
    sigma_pair_for_xi(Vec3(0, 0, 3), 1.0, 0.5);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient w"), std::string::npos);
  }
}

TEST(Incident, PlaneWaveAndExponential) {
  const IncidentField pw = PlaneWave{Vec3::UnitZ()};
  EXPECT_EQ(eval_incident(pw, 2.0, Vec3::Zero()), cplx(1.0));
  const IncidentField ex = Exponential{plane_direction(Vec3::UnitZ(), 2.0)};
  const Vec3 x(0.3, 0.1, -0.7);
  EXPECT_NEAR(std::abs(eval_incident(pw, 2.0, x) - eval_incident(ex, 2.0, x)), 0.0, 1e-15);
  const IncidentField big = Exponential{make_sigma_k(50.0, Vec3::UnitX(), Vec3::UnitZ(), 1.0)};
  EXPECT_THROW(eval_incident(big, 1.0, Vec3(1, 0, 0)), DomainError);
}

TEST(Incident, HelmholtzByFiniteDifferences) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const double k = 1.5, h = 1e-3;
  const IncidentField f = Exponential{make_sigma_k(2.0, Vec3(1, 1, 0).normalized(), Vec3(1, -1, 1).normalized(), k)};
  for (int t = 0; t < 20; ++t) {
    const Vec3 x(u(gen), u(gen), u(gen));
    const cplx c = eval_incident(f, k, x);
    cplx lap = -6.0 * c;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e(i) = h;
      lap += eval_incident(f, k, x + e) + eval_incident(f, k, x - e);
    }
    lap /= h * h;
    EXPECT_LE(std::abs(lap + k * k * c), 1e-4 * k * k * std::abs(c));
  }
}

TEST(Incident, GradientsMatchFiniteDifferences) {
  const double k = 1.2;
  const Vec3 x(0.2, -0.4, 0.5);
  std::vector<IncidentField> fields{PlaneWave{Vec3(0, 0.6, 0.8)},
                                    Exponential{make_sigma_k(1.0, Vec3::UnitX(), Vec3::UnitY(), k)},
                                    make_herglotz(8, 16, [](const Vec3& d) { return cplx(d(0), d(2) * d(2)); })};
  for (const auto& f : fields) {
    const auto g = eval_incident_grad(f, k, x);
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e(i) = 1e-6;
      const cplx fd = (eval_incident(f, k, x + e) - eval_incident(f, k, x - e)) / 2e-6;
      EXPECT_NEAR(std::abs(g(i) - fd), 0.0, 1e-7 * (1 + std::abs(fd)));
    }
  }
}

TEST(Incident, HerglotzAverages) {
  const IncidentField h = make_herglotz(16, 32, [](const Vec3&) { return cplx(1.0); });
  EXPECT_NEAR(std::abs(eval_incident(h, 1.0, Vec3::Zero()) - 4 * kPi), 0.0, 1e-12);
  const Vec3 x(0.5, -1.0, 0.7);
  const double kr = 1.3 * x.norm();
  EXPECT_NEAR(std::abs(eval_incident(h, 1.3, x) - 4 * kPi * std::sin(kr) / kr), 0.0, 1e-10);
  const IncidentField y1 = make_herglotz(16, 32, [](const Vec3& d) { return cplx(d(2)); });
  EXPECT_NEAR(std::abs(eval_incident(y1, 1.0, Vec3::Zero())), 0.0, 1e-12);
}
