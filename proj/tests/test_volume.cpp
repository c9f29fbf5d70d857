// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "dscat/quadrature.hpp"
#include "dscat/volume.hpp"

using namespace dscat;

namespace {

VolumeGrid cube_grid(int n, double half = 1.0) {
  return make_volume_grid(Box{Vec3::Constant(-half), Vec3::Constant(half)}, n);
}

double bump(const Vec3& x) {
  const double r2 = x.squaredNorm();
  return r2 < 0.36 ? std::exp(-1.0 / (0.36 - r2)) * 8.0 : 0.0;
}

}  // namespace

TEST(VolumeOperator, StaticEntries) {
  const auto g = cube_grid(4);
  const auto m = assemble_volume_operator(g, 0.0);
  const double a = g.step(0) * std::cbrt(3.0 / (4.0 * kPi));
  EXPECT_NEAR(a, g.equivalent_radius(), 1e-15);
  EXPECT_NEAR(m(5, 5).real(), a * a / 2.0, 1e-15);
  const double d = (g.cell_center(0) - g.cell_center(7)).norm();
  EXPECT_NEAR(m(0, 7).real(), g.cell_volume / (4 * kPi * d), 1e-15);
}

TEST(VolumeOperator, SelfTermMatchesRadialQuadrature) {
  // oracle: int_ball e^{ikr}/(4 pi r) = int_0^a r e^{ikr} dr by Gauss-Legendre
  const auto [x, w] = gauss_legendre(40);
  for (double k : {0.5, 2.0, 7.0}) {
    const double a = 0.3;
    cplx ref = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = 0.5 * a * (x[i] + 1);
      ref += 0.5 * a * w[i] * r * std::exp(kI * k * r);
    }
    EXPECT_NEAR(std::abs(cell_integral(Vec3::Zero(), Vec3::Zero(), 1.0, a, k) - ref), 0.0, 1e-13) << k;
  }
}

TEST(VolumeOperator, BallInteriorMatchesShellQuadrature) {
  // off-center point inside the ball: integrate e^{ik|x-y|}/(4 pi |x-y|) by the shell
  // average j0 / h0 expansion: for r' < d term j0(kr')h0(kd)... use direct 3D quadrature instead
  const double a = 0.4, k = 1.7, d = 0.15;
  const auto [gx, gw] = gauss_legendre(48);
  cplx ref = 0;
  const Vec3 xpt(0, 0, d);
  // spherical coordinates about x: int over directions of int_0^{R(dir)} r e^{ikr} dr / (4 pi)
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double ct = gx[i];
    // ray from x in direction with polar cos ct hits sphere |y| = a at R = -d ct + sqrt(a^2 - d^2 (1 - ct^2))
    const double R = -d * ct + std::sqrt(a * a - d * d * (1 - ct * ct));
    const cplx radial = (std::exp(kI * k * R) * (1.0 - kI * k * R) - 1.0) / (k * k);
    ref += gw[i] * 2 * kPi * radial / (4 * kPi);
  }
  // radial antiderivative of r e^{ikr} is (e^{ikr}(1 - ikr) - 1)/k^2
  EXPECT_NEAR(std::abs(cell_integral(xpt, Vec3::Zero(), 1.0, a, k) - ref), 0.0, 1e-12);
}

TEST(VolumeOperator, CellGradientMatchesFiniteDifferences) {
  const double a = 0.2, k = 1.3, vol = 0.03;
  for (const Vec3& x : {Vec3(0.05, 0.02, -0.08), Vec3(0.5, -0.2, 0.1)}) {
    const auto g = cell_integral_grad(x, Vec3::Zero(), vol, a, k);
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e(i) = 1e-6;
      const cplx fd = (cell_integral(x + e, Vec3::Zero(), vol, a, k) - cell_integral(x - e, Vec3::Zero(), vol, a, k)) / 2e-6;
      EXPECT_NEAR(std::abs(g(i) - fd), 0.0, 1e-7);
    }
  }
}

TEST(VolumeOperator, ComplexSymmetricAndSizeCap) {
  const auto g = cube_grid(5);
  const auto m = assemble_volume_operator(g, 1.4);
  EXPECT_EQ((m - m.transpose()).norm(), 0.0);
  SolverOptions opt;
  opt.max_cells = 100;
  EXPECT_THROW(assemble_volume_operator(g, 1.0, opt), SizeError);
}

TEST(LippmannSchwinger, ZeroPotentialIsIncident) {
  const auto g = cube_grid(6);
  const auto v = sample_potential(g, [](const Vec3&) { return 0.0; });
  const IncidentField inc = PlaneWave{Vec3::UnitX()};
  const auto f = solve_lippmann_schwinger(v, inc, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(f.values[i], eval_incident(inc, 1.0, g.cell_center(i)));
  const Vec3 x(0.3, 2.0, -1.0);
  EXPECT_EQ(eval_volume_field(f, v, inc, 1.0, x), eval_incident(inc, 1.0, x));
}

TEST(LippmannSchwinger, BornLimitIsQuadratic) {
  const auto g = cube_grid(8);
  const double k = 1.5;
  const IncidentField inc = PlaneWave{Vec3(0, 0.6, 0.8)};
  const auto base = sample_potential(g, bump);
  const auto act = base.active_cells();
  const CMatrix gm = assemble_volume_block(g, act, k);
  std::vector<double> err;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    auto v = base;
    for (auto& val : v.values) val *= eps;
    const auto f = solve_lippmann_schwinger(v, inc, k);
    CVector born(static_cast<Eigen::Index>(act.size()));
    for (std::size_t j = 0; j < act.size(); ++j)
      born(static_cast<Eigen::Index>(j)) = v.values[act[j]] * eval_incident(inc, k, g.cell_center(act[j]));
    const CVector first = gm * born;
    double e = 0;
    for (std::size_t i = 0; i < act.size(); ++i) {
      const cplx psi0 = eval_incident(inc, k, g.cell_center(act[i]));
      e = std::max(e, std::abs(f.values[act[i]] - psi0 + first(static_cast<Eigen::Index>(i))));
    }
    err.push_back(e);
  }
  // slope in log-log close to 2
  const double s1 = std::log10(err[0] / err[1]), s2 = std::log10(err[1] / err[2]);
  EXPECT_NEAR(s1, 2.0, 0.1);
  EXPECT_NEAR(s2, 2.0, 0.1);
}

TEST(LippmannSchwinger, ResidualCenterConsistencyAndDecay) {
  const auto g = cube_grid(10);
  const double k = 2.0;
  const IncidentField inc = PlaneWave{Vec3::UnitZ()};
  const auto v = sample_potential(g, [](const Vec3& x) { return x.norm() < 0.6 ? -3.0 : 0.0; });
  EXPECT_TRUE(v.warnings.empty());
  const auto f = solve_lippmann_schwinger(v, inc, k);
  EXPECT_LE(f.residual, 1e-10);
  for (std::size_t i : {0ul, 333ul, 555ul})
    EXPECT_NEAR(std::abs(eval_volume_field(f, v, inc, k, g.cell_center(i)) - f.values[i]), 0.0, 1e-10);
  // |x| |psi_sc| approaches a constant
  const Vec3 dir = Vec3(1, 2, 3).normalized();
  const double a1 = 20 * std::abs(eval_volume_field(f, v, inc, k, 20 * dir) - eval_incident(inc, k, 20 * dir));
  const double a2 = 40 * std::abs(eval_volume_field(f, v, inc, k, 40 * dir) - eval_incident(inc, k, 40 * dir));
  EXPECT_NEAR(a1 / a2, 1.0, 0.05);
}

TEST(LippmannSchwinger, BoundaryCellWarning) {
  const auto g = cube_grid(4);
  const auto v = sample_potential(g, [](const Vec3&) { return 1.0; });
  ASSERT_EQ(v.warnings.size(), 1u);
}
