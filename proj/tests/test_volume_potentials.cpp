// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "photherm/boundary_potentials.hpp"
#include "photherm/geometry.hpp"
#include "photherm/quadrature.hpp"
#include "photherm/volume_potentials.hpp"

using namespace photherm;

TEST_SUITE_BEGIN("volume_potentials");

namespace {

struct DiskFixture {
  Curve curve = make_curve({CurveKind::Circle, 2.0, 0.0}, 128);
  VolumeGrid grid = make_grid(curve, 0.02);
  SourceField one = make_source_field(grid, [](const Vec2&) { return 1.0; });
};

const DiskFixture& fixture() {
  static const DiskFixture f;
  return f;
}

}  // namespace

TEST_CASE("total mass") {
  const auto& f = fixture();
  CHECK(std::abs(total_mass(f.grid, f.one.samples) - 4.0 * kPi) < 0.05);

  const SourceField x1 =
      make_source_field(f.grid, [](const Vec2& p) { return p.x(); });
  CHECK(std::abs(total_mass(f.grid, x1.samples)) < 1e-3);

  // exact linearity
  CHECK(total_mass(f.grid, Eigen::VectorXd(-x1.samples)) ==
        -total_mass(f.grid, x1.samples));
}

TEST_CASE("log rectangle integral against dyadic refinement") {
  // integral of ln r over [-0.3, 0.5] x [-0.2, 0.1], origin inside
  const double exact = log_rectangle_integral(-0.3, 0.5, -0.2, 0.1);
  double mid = 0.0;
  const int n = 2048;
  const double hx = 0.8 / n, hy = 0.3 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -0.3 + (i + 0.5) * hx;
      const double y = -0.2 + (j + 0.5) * hy;
      mid += 0.5 * std::log(x * x + y * y) * hx * hy;
    }
  CHECK(exact == doctest::Approx(mid).epsilon(1e-5));
}

TEST_CASE("volume potential disk closed forms") {
  const auto& f = fixture();
  // N[1](0) = R^2/2 ln R - R^2/4
  const double v0 = volume_potential(f.grid, f.one.samples, Vec2(0, 0));
  CHECK(std::abs(v0 - (2.0 * std::log(2.0) - 1.0)) < 5e-4);

  // exterior: N[1](x) = (R^2/2) ln|x|
  const double v4 = volume_potential(f.grid, f.one.samples, Vec2(4.0, 0.0));
  CHECK(std::abs(v4 - 2.0 * std::log(4.0)) < 5e-4);

  // zero density
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(f.grid.size());
  CHECK(volume_potential(f.grid, zero, Vec2(0.7, 0.1)) == 0.0);
}

TEST_CASE("volume potential refinement order") {
  const Curve c = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const double exact = 2.0 * std::log(2.0) - 1.0;
  std::vector<double> errs;
  for (double h : {0.08, 0.04, 0.02}) {
    const VolumeGrid g = make_grid(c, h);
    const SourceField one = make_source_field(g, [](const Vec2&) { return 1.0; });
    errs.push_back(std::abs(volume_potential(g, one.samples, Vec2(0, 0)) - exact));
  }
  const double slope = std::log(errs[0] / errs[2]) / std::log(4.0);
  CHECK(slope >= 1.9);
}

TEST_CASE("far-field logarithm law") {
  const auto& f = fixture();
  const double t1 = total_mass(f.grid, f.one.samples);
  double prev = 0.0;
  double prev_diff = 0.0;
  int k = 0;
  for (double r : {10.0, 20.0, 40.0}) {
    const double v = volume_potential(f.grid, f.one.samples, Vec2(r, 0.0)) -
                     t1 / kTwoPi * std::log(r);
    if (k > 0) {
      const double diff = std::abs(v - prev);
      if (k > 1) CHECK(diff < 0.75 * prev_diff);  // shrinking like 1/r
      prev_diff = diff;
    }
    prev = v;
    ++k;
  }
}

TEST_CASE("iterated potential is harmonic-chained") {
  const Curve c = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const VolumeGrid g = make_grid(c, 0.02);
  const SourceField one = make_source_field(g, [](const Vec2&) { return 1.0; });
  const Eigen::VectorXd w = newtonian_on_grid(g, one.samples);

  // Delta N^2[1] (0) = N[1](0)
  const double h = g.h();
  const double center = volume_potential(g, w, Vec2(0, 0));
  double lap = -4.0 * center;
  lap += volume_potential(g, w, Vec2(h, 0));
  lap += volume_potential(g, w, Vec2(-h, 0));
  lap += volume_potential(g, w, Vec2(0, h));
  lap += volume_potential(g, w, Vec2(0, -h));
  lap /= h * h;
  CHECK(std::abs(lap - volume_potential(g, one.samples, Vec2(0, 0))) < 5e-3);

  // linearity
  const SourceField x1 = make_source_field(g, [](const Vec2& p) { return p.x(); });
  const Eigen::VectorXd mix = 2.0 * one.samples + 3.0 * x1.samples;
  const double lhs = iterated_volume_potential(g, mix, Vec2(0.5, 0.2));
  const double rhs = 2.0 * iterated_volume_potential(g, one.samples, Vec2(0.5, 0.2)) +
                     3.0 * iterated_volume_potential(g, x1.samples, Vec2(0.5, 0.2));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("pde residuals") {
  const Curve c = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const VolumeGrid g = make_grid(c, 0.02);
  const SourceField one = make_source_field(g, [](const Vec2&) { return 1.0; });
  const PdeResidualReport rep = pde_residual_check(g, one);
  CHECK(rep.interior_points > 10);
  CHECK(rep.interior < 0.02);
  CHECK(rep.exterior < 1e-6);

  const SourceField zero = make_source_field(g, [](const Vec2&) { return 0.0; });
  const PdeResidualReport rz = pde_residual_check(g, zero);
  CHECK(rz.interior == 0.0);
  CHECK(rz.exterior == 0.0);
}

TEST_CASE("analytic boundary trace against disk closed forms") {
  const Curve c = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const Vec2 x = c.point(5);
  const Vec2 nu = c.normal(5);
  const auto one = [](const Vec2&) { return 1.0; };
  CHECK(newtonian_potential_analytic(c, one, x, &nu) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
  CHECK(newtonian_normal_derivative_analytic(c, one, x, nu) ==
        doctest::Approx(1.0).epsilon(1e-7));

  // radial gaussian: trace = ln R * int_0^R f r dr
  const double sig = 0.5;
  const auto gauss = [sig](const Vec2& p) {
    return std::exp(-p.squaredNorm() / (2.0 * sig * sig));
  };
  const double radial = integrate(
      [sig](double r) { return std::exp(-r * r / (2.0 * sig * sig)) * r; }, 0.0,
      2.0, 16, 12);
  CHECK(newtonian_potential_analytic(c, gauss, x, &nu) ==
        doctest::Approx(std::log(2.0) * radial).epsilon(1e-8));
  // interior-point evaluation, same quadrature family
  CHECK(newtonian_potential_analytic(c, one, Vec2(0.0, 0.0)) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-8));
}

TEST_CASE("refined near-boundary evaluation beats the plain rule") {
  const Curve c = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  const VolumeGrid g = make_grid(c, 0.04);
  const SourceField one = make_source_field(g, [](const Vec2&) { return 1.0; });
  const Vec2 x = c.point(3);  // on the boundary
  const double exact = 2.0 * std::log(2.0);
  const double refined = volume_potential_refined(g, one.samples, x, 2);
  CHECK(std::abs(refined - exact) < 2e-3);

  // gradient at the boundary: d/dnu N[1] = R/2 = 1
  const Vec2 grad = volume_potential_gradient_refined(g, one.samples, x, 2);
  CHECK(std::abs(grad.dot(c.normal(3)) - 1.0) < 2e-2);
}

TEST_SUITE_END();
