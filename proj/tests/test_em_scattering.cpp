// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "photherm/em_scattering.hpp"
#include "photherm/geometry.hpp"
#include "photherm/phaseless_lab.hpp"

using namespace photherm;

TEST_SUITE_BEGIN("em_scattering");

namespace {

struct EmFixture {
  Curve curve = make_curve({CurveKind::Circle, 2.0, 0.0}, 64);
  VolumeGrid grid = make_grid(curve, 0.1);
  DrudeParams drude{1.0, 1.0};
  SourceField one = make_source_field(grid, [](const Vec2&) { return 1.0; });
};

const EmFixture& fx() {
  static const EmFixture f;
  return f;
}

}  // namespace

TEST_CASE("zero source gives the zero field") {
  const auto& f = fx();
  const SourceField zero =
      make_source_field(f.grid, [](const Vec2&) { return 0.0; });
  const ComplexField u =
      solve_lippmann_schwinger(f.grid, zero, 1e-3, f.drude);
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sign flip is exact through the solver") {
  const auto& f = fx();
  SourceField neg;
  neg.samples = -f.one.samples;
  neg.sampler = [](const Vec2&) { return -1.0; };
  const ComplexField up = solve_lippmann_schwinger(f.grid, f.one, 1e-3, f.drude);
  const ComplexField un = solve_lippmann_schwinger(f.grid, neg, 1e-3, f.drude);
  CHECK((up.values + un.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solver residual certificate") {
  const auto& f = fx();
  for (double w : {1e-3, 1e-2}) {
    const ComplexField u = solve_lippmann_schwinger(f.grid, f.one, w, f.drude);
    CHECK(u.residual <= 1e-10);
    CHECK(u.iterations > 0);
  }
}

TEST_CASE("joint linearity of the source-to-field map") {
  const auto& f = fx();
  const SourceField x1 =
      make_source_field(f.grid, [](const Vec2& p) { return p.x(); });
  SourceField mix;
  mix.samples = 2.0 * f.one.samples + 3.0 * x1.samples;
  const ComplexField ua = solve_lippmann_schwinger(f.grid, f.one, 1e-3, f.drude);
  const ComplexField ub = solve_lippmann_schwinger(f.grid, x1, 1e-3, f.drude);
  const ComplexField um = solve_lippmann_schwinger(f.grid, mix, 1e-3, f.drude);
  const double scale = um.values.cwiseAbs().maxCoeff();
  CHECK((um.values - 2.0 * ua.values - 3.0 * ub.values).cwiseAbs().maxCoeff() <
        1e-8 * scale);
}

TEST_CASE("full solve agrees with the asymptotic field at low frequency") {
  const auto& f = fx();
  const ComplexField full = solve_lippmann_schwinger(f.grid, f.one, 1e-3, f.drude);
  const ComplexField asym = asymptotic_field(f.grid, f.one, 1e-3, f.drude);
  const Complex u0_full = full.eval(Vec2(0.0, 0.0));
  const Complex u0_asym = asym.eval(Vec2(0.0, 0.0));
  CHECK(std::abs(std::abs(u0_full) - std::abs(u0_asym)) / std::abs(u0_full) <
        2e-2);
}

TEST_CASE("asymptotic field values against hand-computed references") {
  // source scaled so T1[f] = 1 on the radius-2 disk
  const auto& f = fx();
  const double amp = 1.0 / f.grid.total_area();
  const SourceField unit_mass =
      make_source_field(f.grid, [amp](const Vec2&) { return amp; });
  const ComplexField asym = asymptotic_field(f.grid, unit_mass, 1e-3, f.drude);
  CHECK(asym.t1 == doctest::Approx(1.0).epsilon(1e-12));
  const Complex u0 = asym.eval(Vec2(0.0, 0.0));
  // leading term alone is +1.0994e-3 i; with the order-w and w^2 ln^2 w
  // corrections the value at the origin becomes
  CHECK(u0.real() == doctest::Approx(-2.651888e-4).epsilon(1e-3));
  CHECK(u0.imag() == doctest::Approx(1.087114e-3).epsilon(1e-3));

  CHECK_THROWS_AS(asymptotic_field(f.grid, unit_mass, 0.2, f.drude),
                  ValidationError);
}

TEST_CASE("zero-mean source kills the T1 terms") {
  const auto& f = fx();
  const SourceField odd =
      make_source_field(f.grid, [](const Vec2& p) { return p.x(); });
  const double w = 1e-3;
  const ComplexField asym = asymptotic_field(f.grid, odd, w, f.drude);
  CHECK(std::abs(asym.t1) < 1e-12);
  for (int m = 0; m < f.grid.size(); m += 97) {
    const Complex expected = -Complex(0.0, w) * asym.w_samples[m];
    CHECK(std::abs(asym.values[m] - expected) <= 1e-12 * w);
  }
}

TEST_CASE("asymptotic field scales exactly") {
  const auto& f = fx();
  SourceField twice;
  twice.samples = 2.0 * f.one.samples;
  const Eigen::VectorXd w_one = newtonian_on_grid(f.grid, f.one.samples);
  const Eigen::VectorXd w_two = newtonian_on_grid(f.grid, twice.samples);
  const ComplexField a1 = asymptotic_field(f.grid, f.one, w_one, 1e-3, f.drude);
  const ComplexField a2 = asymptotic_field(f.grid, twice, w_two, 1e-3, f.drude);
  CHECK((a2.values - 2.0 * a1.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("field parts decompose exactly and match the displayed formulas") {
  const auto& f = fx();
  const double w = 1e-3, lw = std::log(1e-3);
  const ComplexField asym = asymptotic_field(f.grid, f.one, w, f.drude);
  const auto [re, im] = field_parts(asym);
  for (int m = 0; m < f.grid.size(); m += 53) {
    CHECK(Complex(re[m], im[m]) == asym.values[m]);
    // Re u = -(1/4) w T1 - w^2 ln^2 w (wp^2 / 4 pi^2 tau) |D| T1
    const double re_formula =
        -0.25 * w * asym.t1 -
        w * w * lw * lw / (4.0 * kPi * kPi) * asym.area_d * asym.t1;
    CHECK(re[m] == doctest::Approx(re_formula).epsilon(1e-13));
  }
  const ComplexField full = solve_lippmann_schwinger(f.grid, f.one, w, f.drude);
  CHECK_THROWS_AS(field_parts(full), ValidationError);
}

TEST_CASE("T_omega contraction scale") {
  const auto& f = fx();
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(f.grid.size());
  const Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(f.grid.size());
  CHECK(apply_T_omega(f.grid, zeros, 1e-2, f.drude).cwiseAbs().maxCoeff() ==
        0.0);
  const double n2 =
      apply_T_omega(f.grid, ones, 1e-2, f.drude).cwiseAbs().maxCoeff();
  const double n3 =
      apply_T_omega(f.grid, ones, 1e-3, f.drude).cwiseAbs().maxCoeff();
  const double r2 = n2 / (1e-2 * std::abs(std::log(1e-2)));
  const double r3 = n3 / (1e-3 * std::abs(std::log(1e-3)));
  CHECK(n3 < n2);
  CHECK(r3 == doctest::Approx(r2).epsilon(0.5));  // C stable across frequencies
}

TEST_CASE("neumann series consistency of the asymptotic field") {
  // (I + T_w)[u_asym] should reproduce the pre-inversion right-hand side up
  // to O(w^2 ln^2 w).
  const auto& f = fx();
  static const ExpansionConstants ec = ExpansionConstants::make(2);
  auto mismatch = [&](double w) {
    const Eigen::VectorXd w_grid = newtonian_on_grid(f.grid, f.one.samples);
    const ComplexField asym = asymptotic_field(f.grid, f.one, w_grid, w, f.drude);
    const Eigen::VectorXcd lhs =
        asym.values + apply_T_omega(f.grid, asym.values, w, f.drude);
    const double lw = std::log(w);
    Eigen::VectorXcd rhs(f.grid.size());
    const Complex kI{0.0, 1.0};
    for (int m = 0; m < f.grid.size(); ++m)
      rhs[m] = -w * lw * (kI / kTwoPi) * asym.t1 -
               w * ((0.25 + kI * ec.N) * asym.t1 + kI * w_grid[m]);
    return (lhs - rhs).cwiseAbs().maxCoeff() / (w * w * lw * lw);
  };
  const double c3 = mismatch(1e-3);
  const double c4 = mismatch(3e-4);
  CHECK(c3 == doctest::Approx(c4).epsilon(0.75));  // bounded constant
}

TEST_CASE("remainder slope sits at the predicted order") {
  const auto& f = fx();
  const std::vector<double> omegas = log_spaced(1e-3, 1e-2, 5);
  const RemainderSlopeReport rep =
      remainder_slope(f.one, f.grid, f.drude, omegas);
  CHECK(rep.slope >= 1.7);
  CHECK(rep.slope <= 2.2);
  CHECK(!rep.regression);

  const SourceField zero =
      make_source_field(f.grid, [](const Vec2&) { return 0.0; });
  CHECK_THROWS_AS(remainder_slope(zero, f.grid, f.drude, omegas),
                  NumericalError);
}

TEST_SUITE_END();
