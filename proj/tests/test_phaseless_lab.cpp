// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "photherm/phaseless_lab.hpp"
#include "photherm/quadrature.hpp"

using namespace photherm;

TEST_SUITE_BEGIN("phaseless_lab");

namespace {

struct LabFixture {
  Curve curve = make_curve({CurveKind::Circle, 2.0, 0.0}, 128);
  VolumeGrid grid = make_grid(curve, 0.05);
  BoundaryOperators ops = assemble_boundary_operators(curve);
  DrudeParams drude{1.0, 1.0};
  HeatMaterial material{2.0};
  ExperimentSetup setup = make_setup(curve, 0.08, drude, material,
                                     BackgroundField{1.0, 0.1, 0, 0, 0}, 3.0, 16);
};

const LabFixture& fx() {
  static const LabFixture f;
  return f;
}

SourceSpec bump_spec(Vec2 center, double width = 0.3, double amp = 1.0) {
  SourceSpec s;
  s.kind = SourceSpec::Kind::GaussianBump;
  s.center = center;
  s.width = width;
  s.amplitude = amp;
  return s;
}

}  // namespace

TEST_CASE("source factory basics") {
  const auto& f = fx();
  SourceSpec cspec;
  cspec.kind = SourceSpec::Kind::Constant;
  const SourceField one = make_source(cspec, f.curve, f.grid);
  CHECK(std::abs(total_mass(f.grid, one.samples) - 4.0 * kPi) < 0.05);

  // gaussian bump against the high-order quadrature of its own sampler
  const SourceField bump = make_source(bump_spec(Vec2(0, 0)), f.curve, f.grid);
  const double oracle = domain_integral(f.curve, bump.sampler, 96, 256);
  CHECK(total_mass(f.grid, bump.samples) == doctest::Approx(oracle).epsilon(1e-4));

  // center outside the domain is rejected
  CHECK_THROWS_AS(make_source(bump_spec(Vec2(3.0, 0.0)), f.curve, f.grid),
                  ValidationError);

  // harmonic polynomial stays harmonic before the cutoff
  SourceSpec hspec;
  hspec.kind = SourceSpec::Kind::HarmonicPoly;
  hspec.coeffs = {0.0, 0.0, 0.0, 1.0, 0.0};  // x1^2 - x2^2
  hspec.apply_cutoff = false;
  const SourceField hp = make_source(hspec, f.curve, f.grid);
  const double h = 1e-3;
  for (const Vec2& x : {Vec2(0.2, 0.4), Vec2(-0.8, 0.1)}) {
    const double lap =
        (hp.sampler(x + Vec2(h, 0)) + hp.sampler(x - Vec2(h, 0)) +
         hp.sampler(x + Vec2(0, h)) + hp.sampler(x - Vec2(0, h)) -
         4.0 * hp.sampler(x)) /
        (h * h);
    CHECK(std::abs(lap) < 1e-6);
  }

  // the default cutoff vanishes at the boundary
  const SourceField hc = make_source(
      [] {
        SourceSpec s;
        s.kind = SourceSpec::Kind::HarmonicPoly;
        s.coeffs = {1.0, 0.0, 0.0, 0.0, 0.0};
        return s;
      }(),
      f.curve, f.grid);
  CHECK(std::abs(hc.sampler(Vec2(1.99, 0.0))) < 1e-12);
  CHECK(hc.sampler(Vec2(0.0, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("pair relations satisfy their defining stencils") {
  const auto& f = fx();
  const double h = 1e-3;
  auto lap = [&](const ScalarSampler& g, const Vec2& x) {
    return (g(x + Vec2(h, 0)) + g(x - Vec2(h, 0)) + g(x + Vec2(0, h)) +
            g(x - Vec2(0, h)) - 4.0 * g(x)) /
           (h * h);
  };

  const SourcePair sign = make_sign_flip_pair(bump_spec(Vec2(0.3, 0)), f.curve, f.grid);
  CHECK((sign.f1.samples + sign.f2.samples).cwiseAbs().maxCoeff() == 0.0);

  const SourcePair harm = make_harmonic_diff_pair(
      bump_spec(Vec2(0, 0)), {0.5, 0.2, 0.0, 0.3, 0.0}, f.curve, f.grid);
  for (const Vec2& x : {Vec2(0.4, -0.2), Vec2(-0.6, 0.5)}) {
    const double d = lap([&](const Vec2& p) {
      return harm.f1.sampler(p) - harm.f2.sampler(p);
    }, x);
    CHECK(std::abs(d) < 1e-5);
  }

  const SourcePair biharm =
      make_biharmonic_diff_pair(bump_spec(Vec2(0, 0)), 0.4, f.curve, f.grid);
  // bilaplacian of x1^3 vanishes: apply the 5-point laplacian twice
  auto diff = [&](const Vec2& p) {
    return biharm.f1.sampler(p) - biharm.f2.sampler(p);
  };
  auto lap_of_diff = [&](const Vec2& p) { return lap(diff, p); };
  for (const Vec2& x : {Vec2(0.3, 0.3)}) {
    const double bl = (lap_of_diff(x + Vec2(h, 0)) + lap_of_diff(x - Vec2(h, 0)) +
                       lap_of_diff(x + Vec2(0, h)) + lap_of_diff(x - Vec2(0, h)) -
                       4.0 * lap_of_diff(x)) /
                      (h * h);
    CHECK(std::abs(bl) < 1e-2);  // double stencil amplifies rounding
  }

  SourceSpec p1, p2;
  p1.kind = SourceSpec::Kind::X1Profile;
  p1.width = 0.25;
  p2.kind = SourceSpec::Kind::X1Profile;
  p2.profile = SourceSpec::Profile::Cosine;
  const SourcePair dir = make_direction_invariant_pair(p1, p2, f.curve, f.grid);
  for (const Vec2& x : {Vec2(0.2, 0.5), Vec2(-0.4, -0.9)}) {
    const double d1 =
        (dir.f1.sampler(x + Vec2(0, h)) - dir.f1.sampler(x - Vec2(0, h))) / (2 * h);
    const double d2 =
        (dir.f2.sampler(x + Vec2(0, h)) - dir.f2.sampler(x - Vec2(0, h))) / (2 * h);
    CHECK(std::abs(d1 + d2) < 1e-10);
    CHECK(std::abs(d1 - d2) < 1e-10);
  }
}

TEST_CASE("measurement comparison across pairs") {
  const auto& f = fx();
  const std::vector<double> omegas = log_spaced(1e-3, 1e-2, 3);

  const SourcePair sign = make_sign_flip_pair(bump_spec(Vec2(0.3, 0), 0.4, 2.0),
                                              *f.setup.curve, *f.setup.grid);
  const ComparisonReport rs =
      compare_measurements(sign, f.setup, omegas, HeatQMode::Asymptotic);
  CHECK(rs.max_diff <= 1e-12);

  SourcePair same;
  same.f1 = make_source(bump_spec(Vec2(0, 0)), *f.setup.curve, *f.setup.grid);
  same.f2 = same.f1;
  const ComparisonReport ri =
      compare_measurements(same, f.setup, omegas, HeatQMode::Asymptotic);
  CHECK(ri.max_diff == 0.0);

  // generically different sources separate above the noise floor
  SourcePair diff;
  diff.f1 = make_source(bump_spec(Vec2(0.5, 0.0), 0.4, 3.0), *f.setup.curve,
                        *f.setup.grid);
  diff.f2 = make_source(bump_spec(Vec2(-0.5, 0.0), 0.4, 3.0), *f.setup.curve,
                        *f.setup.grid);
  const ComparisonReport rd = compare_measurements(
      diff, f.setup, std::vector<double>{1e-2}, HeatQMode::Asymptotic);
  CHECK(rd.max_diff > 1e-8);

  // mismatched sweeps are rejected
  const MeasurementSet m1 = boundary_measurement(f.setup, diff.f1, omegas,
                                                 HeatQMode::Asymptotic);
  const MeasurementSet m2 = boundary_measurement(
      f.setup, diff.f2, std::vector<double>{1e-3}, HeatQMode::Asymptotic);
  CHECK_THROWS_AS(compare_measurements(m1, m2), ValidationError);
}

TEST_CASE("moment identity") {
  const auto& f = fx();
  const SourcePair sign =
      make_sign_flip_pair(bump_spec(Vec2(0.2, -0.1)), f.curve, f.grid);
  const MomentReport rep = verify_moment_identity(sign, f.grid);
  CHECK(rep.residual == 0.0);
  CHECK(rep.t1_f1 == -rep.t1_f2);

  SourcePair same;
  same.f1 = make_source(bump_spec(Vec2(0, 0)), f.curve, f.grid);
  same.f2 = same.f1;
  CHECK(verify_moment_identity(same, f.grid).residual == 0.0);
}

TEST_CASE("trace identity picks the right sign branch") {
  const auto& f = fx();
  const SourcePair sign =
      make_sign_flip_pair(bump_spec(Vec2(0.2, 0.4)), f.curve, f.grid);
  const TraceReport rs = verify_trace_identity(sign, f.curve, f.grid);
  CHECK(rs.residual_minus == 0.0);
  CHECK(rs.best_sign == -1);
  CHECK(rs.residual_plus > 0.0);

  SourcePair same;
  same.f1 = make_source(bump_spec(Vec2(0, 0)), f.curve, f.grid);
  same.f2 = same.f1;
  const TraceReport ri = verify_trace_identity(same, f.curve, f.grid);
  CHECK(ri.residual_plus == 0.0);
  CHECK(ri.best_sign == 1);

  SourcePair diff;
  diff.f1 = make_source(bump_spec(Vec2(0.5, 0.0)), f.curve, f.grid);
  diff.f2 = make_source(bump_spec(Vec2(-0.5, 0.0)), f.curve, f.grid);
  const TraceReport rd = verify_trace_identity(diff, f.curve, f.grid);
  CHECK(rd.residual_plus > 0.0);
  CHECK(rd.residual_minus > 0.0);
}

TEST_CASE("fourth-order green identity") {
  const auto& f = fx();
  const GreensReport quartic = greens_identity_check(
      test_fn_radial_quartic(2.0), test_fn_constant(1.0), f.grid, f.curve);
  CHECK(quartic.volume_side == doctest::Approx(256.0 * kPi).epsilon(1e-8));
  CHECK(quartic.boundary_side == doctest::Approx(256.0 * kPi).epsilon(1e-8));
  CHECK(quartic.mismatch() < 1e-6 * 256.0 * kPi);

  // two harmonic functions: every term vanishes
  const GreensReport harm = greens_identity_check(
      test_fn_harmonic_quadratic(), test_fn_harmonic_quadratic(), f.grid, f.curve);
  CHECK(harm.volume_side == 0.0);
  CHECK(std::abs(harm.boundary_side) < 1e-12);

  // two distinct biharmonic functions: both sides vanish to quadrature
  const GreensReport cross = greens_identity_check(
      test_fn_biharmonic_cubic(1.0), test_fn_harmonic_quadratic(), f.grid, f.curve);
  CHECK(std::abs(cross.volume_side) < 1e-10);
  CHECK(std::abs(cross.boundary_side) < 1e-10);
}

TEST_CASE("navier vanishing test") {
  const auto& f = fx();
  const SourceField bump = make_source(bump_spec(Vec2(0.3, -0.2), 0.4, 1.0),
                                       f.curve, f.grid);
  const NavierReport rep =
      navier_vanishing_check(bump, test_fn_constant(1.0), f.curve, f.grid, f.ops);
  CHECK(rep.data_residual < 1e-4);
  // with v = 1 the surviving boundary term integrates d(lap w)/dnu, which
  // equals the total mass of the source
  const double t1 = total_mass(f.grid, bump.samples);
  CHECK(rep.volume_side == doctest::Approx(t1).epsilon(1e-4));
  CHECK(rep.boundary_side == doctest::Approx(rep.volume_side).epsilon(1e-3));
}

TEST_CASE("fourier direction test") {
  const auto& f = fx();
  SourceSpec p;
  p.kind = SourceSpec::Kind::X1Profile;
  p.width = 0.25;
  const SourceField g = make_source(p, f.curve, f.grid);
  const std::vector<double> zetas = {0.5, 1.0, 2.0};
  const FourierDirectionReport rep =
      fourier_direction_test(g, f.curve, f.grid, zetas);
  CHECK(rep.max_rel_diff < 1e-6);

  // odd profile: transform at zeta near zero vanishes by symmetry
  SourceSpec odd;
  odd.kind = SourceSpec::Kind::X1Profile;
  odd.profile = SourceSpec::Profile::OddGaussian;
  odd.width = 0.4;
  const SourceField go = make_source(odd, f.curve, f.grid);
  const FourierDirectionReport ro =
      fourier_direction_test(go, f.curve, f.grid, std::vector<double>{1e-9});
  CHECK(std::abs(ro.two_dim[0]) < 1e-9);

  // zero source: all transforms vanish
  SourceSpec zspec;
  zspec.kind = SourceSpec::Kind::X1Profile;
  zspec.amplitude = 0.0;
  const SourceField z = make_source(zspec, f.curve, f.grid);
  const FourierDirectionReport rz = fourier_direction_test(z, f.curve, f.grid, zetas);
  for (const Complex& v : rz.two_dim) CHECK(std::abs(v) == 0.0);

  // radially varying sources are rejected by the invariance precondition
  const SourceField radial = make_source(bump_spec(Vec2(0, 0)), f.curve, f.grid);
  CHECK_THROWS_AS(fourier_direction_test(radial, f.curve, f.grid, zetas),
                  ValidationError);
}

TEST_CASE("frequency-coefficient fit") {
  const std::vector<double> omegas = log_spaced(1e-4, 1e-2, 20);
  std::vector<double> values(omegas.size());
  for (size_t k = 0; k < omegas.size(); ++k) {
    const double w = omegas[k], lw = std::log(w);
    values[k] = 1.0 * w * w * lw * lw + 2.0 * w * w * lw + 3.0 * w * w;
  }
  const SweepFit fit =
      fit_frequency_coefficients(omegas, values, HeatQMode::Asymptotic, 0.0);
  CHECK(fit.c2ln2 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.cln == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.c0 == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(fit.cond < 1e10);

  // small perturbations stay conditioning-limited
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1e-6);
  std::vector<double> noisy = values;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  for (double& v : noisy) v += gauss(rng) * scale;
  const SweepFit nf =
      fit_frequency_coefficients(omegas, noisy, HeatQMode::Asymptotic, 0.0);
  CHECK(nf.c2ln2 == doctest::Approx(1.0).epsilon(1e-2));

  // a sweep too narrow to separate the basis is refused
  std::vector<double> narrow(10);
  for (size_t k = 0; k < narrow.size(); ++k)
    narrow[k] = 1e-4 * (1.0 + 1e-12 * k);
  std::vector<double> nv(narrow.size());
  for (size_t k = 0; k < narrow.size(); ++k) {
    const double w = narrow[k], lw = std::log(w);
    nv[k] = w * w * lw * lw;
  }
  CHECK_THROWS_AS(
      fit_frequency_coefficients(narrow, nv, HeatQMode::Asymptotic, 0.0),
      NumericalError);
}

TEST_CASE("total intensity recovery and sign loss") {
  const auto& f = fx();
  const std::vector<double> omegas = log_spaced(1e-4, 1e-2, 20);
  SourceSpec unit;
  unit.kind = SourceSpec::Kind::Constant;
  const SourceField fu = make_source(unit, *f.setup.curve, *f.setup.grid);
  const MeasurementSet mu =
      boundary_measurement(f.setup, fu, omegas, HeatQMode::Asymptotic);
  const double t1u = total_mass(*f.setup.grid, fu.samples);

  // self calibration is exact
  CHECK(recover_total_intensity(mu, mu, f.setup, t1u) ==
        doctest::Approx(t1u).epsilon(1e-10));

  for (double amp : {2.0, -1.0}) {
    SourceSpec s = unit;
    s.amplitude = amp;
    const SourceField fs = make_source(s, *f.setup.curve, *f.setup.grid);
    const MeasurementSet ms =
        boundary_measurement(f.setup, fs, omegas, HeatQMode::Asymptotic);
    const double est = recover_total_intensity(ms, mu, f.setup, t1u);
    CHECK(est == doctest::Approx(std::abs(amp) * t1u).epsilon(0.02));
  }

  SweepFit bad_f, bad_u;
  bad_f.c2ln2 = -1.0;
  bad_u.c2ln2 = 1.0;
  CHECK_THROWS_AS(recover_total_intensity(bad_f, bad_u, 1.0), NumericalError);
}

TEST_CASE("parametric recovery up to sign") {
  const auto& f = fx();
  const std::vector<double> omegas = log_spaced(1e-4, 1e-2, 10);
  const std::vector<SourceSpec> atoms = {bump_spec(Vec2(0.8, 0.0), 0.35),
                                         bump_spec(Vec2(-0.4, 0.7), 0.35),
                                         bump_spec(Vec2(-0.3, -0.8), 0.35)};
  Eigen::Vector3d target(1.0, 0.5, -0.3);

  // synthesize observations from the same forward model
  SourceField mix;
  mix.samples = Eigen::VectorXd::Zero(f.setup.grid->size());
  std::vector<SourceField> fields;
  for (int i = 0; i < 3; ++i) {
    fields.push_back(make_source(atoms[i], *f.setup.curve, *f.setup.grid));
    mix.samples += target[i] * fields.back().samples;
  }
  const MeasurementSet observed =
      boundary_measurement(f.setup, mix, omegas, HeatQMode::Asymptotic);

  RecoveryOptions opt;
  opt.seed = 777;
  const RecoveryResult rec = reconstruct_parametric(observed, atoms, f.setup, opt);
  CHECK(rec.converged);
  const double err_plus = (rec.c_plus - target).cwiseAbs().maxCoeff();
  const double err_minus = (rec.c_minus - target).cwiseAbs().maxCoeff();
  CHECK(std::min(err_plus, err_minus) < 0.05 * target.cwiseAbs().maxCoeff());
  CHECK((rec.c_plus + rec.c_minus).cwiseAbs().maxCoeff() == 0.0);

  // flipped target produces bit-identical observations
  SourceField neg;
  neg.samples = -mix.samples;
  const MeasurementSet observed_neg =
      boundary_measurement(f.setup, neg, omegas, HeatQMode::Asymptotic);
  CHECK((observed.values - observed_neg.values).cwiseAbs().maxCoeff() == 0.0);

  // noisy recovery with a fixed seed
  // 0.1% noise relative to the source-driven deviation (the background
  // channel is known and subtracted by the fit)
  MeasurementSet noisy = observed;
  SourceField null_source;
  null_source.samples = Eigen::VectorXd::Zero(f.setup.grid->size());
  const MeasurementSet base = boundary_measurement(
      f.setup, null_source, observed.omegas, HeatQMode::Asymptotic);
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise =
      1e-3 * (observed.values - base.values).cwiseAbs().maxCoeff();
  for (long i = 0; i < noisy.values.rows(); ++i)
    for (long k = 0; k < noisy.values.cols(); ++k)
      noisy.values(i, k) += noise * gauss(rng);
  const RecoveryResult rn = reconstruct_parametric(noisy, atoms, f.setup, opt);
  const double nerr = std::min((rn.c_plus - target).cwiseAbs().maxCoeff(),
                               (rn.c_minus - target).cwiseAbs().maxCoeff());
  CHECK(nerr < 0.10 * target.cwiseAbs().maxCoeff());
}

TEST_SUITE_END();
