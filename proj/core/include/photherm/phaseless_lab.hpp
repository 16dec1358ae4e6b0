// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_PHASELESS_LAB_HPP
#define PHOTHERM_PHASELESS_LAB_HPP

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "photherm/heat_transfer.hpp"
#include "photherm/types.hpp"

namespace photherm {

// Test-source factory specs. Gaussian bumps and harmonic polynomials are
// multiplied by a smooth radial cutoff vanishing at the boundary so the
// support certificate holds; constants and x1-profiles use the plain domain
// indicator (profiles must stay direction-invariant inside D).
struct SourceSpec {
  enum class Kind { Constant, GaussianBump, HarmonicPoly, X1Profile };
  enum class Profile { Gaussian, Cosine, OddGaussian };

  Kind kind = Kind::Constant;
  double amplitude = 1.0;
  Vec2 center = Vec2::Zero();          // gaussian bump
  double width = 0.3;                  // gaussian sigma
  std::array<double, 5> coeffs{};      // harmonic poly: 1, x1, x2, x1^2-x2^2, 2 x1 x2
  Profile profile = Profile::Gaussian; // x1 profiles
  double x1_center = 0.0;
  std::optional<bool> apply_cutoff;    // override the per-kind default
};

SourceField make_source(const SourceSpec& spec, const Curve& curve,
                        const VolumeGrid& grid);

enum class PairRelation {
  SignFlip,
  HarmonicDiff,
  BiharmonicDiff,
  DirectionInvariant,
};

std::string to_string(PairRelation r);

struct SourcePair {
  SourceField f1, f2;
  PairRelation relation = PairRelation::SignFlip;
  Vec2 eta{0.0, 1.0};  // invariance direction, when applicable
};

SourcePair make_sign_flip_pair(const SourceSpec& base, const Curve& curve,
                               const VolumeGrid& grid);
// f1 = base + harmonic polynomial (uncut, so the difference stays harmonic
// in D), f2 = base.
SourcePair make_harmonic_diff_pair(const SourceSpec& base,
                                   const std::array<double, 5>& harmonic,
                                   const Curve& curve, const VolumeGrid& grid);
// f1 = base + scale * x1^3 (biharmonic), f2 = base.
SourcePair make_biharmonic_diff_pair(const SourceSpec& base, double scale,
                                     const Curve& curve,
                                     const VolumeGrid& grid);
SourcePair make_direction_invariant_pair(const SourceSpec& profile1,
                                         const SourceSpec& profile2,
                                         const Curve& curve,
                                         const VolumeGrid& grid);

// Runs both sources through the identical pipeline and reports the largest
// measurement difference.
struct ComparisonReport {
  double max_diff = 0.0;
  std::vector<double> per_frequency;
};

ComparisonReport compare_measurements(const SourcePair& pair,
                                      const ExperimentSetup& setup,
                                      std::span<const double> omegas,
                                      HeatQMode mode);
ComparisonReport compare_measurements(const MeasurementSet& m1,
                                      const MeasurementSet& m2);

struct MomentReport {
  double t1_f1 = 0.0;
  double t1_f2 = 0.0;
  double residual = 0.0;  // | |T1[f1]| - |T1[f2]| |
};

MomentReport verify_moment_identity(const SourcePair& pair,
                                    const VolumeGrid& grid);

// min over sign s of max over boundary nodes of |N^2[f1] - s N^2[f2]|.
struct TraceReport {
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  int best_sign = 1;
  double best() const { return std::min(residual_plus, residual_minus); }
};

TraceReport verify_trace_identity(const SourcePair& pair, const Curve& curve,
                                  const VolumeGrid& grid);

// Smooth test function with the derivatives needed by the fourth-order
// Green identity.
struct BiharmonicTestFunction {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<double(const Vec2&)> laplacian;
  std::function<Vec2(const Vec2&)> laplacian_gradient;
  std::function<double(const Vec2&)> bilaplacian;
};

BiharmonicTestFunction test_fn_constant(double c);
BiharmonicTestFunction test_fn_radial_quartic(double R);  // (|x|^2 - R^2)^2
BiharmonicTestFunction test_fn_harmonic_quadratic();      // x1^2 - x2^2
BiharmonicTestFunction test_fn_biharmonic_cubic(double scale);  // scale x1^3

// Both sides of
//   int_D (v lap^2 w - w lap^2 v) = oint (v d(lap w)/dnu + lap v dw/dnu
//                                        - w d(lap v)/dnu - lap w dv/dnu).
struct GreensReport {
  double volume_side = 0.0;
  double boundary_side = 0.0;
  double mismatch() const { return std::abs(volume_side - boundary_side); }
};

GreensReport greens_identity_check(const BiharmonicTestFunction& w,
                                   const BiharmonicTestFunction& v,
                                   const VolumeGrid& grid, const Curve& curve);

// Builds the Navier solution of lap^2 w = f (w = lap w = 0 on the boundary)
// through two Poisson splits, measures how well the boundary data vanish at
// off-node probes, and checks int_D f v against the surviving boundary terms.
struct NavierReport {
  double data_residual = 0.0;    // max(|w|, |lap w|) at off-node boundary probes
  double volume_side = 0.0;      // int_D f v
  double boundary_side = 0.0;    // full boundary integral of the identity
  double identity_mismatch() const {
    return std::abs(volume_side - boundary_side);
  }
};

NavierReport navier_vanishing_check(const SourceField& f,
                                    const BiharmonicTestFunction& v,
                                    const Curve& curve, const VolumeGrid& grid,
                                    const BoundaryOperators& ops);

// For an x1-invariant source and zeta = (z, iz): the transform
// int_D f e^{i zeta . x} dx evaluated by two independent quadratures
// (2D polar-grid rule and the chord-reduced 1D rule) plus the plain
// volume-grid sum for reference.
struct FourierDirectionReport {
  std::vector<double> zeta11;
  std::vector<Complex> two_dim;
  std::vector<Complex> reduced_1d;
  std::vector<Complex> grid_sum;
  double max_rel_diff = 0.0;  // between the two high-order routes
};

FourierDirectionReport fourier_direction_test(const SourceField& f,
                                              const Curve& curve,
                                              const VolumeGrid& grid,
                                              std::span<const double> zeta11);

// Least-squares fit of a frequency sweep at one measurement point against
// the columns {w^2 ln^2 w, w^2 ln w, w^2} after removing the mode-specific
// background offset. Columns are normalized before solving.
struct SweepFit {
  double c2ln2 = 0.0;
  double cln = 0.0;
  double c0 = 0.0;
  double residual = 0.0;
  double cond = 0.0;
};

SweepFit fit_frequency_coefficients(std::span<const double> omegas,
                                    std::span<const double> values,
                                    HeatQMode mode, double background_at_x);

// |T1[f]| = t1_unit * sqrt(c2ln2(f) / c2ln2(unit)); the coefficient ratio
// inherits the quadratic dependence of Q1 on T1[f].
double recover_total_intensity(const SweepFit& fit_f, const SweepFit& fit_unit,
                               double t1_unit);

// Aggregated over all measurement angles of two sweeps.
double recover_total_intensity(const MeasurementSet& m_f,
                               const MeasurementSet& m_unit,
                               const ExperimentSetup& setup, double t1_unit);

// Nonlinear least squares for coefficients of a small source basis against
// observed measurements; the asymptotic forward model is quadratic in the
// coefficients, so both sign branches reach the same misfit.
struct RecoveryOptions {
  int max_iterations = 200;
  int starts = 6;
  std::uint64_t seed = 12345;
  double tol = 1e-12;
};

struct RecoveryResult {
  Eigen::VectorXd c_plus;
  Eigen::VectorXd c_minus;
  double misfit = 0.0;
  bool converged = false;
  int iterations = 0;
};

RecoveryResult reconstruct_parametric(const MeasurementSet& observed,
                                      const std::vector<SourceSpec>& atoms,
                                      const ExperimentSetup& setup,
                                      const RecoveryOptions& opt = {});

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace photherm

#endif  // PHOTHERM_PHASELESS_LAB_HPP
