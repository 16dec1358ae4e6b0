// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/phaseless_lab.hpp"

#include <cmath>
#include <random>

#include "photherm/quadrature.hpp"

namespace photherm {

namespace {

constexpr Complex kI{0.0, 1.0};

// Radial fraction of x relative to the curve (0 at the centroid ray origin,
// 1 on the boundary).
double radial_fraction(const Curve& curve, const Vec2& x) {
  const double r = x.norm();
  if (r < 1e-14) return 0.0;
  const Vec2 d = x / r;
  const double exit = curve.ray_exit(Vec2::Zero(), d);
  return exit > 0.0 ? r / exit : 2.0;
}

// C-infinity step: 1 below 0.8, 0 above 0.95.
double smooth_cutoff(double rho) {
  if (rho <= 0.8) return 1.0;
  if (rho >= 0.95) return 0.0;
  const double s = (rho - 0.8) / 0.15;
  const auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  return f(1.0 - s) / (f(1.0 - s) + f(s));
}

double harmonic_poly(const std::array<double, 5>& c, const Vec2& p) {
  return c[0] + c[1] * p.x() + c[2] * p.y() +
         c[3] * (p.x() * p.x() - p.y() * p.y()) + c[4] * 2.0 * p.x() * p.y();
}

}  // namespace

SourceField make_source(const SourceSpec& spec, const Curve& curve,
                        const VolumeGrid& grid) {
  bool cutoff = false;
  switch (spec.kind) {
    case SourceSpec::Kind::Constant:
    case SourceSpec::Kind::X1Profile:
      cutoff = false;
      break;
    case SourceSpec::Kind::GaussianBump:
    case SourceSpec::Kind::HarmonicPoly:
      cutoff = true;
      break;
  }
  if (spec.apply_cutoff) cutoff = *spec.apply_cutoff;

  if (spec.kind == SourceSpec::Kind::GaussianBump && !curve.inside(spec.center))
    throw ValidationError("make_source: bump center lies outside the domain");

  const Curve curve_copy = curve;  // samplers outlive the call site's curve
  ScalarSampler base;
  switch (spec.kind) {
    case SourceSpec::Kind::Constant: {
      const double a = spec.amplitude;
      base = [a](const Vec2&) { return a; };
      break;
    }
    case SourceSpec::Kind::GaussianBump: {
      const double a = spec.amplitude, s2 = 2.0 * spec.width * spec.width;
      const Vec2 c = spec.center;
      base = [a, s2, c](const Vec2& p) {
        return a * std::exp(-(p - c).squaredNorm() / s2);
      };
      break;
    }
    case SourceSpec::Kind::HarmonicPoly: {
      const auto coeffs = spec.coeffs;
      base = [coeffs](const Vec2& p) { return harmonic_poly(coeffs, p); };
      break;
    }
    case SourceSpec::Kind::X1Profile: {
      const double a = spec.amplitude, c = spec.x1_center;
      const double s2 = 2.0 * spec.width * spec.width;
      const double xmax = (curve.kind() == CurveKind::Circle)
                              ? curve.spec().a
                              : curve.circumradius();
      switch (spec.profile) {
        case SourceSpec::Profile::Gaussian:
          base = [a, c, s2](const Vec2& p) {
            const double d = p.x() - c;
            return a * std::exp(-d * d / s2);
          };
          break;
        case SourceSpec::Profile::Cosine:
          base = [a, xmax](const Vec2& p) {
            return a * std::cos(0.5 * kPi * p.x() / xmax);
          };
          break;
        case SourceSpec::Profile::OddGaussian:
          base = [a, c, s2](const Vec2& p) {
            const double d = p.x() - c;
            return a * d * std::exp(-d * d / s2);
          };
          break;
      }
      break;
    }
  }

  ScalarSampler sampler =
      cutoff ? ScalarSampler([base, curve_copy](const Vec2& p) {
        return base(p) * smooth_cutoff(radial_fraction(curve_copy, p));
      })
             : base;
  return make_source_field(grid, std::move(sampler));
}

std::string to_string(PairRelation r) {
  switch (r) {
    case PairRelation::SignFlip: return "sign-flip";
    case PairRelation::HarmonicDiff: return "harmonic-diff";
    case PairRelation::BiharmonicDiff: return "biharmonic-diff";
    case PairRelation::DirectionInvariant: return "direction-invariant";
  }
  return "?";
}

SourcePair make_sign_flip_pair(const SourceSpec& base, const Curve& curve,
                               const VolumeGrid& grid) {
  SourcePair pair;
  pair.relation = PairRelation::SignFlip;
  pair.f1 = make_source(base, curve, grid);
  const ScalarSampler s = pair.f1.sampler;
  pair.f2.sampler = [s](const Vec2& p) { return -s(p); };
  pair.f2.samples = -pair.f1.samples;
  pair.f2.has_analytic_sampler = pair.f1.has_analytic_sampler;
  pair.f2.support_inside = pair.f1.support_inside;
  return pair;
}

namespace {

SourceField sum_sources(const VolumeGrid& grid, const SourceField& a,
                        ScalarSampler extra) {
  SourceField out;
  const ScalarSampler sa = a.sampler;
  const ScalarSampler se = extra;
  out.sampler = [sa, se](const Vec2& p) { return sa(p) + se(p); };
  out.samples.resize(grid.size());
  for (int m = 0; m < grid.size(); ++m)
    out.samples[m] = out.sampler(grid.center(m));
  out.has_analytic_sampler = a.has_analytic_sampler;
  out.support_inside = a.support_inside;
  return out;
}

}  // namespace

SourcePair make_harmonic_diff_pair(const SourceSpec& base,
                                   const std::array<double, 5>& harmonic,
                                   const Curve& curve, const VolumeGrid& grid) {
  SourcePair pair;
  pair.relation = PairRelation::HarmonicDiff;
  pair.f2 = make_source(base, curve, grid);
  pair.f1 = sum_sources(grid, pair.f2, [harmonic](const Vec2& p) {
    return harmonic_poly(harmonic, p);
  });
  return pair;
}

SourcePair make_biharmonic_diff_pair(const SourceSpec& base, double scale,
                                     const Curve& curve,
                                     const VolumeGrid& grid) {
  SourcePair pair;
  pair.relation = PairRelation::BiharmonicDiff;
  pair.f2 = make_source(base, curve, grid);
  pair.f1 = sum_sources(grid, pair.f2, [scale](const Vec2& p) {
    return scale * p.x() * p.x() * p.x();
  });
  return pair;
}

SourcePair make_direction_invariant_pair(const SourceSpec& profile1,
                                         const SourceSpec& profile2,
                                         const Curve& curve,
                                         const VolumeGrid& grid) {
  if (profile1.kind != SourceSpec::Kind::X1Profile ||
      profile2.kind != SourceSpec::Kind::X1Profile)
    throw ValidationError(
        "make_direction_invariant_pair: both specs must be x1 profiles");
  SourcePair pair;
  pair.relation = PairRelation::DirectionInvariant;
  pair.eta = Vec2(0.0, 1.0);
  pair.f1 = make_source(profile1, curve, grid);
  pair.f2 = make_source(profile2, curve, grid);
  return pair;
}

ComparisonReport compare_measurements(const MeasurementSet& m1,
                                      const MeasurementSet& m2) {
  if (m1.setup_id != m2.setup_id || m1.mode != m2.mode ||
      m1.omegas != m2.omegas)
    throw ValidationError("compare_measurements: mismatched setups");
  ComparisonReport rep;
  for (size_t k = 0; k < m1.omegas.size(); ++k) {
    const double d = (m1.values.col(static_cast<long>(k)) -
                      m2.values.col(static_cast<long>(k)))
                         .cwiseAbs()
                         .maxCoeff();
    rep.per_frequency.push_back(d);
    rep.max_diff = std::max(rep.max_diff, d);
  }
  return rep;
}

ComparisonReport compare_measurements(const SourcePair& pair,
                                      const ExperimentSetup& setup,
                                      std::span<const double> omegas,
                                      HeatQMode mode) {
  const MeasurementSet m1 = boundary_measurement(setup, pair.f1, omegas, mode);
  const MeasurementSet m2 = boundary_measurement(setup, pair.f2, omegas, mode);
  return compare_measurements(m1, m2);
}

MomentReport verify_moment_identity(const SourcePair& pair,
                                    const VolumeGrid& grid) {
  MomentReport rep;
  rep.t1_f1 = total_mass(grid, pair.f1.samples);
  rep.t1_f2 = total_mass(grid, pair.f2.samples);
  rep.residual = std::abs(std::abs(rep.t1_f1) - std::abs(rep.t1_f2));
  return rep;
}

TraceReport verify_trace_identity(const SourcePair& pair, const Curve& curve,
                                  const VolumeGrid& grid) {
  const Eigen::VectorXd w1 = newtonian_on_grid(grid, pair.f1.samples);
  const Eigen::VectorXd w2 = newtonian_on_grid(grid, pair.f2.samples);
  TraceReport rep;
  for (int j = 0; j < curve.size(); ++j) {
    const Vec2& x = curve.point(j);
    const double n1 = volume_potential_refined(grid, w1, x);
    const double n2 = volume_potential_refined(grid, w2, x);
    rep.residual_plus = std::max(rep.residual_plus, std::abs(n1 - n2));
    rep.residual_minus = std::max(rep.residual_minus, std::abs(n1 + n2));
  }
  rep.best_sign = rep.residual_plus <= rep.residual_minus ? 1 : -1;
  return rep;
}

BiharmonicTestFunction test_fn_constant(double c) {
  BiharmonicTestFunction f;
  f.value = [c](const Vec2&) { return c; };
  f.gradient = [](const Vec2&) { return Vec2::Zero().eval(); };
  f.laplacian = [](const Vec2&) { return 0.0; };
  f.laplacian_gradient = [](const Vec2&) { return Vec2::Zero().eval(); };
  f.bilaplacian = [](const Vec2&) { return 0.0; };
  return f;
}

BiharmonicTestFunction test_fn_radial_quartic(double R) {
  // w = (|x|^2 - R^2)^2; lap w = 16 |x|^2 - 8 R^2 + ... computed exactly:
  // lap w = 16 r^2 - 8 R^2 + 8 r^2 = ... derive: w = r^4 - 2 R^2 r^2 + R^4,
  // lap r^4 = 16 r^2, lap r^2 = 4  =>  lap w = 16 r^2 - 8 R^2, lap^2 w = 64.
  BiharmonicTestFunction f;
  const double R2 = R * R;
  f.value = [R2](const Vec2& p) {
    const double d = p.squaredNorm() - R2;
    return d * d;
  };
  f.gradient = [R2](const Vec2& p) {
    return (4.0 * (p.squaredNorm() - R2) * p).eval();
  };
  f.laplacian = [R2](const Vec2& p) { return 16.0 * p.squaredNorm() - 8.0 * R2; };
  f.laplacian_gradient = [](const Vec2& p) { return (32.0 * p).eval(); };
  f.bilaplacian = [](const Vec2&) { return 64.0; };
  return f;
}

BiharmonicTestFunction test_fn_harmonic_quadratic() {
  BiharmonicTestFunction f;
  f.value = [](const Vec2& p) { return p.x() * p.x() - p.y() * p.y(); };
  f.gradient = [](const Vec2& p) { return Vec2(2.0 * p.x(), -2.0 * p.y()).eval(); };
  f.laplacian = [](const Vec2&) { return 0.0; };
  f.laplacian_gradient = [](const Vec2&) { return Vec2::Zero().eval(); };
  f.bilaplacian = [](const Vec2&) { return 0.0; };
  return f;
}

BiharmonicTestFunction test_fn_biharmonic_cubic(double scale) {
  BiharmonicTestFunction f;
  f.value = [scale](const Vec2& p) { return scale * p.x() * p.x() * p.x(); };
  f.gradient = [scale](const Vec2& p) {
    return Vec2(3.0 * scale * p.x() * p.x(), 0.0).eval();
  };
  f.laplacian = [scale](const Vec2& p) { return 6.0 * scale * p.x(); };
  f.laplacian_gradient = [scale](const Vec2&) {
    return Vec2(6.0 * scale, 0.0).eval();
  };
  f.bilaplacian = [](const Vec2&) { return 0.0; };
  return f;
}

GreensReport greens_identity_check(const BiharmonicTestFunction& w,
                                   const BiharmonicTestFunction& v,
                                   const VolumeGrid& grid, const Curve& curve) {
  GreensReport rep;
  auto integrand = [&](const Vec2& p) {
    return v.value(p) * w.bilaplacian(p) - w.value(p) * v.bilaplacian(p);
  };
  if (curve.kind() == CurveKind::Kite) {
    double sum = 0.0;
    for (int m = 0; m < grid.size(); ++m)
      sum += integrand(grid.center(m)) * grid.cell_area(m);
    rep.volume_side = sum;
  } else {
    rep.volume_side = domain_integral(curve, integrand, 128, 512);
  }
  double bsum = 0.0;
  for (int j = 0; j < curve.size(); ++j) {
    const Vec2& x = curve.point(j);
    const Vec2& nu = curve.normal(j);
    bsum += curve.weight(j) *
            (v.value(x) * w.laplacian_gradient(x).dot(nu) +
             v.laplacian(x) * w.gradient(x).dot(nu) -
             w.value(x) * v.laplacian_gradient(x).dot(nu) -
             w.laplacian(x) * v.gradient(x).dot(nu));
  }
  rep.boundary_side = bsum;
  return rep;
}

NavierReport navier_vanishing_check(const SourceField& f,
                                    const BiharmonicTestFunction& v,
                                    const Curve& curve, const VolumeGrid& grid,
                                    const BoundaryOperators& ops) {
  const int n = curve.size();
  const bool analytic =
      f.has_analytic_sampler && curve.kind() != CurveKind::Kite;

  // First Poisson split: z = N_D[f] + S[mu1], z = 0 on the boundary.
  Eigen::VectorXd g1(n), dg1(n);
  for (int j = 0; j < n; ++j) {
    const Vec2 nu = curve.normal(j);
    if (analytic) {
      g1[j] = newtonian_potential_analytic(curve, f.sampler, curve.point(j), &nu);
      dg1[j] = newtonian_normal_derivative_analytic(curve, f.sampler,
                                                    curve.point(j), nu);
    } else {
      g1[j] = volume_potential_refined(grid, f.samples, curve.point(j));
      dg1[j] = volume_potential_gradient_refined(grid, f.samples,
                                                 curve.point(j))
                   .dot(nu);
    }
  }
  const Eigen::VectorXd mu1 = ops.solve_single_layer(-g1);

  const Eigen::VectorXd w_f = newtonian_on_grid(grid, f.samples);
  SingleLayerEvaluator s_mu1(curve, mu1);
  Eigen::VectorXd z(grid.size());
  for (int m = 0; m < grid.size(); ++m)
    z[m] = w_f[m] + s_mu1(grid.center(m));

  // Second split: w = N_D[z] + S[mu2], w = 0 on the boundary.
  Eigen::VectorXd g2(n);
  for (int j = 0; j < n; ++j)
    g2[j] = volume_potential_refined(grid, z, curve.point(j));
  const Eigen::VectorXd mu2 = ops.solve_single_layer(-g2);

  // Navier data at off-node boundary probes.
  const int level = 3;
  const int N = n << level;
  const Eigen::VectorXd s1_fine = single_layer_on_surface_upsampled(curve, mu1, level);
  const Eigen::VectorXd s2_fine = single_layer_on_surface_upsampled(curve, mu2, level);
  NavierReport rep;
  const int probes = 32;
  for (int p = 0; p < probes; ++p) {
    const int l = (N / probes) * p + (1 << (level - 1));  // off-node index
    const double tau = kTwoPi * l / N;
    const Vec2 x = curve.point_at(tau);
    const Vec2 nu = curve.normal_at(tau);
    double zf;  // trace of N_D[f] at the probe
    if (analytic)
      zf = newtonian_potential_analytic(curve, f.sampler, x, &nu);
    else
      zf = volume_potential_refined(grid, f.samples, x);
    const double lap_w = zf + s1_fine[l];  // z at the probe
    const double w_val = volume_potential_refined(grid, z, x) + s2_fine[l];
    rep.data_residual =
        std::max({rep.data_residual, std::abs(lap_w), std::abs(w_val)});
  }

  // Green identity with the constructed solution.
  auto fv = [&](const Vec2& p) { return f.sampler(p) * v.value(p); };
  if (analytic) {
    rep.volume_side = domain_integral(curve, fv, 128, 512);
  } else {
    double sum = 0.0;
    for (int m = 0; m < grid.size(); ++m)
      sum += f.samples[m] * v.value(grid.center(m)) * grid.cell_area(m);
    rep.volume_side = sum;
  }

  const Eigen::VectorXd w_node = g2 + ops.S * mu2;       // ~0
  const Eigen::VectorXd lapw_node = g1 + ops.S * mu1;    // ~0
  const Eigen::VectorXd dlapw =
      dg1 + (-0.5 * mu1 + ops.Kstar * mu1);  // interior derivative of z
  Eigen::VectorXd dw(n);
  for (int j = 0; j < n; ++j)
    dw[j] = volume_potential_gradient_refined(grid, z, curve.point(j))
                .dot(curve.normal(j));
  dw += -0.5 * mu2 + ops.Kstar * mu2;

  double bsum = 0.0;
  for (int j = 0; j < n; ++j) {
    const Vec2& x = curve.point(j);
    const Vec2& nu = curve.normal(j);
    bsum += curve.weight(j) *
            (v.value(x) * dlapw[j] + v.laplacian(x) * dw[j] -
             w_node[j] * v.laplacian_gradient(x).dot(nu) -
             lapw_node[j] * v.gradient(x).dot(nu));
  }
  rep.boundary_side = bsum;
  return rep;
}

FourierDirectionReport fourier_direction_test(const SourceField& f,
                                              const Curve& curve,
                                              const VolumeGrid& grid,
                                              std::span<const double> zeta11) {
  if (curve.kind() == CurveKind::Kite)
    throw ValidationError("fourier_direction_test: kite chords unsupported");
  if (!f.has_analytic_sampler)
    throw ValidationError("fourier_direction_test: analytic sampler required");

  // Invariance precondition: samples on full lattice columns must not vary
  // along x2.
  double scale = f.samples.cwiseAbs().maxCoeff();
  if (scale == 0.0) scale = 1.0;
  double max_dir = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    if (!grid.is_full_cell(m)) continue;
    const Vec2 up = grid.center(m) + Vec2(0.0, grid.h());
    const int mu = grid.cell_at(up);
    if (mu < 0 || !grid.is_full_cell(mu)) continue;
    max_dir = std::max(max_dir,
                       std::abs(f.samples[mu] - f.samples[m]) / scale);
  }
  if (max_dir > 1e-10)
    throw ValidationError(
        "fourier_direction_test: source is not invariant along x2");

  const double a = curve.spec().a;
  const double b =
      (curve.kind() == CurveKind::Circle) ? curve.spec().a : curve.spec().b;

  FourierDirectionReport rep;
  for (double z11 : zeta11) {
    const double z22 = z11;  // zeta = (z, iz), z11^2 = z22^2
    auto integrand = [&](const Vec2& p) -> Complex {
      return f.sampler(p) * std::exp(kI * z11 * p.x() - z22 * p.y());
    };
    const Complex f2d = domain_integral_complex(curve, integrand, 128, 512);

    // Chord-reduced route: int g(x1) e^{i z11 x1} C(x1) dx1 with the exact
    // x2-line integral C over the chord.
    const GaussRule& gr = gauss_legendre(16);
    const std::vector<double> edges = graded_edges(-a, a, 10);
    Complex f1d = 0.0;
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p] + edges[p + 1]);
      const double half = 0.5 * (edges[p + 1] - edges[p]);
      for (size_t q = 0; q < gr.x.size(); ++q) {
        const double x1 = mid + half * gr.x[q];
        const double c = b * std::sqrt(std::max(0.0, 1.0 - x1 * x1 / (a * a)));
        if (c <= 0.0) continue;
        const double chord = 2.0 * std::sinh(z22 * c) / z22;
        f1d += half * gr.w[q] * f.sampler(Vec2(x1, 0.0)) *
               std::exp(kI * z11 * x1) * chord;
      }
    }

    Complex gsum = 0.0;
    for (int m = 0; m < grid.size(); ++m)
      gsum += f.samples[m] *
              std::exp(kI * z11 * grid.center(m).x() -
                       z22 * grid.center(m).y()) *
              grid.cell_area(m);

    rep.zeta11.push_back(z11);
    rep.two_dim.push_back(f2d);
    rep.reduced_1d.push_back(f1d);
    rep.grid_sum.push_back(gsum);
    const double denom = std::max(std::abs(f2d), 1e-300);
    rep.max_rel_diff = std::max(rep.max_rel_diff, std::abs(f2d - f1d) / denom);
  }
  return rep;
}

SweepFit fit_frequency_coefficients(std::span<const double> omegas,
                                    std::span<const double> values,
                                    HeatQMode mode, double background_at_x) {
  const int K = static_cast<int>(omegas.size());
  if (K < 3 || values.size() != omegas.size())
    throw ValidationError("fit_frequency_coefficients: need >= 3 samples");
  Eigen::MatrixXd A(K, 3);
  Eigen::VectorXd y(K);
  for (int k = 0; k < K; ++k) {
    const double w = omegas[k], lw = std::log(w);
    A(k, 0) = w * w * lw * lw;
    A(k, 1) = w * w * lw;
    A(k, 2) = w * w;
    y[k] = values[k] - (mode == HeatQMode::Asymptotic ? w * w * background_at_x
                                                      : background_at_x);
  }
  Eigen::Vector3d norms;
  for (int c = 0; c < 3; ++c) {
    norms[c] = A.col(c).norm();
    A.col(c) /= norms[c];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(2);
  if (cond > 1e10)
    throw NumericalError(
        "fit_frequency_coefficients: design matrix condition number " +
        std::to_string(cond) + " exceeds 1e10; widen the sweep");
  const Eigen::Vector3d sol = svd.solve(y);
  SweepFit fit;
  fit.c2ln2 = sol[0] / norms[0];
  fit.cln = sol[1] / norms[1];
  fit.c0 = sol[2] / norms[2];
  fit.residual = (A * sol - y).norm();
  fit.cond = cond;
  return fit;
}

double recover_total_intensity(const SweepFit& fit_f, const SweepFit& fit_unit,
                               double t1_unit) {
  const double ratio = fit_f.c2ln2 / fit_unit.c2ln2;
  if (!(ratio >= 0.0))
    throw NumericalError(
        "recover_total_intensity: negative coefficient ratio, fit failure");
  return std::abs(t1_unit) * std::sqrt(ratio);
}

double recover_total_intensity(const MeasurementSet& m_f,
                               const MeasurementSet& m_unit,
                               const ExperimentSetup& setup, double t1_unit) {
  if (m_f.setup_id != m_unit.setup_id || m_f.omegas != m_unit.omegas ||
      m_f.mode != m_unit.mode)
    throw ValidationError("recover_total_intensity: mismatched sweeps");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < m_f.thetas.size(); ++i) {
    const Vec2 x = m_f.point(static_cast<int>(i));
    const double vb = setup.background.value(x);
    std::vector<double> vf(m_f.omegas.size()), vu(m_f.omegas.size());
    for (size_t k = 0; k < m_f.omegas.size(); ++k) {
      vf[k] = m_f.values(static_cast<long>(i), static_cast<long>(k));
      vu[k] = m_unit.values(static_cast<long>(i), static_cast<long>(k));
    }
    const SweepFit ff = fit_frequency_coefficients(m_f.omegas, vf, m_f.mode, vb);
    const SweepFit fu =
        fit_frequency_coefficients(m_unit.omegas, vu, m_unit.mode, vb);
    num += ff.c2ln2 * fu.c2ln2;
    den += fu.c2ln2 * fu.c2ln2;
  }
  const double ratio = num / den;
  if (!(ratio >= 0.0))
    throw NumericalError(
        "recover_total_intensity: negative coefficient ratio, fit failure");
  return std::abs(t1_unit) * std::sqrt(ratio);
}

RecoveryResult reconstruct_parametric(const MeasurementSet& observed,
                                      const std::vector<SourceSpec>& atoms,
                                      const ExperimentSetup& setup,
                                      const RecoveryOptions& opt) {
  const int na = static_cast<int>(atoms.size());
  if (na < 1 || na > 5)
    throw ValidationError("reconstruct_parametric: 1..5 atoms supported");
  if (observed.setup_id != setup.setup_id)
    throw ValidationError("reconstruct_parametric: measurements belong to a different setup");

  const VolumeGrid& grid = *setup.grid;
  const Curve& curve = *setup.curve;
  static const ExpansionConstants ec = ExpansionConstants::make(2);
  const double N = ec.N;
  const double wp2_tau = setup.drude.omega_p * setup.drude.omega_p / setup.drude.tau;
  const double gc = setup.material.gamma_c;

  std::vector<SourceField> fields;
  std::vector<Eigen::VectorXd> w_fields;
  std::vector<double> t1(na);
  for (int i = 0; i < na; ++i) {
    fields.push_back(make_source(atoms[i], curve, grid));
    w_fields.push_back(newtonian_on_grid(grid, fields.back().samples));
    t1[i] = total_mass(grid, fields.back().samples);
  }

  const int n_theta = static_cast<int>(observed.thetas.size());
  const int n_omega = static_cast<int>(observed.omegas.size());
  std::vector<Vec2> pts(n_theta);
  for (int i = 0; i < n_theta; ++i) pts[i] = observed.point(i);

  // Symmetric polarization of the quadratic source terms per atom pair.
  struct PairModel {
    int i, j;
    double mult;
    Eigen::MatrixXd v;  // n_theta x n_omega Q-channel response
  };
  std::vector<PairModel> pairs;
  for (int i = 0; i < na; ++i) {
    for (int j = i; j < na; ++j) {
      HeatSourceTerms q;
      q.mode = HeatQMode::Asymptotic;
      q.Q1 = wp2_tau / (8.0 * kPi * kPi * kPi * gc) * t1[i] * t1[j];
      const Eigen::VectorXd cross =
          0.5 * (t1[i] * w_fields[j] + t1[j] * w_fields[i]);
      q.Q2 = wp2_tau / (2.0 * kPi * kPi * gc) *
             (cross + Eigen::VectorXd::Constant(grid.size(), N * t1[i] * t1[j]));
      q.Q3 = wp2_tau / (kTwoPi * gc) *
             (w_fields[i].cwiseProduct(w_fields[j]) +
              Eigen::VectorXd::Constant(grid.size(),
                                        (N * N + 1.0 / 16.0) * t1[i] * t1[j]) +
              2.0 * N * cross);
      const AsymptoticHeatExpansion exp = asymptotic_heat_expansion(setup, q);
      SingleLayerEvaluator e1(curve, exp.gf1);
      SingleLayerEvaluator e2(curve, exp.gf2);
      SingleLayerEvaluator e3(curve, exp.gf3);
      PairModel pm;
      pm.i = i;
      pm.j = j;
      pm.mult = (i == j) ? 1.0 : 2.0;
      pm.v.resize(n_theta, n_omega);
      for (int t = 0; t < n_theta; ++t) {
        const double s1 = e1(pts[t]), s2 = e2(pts[t]), s3 = e3(pts[t]);
        for (int k = 0; k < n_omega; ++k) {
          const double w = observed.omegas[k], lw = std::log(w);
          pm.v(t, k) = w * w * lw * lw * s1 + w * w * lw * s2 + w * w * s3;
        }
      }
      pairs.push_back(std::move(pm));
    }
  }

  // Static background channel (independent of the coefficients).
  Eigen::MatrixXd v_static(n_theta, n_omega);
  {
    const Eigen::VectorXd resp = static_background_response(setup);
    // resp holds V + S[-A_D] at the angles; scale by w^2 per the expansion.
    for (int t = 0; t < n_theta; ++t)
      for (int k = 0; k < n_omega; ++k) {
        const double w = observed.omegas[k];
        v_static(t, k) = w * w * resp[t];
      }
  }

  const long total = static_cast<long>(n_theta) * n_omega;
  auto flatten = [&](const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), total).eval();
  };
  const Eigen::VectorXd obs_flat = flatten(observed.values);
  const Eigen::VectorXd static_flat = flatten(v_static);
  std::vector<Eigen::VectorXd> pair_flat;
  for (const auto& pm : pairs) pair_flat.push_back(flatten(pm.v));

  auto model = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd out = static_flat;
    for (size_t p = 0; p < pairs.size(); ++p)
      out += pairs[p].mult * c[pairs[p].i] * c[pairs[p].j] * pair_flat[p];
    return out;
  };
  auto jacobian = [&](const Eigen::VectorXd& c) {
    // d/dc_k of mult c_i c_j V: both index slots contribute, which doubles
    // the diagonal pairs.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(total, na);
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto& pm = pairs[p];
      J.col(pm.i) += pm.mult * c[pm.j] * pair_flat[p];
      J.col(pm.j) += pm.mult * c[pm.i] * pair_flat[p];
    }
    return J;
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RecoveryResult best;
  best.misfit = std::numeric_limits<double>::max();
  const double obs_scale = (obs_flat - static_flat).cwiseAbs().maxCoeff();

  const double floor2 =
      total * std::pow(1e-13 * std::max(obs_scale, 1e-300), 2);
  for (int s = 0; s < opt.starts; ++s) {
    Eigen::VectorXd c(na);
    if (s == 0)
      c.setOnes();
    else
      for (int i = 0; i < na; ++i) c[i] = gauss(rng);
    double lm = 1e-6;
    double misfit = (model(c) - obs_flat).squaredNorm();
    bool settled = false;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
      const Eigen::VectorXd r = model(c) - obs_flat;
      const Eigen::MatrixXd J = jacobian(c);
      const Eigen::MatrixXd JtJ = J.transpose() * J;
      const Eigen::VectorXd g = J.transpose() * r;
      const Eigen::VectorXd step =
          (JtJ + lm * JtJ.diagonal().mean() * Eigen::MatrixXd::Identity(na, na))
              .ldlt()
              .solve(-g);
      const double new_misfit = (model(c + step) - obs_flat).squaredNorm();
      if (new_misfit < misfit) {
        c += step;
        const double drop = misfit - new_misfit;
        misfit = new_misfit;
        lm = std::max(lm * 0.3, 1e-12);
        if (misfit <= floor2 || step.norm() <= 1e-12 * (1.0 + c.norm()) ||
            drop <= opt.tol * misfit) {
          settled = true;
          break;
        }
      } else {
        lm *= 10.0;
        if (lm > 1e14) {
          settled = true;  // damping exhausted at a stationary point
          break;
        }
      }
    }
    if (misfit < best.misfit) {
      best.misfit = misfit;
      best.c_plus = c;
      best.iterations = it;
      best.converged = settled;
    }
  }
  // Normalize the reported branch: leading nonzero coefficient positive.
  for (int i = 0; i < na; ++i) {
    if (std::abs(best.c_plus[i]) > 1e-12) {
      if (best.c_plus[i] < 0.0) best.c_plus = -best.c_plus;
      break;
    }
  }
  best.c_minus = -best.c_plus;
  best.misfit = std::sqrt(best.misfit / total);
  return best;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw ValidationError("log_spaced: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k)
    out[k] = std::exp(std::log(lo) +
                      (std::log(hi) - std::log(lo)) * k / (count - 1));
  return out;
}

}  // namespace photherm
