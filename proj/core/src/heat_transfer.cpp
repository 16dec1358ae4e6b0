// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/heat_transfer.hpp"

#include <cmath>
#include <cstring>

namespace photherm {

void HeatMaterial::validate() const {
  if (!(gamma_c > 0.0))
    throw ValidationError("HeatMaterial: gamma_c must be > 0");
  if (gamma_c == 1.0)
    throw ValidationError("HeatMaterial: gamma_c must differ from 1");
}

Eigen::VectorXd HeatSourceTerms::assemble(double w) const {
  if (mode != HeatQMode::Asymptotic)
    throw ValidationError("HeatSourceTerms::assemble: asymptotic mode only");
  const double lw = std::log(w);
  const double w2 = w * w;
  return (w2 * lw * lw * Q1) * Eigen::VectorXd::Ones(Q2.size()) +
         (w2 * lw) * Q2 + w2 * Q3;
}

HeatSourceTerms compute_Q(const VolumeGrid& grid, const ComplexField& u,
                          double omega, const DrudeParams& drude,
                          const HeatMaterial& material) {
  material.validate();
  if (u.grid != &grid)
    throw ValidationError("compute_Q: field lives on a different grid");
  HeatSourceTerms q;
  q.mode = HeatQMode::Exact;
  q.omega = omega;
  const double im_eps = drude_eps(drude, omega).imag();
  const double scale = omega * im_eps / (kTwoPi * material.gamma_c);
  q.Q = scale * u.values.cwiseAbs2();
  return q;
}

HeatSourceTerms compute_Q(const VolumeGrid& grid, const SourceField& f,
                          const Eigen::VectorXd& newtonian,
                          const DrudeParams& drude,
                          const HeatMaterial& material) {
  material.validate();
  drude.validate();
  static const ExpansionConstants ec = ExpansionConstants::make(2);
  const double N = ec.N;
  const double t1 = total_mass(grid, f.samples);
  const double wp2_tau = drude.omega_p * drude.omega_p / drude.tau;
  const double gc = material.gamma_c;

  HeatSourceTerms q;
  q.mode = HeatQMode::Asymptotic;
  q.Q1 = wp2_tau / (8.0 * kPi * kPi * kPi * gc) * (t1 * t1);
  q.Q2 = wp2_tau / (2.0 * kPi * kPi * gc) *
         (t1 * newtonian + Eigen::VectorXd::Constant(newtonian.size(),
                                                     N * t1 * t1));
  q.Q3 = wp2_tau / (kTwoPi * gc) *
         (newtonian.cwiseAbs2() +
          Eigen::VectorXd::Constant(newtonian.size(),
                                    (N * N + 1.0 / 16.0) * t1 * t1) +
          2.0 * N * t1 * newtonian);
  return q;
}

HeatBoundaryData newtonian_boundary_data(const Curve& curve,
                                         const VolumeGrid& grid,
                                         const Eigen::VectorXd& q) {
  HeatBoundaryData data;
  data.trace.resize(curve.size());
  data.dnu.resize(curve.size());
  for (int j = 0; j < curve.size(); ++j) {
    const Vec2& x = curve.point(j);
    data.trace[j] = volume_potential_refined(grid, q, x);
    data.dnu[j] =
        volume_potential_gradient_refined(grid, q, x).dot(curve.normal(j));
  }
  return data;
}

HeatBoundaryData newtonian_boundary_data(const Curve& curve,
                                         const ScalarSampler& q) {
  HeatBoundaryData data;
  data.trace.resize(curve.size());
  data.dnu.resize(curve.size());
  for (int j = 0; j < curve.size(); ++j) {
    const Vec2 nu = curve.normal(j);
    data.trace[j] =
        newtonian_potential_analytic(curve, q, curve.point(j), &nu);
    data.dnu[j] =
        newtonian_normal_derivative_analytic(curve, q, curve.point(j), nu);
  }
  return data;
}

HeatDensities solve_heat_densities(const Curve& curve,
                                   const BoundaryOperators& ops,
                                   const HeatBoundaryData& ndq,
                                   const BackgroundField& V,
                                   const HeatMaterial& material,
                                   HeatRoute route) {
  material.validate();
  const int n = curve.size();
  const double gc = material.gamma_c;

  // The explicit-inverse route needs S^{-1}; at logarithmic capacity one the
  // plain operator degenerates and both routes switch to the modified one.
  const bool use_mod = !ops.plain_single_layer_invertible();
  const Eigen::MatrixXd& S = use_mod ? ops.S_mod : ops.S;

  Eigen::VectorXd rhs1(n), rhs2(n);
  for (int j = 0; j < n; ++j) {
    rhs1[j] = ndq.trace[j] - V.value(curve.point(j));
    rhs2[j] = gc * ndq.dnu[j] - V.gradient(curve.point(j)).dot(curve.normal(j));
  }

  const Eigen::MatrixXd half_plus = 0.5 * Eigen::MatrixXd::Identity(n, n) + ops.Kstar;
  const Eigen::MatrixXd half_minus = 0.5 * Eigen::MatrixXd::Identity(n, n) - ops.Kstar;

  HeatDensities out;
  if (route == HeatRoute::DirectBlock) {
    Eigen::MatrixXd A(2 * n, 2 * n);
    A.topLeftCorner(n, n) = S;
    A.topRightCorner(n, n) = -S;
    A.bottomLeftCorner(n, n) = half_plus;
    A.bottomRightCorner(n, n) = gc * half_minus;  // -gamma(-I/2 + K*)
    Eigen::VectorXd rhs(2 * n);
    rhs.head(n) = rhs1;
    rhs.tail(n) = rhs2;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    out.rcond = lu.rcond();
    if (out.rcond < 1e-14)
      throw NumericalError("solve_heat_densities: block matrix is numerically singular");
    const Eigen::VectorXd sol = lu.solve(rhs);
    out.psi = sol.head(n);
    out.phi = sol.tail(n);
    out.residual = (A * sol - rhs).cwiseAbs().maxCoeff();
  } else {
    const double lambda = material.lambda();
    Eigen::PartialPivLU<Eigen::MatrixXd> resolvent(
        lambda * Eigen::MatrixXd::Identity(n, n) - ops.Kstar);
    out.rcond = resolvent.rcond();
    const Eigen::VectorXd s_inv_rhs1 =
        use_mod ? static_cast<Eigen::VectorXd>(ops.S_mod_inv * rhs1)
                : static_cast<Eigen::VectorXd>(ops.S.partialPivLu().solve(rhs1));
    const Eigen::VectorXd res_rhs2 = resolvent.solve(rhs2);
    out.psi = gc / (gc - 1.0) * resolvent.solve(half_minus * s_inv_rhs1) +
              1.0 / (gc - 1.0) * res_rhs2;
    out.phi = -1.0 / (gc - 1.0) * resolvent.solve(half_plus * s_inv_rhs1) +
              1.0 / (gc - 1.0) * res_rhs2;
    const Eigen::VectorXd r1 = S * out.psi - S * out.phi - rhs1;
    const Eigen::VectorXd r2 =
        half_plus * out.psi + gc * (half_minus * out.phi) - rhs2;
    out.residual = std::max(r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff());
  }
  return out;
}

TemperatureField::TemperatureField(const Curve& curve, const VolumeGrid& grid,
                                   const BoundaryOperators& ops,
                                   HeatDensities densities,
                                   Eigen::VectorXd q_samples,
                                   BackgroundField background,
                                   ScalarSampler q_sampler)
    : curve_(&curve),
      grid_(&grid),
      ops_(&ops),
      densities_(std::move(densities)),
      q_(std::move(q_samples)),
      background_(background),
      q_sampler_(std::move(q_sampler)),
      eval_psi_(curve, densities_.psi),
      eval_phi_(curve, densities_.phi) {}

double TemperatureField::operator()(const Vec2& x) const {
  const double node_dist = curve_->min_node_distance(x);
  if (node_dist < 1e-12) {
    // Interior trace at a node.
    for (int j = 0; j < curve_->size(); ++j) {
      if ((x - curve_->point(j)).norm() < 1e-12) {
        const Eigen::VectorXd s_phi = ops_->S * densities_.phi;
        double ndq;
        if (q_sampler_) {
          const Vec2 nu = curve_->normal(j);
          ndq = newtonian_potential_analytic(*curve_, q_sampler_, x, &nu);
        } else {
          ndq = volume_potential_refined(*grid_, q_, x);
        }
        return s_phi[j] + ndq;
      }
    }
  }
  if (curve_->inside(x)) {
    double ndq;
    if (node_dist < 3.0 * grid_->h())
      ndq = q_sampler_ ? newtonian_potential_analytic(*curve_, q_sampler_, x)
                       : volume_potential_refined(*grid_, q_, x);
    else
      ndq = volume_potential(*grid_, q_, x);
    return eval_phi_(x) + ndq;
  }
  return background_.value(x) + eval_psi_(x);
}

double temperature_field(const Curve& curve, const VolumeGrid& grid,
                         const BoundaryOperators& ops,
                         const HeatDensities& densities,
                         const Eigen::VectorXd& q,
                         const BackgroundField& background, const Vec2& x) {
  TemperatureField field(curve, grid, ops, densities, q, background);
  return field(x);
}

void ExperimentSetup::validate() const {
  drude.validate();
  material.validate();
  if (!(meas_radius > curve->circumradius()))
    throw ValidationError(
        "ExperimentSetup: measurement radius must enclose the curve");
  if (n_angles < 1) throw ValidationError("ExperimentSetup: n_angles >= 1");
}

namespace {

std::uint64_t mix_hash(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

ExperimentSetup make_setup(const Curve& curve, double grid_h,
                           const DrudeParams& drude,
                           const HeatMaterial& material,
                           const BackgroundField& background,
                           double meas_radius, int n_angles) {
  ExperimentSetup s;
  s.curve = std::make_shared<Curve>(curve);
  s.grid = std::make_shared<VolumeGrid>(make_grid(*s.curve, grid_h));
  s.ops = std::make_shared<BoundaryOperators>(
      assemble_boundary_operators(*s.curve));
  s.drude = drude;
  s.material = material;
  s.background = background;
  s.meas_radius = meas_radius;
  s.n_angles = n_angles;
  std::uint64_t h = 1469598103934665603ull;
  h = mix_hash(h, static_cast<double>(curve.kind()));
  h = mix_hash(h, curve.spec().a);
  h = mix_hash(h, curve.spec().b);
  h = mix_hash(h, static_cast<double>(curve.size()));
  h = mix_hash(h, grid_h);
  h = mix_hash(h, drude.omega_p);
  h = mix_hash(h, drude.tau);
  h = mix_hash(h, material.gamma_c);
  h = mix_hash(h, background.c0);
  h = mix_hash(h, background.cx);
  h = mix_hash(h, background.cy);
  h = mix_hash(h, background.cxx);
  h = mix_hash(h, background.cxy);
  h = mix_hash(h, meas_radius);
  h = mix_hash(h, static_cast<double>(n_angles));
  s.setup_id = h;
  s.validate();
  return s;
}

AsymptoticHeatExpansion asymptotic_heat_expansion(const ExperimentSetup& setup,
                                                  const HeatSourceTerms& q) {
  if (q.mode != HeatQMode::Asymptotic)
    throw ValidationError("asymptotic_heat_expansion: asymptotic Q required");
  const Curve& curve = *setup.curve;
  const BoundaryOperators& ops = *setup.ops;
  const int n = curve.size();
  const double gc = setup.material.gamma_c;
  const double lambda = setup.material.lambda();

  const bool use_mod = !ops.plain_single_layer_invertible();
  Eigen::PartialPivLU<Eigen::MatrixXd> s_lu;
  if (!use_mod) s_lu.compute(ops.S);
  auto s_solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    return use_mod ? static_cast<Eigen::VectorXd>(ops.S_mod_inv * rhs)
                   : static_cast<Eigen::VectorXd>(s_lu.solve(rhs));
  };

  Eigen::PartialPivLU<Eigen::MatrixXd> resolvent(
      lambda * Eigen::MatrixXd::Identity(n, n) - ops.Kstar);
  const Eigen::MatrixXd half_minus =
      0.5 * Eigen::MatrixXd::Identity(n, n) - ops.Kstar;

  // G_i + F_i from the Q_i boundary data; Q1 is constant so its data comes
  // from the unit sampler scaled by Q1.
  const HeatBoundaryData unit = newtonian_boundary_data(
      curve, [](const Vec2&) { return 1.0; });
  auto expansion_density = [&](const Eigen::VectorXd& trace,
                               const Eigen::VectorXd& dnu) -> Eigen::VectorXd {
    return gc / (gc - 1.0) *
           (resolvent.solve(half_minus * s_solve(trace)) +
            resolvent.solve(dnu));
  };

  AsymptoticHeatExpansion exp;
  exp.gf1 = expansion_density(q.Q1 * unit.trace, q.Q1 * unit.dnu);
  const HeatBoundaryData d2 =
      newtonian_boundary_data(curve, *setup.grid, q.Q2);
  exp.gf2 = expansion_density(d2.trace, d2.dnu);
  const HeatBoundaryData d3 =
      newtonian_boundary_data(curve, *setup.grid, q.Q3);
  exp.gf3 = expansion_density(d3.trace, d3.dnu);

  // A_D from the background data.
  Eigen::VectorXd v_trace(n), v_dnu(n);
  for (int j = 0; j < n; ++j) {
    v_trace[j] = setup.background.value(curve.point(j));
    v_dnu[j] = setup.background.gradient(curve.point(j)).dot(curve.normal(j));
  }
  exp.a_d = gc / (gc - 1.0) * resolvent.solve(half_minus * s_solve(v_trace)) +
            1.0 / (gc - 1.0) * resolvent.solve(v_dnu);
  return exp;
}

Eigen::VectorXd static_background_response(const ExperimentSetup& setup) {
  // Source-free solve: psi_V = -A_D, v = V + S[psi_V] on the circle.
  HeatSourceTerms zero;
  zero.mode = HeatQMode::Asymptotic;
  zero.Q1 = 0.0;
  zero.Q2 = Eigen::VectorXd::Zero(setup.grid->size());
  zero.Q3 = Eigen::VectorXd::Zero(setup.grid->size());
  const AsymptoticHeatExpansion exp = asymptotic_heat_expansion(setup, zero);
  SingleLayerEvaluator eval(*setup.curve, -exp.a_d);
  Eigen::VectorXd out(setup.n_angles);
  for (int i = 0; i < setup.n_angles; ++i) {
    const double th = kTwoPi * i / setup.n_angles;
    const Vec2 x(setup.meas_radius * std::cos(th),
                 setup.meas_radius * std::sin(th));
    out[i] = setup.background.value(x) + eval(x);
  }
  return out;
}

MeasurementSet boundary_measurement(const ExperimentSetup& setup,
                                    const SourceField& f,
                                    std::span<const double> omegas,
                                    HeatQMode mode) {
  setup.validate();
  MeasurementSet set;
  set.radius = setup.meas_radius;
  set.mode = mode;
  set.setup_id = setup.setup_id;
  for (int i = 0; i < setup.n_angles; ++i)
    set.thetas.push_back(kTwoPi * i / setup.n_angles);
  set.omegas.assign(omegas.begin(), omegas.end());
  set.values.resize(setup.n_angles, static_cast<long>(omegas.size()));

  std::vector<Vec2> pts(setup.n_angles);
  for (int i = 0; i < setup.n_angles; ++i)
    pts[i] = Vec2(set.radius * std::cos(set.thetas[i]),
                  set.radius * std::sin(set.thetas[i]));

  if (mode == HeatQMode::Asymptotic) {
    const Eigen::VectorXd w_grid = newtonian_on_grid(*setup.grid, f.samples);
    const HeatSourceTerms q =
        compute_Q(*setup.grid, f, w_grid, setup.drude, setup.material);
    const AsymptoticHeatExpansion exp = asymptotic_heat_expansion(setup, q);
    SingleLayerEvaluator e1(*setup.curve, exp.gf1);
    SingleLayerEvaluator e2(*setup.curve, exp.gf2);
    SingleLayerEvaluator e3(*setup.curve,
                            exp.gf3 - exp.a_d);
    for (int i = 0; i < setup.n_angles; ++i) {
      const double s1 = e1(pts[i]);
      const double s2 = e2(pts[i]);
      const double s3 = e3(pts[i]);
      const double vb = setup.background.value(pts[i]);
      for (size_t k = 0; k < omegas.size(); ++k) {
        const double w = set.omegas[k], lw = std::log(w);
        set.values(i, static_cast<long>(k)) =
            w * w * lw * lw * s1 + w * w * lw * s2 + w * w * (vb + s3);
      }
    }
    return set;
  }

  for (size_t k = 0; k < omegas.size(); ++k) {
    const double w = set.omegas[k];
    const ComplexField u =
        solve_lippmann_schwinger(*setup.grid, f, w, setup.drude, setup.ls);
    const HeatSourceTerms q =
        compute_Q(*setup.grid, u, w, setup.drude, setup.material);
    const HeatBoundaryData data =
        newtonian_boundary_data(*setup.curve, *setup.grid, q.Q);
    const HeatDensities densities =
        solve_heat_densities(*setup.curve, *setup.ops, data, setup.background,
                             setup.material, HeatRoute::DirectBlock);
    SingleLayerEvaluator eval(*setup.curve, densities.psi);
    for (int i = 0; i < setup.n_angles; ++i)
      set.values(i, static_cast<long>(k)) =
          setup.background.value(pts[i]) + eval(pts[i]);
  }
  return set;
}

DecayReport decay_check(const Curve& curve, const Eigen::VectorXd& psi,
                        std::span<const double> radii) {
  DecayReport rep;
  rep.monopole = curve.boundary_integral(psi);
  SingleLayerEvaluator eval(curve, psi);
  for (double r : radii) {
    double worst = 0.0;
    for (int j = 0; j < 32; ++j) {
      const double th = kTwoPi * j / 32;
      const Vec2 x(r * std::cos(th), r * std::sin(th));
      worst = std::max(worst,
                       std::abs(eval(x) - rep.monopole / kTwoPi * std::log(r)));
    }
    rep.radii.push_back(r);
    rep.remainder.push_back(worst);
  }
  return rep;
}

}  // namespace photherm
