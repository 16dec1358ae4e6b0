// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/boundary_potentials.hpp"

#include <cmath>

#include "photherm/quadrature.hpp"

namespace photherm {

namespace {

// Kress weights R_j for the quadrature of ln(4 sin^2((t-s)/2)) against a
// trigonometric interpolant on n equispaced nodes.
Eigen::VectorXd kress_weights(int n) {
  Eigen::VectorXd R(n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int m = 1; m < n / 2; ++m)
      sum += std::cos(kTwoPi * m * j / n) / m;
    R[j] = -4.0 * kPi / n * sum -
           4.0 * kPi / (static_cast<double>(n) * n) * ((j % 2) ? -1.0 : 1.0);
  }
  return R;
}

}  // namespace

Eigen::MatrixXd assemble_single_layer(const Curve& curve) {
  const int n = curve.size();
  const Eigen::VectorXd R = kress_weights(n);
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i) {
    const double ti = curve.param(i);
    for (int j = 0; j < n; ++j) {
      double smooth;  // (1/2pi) ln( |x(t)-x(s)| / (2 |sin((t-s)/2)|) )
      if (i == j) {
        smooth = std::log(curve.speed(i)) / kTwoPi;
      } else {
        const double dist = (curve.point(i) - curve.point(j)).norm();
        const double s2 = 2.0 * std::abs(std::sin(0.5 * (ti - curve.param(j))));
        smooth = std::log(dist / s2) / kTwoPi;
      }
      S(i, j) = (R[std::abs(i - j)] / (4.0 * kPi) + kTwoPi / n * smooth) *
                curve.speed(j);
    }
  }
  return S;
}

Eigen::MatrixXd assemble_neumann_poincare(const Curve& curve) {
  const int n = curve.size();
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double kernel;
      if (i == j) {
        kernel = curve.curvature(i) / (4.0 * kPi);
      } else {
        const Vec2 d = curve.point(i) - curve.point(j);
        kernel = d.dot(curve.normal(i)) / (kTwoPi * d.squaredNorm());
      }
      K(i, j) = kTwoPi / n * kernel * curve.speed(j);
    }
  }
  return K;
}

EquilibriumDensity equilibrium_density(const Curve& curve,
                                       const Eigen::MatrixXd& S) {
  const int n = curve.size();
  Eigen::MatrixXd A(n + 1, n + 1);
  A.topLeftCorner(n, n) = S;
  for (int j = 0; j < n; ++j) {
    A(j, n) = -1.0;
    A(n, j) = curve.weight(j);
  }
  A(n, n) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = 1.0;
  const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  EquilibriumDensity eq;
  eq.phi0 = sol.head(n);
  eq.potential = sol[n];
  return eq;
}

Eigen::MatrixXd modified_single_layer(const Curve& curve,
                                      const Eigen::MatrixXd& S,
                                      const EquilibriumDensity& eq) {
  // S_mod phi = S phi - (alpha + 1) (int phi dsigma) * 1
  const int n = curve.size();
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) w[j] = curve.weight(j);
  return S - (eq.potential + 1.0) * Eigen::VectorXd::Ones(n) * w.transpose();
}

Eigen::MatrixXd modified_single_layer_inverse(const Curve& curve,
                                              const Eigen::MatrixXd& S_mod,
                                              double* rcond_out) {
  (void)curve;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S_mod);
  const double rc = lu.rcond();
  if (rcond_out) *rcond_out = rc;
  if (rc < 1e-12)
    throw NumericalError(
        "modified_single_layer_inverse: condition number exceeds 1e12");
  return lu.inverse();
}

Eigen::VectorXd BoundaryOperators::apply_modified(
    const Eigen::VectorXd& density) const {
  return S_mod * density;
}

bool BoundaryOperators::plain_single_layer_invertible() const {
  // The plain operator degenerates at logarithmic capacity one, where the
  // equilibrium potential vanishes.
  return std::abs(phi0_potential) > 1e-6;
}

Eigen::VectorXd BoundaryOperators::solve_single_layer(
    const Eigen::VectorXd& rhs) const {
  if (plain_single_layer_invertible())
    return S.partialPivLu().solve(rhs);
  return S_mod_inv * rhs;
}

BoundaryOperators assemble_boundary_operators(const Curve& curve) {
  BoundaryOperators ops;
  ops.curve = &curve;
  ops.S = assemble_single_layer(curve);
  ops.Kstar = assemble_neumann_poincare(curve);
  EquilibriumDensity eq = equilibrium_density(curve, ops.S);
  ops.phi0 = eq.phi0;
  ops.phi0_potential = eq.potential;
  ops.S_mod = modified_single_layer(curve, ops.S, eq);
  ops.S_mod_inv = modified_single_layer_inverse(curve, ops.S_mod,
                                                &ops.s_mod_rcond);
  return ops;
}

SingleLayerEvaluator::SingleLayerEvaluator(const Curve& curve,
                                           Eigen::VectorXd density)
    : curve_(&curve), density_(std::move(density)) {
  if (density_.size() != curve.size())
    throw ValidationError("SingleLayerEvaluator: density size mismatch");
  for (int j = 0; j < curve.size(); ++j)
    max_speed_ = std::max(max_speed_, curve.speed(j));
}

Eigen::VectorXd trig_upsample(const Eigen::VectorXd& nodal, int N) {
  const int n = static_cast<int>(nodal.size());
  if (N < n) throw ValidationError("trig_upsample: N must be >= node count");
  const int half = n / 2;
  std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
  for (int k = 0; k <= half; ++k) {
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = kTwoPi * j * k / n;
      ca += nodal[j] * std::cos(t);
      cb += nodal[j] * std::sin(t);
    }
    a[k] = 2.0 * ca / n;
    b[k] = 2.0 * cb / n;
  }
  a[0] *= 0.5;
  a[half] *= 0.5;

  Eigen::VectorXd out(N);
  for (int l = 0; l < N; ++l) {
    const double tau = kTwoPi * l / N;
    const Complex z(std::cos(tau), std::sin(tau));
    Complex zk = z;
    double val = a[0];
    for (int k = 1; k < half; ++k) {
      val += a[k] * zk.real() + b[k] * zk.imag();
      zk *= z;
    }
    val += a[half] * zk.real();
    out[l] = val;
  }
  return out;
}

Eigen::VectorXd single_layer_on_surface_upsampled(const Curve& curve,
                                                  const Eigen::VectorXd& density,
                                                  int level) {
  const int n = curve.size();
  const int N = n << level;
  const Eigen::VectorXd fine = trig_upsample(density, N);
  const Eigen::VectorXd R = kress_weights(N);
  std::vector<Vec2> pts(N);
  std::vector<double> speeds(N);
  for (int l = 0; l < N; ++l) {
    const double tau = kTwoPi * l / N;
    pts[l] = curve.point_at(tau);
    speeds[l] = curve.speed_at(tau);
  }
  Eigen::VectorXd out(N);
  for (int i = 0; i < N; ++i) {
    double sum = 0.0;
    const double ti = kTwoPi * i / N;
    for (int j = 0; j < N; ++j) {
      double smooth;
      if (i == j) {
        smooth = std::log(speeds[i]) / kTwoPi;
      } else {
        const double dist = (pts[i] - pts[j]).norm();
        const double s2 =
            2.0 * std::abs(std::sin(0.5 * (ti - kTwoPi * j / N)));
        smooth = std::log(dist / s2) / kTwoPi;
      }
      sum += (R[std::abs(i - j)] / (4.0 * kPi) + kTwoPi / N * smooth) *
             speeds[j] * fine[j];
    }
    out[i] = sum;
  }
  return out;
}

void SingleLayerEvaluator::ensure_level(int level) const {
  if (static_cast<int>(levels_.size()) > level && !levels_[level].pts.empty())
    return;
  if (static_cast<int>(levels_.size()) <= level) levels_.resize(level + 1);
  const int n = curve_->size();
  const int N = n << level;
  Fine& fine = levels_[level];
  fine.pts.resize(N);
  fine.w.resize(N);
  const Eigen::VectorXd vals = trig_upsample(density_, N);
  for (int l = 0; l < N; ++l) {
    const double tau = kTwoPi * l / N;
    fine.pts[l] = curve_->point_at(tau);
    fine.w[l] = vals[l] * curve_->speed_at(tau) / N;  // phi * |x'| * dtau/2pi
  }
}

double SingleLayerEvaluator::operator()(const Vec2& x) const {
  const double d = curve_->min_node_distance(x);
  // Trapezoid accuracy for a target at distance d needs
  // 2 pi N (d / max_speed) >= 56; the margin absorbs the log-kernel growth
  // inside the analyticity strip.
  int level = 2;
  if (d > 0.0) {
    const double needed = 56.0 * max_speed_ / (kTwoPi * d);
    while ((curve_->size() << level) < needed && level < 10) ++level;
  } else {
    level = 10;
  }
  const int cap_level =
      std::max(2, std::min(level, 17 - static_cast<int>(std::log2(curve_->size()))));
  ensure_level(cap_level);
  const Fine& fine = levels_[cap_level];
  double sum = 0.0;
  for (size_t l = 0; l < fine.pts.size(); ++l)
    sum += std::log((x - fine.pts[l]).squaredNorm()) * fine.w[l];
  return 0.5 * sum;  // kernel (1/2pi) ln r against (2pi/N)-weighted nodes
}

JumpRelationReport jump_relation_check(const Curve& curve,
                                       const BoundaryOperators& ops,
                                       const Eigen::VectorXd& density,
                                       double step) {
  if (!(step >= 1e-4 && step <= 1e-2))
    throw ValidationError("jump_relation_check: step outside [1e-4, 1e-2]");
  const int n = curve.size();
  const Eigen::VectorXd on_surface = ops.S * density;
  const Eigen::VectorXd k_apply = ops.Kstar * density;
  SingleLayerEvaluator eval(curve, density);
  JumpRelationReport rep;
  for (int j = 0; j < n; ++j) {
    const Vec2& x = curve.point(j);
    const Vec2& nu = curve.normal(j);
    const double ext = (eval(x + step * nu) - on_surface[j]) / step;
    const double inr = (on_surface[j] - eval(x - step * nu)) / step;
    rep.exterior = std::max(rep.exterior,
                            std::abs(ext - (0.5 * density[j] + k_apply[j])));
    rep.interior = std::max(rep.interior,
                            std::abs(inr - (-0.5 * density[j] + k_apply[j])));
  }
  return rep;
}

Lemma41Report lemma41_check(const VolumeGrid& grid, const Curve& curve,
                            const BoundaryOperators& ops,
                            const SourceField& f) {
  const int n = curve.size();
  Eigen::VectorXd g(n), dg(n);
  for (int j = 0; j < n; ++j) {
    const Vec2 nu = curve.normal(j);
    if (f.has_analytic_sampler && curve.kind() != CurveKind::Kite) {
      g[j] = newtonian_potential_analytic(curve, f.sampler, curve.point(j), &nu);
      dg[j] = newtonian_normal_derivative_analytic(curve, f.sampler,
                                                   curve.point(j), nu);
    } else {
      g[j] = volume_potential_refined(grid, f.samples, curve.point(j));
      dg[j] = volume_potential_gradient_refined(grid, f.samples, curve.point(j))
                  .dot(nu);
    }
  }

  double t1;
  if (f.has_analytic_sampler && curve.kind() != CurveKind::Kite)
    t1 = domain_integral(curve, f.sampler);
  else
    t1 = total_mass(grid, f.samples);

  const Eigen::VectorXd psi = ops.S_mod_inv * g;
  double psi_total = 0.0;
  for (int j = 0; j < n; ++j) psi_total += psi[j] * curve.weight(j);

  Lemma41Report rep;
  rep.c_f = t1 - psi_total;
  const Eigen::VectorXd lhs = 0.5 * psi - ops.Kstar * psi;
  const Eigen::VectorXd t_f = rep.c_f * ops.phi0 + psi;
  const Eigen::VectorXd resid = lhs + dg - t_f;
  rep.residual_identity = resid.cwiseAbs().maxCoeff();

  double lhs_total = 0.0;
  for (int j = 0; j < n; ++j)
    lhs_total += (lhs[j] + dg[j]) * curve.weight(j);
  rep.residual_moment = std::abs(lhs_total - t1);
  return rep;
}

}  // namespace photherm
