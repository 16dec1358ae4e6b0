// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_VOLUME_POTENTIALS_HPP
#define PHOTHERM_VOLUME_POTENTIALS_HPP

#include <functional>

#include "photherm/geometry.hpp"
#include "photherm/types.hpp"

namespace photherm {

using ScalarSampler = std::function<double(const Vec2&)>;

// Internal source: analytic sampler plus grid samples. The support
// certificate records that all nonzero samples lie inside the curve.
struct SourceField {
  ScalarSampler sampler;
  Eigen::VectorXd samples;
  bool has_analytic_sampler = false;
  bool support_inside = true;
};

SourceField make_source_field(const VolumeGrid& grid, ScalarSampler f);

// T_1[f] = integral of f over D by cell quadrature.
double total_mass(const VolumeGrid& grid, const Eigen::VectorXd& f);
Complex total_mass(const VolumeGrid& grid, const Eigen::VectorXcd& f);

// Exact integral of ln|z| over the rectangle [ax,bx] x [ay,by] (origin at
// the singular point).
double log_rectangle_integral(double ax, double bx, double ay, double by);

// N_D[f](x) by midpoint quadrature with the exact log integral over the
// target's own lattice cell. Exterior targets use plain midpoint.
double volume_potential(const VolumeGrid& grid, const Eigen::VectorXd& f,
                        const Vec2& x);
Complex volume_potential(const VolumeGrid& grid, const Eigen::VectorXcd& f,
                         const Vec2& x);

// N_D[f] at every grid node (O(M^2), row-parallel).
Eigen::VectorXd newtonian_on_grid(const VolumeGrid& grid,
                                  const Eigen::VectorXd& f);
Eigen::VectorXcd newtonian_on_grid(const VolumeGrid& grid,
                                   const Eigen::VectorXcd& f);

// N_D[N_D[f]](x).
double iterated_volume_potential(const VolumeGrid& grid,
                                 const Eigen::VectorXd& f, const Vec2& x);

// Near-boundary evaluation for gridded densities: cells close to the target
// are subdivided (bilinear-interpolated density) so the log kernel is
// resolved; used for traces of fields that do not vanish on the boundary.
double volume_potential_refined(const VolumeGrid& grid,
                                const Eigen::VectorXd& f, const Vec2& x,
                                int levels = 2);
Vec2 volume_potential_gradient(const VolumeGrid& grid,
                               const Eigen::VectorXd& f, const Vec2& x);
Vec2 volume_potential_gradient_refined(const VolumeGrid& grid,
                                       const Eigen::VectorXd& f, const Vec2& x,
                                       int levels = 2);

// High-accuracy N_D[f] for analytic samplers by target-centered polar
// quadrature with panels graded into the log singularity. If normal_hint is
// given the target is treated as a boundary point and rays span the inward
// half-plane; otherwise the target must lie inside D.
struct PolarQuadOptions {
  int angular_levels = 12;
  int radial_levels = 30;
  int gauss_points = 12;
  int interior_angular_panels = 64;
};

double newtonian_potential_analytic(const Curve& curve, const ScalarSampler& f,
                                    const Vec2& x,
                                    const Vec2* normal_hint = nullptr,
                                    const PolarQuadOptions& opt = {});

// Normal derivative of N_D[f] at a boundary point (single-valued for
// volume potentials of bounded densities).
double newtonian_normal_derivative_analytic(const Curve& curve,
                                            const ScalarSampler& f,
                                            const Vec2& x, const Vec2& nu,
                                            const PolarQuadOptions& opt = {});

// Max |Delta_h N_D[f] - f| over interior probe points (5-point stencil of
// width h) and max |Delta_h N_D[f]| over exterior probe points.
struct PdeResidualReport {
  double interior = 0.0;
  double exterior = 0.0;
  int interior_points = 0;
};

PdeResidualReport pde_residual_check(const VolumeGrid& grid,
                                     const SourceField& f);

}  // namespace photherm

#endif  // PHOTHERM_VOLUME_POTENTIALS_HPP
