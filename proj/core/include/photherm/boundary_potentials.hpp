// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_BOUNDARY_POTENTIALS_HPP
#define PHOTHERM_BOUNDARY_POTENTIALS_HPP

#include "photherm/geometry.hpp"
#include "photherm/types.hpp"
#include "photherm/volume_potentials.hpp"

namespace photherm {

// Nystrom matrix for the single-layer operator S_D with the periodic
// log-weight splitting; spectrally accurate on analytic curves. The matrix
// acts on nodal density values.
Eigen::MatrixXd assemble_single_layer(const Curve& curve);

// Nystrom matrix for the Neumann-Poincare operator K_D^*; the kernel is
// continuous on C^2 curves with diagonal limit kappa/(4pi).
Eigen::MatrixXd assemble_neumann_poincare(const Curve& curve);

// Equilibrium density phi_0: S_D[phi_0] constant on the boundary and
// integral 1, obtained from a bordered system that stays solvable at
// logarithmic capacity one.
struct EquilibriumDensity {
  Eigen::VectorXd phi0;
  double potential = 0.0;  // the constant value of S_D[phi_0]
};

EquilibriumDensity equilibrium_density(const Curve& curve,
                                       const Eigen::MatrixXd& S);

// Assembled operator set for one curve.
struct BoundaryOperators {
  const Curve* curve = nullptr;
  Eigen::MatrixXd S;      // single layer
  Eigen::MatrixXd Kstar;  // Neumann-Poincare
  Eigen::VectorXd phi0;
  double phi0_potential = 0.0;
  Eigen::MatrixXd S_mod;      // modified single layer (invertible)
  Eigen::MatrixXd S_mod_inv;  // its explicit inverse
  double s_mod_rcond = 0.0;   // reciprocal condition estimate of S_mod

  // Solve S x = rhs with the plain operator when it is safely invertible,
  // otherwise through the modified operator.
  Eigen::VectorXd solve_single_layer(const Eigen::VectorXd& rhs) const;
  bool plain_single_layer_invertible() const;

  Eigen::VectorXd apply_modified(const Eigen::VectorXd& density) const;
};

BoundaryOperators assemble_boundary_operators(const Curve& curve);

// Modified single layer of Definition-style form: acts as S_D on zero-mean
// densities and maps phi_0 to the constant -1; extended by linearity, which
// makes it a rank-one correction of S_D.
Eigen::MatrixXd modified_single_layer(const Curve& curve,
                                      const Eigen::MatrixXd& S,
                                      const EquilibriumDensity& eq);
Eigen::MatrixXd modified_single_layer_inverse(const Curve& curve,
                                              const Eigen::MatrixXd& S_mod,
                                              double* rcond_out = nullptr);

// Single-layer potential at an off-surface point. The density is
// trigonometrically upsampled and the trapezoid rule applied on the fine
// nodes; the upsampling factor grows as the target approaches the curve.
class SingleLayerEvaluator {
 public:
  SingleLayerEvaluator(const Curve& curve, Eigen::VectorXd density);

  double operator()(const Vec2& x) const;

 private:
  void ensure_level(int level) const;

  const Curve* curve_;
  Eigen::VectorXd density_;
  double max_speed_ = 0.0;
  // fine tables per upsampling level: points, ln-weights
  struct Fine {
    std::vector<Vec2> pts;
    std::vector<double> w;  // density * speed * (2pi/N) / (2pi)
  };
  mutable std::vector<Fine> levels_;
};

// Values of the trigonometric interpolant of nodal data at N equispaced
// parameters (N >= node count).
Eigen::VectorXd trig_upsample(const Eigen::VectorXd& nodal, int N);

// On-surface single-layer values at all fine nodes t_l = 2 pi l / (n 2^level),
// computed with the log-splitting quadrature on the upsampled grid.
Eigen::VectorXd single_layer_on_surface_upsampled(const Curve& curve,
                                                  const Eigen::VectorXd& density,
                                                  int level);

// Max-norm residual of the jump relation at the nodes: one-sided normal
// difference quotients of S_D[phi] at distance `step` against
// (+-I/2 + K_D^*)[phi]. The residual is O(step) plus quadrature error.
struct JumpRelationReport {
  double exterior = 0.0;
  double interior = 0.0;
  double max() const { return std::max(exterior, interior); }
};

JumpRelationReport jump_relation_check(const Curve& curve,
                                       const BoundaryOperators& ops,
                                       const Eigen::VectorXd& density,
                                       double step);

// Identity checks around g = N_D[f]:
//   (I/2 - K*) S^{-1}[g] = -dg/dnu + T_f,  T_f = c_f phi_0 + S^{-1}[g],
//   c_f = int_D f - int_dD S^{-1}[g].
// residual_identity is the node-wise max of the composite identity;
// residual_moment is the integrated form |int T_f - int_D f|.
struct Lemma41Report {
  double residual_identity = 0.0;
  double residual_moment = 0.0;
  double c_f = 0.0;
};

Lemma41Report lemma41_check(const VolumeGrid& grid, const Curve& curve,
                            const BoundaryOperators& ops,
                            const SourceField& f);

}  // namespace photherm

#endif  // PHOTHERM_BOUNDARY_POTENTIALS_HPP
