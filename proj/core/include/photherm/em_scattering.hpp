// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_EM_SCATTERING_HPP
#define PHOTHERM_EM_SCATTERING_HPP

#include <span>

#include "photherm/geometry.hpp"
#include "photherm/kernels.hpp"
#include "photherm/types.hpp"
#include "photherm/volume_potentials.hpp"

namespace photherm {

enum class FieldProvenance { FullSolve, Asymptotic };

// TM electric field sampled on a volume grid, with enough context to
// evaluate it anywhere through the representation formula (full solve) or
// the closed asymptotic expression.
struct ComplexField {
  const VolumeGrid* grid = nullptr;
  Eigen::VectorXcd values;
  double omega = 0.0;
  FieldProvenance provenance = FieldProvenance::FullSolve;
  DrudeParams drude;

  // full-solve certificate
  double residual = 0.0;
  int iterations = 0;

  // asymptotic reproduction data: u is an exact function of these
  double t1 = 0.0;     // T_1[f]
  double area_d = 0.0; // |D|
  Eigen::VectorXd f_samples;
  Eigen::VectorXd w_samples;  // N_D[f] at the nodes

  Complex eval(const Vec2& x) const;
};

struct LsOptions {
  double tol = 1e-10;
  int max_iterations = 64;
  int dense_fallback_limit = 2048;
};

// Solves u = omega^2 (1 - eps_c) G_k[u] - i omega G_k[f] at the cell nodes,
// k = omega (background normalized to eps_m = 1). Fixed-point iteration with
// a residual certificate; the system is a small perturbation of the identity
// in the low-frequency regime. Dense fallback for small grids, otherwise
// non-convergence is reported with the iteration count and final residual.
ComplexField solve_lippmann_schwinger(const VolumeGrid& grid,
                                      const SourceField& f, double omega,
                                      const DrudeParams& drude,
                                      const LsOptions& opt = {});

// Low-frequency field
//   u = -w ln w (i/2pi) T1[f] - w [(1/4 + iN) T1[f] + i N_D[f](x)]
//       - w^2 ln^2 w (wp^2/(4 pi^2 tau)) |D| T1[f],
// built from grid-evaluated T1[f], N_D[f] and |D|. Requires omega <= 0.1.
ComplexField asymptotic_field(const VolumeGrid& grid, const SourceField& f,
                              double omega, const DrudeParams& drude);

// Same, reusing a precomputed N_D[f] grid field.
ComplexField asymptotic_field(const VolumeGrid& grid, const SourceField& f,
                              const Eigen::VectorXd& newtonian, double omega,
                              const DrudeParams& drude);

// Real and imaginary node values of an asymptotic field.
std::pair<Eigen::VectorXd, Eigen::VectorXd> field_parts(
    const ComplexField& field);

// T_w[u](x) = w ln w (i wp^2 / 2 pi tau) T1[u]
//           + w (i wp^2 / tau) [ N_D[u](x) + (N - i/4) T1[u] ].
Eigen::VectorXcd apply_T_omega(const VolumeGrid& grid,
                               const Eigen::VectorXcd& u, double omega,
                               const DrudeParams& drude);

struct RemainderSlopeReport {
  double slope = 0.0;
  std::vector<double> omegas;
  std::vector<double> remainders;  // max_x |u_full - u_asym|
  bool regression = false;         // slope outside [1.5, 2.5]
};

RemainderSlopeReport remainder_slope(const SourceField& f,
                                     const VolumeGrid& grid,
                                     const DrudeParams& drude,
                                     std::span<const double> omegas,
                                     const LsOptions& opt = {});

}  // namespace photherm

#endif  // PHOTHERM_EM_SCATTERING_HPP
