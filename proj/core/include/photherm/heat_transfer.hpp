// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_HEAT_TRANSFER_HPP
#define PHOTHERM_HEAT_TRANSFER_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>

#include "photherm/boundary_potentials.hpp"
#include "photherm/em_scattering.hpp"
#include "photherm/geometry.hpp"
#include "photherm/kernels.hpp"
#include "photherm/types.hpp"

namespace photherm {

struct HeatMaterial {
  double gamma_c = 2.0;  // interior conductivity, exterior normalized to 1

  double lambda() const { return (gamma_c + 1.0) / (2.0 * (gamma_c - 1.0)); }
  void validate() const;
};

// Harmonic background V = c0 + cx x1 + cy x2 + cxx (x1^2 - x2^2) + cxy 2 x1 x2.
struct BackgroundField {
  double c0 = 1.0;
  double cx = 0.1;
  double cy = 0.0;
  double cxx = 0.0;
  double cxy = 0.0;

  double value(const Vec2& p) const {
    return c0 + cx * p.x() + cy * p.y() +
           cxx * (p.x() * p.x() - p.y() * p.y()) + cxy * 2.0 * p.x() * p.y();
  }
  Vec2 gradient(const Vec2& p) const {
    return {cx + 2.0 * cxx * p.x() + 2.0 * cxy * p.y(),
            cy - 2.0 * cxx * p.y() + 2.0 * cxy * p.x()};
  }
};

enum class HeatQMode { Exact, Asymptotic };

// Heat source Q = omega Im(eps_c) |u|^2 / (2 pi gamma_c), either sampled from
// a full solve or split into the frequency components
//   Q(x,w) = w^2 ln^2 w Q1 + w^2 ln w Q2(x) + w^2 Q3(x) + O(w^3 ln w).
struct HeatSourceTerms {
  HeatQMode mode = HeatQMode::Exact;
  double omega = 0.0;  // exact mode only
  Eigen::VectorXd Q;   // exact-mode samples

  double Q1 = 0.0;  // spatially constant component
  Eigen::VectorXd Q2, Q3;

  // Asymptotic components combined at a given frequency.
  Eigen::VectorXd assemble(double omega) const;
};

HeatSourceTerms compute_Q(const VolumeGrid& grid, const ComplexField& u,
                          double omega, const DrudeParams& drude,
                          const HeatMaterial& material);
HeatSourceTerms compute_Q(const VolumeGrid& grid, const SourceField& f,
                          const Eigen::VectorXd& newtonian,
                          const DrudeParams& drude,
                          const HeatMaterial& material);

// N_D[q] and its normal derivative at the curve nodes. The gridded variant
// uses the subdivided near-cell quadrature; the sampler variant uses the
// graded polar rule and is spectrally accurate.
struct HeatBoundaryData {
  Eigen::VectorXd trace;
  Eigen::VectorXd dnu;
};

HeatBoundaryData newtonian_boundary_data(const Curve& curve,
                                         const VolumeGrid& grid,
                                         const Eigen::VectorXd& q);
HeatBoundaryData newtonian_boundary_data(const Curve& curve,
                                         const ScalarSampler& q);

enum class HeatRoute { DirectBlock, Lemma23Inverse };

struct HeatDensities {
  Eigen::VectorXd psi;  // exterior density, v = V + S[psi] outside
  Eigen::VectorXd phi;  // interior density, v = S[phi] + N_D[Q] inside
  double residual = 0.0;
  double rcond = 0.0;
};

// Solves the transmission system
//   S[psi] - S[phi] = N_D[Q] - V
//   (I/2 + K*)[psi] - gamma (-I/2 + K*)[phi] = gamma dN_D[Q]/dnu - dV/dnu
// either as one block solve or through the explicit inverse built from
// (lambda I - K*)^{-1}. Both routes share the same operator matrices.
HeatDensities solve_heat_densities(const Curve& curve,
                                   const BoundaryOperators& ops,
                                   const HeatBoundaryData& ndq,
                                   const BackgroundField& V,
                                   const HeatMaterial& material,
                                   HeatRoute route);

// Temperature evaluator: V + S[psi] outside, S[phi] + N_D[Q] inside,
// interior trace on the boundary. An analytic Q sampler upgrades the
// near-boundary interior evaluation to the graded polar rule.
class TemperatureField {
 public:
  TemperatureField(const Curve& curve, const VolumeGrid& grid,
                   const BoundaryOperators& ops, HeatDensities densities,
                   Eigen::VectorXd q_samples, BackgroundField background,
                   ScalarSampler q_sampler = nullptr);

  double operator()(const Vec2& x) const;

  const HeatDensities& densities() const { return densities_; }

 private:
  const Curve* curve_;
  const VolumeGrid* grid_;
  const BoundaryOperators* ops_;
  HeatDensities densities_;
  Eigen::VectorXd q_;
  BackgroundField background_;
  ScalarSampler q_sampler_;
  SingleLayerEvaluator eval_psi_;
  SingleLayerEvaluator eval_phi_;
};

double temperature_field(const Curve& curve, const VolumeGrid& grid,
                         const BoundaryOperators& ops,
                         const HeatDensities& densities,
                         const Eigen::VectorXd& q,
                         const BackgroundField& background, const Vec2& x);

// One experiment configuration shared by forward runs.
struct ExperimentSetup {
  std::shared_ptr<const Curve> curve;
  std::shared_ptr<const VolumeGrid> grid;
  std::shared_ptr<const BoundaryOperators> ops;
  DrudeParams drude;
  HeatMaterial material;
  BackgroundField background;
  double meas_radius = 3.0;
  int n_angles = 64;
  LsOptions ls;
  std::uint64_t setup_id = 0;

  void validate() const;
};

ExperimentSetup make_setup(const Curve& curve, double grid_h,
                           const DrudeParams& drude,
                           const HeatMaterial& material,
                           const BackgroundField& background,
                           double meas_radius, int n_angles);

// Boundary temperature samples on the measurement circle over a sweep.
struct MeasurementSet {
  double radius = 0.0;
  std::vector<double> thetas;
  std::vector<double> omegas;
  Eigen::MatrixXd values;  // n_angles x n_omegas
  HeatQMode mode = HeatQMode::Exact;
  std::uint64_t setup_id = 0;

  Vec2 point(int i) const {
    return {radius * std::cos(thetas[i]), radius * std::sin(thetas[i])};
  }
};

// Full mode solves the scattering and heat problems per frequency and
// records v on the circle. Asymptotic mode assembles
//   v = w^2 ln^2 w S[G1+F1] + w^2 ln w S[G2+F2] + w^2 {V + S[G3+F3-A_D]}
// from frequency-independent expansion densities.
MeasurementSet boundary_measurement(const ExperimentSetup& setup,
                                    const SourceField& f,
                                    std::span<const double> omegas,
                                    HeatQMode mode);

// Frequency-independent expansion densities of the asymptotic temperature.
struct AsymptoticHeatExpansion {
  Eigen::VectorXd gf1, gf2, gf3;  // G_i + F_i
  Eigen::VectorXd a_d;            // background response density A_D
};

AsymptoticHeatExpansion asymptotic_heat_expansion(const ExperimentSetup& setup,
                                                  const HeatSourceTerms& q);

// Static (source-free) response: v = V + S[-A_D]; subtracting it isolates
// the heat-generated part of a full-mode measurement.
Eigen::VectorXd static_background_response(const ExperimentSetup& setup);

// Reports v - V - (monopole/2pi) ln|x| = S[psi] - (monopole/2pi) ln|x| on
// circles of the given radii, where monopole = int psi dsigma.
struct DecayReport {
  double monopole = 0.0;
  std::vector<double> radii;
  std::vector<double> remainder;  // max over angles
};

DecayReport decay_check(const Curve& curve, const Eigen::VectorXd& psi,
                        std::span<const double> radii);

}  // namespace photherm

#endif  // PHOTHERM_HEAT_TRANSFER_HPP
