// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_CONFIG_HPP
#define PHOTHERM_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "photherm/heat_transfer.hpp"
#include "photherm/phaseless_lab.hpp"

namespace photherm {

struct PairConfig {
  PairRelation relation = PairRelation::SignFlip;
  SourceSpec base;
  std::array<double, 5> harmonic{};  // harmonic-diff addend
  double biharmonic_scale = 0.0;
  SourceSpec second;  // direction-invariant partner

  SourcePair build(const Curve& curve, const VolumeGrid& grid) const;
};

// One experiment configuration, read from a single JSON document. Key names
// carry explicit units.
struct ExperimentConfig {
  CurveSpec geometry;
  int nodes = 128;
  double grid_h = 0.05;
  DrudeParams drude;
  HeatMaterial material;
  BackgroundField background;
  std::vector<SourceSpec> sources;
  double omega_min = 1e-4;
  double omega_max = 1e-2;
  int omega_count = 10;
  double meas_radius = 3.0;
  int n_angles = 64;
  LsOptions solver;
  HeatQMode mode = HeatQMode::Asymptotic;
  std::string output_dir = "out";
  std::uint64_t seed = 12345;
  double noise_level = 0.0;
  std::optional<PairConfig> pair;
  std::vector<SourceSpec> basis;  // parametric recovery atoms
  std::vector<double> target_coefficients;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Field-level validation messages; empty when the config is usable.
  std::vector<std::string> validate() const;

  std::vector<double> sweep() const;
  ExperimentSetup build_setup() const;
};

ExperimentConfig load_config(const std::string& path);

nlohmann::json source_spec_to_json(const SourceSpec& spec);
SourceSpec source_spec_from_json(const nlohmann::json& j);

}  // namespace photherm

#endif  // PHOTHERM_CONFIG_HPP
