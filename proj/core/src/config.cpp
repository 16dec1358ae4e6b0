// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace photherm {

using nlohmann::json;

SourcePair PairConfig::build(const Curve& curve, const VolumeGrid& grid) const {
  switch (relation) {
    case PairRelation::SignFlip:
      return make_sign_flip_pair(base, curve, grid);
    case PairRelation::HarmonicDiff:
      return make_harmonic_diff_pair(base, harmonic, curve, grid);
    case PairRelation::BiharmonicDiff:
      return make_biharmonic_diff_pair(base, biharmonic_scale, curve, grid);
    case PairRelation::DirectionInvariant:
      return make_direction_invariant_pair(base, second, curve, grid);
  }
  throw ValidationError("PairConfig: unknown relation");
}

json source_spec_to_json(const SourceSpec& spec) {
  json j;
  switch (spec.kind) {
    case SourceSpec::Kind::Constant:
      j["kind"] = "constant";
      break;
    case SourceSpec::Kind::GaussianBump:
      j["kind"] = "gaussian-bump";
      j["center_length"] = {spec.center.x(), spec.center.y()};
      j["width_length"] = spec.width;
      break;
    case SourceSpec::Kind::HarmonicPoly:
      j["kind"] = "harmonic-poly";
      j["coeffs"] = spec.coeffs;
      break;
    case SourceSpec::Kind::X1Profile:
      j["kind"] = "x1-profile";
      j["profile"] = spec.profile == SourceSpec::Profile::Gaussian ? "gaussian"
                     : spec.profile == SourceSpec::Profile::Cosine
                         ? "cosine"
                         : "odd-gaussian";
      j["width_length"] = spec.width;
      j["x1_center_length"] = spec.x1_center;
      break;
  }
  j["amplitude"] = spec.amplitude;
  if (spec.apply_cutoff) j["apply_cutoff"] = *spec.apply_cutoff;
  return j;
}

SourceSpec source_spec_from_json(const json& j) {
  SourceSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    spec.kind = SourceSpec::Kind::Constant;
  } else if (kind == "gaussian-bump") {
    spec.kind = SourceSpec::Kind::GaussianBump;
    if (j.contains("center_length")) {
      const auto c = j["center_length"];
      spec.center = Vec2(c.at(0).get<double>(), c.at(1).get<double>());
    }
    spec.width = j.value("width_length", 0.3);
  } else if (kind == "harmonic-poly") {
    spec.kind = SourceSpec::Kind::HarmonicPoly;
    if (j.contains("coeffs")) {
      const auto c = j["coeffs"];
      for (size_t i = 0; i < spec.coeffs.size() && i < c.size(); ++i)
        spec.coeffs[i] = c[i].get<double>();
    }
  } else if (kind == "x1-profile") {
    spec.kind = SourceSpec::Kind::X1Profile;
    const std::string p = j.value("profile", std::string("gaussian"));
    if (p == "gaussian")
      spec.profile = SourceSpec::Profile::Gaussian;
    else if (p == "cosine")
      spec.profile = SourceSpec::Profile::Cosine;
    else if (p == "odd-gaussian")
      spec.profile = SourceSpec::Profile::OddGaussian;
    else
      throw ValidationError("source spec: unknown x1 profile '" + p + "'");
    spec.width = j.value("width_length", 0.3);
    spec.x1_center = j.value("x1_center_length", 0.0);
  } else {
    throw ValidationError("source spec: unknown kind '" + kind + "'");
  }
  spec.amplitude = j.value("amplitude", 1.0);
  if (j.contains("apply_cutoff")) spec.apply_cutoff = j["apply_cutoff"].get<bool>();
  return spec;
}

namespace {

PairRelation relation_from_string(const std::string& s) {
  if (s == "sign-flip") return PairRelation::SignFlip;
  if (s == "harmonic-diff") return PairRelation::HarmonicDiff;
  if (s == "biharmonic-diff") return PairRelation::BiharmonicDiff;
  if (s == "direction-invariant") return PairRelation::DirectionInvariant;
  throw ValidationError("pair: unknown relation '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    c.geometry.kind = curve_kind_from_string(g.value("kind", std::string("circle")));
    if (c.geometry.kind == CurveKind::Circle)
      c.geometry.a = g.value("radius_length", 2.0);
    else {
      c.geometry.a = g.value("semi_axis_a_length", 2.0);
      c.geometry.b = g.value("semi_axis_b_length", 1.0);
    }
    c.nodes = g.value("nodes", 128);
  }
  c.grid_h = j.value("grid_h_length", 0.05);
  if (j.contains("drude")) {
    c.drude.omega_p = j["drude"].value("omega_p_rad_per_time", 1.0);
    c.drude.tau = j["drude"].value("tau_rad_per_time", 1.0);
  }
  if (j.contains("material"))
    c.material.gamma_c = j["material"].value("gamma_c_dimensionless", 2.0);
  if (j.contains("background")) {
    const auto& b = j["background"];
    c.background.c0 = b.value("c0", 1.0);
    c.background.cx = b.value("cx_per_length", 0.1);
    c.background.cy = b.value("cy_per_length", 0.0);
    c.background.cxx = b.value("cxx_per_length2", 0.0);
    c.background.cxy = b.value("cxy_per_length2", 0.0);
  }
  if (j.contains("sources"))
    for (const auto& s : j["sources"]) c.sources.push_back(source_spec_from_json(s));
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    c.omega_min = s.value("omega_min_rad_per_time", 1e-4);
    c.omega_max = s.value("omega_max_rad_per_time", 1e-2);
    c.omega_count = s.value("count", 10);
  }
  if (j.contains("measurement")) {
    c.meas_radius = j["measurement"].value("radius_length", 3.0);
    c.n_angles = j["measurement"].value("angles", 64);
  }
  if (j.contains("solver")) {
    c.solver.tol = j["solver"].value("tolerance", 1e-10);
    c.solver.max_iterations = j["solver"].value("max_iterations", 64);
  }
  const std::string mode = j.value("mode", std::string("asymptotic"));
  if (mode == "asymptotic")
    c.mode = HeatQMode::Asymptotic;
  else if (mode == "full")
    c.mode = HeatQMode::Exact;
  else
    throw ValidationError("config: unknown mode '" + mode + "'");
  c.output_dir = j.value("output_dir", std::string("out"));
  c.seed = j.value("seed", static_cast<std::uint64_t>(12345));
  c.noise_level = j.value("noise_level", 0.0);
  if (j.contains("pair")) {
    PairConfig p;
    p.relation = relation_from_string(j["pair"].value("relation", std::string("sign-flip")));
    if (j["pair"].contains("base"))
      p.base = source_spec_from_json(j["pair"]["base"]);
    if (j["pair"].contains("harmonic")) {
      const auto h = j["pair"]["harmonic"];
      for (size_t i = 0; i < p.harmonic.size() && i < h.size(); ++i)
        p.harmonic[i] = h[i].get<double>();
    }
    p.biharmonic_scale = j["pair"].value("biharmonic_scale", 0.1);
    if (j["pair"].contains("second"))
      p.second = source_spec_from_json(j["pair"]["second"]);
    c.pair = p;
  }
  if (j.contains("basis"))
    for (const auto& s : j["basis"]) c.basis.push_back(source_spec_from_json(s));
  if (j.contains("target_coefficients"))
    for (const auto& v : j["target_coefficients"])
      c.target_coefficients.push_back(v.get<double>());
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  json g;
  g["kind"] = to_string(geometry.kind);
  if (geometry.kind == CurveKind::Circle)
    g["radius_length"] = geometry.a;
  else {
    g["semi_axis_a_length"] = geometry.a;
    g["semi_axis_b_length"] = geometry.b;
  }
  g["nodes"] = nodes;
  j["geometry"] = g;
  j["grid_h_length"] = grid_h;
  j["drude"] = {{"omega_p_rad_per_time", drude.omega_p},
                {"tau_rad_per_time", drude.tau}};
  j["material"] = {{"gamma_c_dimensionless", material.gamma_c}};
  j["background"] = {{"c0", background.c0},
                     {"cx_per_length", background.cx},
                     {"cy_per_length", background.cy},
                     {"cxx_per_length2", background.cxx},
                     {"cxy_per_length2", background.cxy}};
  json srcs = json::array();
  for (const auto& s : sources) srcs.push_back(source_spec_to_json(s));
  j["sources"] = srcs;
  j["sweep"] = {{"omega_min_rad_per_time", omega_min},
                {"omega_max_rad_per_time", omega_max},
                {"count", omega_count}};
  j["measurement"] = {{"radius_length", meas_radius}, {"angles", n_angles}};
  j["solver"] = {{"tolerance", solver.tol},
                 {"max_iterations", solver.max_iterations}};
  j["mode"] = mode == HeatQMode::Asymptotic ? "asymptotic" : "full";
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["noise_level"] = noise_level;
  if (!basis.empty()) {
    json b = json::array();
    for (const auto& s : basis) b.push_back(source_spec_to_json(s));
    j["basis"] = b;
  }
  if (!target_coefficients.empty()) j["target_coefficients"] = target_coefficients;
  return j;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) errors.push_back(std::string(name) + " must be positive");
  };
  positive(geometry.a, "geometry.a");
  if (geometry.kind == CurveKind::Ellipse) positive(geometry.b, "geometry.b");
  if (nodes < 16 || nodes % 2 != 0)
    errors.push_back("geometry.nodes must be even and >= 16");
  positive(grid_h, "grid_h_length");
  positive(drude.omega_p, "drude.omega_p_rad_per_time");
  positive(drude.tau, "drude.tau_rad_per_time");
  if (!(material.gamma_c > 0.0))
    errors.push_back("material.gamma_c_dimensionless must be positive");
  else if (material.gamma_c == 1.0)
    errors.push_back("material.gamma_c_dimensionless must differ from 1");
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    errors.push_back("sweep: need 0 < omega_min < omega_max");
  if (omega_min < 1e-4 - 1e-15 || omega_max > 1e-1 + 1e-15)
    errors.push_back("sweep must stay within [1e-4, 1e-1]");
  if (omega_count < 2) errors.push_back("sweep.count must be >= 2");
  if (n_angles < 1) errors.push_back("measurement.angles must be >= 1");
  positive(meas_radius, "measurement.radius_length");
  // circumradius check needs a constructible curve
  try {
    const Curve curve = make_curve(geometry, nodes);
    if (!(meas_radius > curve.circumradius()))
      errors.push_back(
          "measurement.radius_length must exceed the curve circumradius");
  } catch (const std::exception& e) {
    errors.push_back(std::string("geometry: ") + e.what());
  }
  return errors;
}

std::vector<double> ExperimentConfig::sweep() const {
  return log_spaced(omega_min, omega_max, omega_count);
}

ExperimentSetup ExperimentConfig::build_setup() const {
  const Curve curve = make_curve(geometry, nodes);
  ExperimentSetup s = make_setup(curve, grid_h, drude, material, background,
                                 meas_radius, n_angles);
  s.ls = solver;
  return s;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  in >> j;
  return ExperimentConfig::from_json(j);
}

}  // namespace photherm
