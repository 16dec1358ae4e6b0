// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_CSV_HPP
#define PHOTHERM_CSV_HPP

#include <memory>
#include <string>
#include <vector>

#include "photherm/geometry.hpp"
#include "photherm/heat_transfer.hpp"
#include "photherm/types.hpp"

namespace photherm {

// 17 significant digits, '.' separator, no locale dependence.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row_with_tag(const std::vector<double>& values, const std::string& tag);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// (t, x1, x2, nu1, nu2, speed, curvature) per node.
void write_geometry_csv(const std::string& path, const Curve& curve);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// (x1, x2, value) per cell.
void write_field_csv(const std::string& path, const VolumeGrid& grid,
                     const Eigen::VectorXd& values);

// (x1, x2, re, im, abs2) per cell.
void write_complex_field_csv(const std::string& path, const VolumeGrid& grid,
                             const Eigen::VectorXcd& values);

// (omega, theta, x1, x2, v, mode) rows.
void write_measurement_csv(const std::string& path, const MeasurementSet& set);

}  // namespace photherm

#endif  // PHOTHERM_CSV_HPP
