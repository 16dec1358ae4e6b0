// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/csv.hpp"

#include <cstdio>
#include <fstream>

namespace photherm {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out)
    throw ValidationError("CsvWriter: cannot open " + path);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::header(const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i)
    impl_->out << names[i] << (i + 1 < names.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i)
    impl_->out << format_number(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_with_tag(const std::vector<double>& values,
                             const std::string& tag) {
  for (const double v : values) impl_->out << format_number(v) << ",";
  impl_->out << tag << "\n";
}

void write_geometry_csv(const std::string& path, const Curve& curve) {
  CsvWriter w(path);
  w.header({"t", "x1", "x2", "nu1", "nu2", "speed", "curvature"});
  for (int j = 0; j < curve.size(); ++j)
    w.row({curve.param(j), curve.point(j).x(), curve.point(j).y(),
           curve.normal(j).x(), curve.normal(j).y(), curve.speed(j),
           curve.curvature(j)});
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_matrix_csv: cannot open " + path);
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j)
      out << format_number(m(i, j)) << (j + 1 < m.cols() ? "," : "\n");
  }
}

void write_field_csv(const std::string& path, const VolumeGrid& grid,
                     const Eigen::VectorXd& values) {
  CsvWriter w(path);
  w.header({"x1", "x2", "value"});
  for (int m = 0; m < grid.size(); ++m)
    w.row({grid.center(m).x(), grid.center(m).y(), values[m]});
}

void write_complex_field_csv(const std::string& path, const VolumeGrid& grid,
                             const Eigen::VectorXcd& values) {
  CsvWriter w(path);
  w.header({"x1", "x2", "re_u", "im_u", "abs2_u"});
  for (int m = 0; m < grid.size(); ++m)
    w.row({grid.center(m).x(), grid.center(m).y(), values[m].real(),
           values[m].imag(), std::norm(values[m])});
}

void write_measurement_csv(const std::string& path, const MeasurementSet& set) {
  CsvWriter w(path);
  w.header({"omega", "theta", "x1", "x2", "v", "mode"});
  const std::string tag =
      set.mode == HeatQMode::Asymptotic ? "asymptotic" : "full";
  for (size_t k = 0; k < set.omegas.size(); ++k) {
    for (size_t i = 0; i < set.thetas.size(); ++i) {
      const Vec2 x = set.point(static_cast<int>(i));
      w.row_with_tag({set.omegas[k], set.thetas[i], x.x(), x.y(),
                      set.values(static_cast<long>(i), static_cast<long>(k))},
                     tag);
    }
  }
}

}  // namespace photherm
