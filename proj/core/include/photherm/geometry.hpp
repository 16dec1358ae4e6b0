// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_GEOMETRY_HPP
#define PHOTHERM_GEOMETRY_HPP

#include <memory>
#include <string>
#include <vector>

#include "photherm/types.hpp"

namespace photherm {

enum class CurveKind { Circle, Ellipse, Kite };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

// Shape parameters. Circle uses a as the radius; ellipse uses (a, b) as the
// semi-axes; the kite is the fixed benchmark curve
//   x(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t).
struct CurveSpec {
  CurveKind kind = CurveKind::Circle;
  double a = 2.0;
  double b = 1.0;
};

// Parameterized smooth closed boundary with 2pi-periodic counterclockwise
// parameterization, sampled at t_j = 2pi j / n. Immutable after construction.
class Curve {
 public:
  const CurveSpec& spec() const { return spec_; }
  CurveKind kind() const { return spec_.kind; }
  int size() const { return n_; }

  double param(int j) const { return kTwoPi * j / n_; }
  const Vec2& point(int j) const { return points_[j]; }
  const Vec2& normal(int j) const { return normals_[j]; }
  double speed(int j) const { return speeds_[j]; }
  double curvature(int j) const { return curvatures_[j]; }
  // Trapezoid quadrature weight for arc-length integrals, (2pi/n)|x'(t_j)|.
  double weight(int j) const { return kTwoPi / n_ * speeds_[j]; }

  // Analytic evaluation at arbitrary parameter.
  Vec2 point_at(double t) const;
  Vec2 derivative_at(double t) const;
  Vec2 second_derivative_at(double t) const;
  Vec2 normal_at(double t) const;
  double speed_at(double t) const;

  bool inside(const Vec2& p) const;
  // Distance along unit direction d from an interior (or boundary) point x
  // to the first exit from D. Closed form for circle/ellipse, marching plus
  // bisection for the kite.
  double ray_exit(const Vec2& x, const Vec2& d) const;

  double perimeter() const;  // quadrature estimate
  double area() const;       // Green's theorem quadrature
  double circumradius() const;
  Vec2 node_centroid() const;
  double min_node_distance(const Vec2& p) const;

  // Arc-length integral of nodal values, (2pi/n) sum v_j |x'(t_j)|.
  double boundary_integral(const Eigen::VectorXd& values) const;

 private:
  friend Curve make_curve(const CurveSpec& spec, int n);

  CurveSpec spec_;
  int n_ = 0;
  std::vector<Vec2> points_;
  std::vector<Vec2> normals_;
  std::vector<double> speeds_;
  std::vector<double> curvatures_;
  std::vector<Vec2> inside_polygon_;  // dense polygon for the kite test
};

// Builds the curve and all derived node data. Requires n even, n >= 16,
// and shape parameters describing a simple closed analytic curve.
Curve make_curve(const CurveSpec& spec, int n);

// Cell decomposition of the interior of a curve. Cells come from a regular
// lattice of width h; cells cut by the boundary keep the inside fraction of
// their area (4x4 subsampling) and their node is the centroid of the inside
// subsamples, so every node satisfies the inside predicate.
class VolumeGrid {
 public:
  const Curve& curve() const { return *curve_; }
  double h() const { return h_; }
  int size() const { return static_cast<int>(centers_.size()); }

  const Vec2& center(int m) const { return centers_[m]; }
  double cell_area(int m) const { return areas_[m]; }
  bool is_full_cell(int m) const { return full_[m] != 0; }
  // Center of the owning lattice rectangle (equals center() for full cells).
  Vec2 lattice_center(int m) const;

  double total_area() const { return total_area_; }
  const Eigen::VectorXd& areas() const { return areas_vec_; }

  // Index of the cell whose lattice rectangle contains p, or -1.
  int cell_at(const Vec2& p) const;

  // Bilinear interpolation of per-cell values at p, using lattice neighbors;
  // falls back to the nearest stored cell where neighbors are missing.
  double interpolate(const Eigen::VectorXd& values, const Vec2& p) const;

 private:
  friend VolumeGrid make_grid(const Curve& curve, double h);

  std::shared_ptr<const Curve> curve_;
  double h_ = 0.0;
  Vec2 origin_;  // lower-left corner of the lattice
  int nx_ = 0, ny_ = 0;
  std::vector<int> lattice_to_cell_;  // nx*ny, -1 if absent
  std::vector<Vec2> centers_;
  std::vector<double> areas_;
  std::vector<int> cell_ix_, cell_iy_;
  std::vector<char> full_;
  Eigen::VectorXd areas_vec_;
  double total_area_ = 0.0;
};

// Covers the interior with cells of width h. Throws if h is not positive,
// not smaller than the curve extent, or if no cell ends up inside.
VolumeGrid make_grid(const Curve& curve, double h);

}  // namespace photherm

#endif  // PHOTHERM_GEOMETRY_HPP
