// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace photherm {

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Circle: return "circle";
    case CurveKind::Ellipse: return "ellipse";
    case CurveKind::Kite: return "kite";
  }
  return "?";
}

CurveKind curve_kind_from_string(const std::string& name) {
  if (name == "circle") return CurveKind::Circle;
  if (name == "ellipse") return CurveKind::Ellipse;
  if (name == "kite") return CurveKind::Kite;
  throw ValidationError("unknown curve kind: " + name);
}

namespace {

Vec2 eval_point(const CurveSpec& s, double t) {
  switch (s.kind) {
    case CurveKind::Circle:
      return {s.a * std::cos(t), s.a * std::sin(t)};
    case CurveKind::Ellipse:
      return {s.a * std::cos(t), s.b * std::sin(t)};
    case CurveKind::Kite:
      return {std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65,
              1.5 * std::sin(t)};
  }
  return Vec2::Zero();
}

Vec2 eval_derivative(const CurveSpec& s, double t) {
  switch (s.kind) {
    case CurveKind::Circle:
      return {-s.a * std::sin(t), s.a * std::cos(t)};
    case CurveKind::Ellipse:
      return {-s.a * std::sin(t), s.b * std::cos(t)};
    case CurveKind::Kite:
      return {-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t)};
  }
  return Vec2::Zero();
}

Vec2 eval_second(const CurveSpec& s, double t) {
  switch (s.kind) {
    case CurveKind::Circle:
      return {-s.a * std::cos(t), -s.a * std::sin(t)};
    case CurveKind::Ellipse:
      return {-s.a * std::cos(t), -s.b * std::sin(t)};
    case CurveKind::Kite:
      return {-std::cos(t) - 2.6 * std::cos(2.0 * t), -1.5 * std::sin(t)};
  }
  return Vec2::Zero();
}

}  // namespace

Vec2 Curve::point_at(double t) const { return eval_point(spec_, t); }
Vec2 Curve::derivative_at(double t) const { return eval_derivative(spec_, t); }
Vec2 Curve::second_derivative_at(double t) const { return eval_second(spec_, t); }
double Curve::speed_at(double t) const { return eval_derivative(spec_, t).norm(); }

Vec2 Curve::normal_at(double t) const {
  const Vec2 d = eval_derivative(spec_, t);
  return Vec2(d.y(), -d.x()) / d.norm();
}

bool Curve::inside(const Vec2& p) const {
  switch (spec_.kind) {
    case CurveKind::Circle:
      return p.squaredNorm() < spec_.a * spec_.a;
    case CurveKind::Ellipse: {
      const double u = p.x() / spec_.a, v = p.y() / spec_.b;
      return u * u + v * v < 1.0;
    }
    case CurveKind::Kite: {
      // Crossing test against the cached dense polygon.
      bool in = false;
      const size_t m = inside_polygon_.size();
      for (size_t i = 0, j = m - 1; i < m; j = i++) {
        const Vec2& pi = inside_polygon_[i];
        const Vec2& pj = inside_polygon_[j];
        if ((pi.y() > p.y()) != (pj.y() > p.y()) &&
            p.x() < (pj.x() - pi.x()) * (p.y() - pi.y()) / (pj.y() - pi.y()) +
                        pi.x())
          in = !in;
      }
      return in;
    }
  }
  return false;
}

double Curve::ray_exit(const Vec2& x, const Vec2& d) const {
  switch (spec_.kind) {
    case CurveKind::Circle: {
      const double R2 = spec_.a * spec_.a;
      const double xd = x.dot(d);
      const double disc = xd * xd + R2 - x.squaredNorm();
      if (disc <= 0.0) return 0.0;
      return -xd + std::sqrt(disc);
    }
    case CurveKind::Ellipse: {
      const Vec2 xs(x.x() / spec_.a, x.y() / spec_.b);
      const Vec2 ds(d.x() / spec_.a, d.y() / spec_.b);
      const double A = ds.squaredNorm();
      const double B = xs.dot(ds);
      const double C = xs.squaredNorm() - 1.0;
      const double disc = B * B - A * C;
      if (disc <= 0.0) return 0.0;
      return (-B + std::sqrt(disc)) / A;
    }
    case CurveKind::Kite: {
      const double cap = 2.0 * circumradius() + 1.0;
      const double step = 1e-2;
      double lo = 0.0;
      double hi = step;
      while (hi < cap && inside(x + hi * d)) {
        lo = hi;
        hi += step;
      }
      if (hi >= cap) return cap;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(x + mid * d) ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

double Curve::perimeter() const {
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) sum += speeds_[j];
  return kTwoPi / n_ * sum;
}

double Curve::area() const {
  // (1/2) closed integral of (x1 dx2 - x2 dx1).
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) {
    const Vec2 d = eval_derivative(spec_, param(j));
    sum += points_[j].x() * d.y() - points_[j].y() * d.x();
  }
  return 0.5 * kTwoPi / n_ * sum;
}

double Curve::circumradius() const {
  double r = 0.0;
  for (const Vec2& p : points_) r = std::max(r, p.norm());
  return r;
}

Vec2 Curve::node_centroid() const {
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : points_) c += p;
  return c / static_cast<double>(n_);
}

double Curve::min_node_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::max();
  for (const Vec2& q : points_) d = std::min(d, (p - q).norm());
  return d;
}

double Curve::boundary_integral(const Eigen::VectorXd& values) const {
  if (values.size() != n_)
    throw ValidationError("boundary_integral: size mismatch");
  double sum = 0.0;
  for (int j = 0; j < n_; ++j) sum += values[j] * speeds_[j];
  return kTwoPi / n_ * sum;
}

Curve make_curve(const CurveSpec& spec, int n) {
  if (n < 16 || n % 2 != 0)
    throw ValidationError("make_curve: n must be even and >= 16");
  switch (spec.kind) {
    case CurveKind::Circle:
      if (!(spec.a > 0.0)) throw ValidationError("make_curve: radius must be > 0");
      break;
    case CurveKind::Ellipse:
      if (!(spec.a > 0.0) || !(spec.b > 0.0))
        throw ValidationError("make_curve: semi-axes must be > 0");
      break;
    case CurveKind::Kite:
      break;
  }
  Curve c;
  c.spec_ = spec;
  c.n_ = n;
  c.points_.resize(n);
  c.normals_.resize(n);
  c.speeds_.resize(n);
  c.curvatures_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    const Vec2 x = eval_point(spec, t);
    const Vec2 d = eval_derivative(spec, t);
    const Vec2 dd = eval_second(spec, t);
    const double sp = d.norm();
    c.points_[j] = x;
    c.speeds_[j] = sp;
    c.normals_[j] = Vec2(d.y(), -d.x()) / sp;
    c.curvatures_[j] = (d.x() * dd.y() - d.y() * dd.x()) / (sp * sp * sp);
  }
  if (spec.kind == CurveKind::Kite) {
    const int m = 4096;
    c.inside_polygon_.resize(m);
    for (int j = 0; j < m; ++j)
      c.inside_polygon_[j] = eval_point(spec, kTwoPi * j / m);
  }
  // Positive orientation: outward normals point away from the node centroid.
  // Only enforced on convex curves; the kite is non-convex by design.
  if (spec.kind != CurveKind::Kite) {
    const Vec2 centroid = c.node_centroid();
    for (int j = 0; j < n; ++j) {
      if ((c.points_[j] - centroid).dot(c.normals_[j]) <= 0.0)
        throw ValidationError(
            "make_curve: parameterization is not positively oriented");
    }
  }
  return c;
}

namespace {

// Exact area of [a,b] x [c,d] intersected with the disk of radius R:
// integral over x of the clamped chord height, split at the analytic
// breakpoints and integrated with Gauss panels.
double rect_disk_area(double a, double b, double c, double d, double R) {
  auto chord = [&](double x) {
    const double t = std::sqrt(std::max(0.0, R * R - x * x));
    return std::max(0.0, std::min(d, t) - std::max(c, -t));
  };
  std::vector<double> cuts = {a, b};
  auto add = [&](double x) {
    if (x > a && x < b) cuts.push_back(x);
  };
  for (double lvl : {c, d}) {
    const double s = R * R - lvl * lvl;
    if (s > 0.0) {
      add(std::sqrt(s));
      add(-std::sqrt(s));
    }
  }
  add(R);
  add(-R);
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  // 24-point Gauss-Legendre nodes via the simple 3-panel midpoint-free rule:
  // piecewise-smooth integrand, so fixed panels suffice well below h^2.
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                               0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  for (size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    if (hi - lo < 1e-300) continue;
    for (int p = 0; p < 3; ++p) {
      const double pa = lo + (hi - lo) * p / 3.0;
      const double pb = lo + (hi - lo) * (p + 1) / 3.0;
      const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (int q = 0; q < 8; ++q)
        area += half * gw[q] * chord(mid + half * gx[q]);
    }
  }
  return area;
}

// Exact rectangle-ellipse intersection by scaling onto the unit disk; the
// axis-aligned rectangle stays a rectangle.
double rect_curve_area(const CurveSpec& spec, double ax, double bx, double ay,
                       double by) {
  switch (spec.kind) {
    case CurveKind::Circle:
      return rect_disk_area(ax, bx, ay, by, spec.a);
    case CurveKind::Ellipse:
      return spec.a * spec.b *
             rect_disk_area(ax / spec.a, bx / spec.a, ay / spec.b, by / spec.b,
                            1.0);
    case CurveKind::Kite:
      return -1.0;  // no closed form; caller falls back to subsampling
  }
  return -1.0;
}

}  // namespace

Vec2 VolumeGrid::lattice_center(int m) const {
  return origin_ + Vec2((cell_ix_[m] + 0.5) * h_, (cell_iy_[m] + 0.5) * h_);
}

int VolumeGrid::cell_at(const Vec2& p) const {
  const int ix = static_cast<int>(std::floor((p.x() - origin_.x()) / h_));
  const int iy = static_cast<int>(std::floor((p.y() - origin_.y()) / h_));
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
  return lattice_to_cell_[static_cast<size_t>(iy) * nx_ + ix];
}

double VolumeGrid::interpolate(const Eigen::VectorXd& values,
                               const Vec2& p) const {
  if (values.size() != size())
    throw ValidationError("VolumeGrid::interpolate: size mismatch");
  // Locate the interpolation square of lattice centers around p.
  const double gx = (p.x() - origin_.x()) / h_ - 0.5;
  const double gy = (p.y() - origin_.y()) / h_ - 0.5;
  const int ix = static_cast<int>(std::floor(gx));
  const int iy = static_cast<int>(std::floor(gy));
  const double fx = gx - ix, fy = gy - iy;
  double num = 0.0, den = 0.0;
  double nearest = 0.0, nearest_w = -1.0;
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const int jx = ix + dx, jy = iy + dy;
      if (jx < 0 || jx >= nx_ || jy < 0 || jy >= ny_) continue;
      const int cell = lattice_to_cell_[static_cast<size_t>(jy) * nx_ + jx];
      if (cell < 0) continue;
      const double w =
          (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
      num += w * values[cell];
      den += w;
      if (w > nearest_w) {
        nearest_w = w;
        nearest = values[cell];
      }
    }
  }
  if (den <= 0.0) {
    const int cell = cell_at(p);
    return cell >= 0 ? values[cell] : 0.0;
  }
  if (den < 0.999) return nearest;  // incomplete stencil at the rim
  return num / den;
}

VolumeGrid make_grid(const Curve& curve, double h) {
  if (!(h > 0.0)) throw ValidationError("make_grid: h must be > 0");
  const double R = curve.circumradius();
  if (!(h < R)) throw ValidationError("make_grid: h larger than the domain");

  VolumeGrid g;
  g.curve_ = std::make_shared<Curve>(curve);
  g.h_ = h;
  const double margin = 2.0 * h;
  g.origin_ = Vec2(-R - margin, -R - margin);
  g.nx_ = static_cast<int>(std::ceil(2.0 * (R + margin) / h));
  g.ny_ = g.nx_;
  g.lattice_to_cell_.assign(static_cast<size_t>(g.nx_) * g.ny_, -1);

  // Boundary-cut cells carry the exact chord-integrated inside fraction for
  // circles and ellipses; the kite falls back to 16x16 subsampling. Cell
  // nodes sit at the centroid of the inside subsamples so every node passes
  // the inside predicate.
  const CurveSpec& spec = curve.spec();
  const bool exact_cuts = spec.kind != CurveKind::Kite;
  const double sa = spec.a;
  const double sb = spec.kind == CurveKind::Circle ? spec.a : spec.b;
  for (int iy = 0; iy < g.ny_; ++iy) {
    for (int ix = 0; ix < g.nx_; ++ix) {
      const Vec2 corner = g.origin_ + Vec2(ix * h, iy * h);
      int count = 0;
      Vec2 centroid = Vec2::Zero();
      Vec2 sample_inside = Vec2::Zero();
      auto probe = [&](int density) {
        count = 0;
        centroid.setZero();
        for (int sy = 0; sy < density; ++sy) {
          for (int sx = 0; sx < density; ++sx) {
            const Vec2 q = corner + Vec2((sx + 0.5) * h / density,
                                         (sy + 0.5) * h / density);
            if (g.curve_->inside(q)) {
              ++count;
              centroid += q;
              sample_inside = q;
            }
          }
        }
      };

      bool cut;
      double frac = 0.0;
      if (exact_cuts) {
        // straddle test in disk coordinates (the rectangle stays a rectangle)
        const double ax = corner.x() / sa, bx = (corner.x() + h) / sa;
        const double ay = corner.y() / sb, by = (corner.y() + h) / sb;
        const double nx0 = std::clamp(0.0, ax, bx), ny0 = std::clamp(0.0, ay, by);
        const double dmin = std::hypot(nx0, ny0);
        double dmax = 0.0;
        for (const double cx : {ax, bx})
          for (const double cy : {ay, by})
            dmax = std::max(dmax, std::hypot(cx, cy));
        cut = dmin < 1.0 && dmax > 1.0;
        if (!cut) {
          if (dmax <= 1.0)
            frac = 1.0;  // fully inside
          else
            continue;  // fully outside
        } else {
          frac = rect_curve_area(spec, corner.x(), corner.x() + h, corner.y(),
                                 corner.y() + h) /
                 (h * h);
          if (frac <= 1e-12) continue;
        }
      } else {
        probe(4);
        cut = count > 0 && count < 16;
        if (cut) probe(16);
        if (count == 0) continue;
        frac = static_cast<double>(count) / (cut ? 256 : 16);
      }

      Vec2 node = corner + Vec2(0.5 * h, 0.5 * h);
      if (cut) {
        if (exact_cuts) probe(16);
        if (count == 0) probe(48);
        if (count == 0) continue;  // sliver below node resolution
        node = centroid / count;
        if (!g.curve_->inside(node)) node = sample_inside;
      }
      g.lattice_to_cell_[static_cast<size_t>(iy) * g.nx_ + ix] =
          static_cast<int>(g.centers_.size());
      g.centers_.push_back(node);
      g.areas_.push_back(h * h * frac);
      g.cell_ix_.push_back(ix);
      g.cell_iy_.push_back(iy);
      g.full_.push_back(cut ? 0 : 1);
    }
  }
  if (g.centers_.empty())
    throw ValidationError("make_grid: no cell lies inside the curve");
  g.areas_vec_ = Eigen::Map<const Eigen::VectorXd>(g.areas_.data(),
                                                   static_cast<long>(g.areas_.size()));
  g.total_area_ = g.areas_vec_.sum();
  return g;
}

}  // namespace photherm
