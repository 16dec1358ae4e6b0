// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/volume_potentials.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "photherm/quadrature.hpp"

namespace photherm {

SourceField make_source_field(const VolumeGrid& grid, ScalarSampler f) {
  SourceField s;
  s.samples.resize(grid.size());
  for (int m = 0; m < grid.size(); ++m) s.samples[m] = f(grid.center(m));
  s.sampler = std::move(f);
  s.has_analytic_sampler = true;
  s.support_inside = true;
  return s;
}

double total_mass(const VolumeGrid& grid, const Eigen::VectorXd& f) {
  return grid.areas().dot(f);
}

Complex total_mass(const VolumeGrid& grid, const Eigen::VectorXcd& f) {
  Complex sum = 0.0;
  for (int m = 0; m < grid.size(); ++m) sum += grid.cell_area(m) * f[m];
  return sum;
}

namespace {

// Antiderivative of ln sqrt(x^2+y^2): d2 G / dx dy = ln r.
double log_antiderivative(double x, double y) {
  const double r2 = x * x + y * y;
  if (r2 == 0.0) return 0.0;
  double g = x * y * (0.5 * std::log(r2) - 1.5);
  if (x != 0.0) g += 0.5 * x * x * std::atan(y / x);
  if (y != 0.0) g += 0.5 * y * y * std::atan(x / y);
  return g;
}

}  // namespace

double log_rectangle_integral(double ax, double bx, double ay, double by) {
  return log_antiderivative(bx, by) - log_antiderivative(ax, by) -
         log_antiderivative(bx, ay) + log_antiderivative(ax, ay);
}

namespace {

template <typename Scalar>
Scalar potential_impl(const VolumeGrid& grid,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f,
                      const Vec2& x) {
  if (f.size() != grid.size())
    throw ValidationError("volume_potential: density size mismatch");
  const int own = grid.cell_at(x);
  Scalar sum{};
  for (int m = 0; m < grid.size(); ++m) {
    if (m == own) continue;
    const double r2 = (x - grid.center(m)).squaredNorm();
    sum += (0.5 * std::log(r2)) * grid.cell_area(m) * f[m];
  }
  if (own >= 0) {
    const Vec2 rel = grid.lattice_center(own) - x;
    const double hh = 0.5 * grid.h();
    double corr = log_rectangle_integral(rel.x() - hh, rel.x() + hh,
                                         rel.y() - hh, rel.y() + hh);
    if (!grid.is_full_cell(own))
      corr *= grid.cell_area(own) / (grid.h() * grid.h());
    sum += corr * f[own];
  }
  return sum / kTwoPi;
}

}  // namespace

double volume_potential(const VolumeGrid& grid, const Eigen::VectorXd& f,
                        const Vec2& x) {
  return potential_impl<double>(grid, f, x);
}

Complex volume_potential(const VolumeGrid& grid, const Eigen::VectorXcd& f,
                         const Vec2& x) {
  return potential_impl<Complex>(grid, f, x);
}

namespace {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> newtonian_grid_impl(
    const VolumeGrid& grid, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  if (f.size() != grid.size())
    throw ValidationError("newtonian_on_grid: density size mismatch");
  const int M = grid.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(M);
  const int n_threads = std::min(max_threads(), 8);
  auto work = [&](int begin, int end) {
    for (int m = begin; m < end; ++m)
      out[m] = potential_impl<Scalar>(grid, f, grid.center(m));
  };
  if (n_threads <= 1 || M < 512) {
    work(0, M);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(work, M * t / n_threads, M * (t + 1) / n_threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace

Eigen::VectorXd newtonian_on_grid(const VolumeGrid& grid,
                                  const Eigen::VectorXd& f) {
  return newtonian_grid_impl<double>(grid, f);
}

Eigen::VectorXcd newtonian_on_grid(const VolumeGrid& grid,
                                   const Eigen::VectorXcd& f) {
  return newtonian_grid_impl<Complex>(grid, f);
}

double iterated_volume_potential(const VolumeGrid& grid,
                                 const Eigen::VectorXd& f, const Vec2& x) {
  return volume_potential(grid, newtonian_on_grid(grid, f), x);
}

namespace {

// One near cell, subdivided; density bilinear-interpolated from the lattice.
// Leaves outside the curve drop out of cut cells.
double refined_cell_log(const VolumeGrid& grid, const Eigen::VectorXd& f,
                        const Vec2& x, const Vec2& cell_center, double half,
                        bool cut, int depth) {
  if (depth == 0) {
    if (cut && !grid.curve().inside(cell_center)) return 0.0;
    const double fval = grid.interpolate(f, cell_center);
    const Vec2 rel = cell_center - x;
    if (std::abs(rel.x()) <= half && std::abs(rel.y()) <= half)
      return fval * log_rectangle_integral(rel.x() - half, rel.x() + half,
                                           rel.y() - half, rel.y() + half);
    return fval * 0.5 * std::log(rel.squaredNorm()) * (4.0 * half * half);
  }
  double sum = 0.0;
  const double q = 0.5 * half;
  for (int sy = -1; sy <= 1; sy += 2)
    for (int sx = -1; sx <= 1; sx += 2)
      sum += refined_cell_log(grid, f, x, cell_center + Vec2(sx * q, sy * q),
                              q, cut, depth - 1);
  return sum;
}

double refined_cell_grad(const VolumeGrid& grid, const Eigen::VectorXd& f,
                         const Vec2& x, const Vec2& cell_center, double half,
                         bool cut, int depth, Vec2& grad) {
  if (depth == 0) {
    if (cut && !grid.curve().inside(cell_center)) return 0.0;
    const Vec2 d = x - cell_center;
    const double r2 = d.squaredNorm();
    const double area = 4.0 * half * half;
    if (r2 < 1e-26) return 0.0;  // kernel is odd over the own leaf
    grad += grid.interpolate(f, cell_center) * area / r2 * d;
    return 0.0;
  }
  const double q = 0.5 * half;
  for (int sy = -1; sy <= 1; sy += 2)
    for (int sx = -1; sx <= 1; sx += 2)
      refined_cell_grad(grid, f, x, cell_center + Vec2(sx * q, sy * q), q, cut,
                        depth - 1, grad);
  return 0.0;
}

}  // namespace

double volume_potential_refined(const VolumeGrid& grid,
                                const Eigen::VectorXd& f, const Vec2& x,
                                int levels) {
  if (f.size() != grid.size())
    throw ValidationError("volume_potential_refined: density size mismatch");
  const double near = 3.0 * grid.h();
  const double near2 = near * near;
  double sum = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    const Vec2 c = grid.lattice_center(m);
    const double r2 = (x - c).squaredNorm();
    if (r2 > near2) {
      const double rr2 = (x - grid.center(m)).squaredNorm();
      sum += 0.5 * std::log(rr2) * grid.cell_area(m) * f[m];
    } else {
      sum += refined_cell_log(grid, f, x, c, 0.5 * grid.h(),
                              !grid.is_full_cell(m), levels);
    }
  }
  return sum / kTwoPi;
}

Vec2 volume_potential_gradient(const VolumeGrid& grid, const Eigen::VectorXd& f,
                               const Vec2& x) {
  Vec2 g = Vec2::Zero();
  for (int m = 0; m < grid.size(); ++m) {
    const Vec2 d = x - grid.center(m);
    const double r2 = d.squaredNorm();
    if (r2 < 1e-26) continue;
    g += f[m] * grid.cell_area(m) / r2 * d;
  }
  return g / kTwoPi;
}

Vec2 volume_potential_gradient_refined(const VolumeGrid& grid,
                                       const Eigen::VectorXd& f, const Vec2& x,
                                       int levels) {
  const double near = 3.0 * grid.h();
  const double near2 = near * near;
  Vec2 g = Vec2::Zero();
  for (int m = 0; m < grid.size(); ++m) {
    const Vec2 c = grid.lattice_center(m);
    if ((x - c).squaredNorm() > near2) {
      const Vec2 d = x - grid.center(m);
      g += f[m] * grid.cell_area(m) / d.squaredNorm() * d;
    } else {
      refined_cell_grad(grid, f, x, c, 0.5 * grid.h(), !grid.is_full_cell(m),
                        levels, g);
    }
  }
  return g / kTwoPi;
}

namespace {

double ray_integral_log(const Curve& curve, const ScalarSampler& f,
                        const Vec2& x, const Vec2& d, double L,
                        const PolarQuadOptions& opt) {
  // integral over [0,L] of ln(rho) rho f(x + rho d), panels graded into 0.
  const GaussRule& g = gauss_legendre(opt.gauss_points);
  const std::vector<double> edges = graded_edges_left(L, opt.radial_levels);
  double acc = 0.0;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (size_t q = 0; q < g.x.size(); ++q) {
      const double rho = mid + half * g.x[q];
      acc += half * g.w[q] * std::log(rho) * rho * f(x + rho * d);
    }
  }
  (void)curve;
  return acc;
}

}  // namespace

double newtonian_potential_analytic(const Curve& curve, const ScalarSampler& f,
                                    const Vec2& x, const Vec2* normal_hint,
                                    const PolarQuadOptions& opt) {
  const GaussRule& g = gauss_legendre(opt.gauss_points);
  double total = 0.0;
  if (normal_hint) {
    // Boundary target: rays span the inward half-plane; the chord length
    // vanishes at the tangential endpoints, hence the graded panels.
    const double theta = std::atan2(normal_hint->y(), normal_hint->x());
    const std::vector<double> edges =
        graded_edges(theta + 0.5 * kPi, theta + 1.5 * kPi, opt.angular_levels);
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p] + edges[p + 1]);
      const double half = 0.5 * (edges[p + 1] - edges[p]);
      for (size_t q = 0; q < g.x.size(); ++q) {
        const double alpha = mid + half * g.x[q];
        const Vec2 d(std::cos(alpha), std::sin(alpha));
        const double L = curve.ray_exit(x, d);
        if (L <= 0.0) continue;
        total += half * g.w[q] * ray_integral_log(curve, f, x, d, L, opt);
      }
    }
  } else {
    for (int p = 0; p < opt.interior_angular_panels; ++p) {
      const double a = kTwoPi * p / opt.interior_angular_panels;
      const double b = kTwoPi * (p + 1) / opt.interior_angular_panels;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (size_t q = 0; q < g.x.size(); ++q) {
        const double alpha = mid + half * g.x[q];
        const Vec2 d(std::cos(alpha), std::sin(alpha));
        const double L = curve.ray_exit(x, d);
        if (L <= 0.0) continue;
        total += half * g.w[q] * ray_integral_log(curve, f, x, d, L, opt);
      }
    }
  }
  return total / kTwoPi;
}

double newtonian_normal_derivative_analytic(const Curve& curve,
                                            const ScalarSampler& f,
                                            const Vec2& x, const Vec2& nu,
                                            const PolarQuadOptions& opt) {
  // d/dnu N_D[f](x) = -(1/2pi) int (d . nu) f(x + rho d) drho dalpha.
  const GaussRule& g = gauss_legendre(opt.gauss_points);
  const double theta = std::atan2(nu.y(), nu.x());
  const std::vector<double> edges =
      graded_edges(theta + 0.5 * kPi, theta + 1.5 * kPi, opt.angular_levels);
  double total = 0.0;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (size_t q = 0; q < g.x.size(); ++q) {
      const double alpha = mid + half * g.x[q];
      const Vec2 d(std::cos(alpha), std::sin(alpha));
      const double L = curve.ray_exit(x, d);
      if (L <= 0.0) continue;
      double inner = 0.0;  // integral of f along the ray, smooth integrand
      for (int pp = 0; pp < 4; ++pp) {
        const double ra = L * pp / 4.0, rb = L * (pp + 1) / 4.0;
        const double rmid = 0.5 * (ra + rb), rhalf = 0.5 * (rb - ra);
        for (size_t qq = 0; qq < g.x.size(); ++qq)
          inner += rhalf * g.w[qq] * f(x + (rmid + rhalf * g.x[qq]) * d);
      }
      total += half * g.w[q] * (-(d.dot(nu))) * inner;
    }
  }
  return total / kTwoPi;
}

PdeResidualReport pde_residual_check(const VolumeGrid& grid,
                                     const SourceField& f) {
  if (!f.has_analytic_sampler)
    throw ValidationError("pde_residual_check: needs an analytic sampler");
  const Curve& curve = grid.curve();
  const double h = grid.h();
  PdeResidualReport rep;

  auto laplacian = [&](const Vec2& x, double step) {
    const double c = volume_potential(grid, f.samples, x);
    const double e = volume_potential(grid, f.samples, x + Vec2(step, 0)) +
                     volume_potential(grid, f.samples, x - Vec2(step, 0)) +
                     volume_potential(grid, f.samples, x + Vec2(0, step)) +
                     volume_potential(grid, f.samples, x - Vec2(0, step));
    return (e - 4.0 * c) / (step * step);
  };

  // Interior probes: full cells at least 3.5h away from the boundary. The
  // stencil step is the grid width, so the values at the neighbor points
  // land on lattice nodes.
  const int stride = std::max(1, grid.size() / 120);
  for (int m = 0; m < grid.size(); m += stride) {
    if (!grid.is_full_cell(m)) continue;
    const Vec2 x = grid.center(m);
    if (curve.min_node_distance(x) < 3.5 * h) continue;
    rep.interior =
        std::max(rep.interior, std::abs(laplacian(x, h) - f.sampler(x)));
    ++rep.interior_points;
  }

  // Exterior probes on a ring one unit outside the circumradius. The true
  // Laplacian vanishes there and the field is smooth, so a quarter-width
  // stencil keeps the (d^4x + d^4y) truncation bias below the contract.
  const double rho = curve.circumradius() + 1.0;
  for (int j = 0; j < 16; ++j) {
    const double a = kTwoPi * j / 16;
    rep.exterior = std::max(
        rep.exterior,
        std::abs(laplacian(Vec2(rho * std::cos(a), rho * std::sin(a)), 0.25 * h)));
  }
  return rep;
}

}  // namespace photherm
