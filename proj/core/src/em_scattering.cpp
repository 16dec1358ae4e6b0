// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/em_scattering.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace photherm {

namespace {

constexpr Complex kI{0.0, 1.0};

// Quadrature of the Helmholtz kernel at low frequency. The kernel is the
// J=2 truncation of the small-argument expansion; over the frequency range
// accepted here (k diam < 1) the truncation sits far below the solver
// tolerance, and the log part carries the exact singular-cell integral.
struct LowFreqKernel {
  const VolumeGrid* grid;
  double k;
  Complex c0;          // N + ln(k)/2pi - i/4
  double b1, b2;       // log-coefficients
  Complex d1, d2;      // b_j ln k + s_j
  Eigen::VectorXd self;  // per-cell singular log integral (area-weighted)

  LowFreqKernel(const VolumeGrid& g, double k_in) : grid(&g), k(k_in) {
    static const ExpansionConstants ec = ExpansionConstants::make(2);
    c0 = ec.N + std::log(k) / kTwoPi - 0.25 * kI;
    b1 = ec.b[0];
    b2 = ec.b[1];
    d1 = ec.b[0] * std::log(k) + ec.s[0];
    d2 = ec.b[1] * std::log(k) + ec.s[1];
    const double h = g.h(), hh = 0.5 * h;
    self.resize(g.size());
    for (int m = 0; m < g.size(); ++m) {
      const Vec2 rel = g.lattice_center(m) - g.center(m);
      double v = log_rectangle_integral(rel.x() - hh, rel.x() + hh,
                                        rel.y() - hh, rel.y() + hh);
      if (!g.is_full_cell(m)) v *= g.cell_area(m) / (h * h);
      self[m] = v / kTwoPi;
    }
  }

  // y = G[u], the kernel quadrature applied to nodal values.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const {
    const int M = grid->size();
    Eigen::VectorXcd aw(M);
    for (int m = 0; m < M; ++m) aw[m] = grid->cell_area(m) * u[m];
    const Complex t_total = aw.sum();
    Eigen::VectorXcd y(M);
    const double k2 = k * k, k4 = k2 * k2;

    auto rows = [&](int begin, int end) {
      for (int m = begin; m < end; ++m) {
        const Vec2 xm = grid->center(m);
        Complex acc_log{};   // sum ln(r) a u
        Complex acc_2l{};    // sum r^2 ln(r) a u
        Complex acc_4l{};    // sum r^4 ln(r) a u
        Complex acc_2{};     // sum r^2 a u
        Complex acc_4{};     // sum r^4 a u
        for (int l = 0; l < M; ++l) {
          if (l == m) continue;
          const double dx = xm.x() - grid->center(l).x();
          const double dy = xm.y() - grid->center(l).y();
          const double r2 = dx * dx + dy * dy;
          const double lg = 0.5 * std::log(r2);
          const Complex w = aw[l];
          const Complex wl = lg * w;
          acc_log += wl;
          acc_2l += r2 * wl;
          acc_4l += (r2 * r2) * wl;
          acc_2 += r2 * w;
          acc_4 += (r2 * r2) * w;
        }
        // Self cell: log part through the exact rectangle integral; its
        // constant part c0 * a_m is already inside t_total.
        y[m] = acc_log / kTwoPi + c0 * t_total +
               k2 * (b1 * acc_2l + d1 * acc_2) +
               k4 * (b2 * acc_4l + d2 * acc_4) + self[m] * u[m];
      }
    };

    const int n_threads = std::min(max_threads(), 8);
    if (n_threads <= 1 || M < 512) {
      rows(0, M);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(rows, M * t / n_threads, M * (t + 1) / n_threads);
      for (auto& th : pool) th.join();
    }
    return y;
  }

  // Kernel quadrature evaluated at an arbitrary point.
  Complex eval_at(const Vec2& x, const Eigen::VectorXcd& u) const {
    const int M = grid->size();
    const int own = grid->cell_at(x);
    Complex acc{};
    const double k2 = k * k, k4 = k2 * k2;
    for (int l = 0; l < M; ++l) {
      if (l == own) continue;
      const double r2 = (x - grid->center(l)).squaredNorm();
      const double lg = 0.5 * std::log(r2);
      const Complex w = grid->cell_area(l) * u[l];
      acc += (lg / kTwoPi + c0 + k2 * (b1 * lg + d1) * r2 +
              k4 * (b2 * lg + d2) * (r2 * r2)) *
             w;
    }
    if (own >= 0) {
      const double h = grid->h(), hh = 0.5 * h;
      const Vec2 rel = grid->lattice_center(own) - x;
      double v = log_rectangle_integral(rel.x() - hh, rel.x() + hh,
                                        rel.y() - hh, rel.y() + hh);
      if (!grid->is_full_cell(own)) v *= grid->cell_area(own) / (h * h);
      acc += (v / kTwoPi + c0 * grid->cell_area(own)) * u[own];
    }
    return acc;
  }
};

}  // namespace

Complex ComplexField::eval(const Vec2& x) const {
  if (provenance == FieldProvenance::Asymptotic) {
    static const ExpansionConstants ec = ExpansionConstants::make(2);
    const double w = omega, lw = std::log(omega);
    const double ndx = volume_potential(*grid, f_samples, x);
    return -w * lw * (kI / kTwoPi) * t1 -
           w * ((0.25 + kI * ec.N) * t1 + kI * ndx) -
           w * w * lw * lw *
               (drude.omega_p * drude.omega_p / (4.0 * kPi * kPi * drude.tau)) *
               area_d * t1;
  }
  LowFreqKernel kernel(*grid, omega);
  const Complex contrast = omega * omega * (1.0 - drude_eps(drude, omega));
  Eigen::VectorXcd fc = f_samples.cast<Complex>();
  return contrast * kernel.eval_at(x, values) -
         kI * omega * kernel.eval_at(x, fc);
}

ComplexField solve_lippmann_schwinger(const VolumeGrid& grid,
                                      const SourceField& f, double omega,
                                      const DrudeParams& drude,
                                      const LsOptions& opt) {
  if (!(omega > 0.0))
    throw ValidationError("solve_lippmann_schwinger: omega must be > 0");
  drude.validate();
  const double k = omega;  // background eps_m = 1
  const double diam = 2.0 * grid.curve().circumradius();
  if (k * diam >= 1.0)
    throw ValidationError(
        "solve_lippmann_schwinger: k diam >= 1 is outside the low-frequency "
        "kernel range");

  LowFreqKernel kernel(grid, k);
  const Complex contrast = omega * omega * (1.0 - drude_eps(drude, omega));

  ComplexField field;
  field.grid = &grid;
  field.omega = omega;
  field.provenance = FieldProvenance::FullSolve;
  field.drude = drude;
  field.f_samples = f.samples;

  const Eigen::VectorXcd b =
      -kI * omega * kernel.apply(f.samples.cast<Complex>());
  const double bnorm = b.cwiseAbs().maxCoeff();
  if (bnorm == 0.0) {
    field.values = Eigen::VectorXcd::Zero(grid.size());
    return field;
  }

  Eigen::VectorXcd u = b;
  double resid = std::numeric_limits<double>::max();
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::VectorXcd next = b + contrast * kernel.apply(u);
    resid = (next - u).cwiseAbs().maxCoeff() / bnorm;
    u.swap(next);
    if (resid <= opt.tol) break;
  }
  if (resid > opt.tol) {
    if (grid.size() <= opt.dense_fallback_limit) {
      // Assemble I - contrast * G densely and factorize.
      const int M = grid.size();
      Eigen::MatrixXcd A(M, M);
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(M);
      for (int col = 0; col < M; ++col) {
        e[col] = 1.0;
        A.col(col) = -contrast * kernel.apply(e);
        e[col] = 0.0;
        A(col, col) += 1.0;
      }
      u = A.partialPivLu().solve(b);
      resid = (b + contrast * kernel.apply(u) - u).cwiseAbs().maxCoeff() / bnorm;
    }
    if (resid > opt.tol)
      throw NumericalError(
          "solve_lippmann_schwinger: no convergence after " +
          std::to_string(it) + " iterations, residual " + std::to_string(resid));
  }
  field.values = std::move(u);
  field.residual = resid;
  field.iterations = it + 1;
  return field;
}

ComplexField asymptotic_field(const VolumeGrid& grid, const SourceField& f,
                              const Eigen::VectorXd& newtonian, double omega,
                              const DrudeParams& drude) {
  if (!(omega > 0.0) || omega > 0.1)
    throw ValidationError("asymptotic_field: requires 0 < omega <= 0.1");
  drude.validate();
  static const ExpansionConstants ec = ExpansionConstants::make(2);
  ComplexField field;
  field.grid = &grid;
  field.omega = omega;
  field.provenance = FieldProvenance::Asymptotic;
  field.drude = drude;
  field.f_samples = f.samples;
  field.w_samples = newtonian;
  field.t1 = total_mass(grid, f.samples);
  field.area_d = grid.total_area();

  const double w = omega, lw = std::log(omega);
  const Complex lead = -w * lw * (kI / kTwoPi) * field.t1;
  const Complex quad =
      -w * w * lw * lw *
      (drude.omega_p * drude.omega_p / (4.0 * kPi * kPi * drude.tau)) *
      field.area_d * field.t1;
  field.values.resize(grid.size());
  for (int m = 0; m < grid.size(); ++m)
    field.values[m] = lead -
                      w * ((0.25 + kI * ec.N) * field.t1 + kI * newtonian[m]) +
                      quad;
  return field;
}

ComplexField asymptotic_field(const VolumeGrid& grid, const SourceField& f,
                              double omega, const DrudeParams& drude) {
  return asymptotic_field(grid, f, newtonian_on_grid(grid, f.samples), omega,
                          drude);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> field_parts(
    const ComplexField& field) {
  if (field.provenance != FieldProvenance::Asymptotic)
    throw ValidationError("field_parts: requires an asymptotic field");
  return {field.values.real(), field.values.imag()};
}

Eigen::VectorXcd apply_T_omega(const VolumeGrid& grid,
                               const Eigen::VectorXcd& u, double omega,
                               const DrudeParams& drude) {
  if (!(omega > 0.0) || omega > 0.1)
    throw ValidationError("apply_T_omega: requires 0 < omega <= 0.1");
  static const ExpansionConstants ec = ExpansionConstants::make(2);
  const double w = omega, lw = std::log(omega);
  const double wp2_tau = drude.omega_p * drude.omega_p / drude.tau;
  const Complex t1u = total_mass(grid, u);
  const Eigen::VectorXcd ndu = newtonian_on_grid(grid, u);
  Eigen::VectorXcd out(grid.size());
  const Complex c_lead = w * lw * (kI * wp2_tau / kTwoPi) * t1u;
  const Complex c_t1 = w * (kI * wp2_tau) * (ec.N - 0.25 * kI) * t1u;
  for (int m = 0; m < grid.size(); ++m)
    out[m] = c_lead + w * (kI * wp2_tau) * ndu[m] + c_t1;
  return out;
}

RemainderSlopeReport remainder_slope(const SourceField& f,
                                     const VolumeGrid& grid,
                                     const DrudeParams& drude,
                                     std::span<const double> omegas,
                                     const LsOptions& opt) {
  if (omegas.size() < 2)
    throw ValidationError("remainder_slope: need at least 2 frequencies");
  const Eigen::VectorXd w_grid = newtonian_on_grid(grid, f.samples);
  RemainderSlopeReport rep;
  for (double omega : omegas) {
    const ComplexField full = solve_lippmann_schwinger(grid, f, omega, drude, opt);
    const ComplexField asym = asymptotic_field(grid, f, w_grid, omega, drude);
    rep.omegas.push_back(omega);
    rep.remainders.push_back(
        (full.values - asym.values).cwiseAbs().maxCoeff());
  }
  double scale = 0.0;
  for (double r : rep.remainders) scale = std::max(scale, r);
  if (scale < 1e-300)
    throw NumericalError("remainder_slope: remainder identically zero, slope undefined");

  // least-squares slope of log r against log w
  const size_t n = rep.omegas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(rep.omegas[i]);
    const double y = std::log(rep.remainders[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.regression = !(rep.slope >= 1.5 && rep.slope <= 2.5);
  return rep;
}

}  // namespace photherm
