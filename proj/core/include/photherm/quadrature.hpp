// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_QUADRATURE_HPP
#define PHOTHERM_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "photherm/types.hpp"

namespace photherm {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes by Newton iteration on the Legendre polynomial; n in 1..64.
const GaussRule& gauss_legendre(int n);

// Composite Gauss integration of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 8, int points_per_panel = 12);
Complex integrate_complex(const std::function<Complex(double)>& f, double a,
                          double b, int panels = 8, int points_per_panel = 12);

// Panel edges of [a, b] graded dyadically toward both endpoints.
std::vector<double> graded_edges(double a, double b, int levels);

// Panel edges of [0, L] graded dyadically toward 0.
std::vector<double> graded_edges_left(double L, int levels);

class Curve;

// High-order quadrature of a smooth integrand over the interior of a
// circle or ellipse: Gauss in the radial direction, trapezoid in angle.
// Spectrally accurate for analytic integrands; throws for kite curves.
double domain_integral(const Curve& curve,
                       const std::function<double(const Vec2&)>& f,
                       int n_radial = 96, int n_angular = 256);
Complex domain_integral_complex(const Curve& curve,
                                const std::function<Complex(const Vec2&)>& f,
                                int n_radial = 96, int n_angular = 256);

}  // namespace photherm

#endif  // PHOTHERM_QUADRATURE_HPP
