// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHOTHERM_KERNELS_HPP
#define PHOTHERM_KERNELS_HPP

#include <vector>

#include "photherm/types.hpp"

namespace photherm {

// Drude permittivity eps(w) = 1 - wp^2 / (w (w + i tau)).
struct DrudeParams {
  double omega_p = 1.0;  // plasma frequency, rad/time
  double tau = 1.0;      // damping, rad/time

  void validate() const;
};

Complex drude_eps(const DrudeParams& p, double omega);

// Low-frequency expansion of the Drude permittivity,
//   i wp^2/(tau w) + (1 - wp^2/tau^2) - i w wp^2/tau^3 + w^2 wp^2/tau^4,
// truncated after the term of the requested order in w (order in 0..2).
// The 1/w term is always kept; it is the leading term.
Complex drude_eps_expansion(const DrudeParams& p, double omega, int order = 2);

// Bessel/Hankel functions of order zero, real positive argument.
// Power series below the crossover argument 8, Hankel asymptotics above;
// the two branches are cross-validated in tests over the overlap window.
double bessel_j0(double x);
double bessel_y0(double x);
Complex hankel1_0(double x);

// Fundamental solution of the Laplacian, (1/2pi) ln|x-y|.
double laplace_green(const Vec2& x, const Vec2& y);

// Outgoing Helmholtz Green function -(i/4) H_0^(1)(k|x-y|).
Complex helmholtz_green(const Vec2& x, const Vec2& y, double k);

// Coefficients of the small-argument expansion
//   Phi(x-y,k) = Phi_0 + N + ln(k)/2pi - i/4
//                + sum_j (b_j ln(k r) + s_j) (k r)^{2j}.
// b_j = (-1)^j / (2pi 4^j (j!)^2).  Two constant conventions are kept:
// c_j = -b_j (gamma_e - ln2 - i pi/2 - H_j) as displayed in the literature,
// and s_j = -c_j, the sign that actually matches H_0^(1) (the series is
// validated against the exact Hankel evaluation; see kernel tests).
struct ExpansionConstants {
  double gamma_e = kEulerGamma;
  double N = 0.0;          // (gamma_e - ln 2) / 2pi
  int order = 2;           // J
  std::vector<double> b;   // b[j-1] = b_j
  std::vector<Complex> c;  // c[j-1] = c_j (displayed convention)
  std::vector<Complex> s;  // s[j-1] = -c_j (Hankel-validated series constant)

  static ExpansionConstants make(int J = 2, double gamma_e = kEulerGamma);
};

// Evaluates the expansion above; requires k|x-y| < 1.
Complex green_low_freq_expansion(const Vec2& x, const Vec2& y, double k,
                                 int J = 2);
Complex green_low_freq_expansion(double r, double k,
                                 const ExpansionConstants& ec);

}  // namespace photherm

#endif  // PHOTHERM_KERNELS_HPP
