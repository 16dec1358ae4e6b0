// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/kernels.hpp"

#include <cmath>

namespace photherm {

namespace {
constexpr double kBranchCrossover = 8.0;
constexpr Complex kI{0.0, 1.0};
}  // namespace

void DrudeParams::validate() const {
  if (!(omega_p > 0.0)) throw ValidationError("DrudeParams: omega_p must be > 0");
  if (!(tau > 0.0)) throw ValidationError("DrudeParams: tau must be > 0");
}

Complex drude_eps(const DrudeParams& p, double omega) {
  if (!(omega > 0.0)) throw ValidationError("drude_eps: omega must be > 0");
  return 1.0 - p.omega_p * p.omega_p / (omega * (omega + kI * p.tau));
}

Complex drude_eps_expansion(const DrudeParams& p, double omega, int order) {
  if (!(omega > 0.0))
    throw ValidationError("drude_eps_expansion: omega must be > 0");
  if (order < 0 || order > 2)
    throw ValidationError("drude_eps_expansion: order must be in 0..2");
  const double wp2 = p.omega_p * p.omega_p;
  const double tau = p.tau;
  Complex eps = kI * wp2 / (tau * omega);
  eps += 1.0 - wp2 / (tau * tau);
  if (order >= 1) eps -= kI * omega * wp2 / (tau * tau * tau);
  if (order >= 2) eps += omega * omega * wp2 / (tau * tau * tau * tau);
  return eps;
}

namespace {

// Ascending series, adequate for 0 < x <= 8 (a few digits of alternating
// cancellation at the top of the range).
double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double y0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double h = 0.0;
  double sum = 0.0;
  for (int m = 1; m < 64; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    h += 1.0 / m;
    sum -= term * h;  // sum_{m>=1} (-1)^{m+1} H_m q^m/(m!)^2
    if (std::abs(term) * h < 1e-18 * (std::abs(sum) + 1.0)) break;
  }
  return (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * j0_series(x) + sum);
}

// H_0^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - pi/4)} sum_k i^k a_k / x^k with
// a_k/a_{k-1} = -(2k-1)^2/(8k); truncated at the smallest term.
Complex h0_asymptotic(double x) {
  Complex term{1.0, 0.0};
  Complex sum = term;
  double prev = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double ratio = -((2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
    term *= kI * ratio / x;
    const double mag = std::abs(term);
    if (mag > prev) break;  // asymptotic series started diverging
    sum += term;
    if (mag < 1e-17 * std::abs(sum)) break;
    prev = mag;
  }
  const Complex phase = std::exp(kI * (x - 0.25 * kPi));
  return std::sqrt(2.0 / (kPi * x)) * phase * sum;
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= kBranchCrossover) return j0_series(x);
  return h0_asymptotic(x).real();
}

double bessel_y0(double x) {
  if (!(x > 0.0)) throw ValidationError("bessel_y0: argument must be > 0");
  if (x <= kBranchCrossover) return y0_series(x);
  return h0_asymptotic(x).imag();
}

Complex hankel1_0(double x) {
  if (!(x > 0.0)) throw ValidationError("hankel1_0: argument must be > 0");
  if (x <= kBranchCrossover) return {j0_series(x), y0_series(x)};
  return h0_asymptotic(x);
}

double laplace_green(const Vec2& x, const Vec2& y) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw ValidationError("laplace_green: coincident points");
  return std::log(r) / kTwoPi;
}

Complex helmholtz_green(const Vec2& x, const Vec2& y, double k) {
  if (!(k > 0.0)) throw ValidationError("helmholtz_green: k must be > 0");
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw ValidationError("helmholtz_green: coincident points");
  return -0.25 * kI * hankel1_0(k * r);
}

ExpansionConstants ExpansionConstants::make(int J, double gamma_e) {
  if (J < 1) throw ValidationError("ExpansionConstants: J must be >= 1");
  ExpansionConstants ec;
  ec.gamma_e = gamma_e;
  ec.N = (gamma_e - std::log(2.0)) / kTwoPi;
  ec.order = J;
  double fact = 1.0;
  double harmonic = 0.0;
  for (int j = 1; j <= J; ++j) {
    fact *= j;
    harmonic += 1.0 / j;
    const double bj = ((j % 2 == 0) ? 1.0 : -1.0) /
                      (kTwoPi * std::pow(4.0, j) * fact * fact);
    const Complex base = gamma_e - std::log(2.0) - kI * (0.5 * kPi) - harmonic;
    ec.b.push_back(bj);
    ec.c.push_back(-bj * base);
    ec.s.push_back(bj * base);
  }
  return ec;
}

Complex green_low_freq_expansion(double r, double k,
                                 const ExpansionConstants& ec) {
  if (!(k > 0.0) || !(r > 0.0))
    throw ValidationError("green_low_freq_expansion: need k > 0, r > 0");
  const double kr = k * r;
  if (kr >= 1.0)
    throw ValidationError(
        "green_low_freq_expansion: series requires k|x-y| < 1");
  Complex val = std::log(r) / kTwoPi + ec.N + std::log(k) / kTwoPi - 0.25 * kI;
  const double log_kr = std::log(kr);
  double pw = 1.0;
  for (int j = 1; j <= ec.order; ++j) {
    pw *= kr * kr;
    val += (ec.b[j - 1] * log_kr + ec.s[j - 1]) * pw;
  }
  return val;
}

Complex green_low_freq_expansion(const Vec2& x, const Vec2& y, double k,
                                 int J) {
  const double r = (x - y).norm();
  static const ExpansionConstants cached = ExpansionConstants::make(8);
  if (J >= 1 && J <= cached.order) {
    ExpansionConstants ec = cached;
    ec.order = J;
    return green_low_freq_expansion(r, k, ec);
  }
  return green_low_freq_expansion(r, k, ExpansionConstants::make(J));
}

}  // namespace photherm
