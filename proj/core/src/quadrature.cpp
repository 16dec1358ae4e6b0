// Copyright (c) 2026 the photherm authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "photherm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "photherm/geometry.hpp"

namespace photherm {

namespace {

GaussRule compute_gauss(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.x[i] = x;
    rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw ValidationError("gauss_legendre: n in 1..64");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int points_per_panel) {
  const GaussRule& g = gauss_legendre(points_per_panel);
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    const double mid = 0.5 * (pa + pb);
    const double half = 0.5 * (pb - pa);
    for (size_t q = 0; q < g.x.size(); ++q)
      sum += half * g.w[q] * f(mid + half * g.x[q]);
  }
  return sum;
}

Complex integrate_complex(const std::function<Complex(double)>& f, double a,
                          double b, int panels, int points_per_panel) {
  const GaussRule& g = gauss_legendre(points_per_panel);
  Complex sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    const double mid = 0.5 * (pa + pb);
    const double half = 0.5 * (pb - pa);
    for (size_t q = 0; q < g.x.size(); ++q)
      sum += half * g.w[q] * f(mid + half * g.x[q]);
  }
  return sum;
}

std::vector<double> graded_edges(double a, double b, int levels) {
  const double mid = 0.5 * (a + b);
  std::vector<double> edges;
  for (int k = levels; k >= 0; --k) edges.push_back(a + (mid - a) * std::pow(2.0, -k));
  for (int k = 1; k <= levels; ++k) edges.push_back(b - (b - mid) * std::pow(2.0, -k));
  edges.push_back(b);
  edges.insert(edges.begin(), a);
  return edges;
}

std::vector<double> graded_edges_left(double L, int levels) {
  std::vector<double> edges;
  edges.push_back(0.0);
  for (int k = levels; k >= 0; --k) edges.push_back(L * std::pow(2.0, -k));
  return edges;
}

namespace {

template <typename Scalar, typename Fn>
Scalar domain_integral_impl(const Curve& curve, const Fn& f, int n_radial,
                            int n_angular) {
  const CurveSpec& spec = curve.spec();
  if (spec.kind == CurveKind::Kite)
    throw ValidationError("domain_integral: kite interiors are not supported");
  const double a = spec.a;
  const double b = (spec.kind == CurveKind::Circle) ? spec.a : spec.b;
  const GaussRule& g = gauss_legendre(std::min(n_radial, 64));
  const int rep = (n_radial + 63) / 64;  // composite panels if n_radial > 64
  Scalar sum{};
  for (int it = 0; it < n_angular; ++it) {
    const double theta = kTwoPi * it / n_angular;
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int p = 0; p < rep; ++p) {
      const double ra = static_cast<double>(p) / rep;
      const double rb = static_cast<double>(p + 1) / rep;
      const double mid = 0.5 * (ra + rb), half = 0.5 * (rb - ra);
      for (size_t q = 0; q < g.x.size(); ++q) {
        const double r = mid + half * g.x[q];
        const Vec2 z(a * r * ct, b * r * st);
        sum += half * g.w[q] * r * f(z);
      }
    }
  }
  return sum * (kTwoPi / n_angular) * (a * b);
}

}  // namespace

double domain_integral(const Curve& curve,
                       const std::function<double(const Vec2&)>& f,
                       int n_radial, int n_angular) {
  return domain_integral_impl<double>(curve, f, n_radial, n_angular);
}

Complex domain_integral_complex(const Curve& curve,
                                const std::function<Complex(const Vec2&)>& f,
                                int n_radial, int n_angular) {
  return domain_integral_impl<Complex>(curve, f, n_radial, n_angular);
}

}  // namespace photherm
